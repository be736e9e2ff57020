#include "ara/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "ara/error.hpp"

namespace ara::config {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key '" + where + "." + key + "'");
    }
}

double number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError(name + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(name + " must be finite");
    return x;
}

int integer(const json& v, const std::string& name) {
    if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
    const auto x = v.get<long long>();
    if (x < -1'000'000'000LL || x > 1'000'000'000LL) throw ConfigError(name + " is out of range");
    return static_cast<int>(x);
}

bool boolean(const json& v, const std::string& name) {
    if (!v.is_boolean()) throw ConfigError(name + " must be true or false");
    return v.get<bool>();
}

std::string text(const json& v, const std::string& name) {
    if (!v.is_string()) throw ConfigError(name + " must be a string");
    return v.get<std::string>();
}

// A number, a list of numbers, or {"from": a, "to": b, "count": n} with both ends included.
std::vector<double> sweep(const json& v, const std::string& name) {
    if (v.is_number()) return {number(v, name)};
    if (v.is_array()) {
        if (v.empty()) throw ConfigError(name + " must not be empty");
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k)
            out.push_back(number(v[k], name + "[" + std::to_string(k) + "]"));
        return out;
    }
    if (v.is_object()) {
        reject_unknown(v, name, {"from", "to", "count"});
        if (!v.contains("from") || !v.contains("to") || !v.contains("count"))
            throw ConfigError(name + " range needs from, to and count");
        const int count = integer(v["count"], name + ".count");
        if (count < 1) throw ConfigError(name + ".count must be >= 1");
        return phasemap::linspace(number(v["from"], name + ".from"), number(v["to"], name + ".to"),
                                  count);
    }
    throw ConfigError(name + " must be a number, a list or a {from, to, count} range");
}

json sweep_to_json(const std::vector<double>& values) {
    if (values.size() == 1) return values.front();
    return json(values);
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ConfigError("output.format must be csv or json, got '" + s + "'");
}

spin::Integrator parse_integrator(const std::string& s) {
    if (s == "exact") return spin::Integrator::Exact;
    if (s == "rk4") return spin::Integrator::RK4;
    throw ConfigError("protocol.integrator must be exact or rk4, got '" + s + "'");
}

void read_model(const json& j, RunConfig& c) {
    reject_unknown(j, "model", {"p"});
    if (j.contains("p")) c.model.p = integer(j["p"], "model.p");
}

void read_bath(const json& j, RunConfig& c) {
    reject_unknown(j, "bath", {"eta", "omega_c", "temperature", "lamb_shift"});
    if (j.contains("eta")) c.bath.eta = number(j["eta"], "bath.eta");
    if (j.contains("omega_c")) c.bath.omega_c = number(j["omega_c"], "bath.omega_c");
    if (j.contains("temperature")) c.temperatures = sweep(j["temperature"], "bath.temperature");
    if (j.contains("lamb_shift"))
        c.bath.lamb_shift_enabled = boolean(j["lamb_shift"], "bath.lamb_shift");
}

void read_protocol(const json& j, RunConfig& c) {
    reject_unknown(j, "protocol",
                   {"path", "tau", "tau_eta", "dt", "integrator", "rk4_substeps"});
    if (j.contains("tau") && j.contains("tau_eta"))
        throw ConfigError("protocol.tau and protocol.tau_eta are mutually exclusive");
    if (j.contains("tau")) c.tau = {sweep(j["tau"], "protocol.tau"), false};
    if (j.contains("tau_eta")) c.tau = {sweep(j["tau_eta"], "protocol.tau_eta"), true};
    if (j.contains("dt")) c.dt = number(j["dt"], "protocol.dt");
    if (j.contains("integrator"))
        c.step.integrator = parse_integrator(text(j["integrator"], "protocol.integrator"));
    if (j.contains("rk4_substeps"))
        c.step.rk4_substeps = integer(j["rk4_substeps"], "protocol.rk4_substeps");
    if (j.contains("path")) {
        const json& p = j["path"];
        if (!p.is_array()) throw ConfigError("protocol.path must be a list of control points");
        c.path.clear();
        for (std::size_t k = 0; k < p.size(); ++k) {
            const std::string name = "protocol.path[" + std::to_string(k) + "]";
            reject_unknown(p[k], name, {"u", "s", "lambda"});
            if (!p[k].contains("u") || !p[k].contains("s") || !p[k].contains("lambda"))
                throw ConfigError(name + " needs u, s and lambda");
            c.path.push_back({number(p[k]["u"], name + ".u"), number(p[k]["s"], name + ".s"),
                              number(p[k]["lambda"], name + ".lambda")});
        }
    }
}

void read_guess(const json& j, RunConfig& c) {
    reject_unknown(j, "guess", {"c"});
    if (j.contains("c")) c.c_values = sweep(j["c"], "guess.c");
}

void read_equilibrium(const json& j, RunConfig& c) {
    reject_unknown(j, "equilibrium", {"samples"});
    if (j.contains("samples"))
        c.equilibrium_samples = integer(j["samples"], "equilibrium.samples");
}

void read_scan(const json& j, RunConfig& c) {
    reject_unknown(j, "scan", {"grid", "threshold", "tc_tolerance", "coarse_samples"});
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.is_string()) {
            c.scan.grid = parse_grid(g.get<std::string>());
        } else if (g.is_array() && g.size() == 2) {
            c.scan.grid = {integer(g[0], "scan.grid[0]"), integer(g[1], "scan.grid[1]")};
        } else {
            throw ConfigError("scan.grid must be [n_s, n_lambda] or \"NxM\"");
        }
    }
    if (j.contains("threshold")) c.scan.threshold = number(j["threshold"], "scan.threshold");
    if (j.contains("tc_tolerance"))
        c.scan.tc_tolerance = number(j["tc_tolerance"], "scan.tc_tolerance");
    if (j.contains("coarse_samples"))
        c.scan.coarse_samples = integer(j["coarse_samples"], "scan.coarse_samples");
}

void read_output(const json& j, RunConfig& c) {
    reject_unknown(j, "output", {"path", "format", "precision", "stride"});
    if (j.contains("path")) c.output.path = text(j["path"], "output.path");
    if (j.contains("format")) c.output.format = parse_format(text(j["format"], "output.format"));
    if (j.contains("precision")) c.output.precision = integer(j["precision"], "output.precision");
    if (j.contains("stride")) c.output.stride = integer(j["stride"], "output.stride");
}

}  // namespace

double TauSpec::resolve(double value, const bath::BathSpec& bath) const {
    if (!eta_units) return value;
    if (!(bath.eta > 0.0)) throw ConfigError("protocol.tau_eta needs bath.eta > 0");
    return value / bath.eta;
}

void RunConfig::validate() const {
    model.validate();
    for (double t : temperatures) bath_at(t).validate();
    for (double c : c_values) meanfield::InitialGuess{c}.validate();
    for (double v : tau.values) protocol_at(tau.resolve(v, bath)).validate();
    if (step.rk4_substeps < 1) throw ConfigError("protocol.rk4_substeps must be >= 1");
    if (equilibrium_samples < 2) throw ConfigError("equilibrium.samples must be >= 2");
    scan.grid.validate();
    if (!(scan.threshold > 0.0)) throw ConfigError("scan.threshold must be > 0");
    if (!(scan.tc_tolerance > 0.0)) throw ConfigError("scan.tc_tolerance must be > 0");
    if (scan.coarse_samples < 2) throw ConfigError("scan.coarse_samples must be >= 2");
    if (output.path.empty()) throw ConfigError("output.path must not be empty");
    if (output.precision < 1 || output.precision > 17)
        throw ConfigError("output.precision must lie in [1, 17]");
    if (output.stride < 1) throw ConfigError("output.stride must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

bath::BathSpec RunConfig::bath_at(double temperature) const {
    bath::BathSpec b = bath;
    b.temperature = temperature;
    return b;
}

meanfield::Protocol RunConfig::protocol_at(double tau_value) const {
    meanfield::Protocol p;
    p.path = path;
    p.tau = tau_value;
    p.dt = dt;
    return p;
}

phasemap::ScanOptions RunConfig::scan_options() const {
    phasemap::ScanOptions o;
    o.threads = threads;
    o.threshold = scan.threshold;
    return o;
}

RunConfig parse(const std::string& source) {
    json j;
    try {
        j = json::parse(source);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j, "config",
                   {"model", "bath", "protocol", "guess", "equilibrium", "scan", "output",
                    "threads"});
    RunConfig c;
    if (j.contains("model")) read_model(j["model"], c);
    if (j.contains("bath")) read_bath(j["bath"], c);
    if (j.contains("protocol")) read_protocol(j["protocol"], c);
    if (j.contains("guess")) read_guess(j["guess"], c);
    if (j.contains("equilibrium")) read_equilibrium(j["equilibrium"], c);
    if (j.contains("scan")) read_scan(j["scan"], c);
    if (j.contains("output")) read_output(j["output"], c);
    if (j.contains("threads")) c.threads = integer(j["threads"], "threads");
    c.validate();
    return c;
}

RunConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string to_json(const RunConfig& c) {
    json j;
    j["model"] = {{"p", c.model.p}};
    j["bath"] = {{"eta", c.bath.eta},
                 {"omega_c", c.bath.omega_c},
                 {"temperature", sweep_to_json(c.temperatures)},
                 {"lamb_shift", c.bath.lamb_shift_enabled}};
    json path = json::array();
    for (const auto& cp : c.path) path.push_back({{"u", cp.u}, {"s", cp.s}, {"lambda", cp.lambda}});
    j["protocol"] = {{"path", path},
                     {c.tau.eta_units ? "tau_eta" : "tau", sweep_to_json(c.tau.values)},
                     {"dt", c.dt},
                     {"integrator", c.step.integrator == spin::Integrator::Exact ? "exact" : "rk4"},
                     {"rk4_substeps", c.step.rk4_substeps}};
    j["guess"] = {{"c", sweep_to_json(c.c_values)}};
    j["equilibrium"] = {{"samples", c.equilibrium_samples}};
    j["scan"] = {{"grid", {c.scan.grid.n_s, c.scan.grid.n_lambda}},
                 {"threshold", c.scan.threshold},
                 {"tc_tolerance", c.scan.tc_tolerance},
                 {"coarse_samples", c.scan.coarse_samples}};
    j["output"] = {{"path", c.output.path},
                   {"format", to_string(c.output.format)},
                   {"precision", c.output.precision},
                   {"stride", c.output.stride}};
    return j.dump(2) + "\n";
}

phasemap::Resolution parse_grid(const std::string& s) {
    const auto x = s.find_first_of("xX");
    auto parse_int = [&s](const std::string& part) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos ||
            part.size() > 7)
            throw ConfigError("grid must look like NxM, got '" + s + "'");
        return std::stoi(part);
    };
    if (x == std::string::npos) throw ConfigError("grid must look like NxM, got '" + s + "'");
    phasemap::Resolution r{parse_int(s.substr(0, x)), parse_int(s.substr(x + 1))};
    r.validate();
    return r;
}

std::string to_string(Format format) { return format == Format::Csv ? "csv" : "json"; }

}  // namespace ara::config
