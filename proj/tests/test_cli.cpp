#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ara/commands.hpp"
#include "ara/config.hpp"
#include "ara/emit.hpp"
#include "ara/error.hpp"

namespace fs = std::filesystem;
using ara::config::Format;
using ara::config::parse;
using ara::emit::PendingFile;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ara_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(ARA_BINARY) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const PendingFile& find(const std::vector<PendingFile>& files, const std::string& path) {
    for (const auto& f : files)
        if (f.path == path) return f;
    FAIL("missing output " << path);
    return files.front();
}

nlohmann::json rows(const std::string& text) { return nlohmann::json::parse(text); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("empty config takes the defaults") {
    const auto c = parse("{}");
    CHECK(c.model.p == 3);
    CHECK(c.bath.eta == 1e-3);
    CHECK(c.temperatures == std::vector<double>{0.0});
    CHECK(c.c_values == std::vector<double>{0.9});
    CHECK(c.dt == 0.1);
    CHECK(c.output.precision == 17);
    CHECK(c.output.format == Format::Csv);
    CHECK(c.scan.grid.n_s == 201);
    CHECK(c.scan.threshold == 0.05);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("bad configs are rejected") {
    CHECK_THROWS_AS(parse("{\"bath\": {\"etaa\": 1}}"), ara::ConfigError);
    CHECK_THROWS_AS(parse("{\"colour\": 1}"), ara::ConfigError);
    CHECK_THROWS_AS(parse("{\"bath\": {\"eta\": \"x\"}}"), ara::ConfigError);
    CHECK_THROWS_AS(parse("{\"protocol\": {\"tau\": 1, \"tau_eta\": 1}}"), ara::ConfigError);
    CHECK_THROWS_AS(parse("{\"output\": {\"format\": \"xml\"}}"), ara::ConfigError);
    CHECK_THROWS_AS(parse("{\"guess\": {\"c\": []}}"), ara::ConfigError);
    CHECK_THROWS_AS(parse("not json"), ara::ConfigError);
    CHECK_THROWS_AS(parse("{\"scan\": {\"grid\": \"20by20\"}}"), ara::ConfigError);
    try {
        parse("{\"bath\": {\"etaa\": 1}}");
    } catch (const ara::ConfigError& e) {
        CHECK(std::string(e.what()).find("bath.etaa") != std::string::npos);
    }
    auto c = parse("{}");
    c.c_values = {1.5};
    CHECK_THROWS_AS(c.validate(), ara::ConfigError);
    CHECK_THROWS_AS(ara::config::load("/nonexistent/ara.json"), ara::ConfigError);
}

TEST_CASE("sweep forms") {
    const auto c = parse(R"({"bath": {"temperature": {"from": 0, "to": 2, "count": 5}},
                             "guess": {"c": [0.7, 0.9]},
                             "protocol": {"tau_eta": 3}})");
    CHECK(c.temperatures == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    CHECK(c.c_values == std::vector<double>{0.7, 0.9});
    CHECK(c.tau.eta_units);
    CHECK(c.tau.resolve(3.0, c.bath_at(0.4)) == doctest::Approx(3000.0));
    const auto d = parse(R"({"protocol": {"tau": 12.5}})");
    CHECK(!d.tau.eta_units);
    CHECK(d.tau.resolve(12.5, d.bath_at(0.4)) == 12.5);
}

TEST_CASE("config JSON round trip") {
    auto c = parse(R"({"model": {"p": 5}, "bath": {"eta": 0.002, "temperature": [0.1, 0.3],
                       "lamb_shift": false},
                       "protocol": {"path": [{"u": 0, "s": 0, "lambda": 0},
                                             {"u": 0.5, "s": 0.9, "lambda": 0.1},
                                             {"u": 1, "s": 1, "lambda": 1}],
                                    "tau": 7, "dt": 0.05, "integrator": "rk4", "rk4_substeps": 3},
                       "scan": {"grid": "31x41", "threshold": 0.1},
                       "output": {"path": "x/y", "format": "json", "stride": 4},
                       "threads": 3})");
    const auto text = ara::config::to_json(c);
    const auto back = parse(text);
    CHECK(ara::config::to_json(back) == text);
    CHECK(back.threads == 1);
    CHECK(back.model.p == 5);
    CHECK(back.scan.grid.n_s == 31);
    CHECK(back.scan.grid.n_lambda == 41);
    CHECK(!back.bath.lamb_shift_enabled);
    CHECK(back.path.size() == 3);
    CHECK(back.step.integrator == ara::spin::Integrator::RK4);
    CHECK(back.output.format == Format::Json);
}

TEST_CASE("checked-in configs are valid") {
    int n = 0;
    for (const auto& e : fs::directory_iterator(ARA_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        INFO(e.path());
        CHECK_NOTHROW(ara::config::load(e.path().string()).validate());
        ++n;
    }
    CHECK(n >= 6);
    const auto ct = ara::config::load(std::string(ARA_CONFIG_DIR) + "/ct_map.json");
    CHECK(ct.c_values.size() == 61);
    CHECK(ct.temperatures.size() == 40);
}

TEST_CASE("grid strings") {
    const auto r = ara::config::parse_grid("201x101");
    CHECK(r.n_s == 201);
    CHECK(r.n_lambda == 101);
    CHECK_THROWS_AS(ara::config::parse_grid("201"), ara::ConfigError);
    CHECK_THROWS_AS(ara::config::parse_grid("1x5"), ara::ConfigError);
    CHECK_THROWS_AS(ara::config::parse_grid("ax5"), ara::ConfigError);
}

TEST_CASE("number formatting") {
    using ara::emit::format_number;
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5) == "-2.5");
    CHECK(format_number(1e-20) == "9.9999999999999995e-21");
    CHECK(format_number(0.1, 6) == "0.1");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    // 17 digits round-trip exactly.
    const double x = 0.7234987123498713;
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("rendering") {
    ara::emit::Table t;
    t.columns = {"a", "b", "label"};
    t.rows = {{0.5, 3LL, std::string("no_paths")}, {1.0, -1LL, std::string("q\"x")}};
    CHECK(ara::emit::render(t, Format::Csv) == "a,b,label\n0.5,3,no_paths\n1,-1,\"q\"\"x\"\n");
    const auto j = rows(ara::emit::render(t, Format::Json));
    REQUIRE(j.size() == 2);
    CHECK(j[0]["a"] == 0.5);
    CHECK(j[0]["b"] == 3);
    CHECK(j[1]["label"] == "q\"x");
    CHECK(ara::emit::quote("a\nb") == "\"a\\nb\"");
}

TEST_CASE("output paths") {
    using namespace ara::emit;
    CHECK(strip_extension("out/run.csv") == "out/run");
    CHECK(strip_extension("out/run.json") == "out/run");
    CHECK(strip_extension("out/run") == "out/run");
    CHECK(output_path("out/run.csv", "_grid", Format::Json) == "out/run_grid.json");
    CHECK(sidecar_path("out/run.csv") == "out/run.csv.config.json");
}

TEST_CASE("trajectory command") {
    auto c = parse(R"({"bath": {"temperature": 0.4}, "protocol": {"tau": 2, "dt": 0.1},
                       "output": {"path": "traj"}})");
    const auto files = ara::commands::trajectory(c);
    REQUIRE(files.size() == 2);
    CHECK(files[0].path == "traj.csv");
    CHECK(files[1].path == "traj.csv.config.json");
    std::istringstream in(files[0].content);
    std::string line;
    int n = 0;
    std::getline(in, line);
    CHECK(line == "t,s,lambda,h,m,zu,zd,xu,xd,yu,yd");
    while (std::getline(in, line)) ++n;
    CHECK(n == 21);

    // A single step of length tau.
    c.dt = 2.0;
    const auto one = ara::commands::trajectory(c);
    CHECK(std::count(one[0].content.begin(), one[0].content.end(), '\n') == 3);

    // Stride thinning keeps the last row.
    c.dt = 0.1;
    c.output.stride = 3;
    const auto thin = ara::commands::trajectory(c);
    CHECK(std::count(thin[0].content.begin(), thin[0].content.end(), '\n') == 1 + 7 + 1);
    CHECK(thin[0].content.find("\n2,1,1,") != std::string::npos);
}

TEST_CASE("outputs do not depend on the thread count") {
    auto c = parse(R"({"bath": {"temperature": [0.4, 1.57]}, "guess": {"c": [0.8, 0.9]},
                       "protocol": {"tau": 3}, "output": {"path": "d"}})");
    const auto a = ara::commands::trajectory(c);
    c.threads = 3;
    const auto b = ara::commands::trajectory(c);
    REQUIRE(a.size() == 8);
    REQUIRE(b.size() == 8);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].path == b[k].path);
        CHECK(a[k].content == b[k].content);
    }
    CHECK(a[0].path == "d_c0.8_T0.4.csv");
    CHECK(a[6].path == "d_c0.9_T1.57.csv");
}

TEST_CASE("the sidecar reproduces its data file") {
    const auto c = parse(R"({"bath": {"temperature": [0.4, 1.0]}, "protocol": {"tau_eta": [0.002, 0.004]},
                             "output": {"path": "s.csv", "format": "json"}})");
    const auto files = ara::commands::trajectory(c);
    REQUIRE(files.size() == 8);
    CHECK(files[0].path == "s_T0.4_taueta0.002.json");
    for (std::size_t k = 0; k < files.size(); k += 2) {
        const auto again = ara::commands::trajectory(parse(files[k + 1].content));
        REQUIRE(again.size() == 2);
        CHECK(again[0].path == files[k].path);
        CHECK(again[0].content == files[k].content);
    }
}

TEST_CASE("equilibrium command along the path") {
    auto c = parse(R"({"bath": {"temperature": [0.4, 1.4, 1.57]}, "equilibrium": {"samples": 401},
                       "output": {"path": "eq", "format": "json"}})");
    const auto files = ara::commands::equilibrium(c);
    REQUIRE(files.size() == 6);
    auto jumps = [](const std::string& text, double& last) {
        const auto j = rows(text);
        int count = 0;
        for (std::size_t k = 1; k < j.size(); ++k)
            if (std::abs(j[k]["m_eq"].get<double>() - j[k - 1]["m_eq"].get<double>()) > 0.05) ++count;
        last = j.back()["m_eq"].get<double>();
        CHECK(j.front()["m_eq"].get<double>() > 0.0);
        return count;
    };
    double last = 0.0;
    CHECK(jumps(find(files, "eq_T0.4.json").content, last) == 0);
    CHECK(last > 0.9);
    CHECK(jumps(find(files, "eq_T1.4.json").content, last) == 1);
    CHECK(last > 0.5);
    jumps(find(files, "eq_T1.57.json").content, last);
    CHECK(last == 0.0);
}

TEST_CASE("phase diagram, c-T map and critical temperatures") {
    auto c = parse(R"({"bath": {"temperature": 1.57}, "scan": {"grid": "21x21"},
                       "output": {"path": "pd"}})");
    const auto pd = ara::commands::phasediagram(c);
    REQUIRE(pd.size() == 4);
    const auto& grid = find(pd, "pd_grid.csv");
    CHECK(std::count(grid.content.begin(), grid.content.end(), '\n') == 1 + 21 * 21);
    CHECK(find(pd, "pd_boundary.csv").content == "s_a,lambda_a,s_b,lambda_b\n");

    c = parse(R"({"bath": {"temperature": [0.4, 1.8]}, "guess": {"c": [0.5, 0.9]},
                  "scan": {"grid": "31x31"}, "output": {"path": "ct"}})");
    const auto ct = ara::commands::ctmap(c);
    REQUIRE(ct.size() == 2);
    CHECK(ct[0].content ==
          "c,T,label\n0.5,0.40000000000000002,no_paths\n0.5,1.8,paramagnetic\n"
          "0.90000000000000002,0.40000000000000002,success\n0.90000000000000002,1.8,paramagnetic\n");

    c = parse(R"({"guess": {"c": [0.5, 0.9]}, "scan": {"grid": "41x41", "tc_tolerance": 0.01},
                  "output": {"path": "tc", "format": "json"}})");
    const auto tc = ara::commands::criticaltemps(c);
    REQUIRE(tc.size() == 2);
    const auto j = nlohmann::json::parse(tc[0].content);
    CHECK(j["tc2"].get<double>() == doctest::Approx(1.4879).epsilon(1e-4));
    CHECK(j["spinodal"].get<double>() > j["tc2"].get<double>());
    CHECK(j["tc1"][0]["tc1"].is_null());
    CHECK(j["tc1"][1]["tc1"].get<double>() < j["tc2"].get<double>());
}

TEST_CASE("writes are all or nothing") {
    const auto dir = scratch("atomic");
    ara::emit::write_all({{(dir / "a.csv").string(), "x\n"}, {(dir / "b.csv").string(), "y\n"}});
    CHECK(slurp(dir / "a.csv") == "x\n");
    CHECK(slurp(dir / "b.csv") == "y\n");

    // Missing directories are created.
    ara::emit::write_all({{(dir / "sub" / "c.csv").string(), "w\n"}});
    CHECK(slurp(dir / "sub" / "c.csv") == "w\n");

    // Second file cannot be created (its parent is a regular file): the first must not be
    // replaced.
    CHECK_THROWS_AS(ara::emit::write_all({{(dir / "a.csv").string(), "changed\n"},
                                          {(dir / "b.csv" / "d.csv").string(), "z\n"}}),
                    ara::emit::IoError);
    CHECK(slurp(dir / "a.csv") == "x\n");
    for (const auto& e : fs::directory_iterator(dir))
        CHECK(e.path().extension() != ".partial");
}

TEST_CASE("binary exit codes") {
    const auto dir = scratch("exit");
    const std::string out = (dir / "run").string();
    CHECK(run_binary("--help") == 0);
    CHECK(run_binary("") == 2);
    CHECK(run_binary("frobnicate") == 2);
    CHECK(run_binary("--format xml trajectory") == 2);
    CHECK(run_binary("--grid 10by10 ctmap") == 2);
    CHECK(run_binary("--config /nonexistent.json trajectory") == 2);

    {
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"bath": {"etaa": 1}})";
    }
    CHECK(run_binary("--config " + (dir / "bad.json").string() + " trajectory") == 2);

    {
        std::ofstream cfg(dir / "ok.json");
        cfg << R"({"bath": {"temperature": 0.4}, "protocol": {"tau": 1}})";
    }
    CHECK(run_binary("--config " + (dir / "ok.json").string() + " --out " + out +
                     " --format json trajectory") == 0);
    CHECK(fs::exists(dir / "run.json"));
    CHECK(fs::exists(dir / "run.json.config.json"));
    CHECK(parse(slurp(dir / "run.json.config.json")).output.format == Format::Json);

    // An explicit integrator that cannot keep up with a very strong bath stops with code 3.
    {
        std::ofstream cfg(dir / "unstable.json");
        cfg << R"({"bath": {"temperature": 1.0, "eta": 50},
                   "protocol": {"tau": 20, "dt": 1, "integrator": "rk4", "rk4_substeps": 1}})";
    }
    CHECK(run_binary("--config " + (dir / "unstable.json").string() + " --out " +
                     (dir / "bad").string() + " trajectory") == 3);
    CHECK(!fs::exists(dir / "bad.csv"));

    // Unwritable output: code 1.
    CHECK(run_binary("--config " + (dir / "ok.json").string() + " --out " +
                     (dir / "run.json" / "x").string() + " trajectory") == 1);
}

}  // TEST_SUITE
