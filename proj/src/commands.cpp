#include "ara/commands.hpp"

#include <charconv>
#include <sstream>

#include "ara/equilibrium.hpp"
#include "ara/error.hpp"
#include "ara/meanfield.hpp"
#include "ara/parallel.hpp"
#include "ara/phasemap.hpp"

namespace ara::commands {

namespace {

using config::RunConfig;
using emit::PendingFile;
using emit::Table;

// Shortest round-trip spelling, used in file names.
std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// One point of a sweep, with the config narrowed down to it.
struct Run {
    double c;
    double temperature;
    double tau_value;  // as written in the config (model units or 1/eta)
    std::string suffix;
    RunConfig narrowed;
};

std::vector<Run> expand(const RunConfig& config, bool sweep_tau) {
    const auto& cs = config.c_values;
    const auto& ts = config.temperatures;
    const std::vector<double> taus =
        sweep_tau ? config.tau.values : std::vector<double>{config.tau.values.front()};
    std::vector<Run> runs;
    for (double c : cs) {
        for (double t : ts) {
            for (double tau : taus) {
                std::string suffix;
                if (cs.size() > 1) suffix += "_c" + shortest(c);
                if (ts.size() > 1) suffix += "_T" + shortest(t);
                if (taus.size() > 1)
                    suffix += (config.tau.eta_units ? "_taueta" : "_tau") + shortest(tau);
                RunConfig narrowed = config;
                narrowed.c_values = {c};
                narrowed.temperatures = {t};
                if (sweep_tau) narrowed.tau.values = {tau};
                narrowed.output.path = emit::strip_extension(config.output.path) + suffix;
                runs.push_back({c, t, tau, suffix, std::move(narrowed)});
            }
        }
    }
    return runs;
}

// Data file plus its sidecar. `run_config` must already name the base path it was run with.
void add_file(std::vector<PendingFile>& out, const std::string& path, const Table& table,
              const RunConfig& run_config) {
    out.push_back({path, emit::render(table, run_config.output.format,
                                      run_config.output.precision)});
    out.push_back({emit::sidecar_path(path), config::to_json(run_config)});
}

std::string describe(const Run& run, bool with_tau) {
    std::ostringstream msg;
    msg << "c=" << run.c << ", T=" << run.temperature;
    if (with_tau) msg << ", tau=" << run.tau_value;
    return msg.str();
}

}  // namespace

std::vector<PendingFile> trajectory(const RunConfig& config) {
    config.validate();
    const auto runs = expand(config, true);
    std::vector<Table> tables(runs.size());

    parallel_for(runs.size(), config.threads, [&](std::size_t k) {
        const Run& run = runs[k];
        const auto bath = config.bath_at(run.temperature);
        const auto protocol = config.protocol_at(config.tau.resolve(run.tau_value, bath));
        meanfield::Trajectory traj;
        try {
            traj = meanfield::run_trajectory(config.model, protocol, bath, {run.c},
                                             {config.step});
        } catch (const TrajectoryError& e) {
            throw TrajectoryError("trajectory (" + describe(run, true) + "): " + e.what(),
                                  e.step());
        }
        Table& table = tables[k];
        table.columns = {"t", "s", "lambda", "h", "m", "zu", "zd", "xu", "xd", "yu", "yd"};
        const std::size_t stride = static_cast<std::size_t>(config.output.stride);
        for (std::size_t n = 0; n < traj.size(); ++n) {
            if (n % stride != 0 && n + 1 != traj.size()) continue;
            const auto& r = traj[n];
            table.rows.push_back({r.t, r.s, r.lambda, r.h, r.m, r.bloch_u.z(), r.bloch_d.z(),
                                  r.bloch_u.x(), r.bloch_d.x(), r.bloch_u.y(), r.bloch_d.y()});
        }
    });

    std::vector<PendingFile> out;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const RunConfig& rc = runs[k].narrowed;
        add_file(out, emit::output_path(rc.output.path, "", rc.output.format), tables[k], rc);
    }
    return out;
}

std::vector<PendingFile> equilibrium(const RunConfig& config) {
    config.validate();
    const auto runs = expand(config, true);
    const int n = config.equilibrium_samples;
    std::vector<Table> tables(runs.size());
    for (auto& t : tables) {
        t.columns = {"t", "s", "lambda", "m_eq", "f_eq"};
        t.rows.resize(static_cast<std::size_t>(n));
    }

    // Flattened (run, sample) index so small sweeps still use every worker.
    parallel_for(runs.size() * n, config.threads, [&](std::size_t idx) {
        const std::size_t k = idx / n;
        const int i = static_cast<int>(idx % n);
        const Run& run = runs[k];
        const auto bath = config.bath_at(run.temperature);
        const auto protocol = config.protocol_at(config.tau.resolve(run.tau_value, bath));
        const double t = i + 1 == n ? protocol.tau : protocol.tau * i / (n - 1);
        const auto [s, lambda] = protocol.controls(t);
        try {
            const auto sol = equilibrium::solve_equilibrium(
                {s, lambda, equilibrium::beta_from_temperature(run.temperature)}, {run.c},
                config.model);
            tables[k].rows[i] = {t, s, lambda, sol.m_star, sol.f_star};
        } catch (const EquilibriumError& e) {
            std::ostringstream msg;
            msg << "equilibrium (" << describe(run, true) << ") at sample " << i << ": "
                << e.what();
            throw EquilibriumError(msg.str());
        }
    });

    std::vector<PendingFile> out;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const RunConfig& rc = runs[k].narrowed;
        add_file(out, emit::output_path(rc.output.path, "", rc.output.format), tables[k], rc);
    }
    return out;
}

std::vector<PendingFile> phasediagram(const RunConfig& config) {
    config.validate();
    const auto runs = expand(config, false);
    std::vector<PendingFile> out;
    for (const Run& run : runs) {
        const double beta = equilibrium::beta_from_temperature(run.temperature);
        phasemap::PhaseGrid grid;
        try {
            grid = phasemap::scan_grid(beta, {run.c}, config.model, config.scan.grid,
                                       config.scan_options());
        } catch (const EquilibriumError& e) {
            throw EquilibriumError("phase diagram (" + describe(run, false) + "), " + e.what());
        }
        const auto boundaries = phasemap::detect_boundaries(grid, config.scan.threshold);

        Table cells;
        cells.columns = {"s", "lambda", "m", "f"};
        for (int i = 0; i < grid.resolution.n_s; ++i)
            for (int j = 0; j < grid.resolution.n_lambda; ++j)
                cells.rows.push_back({grid.s_at(i), grid.lambda_at(j), grid.m(i, j), grid.f(i, j)});

        Table edges;
        edges.columns = {"s_a", "lambda_a", "s_b", "lambda_b"};
        for (const auto& [a, b] : boundaries.edges())
            edges.rows.push_back({grid.s_at(a.i), grid.lambda_at(a.j), grid.s_at(b.i),
                                  grid.lambda_at(b.j)});

        const RunConfig& rc = run.narrowed;
        add_file(out, emit::output_path(rc.output.path, "_grid", rc.output.format), cells, rc);
        add_file(out, emit::output_path(rc.output.path, "_boundary", rc.output.format), edges, rc);
    }
    return out;
}

std::vector<PendingFile> ctmap(const RunConfig& config) {
    config.validate();
    const auto map = phasemap::build_ct_map(config.c_values, config.temperatures, config.model,
                                            config.scan.grid, config.scan_options());
    Table table;
    table.columns = {"c", "T", "label"};
    for (std::size_t ic = 0; ic < map.c_values.size(); ++ic)
        for (std::size_t it = 0; it < map.temperatures.size(); ++it)
            table.rows.push_back({map.c_values[ic], map.temperatures[it],
                                  phasemap::to_string(map.at(ic, it))});
    std::vector<PendingFile> out;
    add_file(out, emit::output_path(config.output.path, "", config.output.format), table, config);
    return out;
}

std::vector<PendingFile> criticaltemps(const RunConfig& config) {
    config.validate();
    constexpr double kClassicalTol = 1e-9;
    const double tc2 = phasemap::critical_temperature_tc2(config.model, kClassicalTol);
    const double spinodal = phasemap::spinodal_temperature(config.model, kClassicalTol);

    phasemap::Tc1Options tc1_options;
    tc1_options.scan = config.scan_options();
    tc1_options.scan.threads = 1;
    tc1_options.coarse_samples = config.scan.coarse_samples;
    std::vector<std::optional<double>> tc1(config.c_values.size());
    parallel_for(tc1.size(), config.threads, [&](std::size_t k) {
        tc1[k] = phasemap::critical_temperature_tc1(config.c_values[k], config.model,
                                                    config.scan.grid, config.scan.tc_tolerance,
                                                    tc1_options);
    });

    const int digits = config.output.precision;
    std::string body;
    if (config.output.format == config::Format::Json) {
        body = "{\n  \"tc2\": " + emit::format_number(tc2, digits) + ",\n  \"spinodal\": " +
               emit::format_number(spinodal, digits) + ",\n  \"tc1\": [";
        for (std::size_t k = 0; k < tc1.size(); ++k) {
            body += k ? ",\n    " : "\n    ";
            body += "{\"c\": " + emit::format_number(config.c_values[k], digits) + ", \"tc1\": " +
                    (tc1[k] ? emit::format_number(*tc1[k], digits) : std::string("null")) + "}";
        }
        body += "\n  ]\n}\n";
    } else {
        Table table;
        table.columns = {"quantity", "c", "value"};
        table.rows.push_back({std::string("tc2"), std::string(), tc2});
        table.rows.push_back({std::string("spinodal"), std::string(), spinodal});
        for (std::size_t k = 0; k < tc1.size(); ++k) {
            emit::Value v = std::string("none");
            if (tc1[k]) v = *tc1[k];
            table.rows.push_back({std::string("tc1"), config.c_values[k], v});
        }
        body = emit::render(table, config.output.format, digits);
    }

    const std::string path = emit::output_path(config.output.path, "", config.output.format);
    return {{path, body}, {emit::sidecar_path(path), config::to_json(config)}};
}

}  // namespace ara::commands
