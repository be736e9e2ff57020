// ara: trajectories, equilibrium curves, phase maps and critical temperatures for adiabatic
// reverse annealing of the p-spin model with Ohmic dephasing baths.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 1 anything else
// (e.g. output files that cannot be written).

#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ara/commands.hpp"
#include "ara/config.hpp"
#include "ara/emit.hpp"
#include "ara/error.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out;
    std::string format;
    int threads{0};
    std::string grid;
    double threshold{0.0};
    bool no_lamb_shift{false};
};

ara::config::RunConfig resolve(const Overrides& o) {
    auto c = o.config_path.empty() ? ara::config::parse("{}") : ara::config::load(o.config_path);
    if (!o.out.empty()) c.output.path = o.out;
    if (!o.format.empty()) c.output.format = o.format == "json" ? ara::config::Format::Json
                                                                 : ara::config::Format::Csv;
    if (o.threads != 0) c.threads = o.threads;
    if (!o.grid.empty()) c.scan.grid = ara::config::parse_grid(o.grid);
    if (o.threshold != 0.0) c.scan.threshold = o.threshold;
    if (o.no_lamb_shift) c.bath.lamb_shift_enabled = false;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    using Command = std::function<std::vector<ara::emit::PendingFile>(const ara::config::RunConfig&)>;
    const std::map<std::string, std::pair<Command, std::string>> commands{
        {"trajectory", {ara::commands::trajectory, "open-system mean-field trajectory"}},
        {"equilibrium", {ara::commands::equilibrium, "equilibrium magnetization along the path"}},
        {"phasediagram", {ara::commands::phasediagram, "s-lambda grid and first-order boundaries"}},
        {"ctmap", {ara::commands::ctmap, "success / no_paths / paramagnetic over (c, T)"}},
        {"criticaltemps", {ara::commands::criticaltemps, "T_c1 per c, T_c2 and spinodal"}},
    };

    CLI::App app{"Adiabatic reverse annealing with Ohmic dephasing baths"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--config", o.config_path, "JSON run configuration");
    app.add_option("--out", o.out, "output path (overrides output.path)");
    app.add_option("--format", o.format, "csv or json (overrides output.format)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--grid", o.grid, "s-lambda resolution NxM (overrides scan.grid)");
    app.add_option("--threshold", o.threshold, "boundary jump threshold")
        ->check(CLI::PositiveNumber);
    app.add_flag("--no-lamb-shift", o.no_lamb_shift, "drop the Lamb-shift term");

    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.second);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto config = resolve(o);
        const std::string name = app.get_subcommands().front()->get_name();
        const auto files = commands.at(name).first(config);
        ara::emit::write_all(files);
        for (const auto& f : files) std::printf("%s\n", f.path.c_str());
        return 0;
    } catch (const ara::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ara::TrajectoryError& e) {
        std::fprintf(stderr, "numerical error at step %ld: %s\n", e.step(), e.what());
        return 3;
    } catch (const ara::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
