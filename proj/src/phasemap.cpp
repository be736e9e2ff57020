#include "ara/phasemap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "ara/parallel.hpp"

namespace ara::phasemap {

namespace {

constexpr int kDi[4] = {1, 0, -1, 0};
constexpr int kDj[4] = {0, 1, 0, -1};

bool inside(const Resolution& r, int i, int j) {
    return i >= 0 && j >= 0 && i < r.n_s && j < r.n_lambda;
}

equilibrium::EquilibriumSolution solve_cell(int i, int j, const Resolution& res, double beta,
                                            const InitialGuess& guess, const ModelSpec& model,
                                            const equilibrium::SolverOptions& solver) {
    const double s = static_cast<double>(i) / (res.n_s - 1);
    const double lambda = static_cast<double>(j) / (res.n_lambda - 1);
    try {
        return equilibrium::solve_equilibrium({s, lambda, beta}, guess, model, solver);
    } catch (const EquilibriumError& e) {
        std::ostringstream msg;
        msg << "cell (" << i << ", " << j << "): " << e.what();
        throw EquilibriumError(msg.str());
    }
}

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool paramagnetic_endpoint(double beta, const ModelSpec& model,
                           const equilibrium::SolverOptions& solver) {
    return equilibrium::classical_endpoint(beta, model, solver).m_star <= kParamagneticTol;
}

}  // namespace

void Resolution::validate() const {
    if (n_s < 2 || n_lambda < 2) throw ConfigError("grid resolution must be >= 2 per axis");
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::Success: return "success";
        case Classification::NoPaths: return "no_paths";
        case Classification::Paramagnetic: return "paramagnetic";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------------------------
// BoundarySet

BoundarySet::BoundarySet(Resolution resolution, double threshold)
    : resolution_(resolution),
      threshold_(threshold),
      s_edges_(static_cast<std::size_t>(resolution.n_s - 1) * resolution.n_lambda, 0),
      lambda_edges_(static_cast<std::size_t>(resolution.n_s) * (resolution.n_lambda - 1), 0) {}

const std::uint8_t* BoundarySet::slot(Cell a, Cell b) const {
    if (!inside(resolution_, a.i, a.j) || !inside(resolution_, b.i, b.j)) return nullptr;
    if (b.i < a.i || b.j < a.j) std::swap(a, b);
    if (b.i == a.i + 1 && b.j == a.j)
        return &s_edges_[static_cast<std::size_t>(a.i) * resolution_.n_lambda + a.j];
    if (b.i == a.i && b.j == a.j + 1)
        return &lambda_edges_[static_cast<std::size_t>(a.i) * (resolution_.n_lambda - 1) + a.j];
    return nullptr;
}

std::uint8_t* BoundarySet::slot(Cell a, Cell b) {
    return const_cast<std::uint8_t*>(std::as_const(*this).slot(a, b));
}

void BoundarySet::flag(Cell a, Cell b) {
    std::uint8_t* e = slot(a, b);
    if (e == nullptr) throw std::invalid_argument("BoundarySet::flag: cells are not adjacent");
    if (*e == 0) {
        *e = 1;
        ++count_;
    }
}

bool BoundarySet::flagged(Cell a, Cell b) const {
    const std::uint8_t* e = slot(a, b);
    return e != nullptr && *e != 0;
}

std::vector<std::pair<Cell, Cell>> BoundarySet::edges() const {
    std::vector<std::pair<Cell, Cell>> out;
    out.reserve(count_);
    const int ns = resolution_.n_s;
    const int nl = resolution_.n_lambda;
    for (int i = 0; i + 1 < ns; ++i)
        for (int j = 0; j < nl; ++j)
            if (s_edges_[static_cast<std::size_t>(i) * nl + j]) out.push_back({{i, j}, {i + 1, j}});
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j + 1 < nl; ++j)
            if (lambda_edges_[static_cast<std::size_t>(i) * (nl - 1) + j])
                out.push_back({{i, j}, {i, j + 1}});
    return out;
}

std::optional<double> BoundarySet::max_lambda_extent() const {
    std::optional<double> out;
    for (const auto& [a, b] : edges()) {
        const double l = static_cast<double>(std::max(a.j, b.j)) / (resolution_.n_lambda - 1);
        if (!out || l > *out) out = l;
    }
    return out;
}

std::optional<double> BoundarySet::min_lambda_extent() const {
    std::optional<double> out;
    for (const auto& [a, b] : edges()) {
        const double l = static_cast<double>(std::min(a.j, b.j)) / (resolution_.n_lambda - 1);
        if (!out || l < *out) out = l;
    }
    return out;
}

int BoundarySet::connected_components() const {
    // Dual vertex (a, b) sits at the corner between cells (a-1, b-1) and (a, b).
    const int ns = resolution_.n_s;
    const int nl = resolution_.n_lambda;
    auto vertex = [nl](int a, int b) { return static_cast<std::size_t>(a) * (nl + 1) + b; };
    DisjointSet dsu(static_cast<std::size_t>(ns + 1) * (nl + 1));
    std::vector<std::uint8_t> used(dsu.parent.size(), 0);
    for (const auto& [lo, hi] : edges()) {
        std::size_t v0, v1;
        if (hi.i == lo.i + 1) {  // crossing an s-edge: dual segment runs along lambda
            v0 = vertex(hi.i, lo.j);
            v1 = vertex(hi.i, lo.j + 1);
        } else {
            v0 = vertex(lo.i, hi.j);
            v1 = vertex(lo.i + 1, hi.j);
        }
        dsu.unite(v0, v1);
        used[v0] = used[v1] = 1;
    }
    int components = 0;
    for (std::size_t v = 0; v < used.size(); ++v)
        if (used[v] && dsu.find(v) == v) ++components;
    return components;
}

// ---------------------------------------------------------------------------------------------
// Grid scan and paths

PhaseGrid scan_grid(double beta, const InitialGuess& guess, const ModelSpec& model,
                    Resolution resolution, const ScanOptions& options) {
    resolution.validate();
    guess.validate();
    model.validate();

    PhaseGrid grid;
    grid.resolution = resolution;
    grid.beta = beta;
    grid.guess = guess;
    grid.model = model;
    const std::size_t cells = static_cast<std::size_t>(resolution.n_s) * resolution.n_lambda;
    grid.m_star.assign(cells, 0.0);
    grid.f_star.assign(cells, 0.0);
    grid.tie.assign(cells, 0);

    parallel_for(static_cast<std::size_t>(resolution.n_s), options.threads, [&](std::size_t row) {
        const int i = static_cast<int>(row);
        for (int j = 0; j < resolution.n_lambda; ++j) {
            const auto sol = solve_cell(i, j, resolution, beta, guess, model, options.solver);
            const std::size_t k = grid.index(i, j);
            grid.m_star[k] = sol.m_star;
            grid.f_star[k] = sol.f_star;
            grid.tie[k] = sol.tie ? 1 : 0;
        }
    });
    return grid;
}

BoundarySet detect_boundaries(const PhaseGrid& grid, double threshold) {
    const Resolution& r = grid.resolution;
    BoundarySet out(r, threshold);
    for (int i = 0; i < r.n_s; ++i) {
        for (int j = 0; j < r.n_lambda; ++j) {
            if (i + 1 < r.n_s && std::abs(grid.m(i + 1, j) - grid.m(i, j)) > threshold)
                out.flag({i, j}, {i + 1, j});
            if (j + 1 < r.n_lambda && std::abs(grid.m(i, j + 1) - grid.m(i, j)) > threshold)
                out.flag({i, j}, {i, j + 1});
        }
    }
    return out;
}

bool path_exists(const BoundarySet& boundaries, const PhaseGrid& grid) {
    const Resolution& r = grid.resolution;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(r.n_s) * r.n_lambda, 0);
    std::vector<Cell> stack{{0, 0}};
    seen[grid.index(0, 0)] = 1;
    const Cell target{r.n_s - 1, r.n_lambda - 1};
    while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        if (c == target) return true;
        for (int d = 0; d < 4; ++d) {
            const Cell n{c.i + kDi[d], c.j + kDj[d]};
            if (!inside(r, n.i, n.j) || seen[grid.index(n.i, n.j)]) continue;
            if (boundaries.flagged(c, n)) continue;
            seen[grid.index(n.i, n.j)] = 1;
            stack.push_back(n);
        }
    }
    return false;
}

bool path_exists_on_demand(double beta, const InitialGuess& guess, const ModelSpec& model,
                           Resolution resolution, const ScanOptions& options) {
    resolution.validate();
    guess.validate();
    model.validate();
    const Resolution& r = resolution;
    const std::size_t cells = static_cast<std::size_t>(r.n_s) * r.n_lambda;
    std::vector<double> m(cells, std::numeric_limits<double>::quiet_NaN());
    auto index = [&r](Cell c) { return static_cast<std::size_t>(c.i) * r.n_lambda + c.j; };
    auto value = [&](Cell c) {
        double& slot = m[index(c)];
        if (std::isnan(slot))
            slot = solve_cell(c.i, c.j, r, beta, guess, model, options.solver).m_star;
        return slot;
    };

    // Two greedy best-first searches, one from each corner, each aimed at the other corner.
    // They meet iff the corners share a component; otherwise the smaller component runs dry
    // first. Reachability, and so the answer, does not depend on the visit order.
    using Entry = std::pair<int, std::size_t>;  // (distance to goal, cell index)
    using Queue = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;
    struct Search {
        Cell goal;
        Queue frontier;
    };
    const Cell start{0, 0};
    const Cell target{r.n_s - 1, r.n_lambda - 1};
    std::vector<std::uint8_t> owner(cells, 0);  // 0 unseen, 1 from start, 2 from target
    std::array<Search, 2> searches{Search{target, {}}, Search{start, {}}};
    auto distance = [](Cell a, Cell b) { return std::abs(a.i - b.i) + std::abs(a.j - b.j); };

    if (start == target) return true;
    owner[index(start)] = 1;
    owner[index(target)] = 2;
    searches[0].frontier.push({distance(start, target), index(start)});
    searches[1].frontier.push({0, index(target)});

    for (;;) {
        for (int side = 0; side < 2; ++side) {
            Search& search = searches[side];
            if (search.frontier.empty()) return false;
            const std::size_t k = search.frontier.top().second;
            search.frontier.pop();
            const Cell c{static_cast<int>(k / r.n_lambda), static_cast<int>(k % r.n_lambda)};
            const double mc = value(c);
            const std::uint8_t mine = static_cast<std::uint8_t>(side + 1);
            for (int d = 0; d < 4; ++d) {
                const Cell n{c.i + kDi[d], c.j + kDj[d]};
                if (!inside(r, n.i, n.j) || owner[index(n)] == mine) continue;
                if (std::abs(value(n) - mc) > options.threshold) continue;
                if (owner[index(n)] != 0) return true;
                owner[index(n)] = mine;
                search.frontier.push({distance(n, search.goal), index(n)});
            }
        }
    }
}

Classification classify_point(double c, double temperature, const ModelSpec& model,
                              Resolution resolution, const ScanOptions& options) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("c must lie in [0, 1]");
    if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    const double beta = equilibrium::beta_from_temperature(temperature);
    if (paramagnetic_endpoint(beta, model, options.solver)) return Classification::Paramagnetic;
    return path_exists_on_demand(beta, InitialGuess{c}, model, resolution, options)
               ? Classification::Success
               : Classification::NoPaths;
}

// ---------------------------------------------------------------------------------------------
// Critical temperatures

double critical_temperature_tc2(const ModelSpec& model, double tol,
                                const equilibrium::SolverOptions& solver) {
    model.validate();
    // For T >= p the map m -> tanh(p m^(p-1) / T) lies below m on (0, 1].
    double lo = 0.0;
    double hi = static_cast<double>(model.p);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (paramagnetic_endpoint(equilibrium::beta_from_temperature(mid), model, solver))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double spinodal_temperature(const ModelSpec& model, double tol,
                            const equilibrium::SolverOptions& solver) {
    model.validate();
    auto has_positive_root = [&](double t) {
        const auto sol = equilibrium::classical_endpoint(equilibrium::beta_from_temperature(t),
                                                         model, solver);
        return std::any_of(sol.branches.begin(), sol.branches.end(),
                           [](const equilibrium::Branch& b) { return b.m > kParamagneticTol; });
    };
    double lo = 0.0;
    double hi = static_cast<double>(model.p);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (has_positive_root(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<double> critical_temperature_tc1(double c, const ModelSpec& model,
                                               Resolution resolution, double tol,
                                               const Tc1Options& options) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("c must lie in [0, 1]");
    if (!(tol > 0.0)) throw ConfigError("tolerance must be > 0");
    const double tc2 = critical_temperature_tc2(model, std::min(tol, 1e-4), options.scan.solver);
    const InitialGuess guess{c};
    auto paths = [&](double t) {
        return path_exists_on_demand(equilibrium::beta_from_temperature(t), guess, model,
                                     resolution, options.scan);
    };

    const int k = std::max(2, options.coarse_samples);
    std::vector<std::pair<double, bool>> samples;
    for (int n = 0; n < k; ++n) {
        const double t = tc2 * n / k;
        samples.emplace_back(t, paths(t));
    }

    int last_true = -1;
    int first_false = -1;
    for (int n = 0; n < k; ++n) {
        if (samples[n].second) {
            if (first_false >= 0) {
                std::ostringstream msg;
                msg << "path predicate is not monotone in T for c=" << c << ":";
                for (const auto& [t, ok] : samples) msg << " (" << t << ", " << ok << ")";
                throw NonMonotoneError(msg.str(), samples);
            }
            last_true = n;
        } else if (first_false < 0) {
            first_false = n;
        }
    }
    if (last_true < 0) return std::nullopt;

    // Above T_c2 the path criterion is moot, so T_c2 closes the bracket from above.
    double lo = samples[last_true].first;
    double hi = first_false >= 0 ? samples[first_false].first : tc2;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (paths(mid) ? lo : hi) = mid;
    }
    return lo;
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out;
    if (count <= 0) return out;
    if (count == 1) return {lo};
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        out.push_back(k + 1 == count ? hi : lo + (hi - lo) * k / (count - 1));
    return out;
}

CTMap build_ct_map(const std::vector<double>& c_values, const std::vector<double>& temperatures,
                   const ModelSpec& model, Resolution resolution, const ScanOptions& options) {
    if (c_values.empty() || temperatures.empty())
        throw ConfigError("c and T ranges must be non-empty");
    resolution.validate();
    model.validate();

    CTMap out;
    out.c_values = c_values;
    out.temperatures = temperatures;
    out.labels.assign(c_values.size() * temperatures.size(), Classification::Paramagnetic);

    // The endpoint phase does not depend on c.
    std::vector<std::uint8_t> paramagnetic(temperatures.size(), 0);
    for (std::size_t it = 0; it < temperatures.size(); ++it) {
        if (!(temperatures[it] >= 0.0)) throw ConfigError("temperatures must be >= 0");
        paramagnetic[it] = paramagnetic_endpoint(
            equilibrium::beta_from_temperature(temperatures[it]), model, options.solver);
    }

    ScanOptions serial = options;
    serial.threads = 1;
    parallel_for(out.labels.size(), options.threads, [&](std::size_t k) {
        const std::size_t ic = k / temperatures.size();
        const std::size_t it = k % temperatures.size();
        if (paramagnetic[it]) return;
        try {
            const double beta = equilibrium::beta_from_temperature(temperatures[it]);
            out.labels[k] =
                path_exists_on_demand(beta, InitialGuess{c_values[ic]}, model, resolution, serial)
                    ? Classification::Success
                    : Classification::NoPaths;
        } catch (const EquilibriumError& e) {
            std::ostringstream msg;
            msg << "(c=" << c_values[ic] << ", T=" << temperatures[it] << "): " << e.what();
            throw EquilibriumError(msg.str());
        }
    });
    return out;
}

}  // namespace ara::phasemap
