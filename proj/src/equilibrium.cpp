#include "ara/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ara/error.hpp"

namespace ara::equilibrium {

namespace {

double power(double m, int n) {
    double out = 1.0;
    for (int k = 0; k < n; ++k) out *= m;
    return out;
}

double square(double x) { return x * x; }

// tanh for x >= 0 through exp, about twice as fast as std::tanh and within 3e-15 relative.
// The series branch avoids the cancellation in 1 - exp(-2x) near zero.
double tanh_nonnegative(double x) {
    if (x < 0.01) {
        const double x2 = x * x;
        return x * (1.0 + x2 * (-1.0 / 3.0 + x2 * (2.0 / 15.0 + x2 * (-17.0 / 315.0))));
    }
    if (x > 19.1) return 1.0;
    const double e = std::exp(-2.0 * x);
    return (1.0 - e) / (1.0 + e);
}

// Precomputed coefficients of the self-consistency map at one control point.
struct Rhs {
    double c;
    double sp;         // s p
    double guide;      // (1 - s)(1 - lambda)
    double transverse; // (1 - s) lambda
    double beta;
    int order;         // p - 1
    bool zero_temperature;

    Rhs(const ControlPoint& at, const InitialGuess& guess, const ModelSpec& model)
        : c(guess.c),
          sp(at.s * model.p),
          guide((1.0 - at.s) * (1.0 - at.lambda)),
          transverse((1.0 - at.s) * at.lambda),
          beta(at.beta),
          order(model.p - 1),
          zero_temperature(std::isinf(at.beta)) {}

    double spin(double u) const {
        const double r = std::sqrt(u * u + transverse * transverse);
        if (r == 0.0) return 0.0;
        const double polarization = zero_temperature ? 1.0 : tanh_nonnegative(beta * r);
        return u / r * polarization;
    }

    double operator()(double m) const {
        const double field = sp * power(m, order);
        return c * spin(field + guide) + (1.0 - c) * spin(field - guide);
    }

    // The map is discontinuous only where a spin sees exactly zero field at T = 0.
    bool can_jump() const { return zero_temperature && transverse == 0.0; }
};

// beta^-1 log 2 cosh(beta r), written to stay finite for large beta r.
double log_two_cosh(double r, double beta) {
    const double a = std::abs(r);
    if (std::isinf(beta)) return a;
    return a + std::log1p(std::exp(-2.0 * beta * a)) / beta;
}

struct Candidate {
    double m;
    double lo;
    double hi;
};

}  // namespace

double beta_from_temperature(double temperature) {
    return temperature == 0.0 ? kInfiniteBeta : 1.0 / temperature;
}

double magnetization_rhs(double m, const ControlPoint& at, const InitialGuess& guess,
                         const ModelSpec& model) {
    return Rhs(at, guess, model)(m);
}

double free_energy(double m, const ControlPoint& at, const InitialGuess& guess,
                   const ModelSpec& model) {
    const Rhs rhs(at, guess, model);
    const double field = rhs.sp * power(m, rhs.order);
    const double interaction = at.s * (model.p - 1) * power(m, model.p);
    const double up = std::sqrt(square(field + rhs.guide) + square(rhs.transverse));
    const double down = std::sqrt(square(field - rhs.guide) + square(rhs.transverse));
    return interaction -
           (guess.c * log_two_cosh(up, at.beta) + (1.0 - guess.c) * log_two_cosh(down, at.beta));
}

double model_energy_density(double m, const ModelSpec& model) {
    return -power(m, model.p);
}

EquilibriumSolution solve_equilibrium(const ControlPoint& at, const InitialGuess& guess,
                                      const ModelSpec& model, const SolverOptions& options) {
    const Rhs rhs(at, guess, model);
    auto residual = [&rhs](double m) { return m - rhs(m); };

    const int n = std::max(3, options.grid_points);
    const double half = 0.5 * (n - 1);
    std::vector<double> grid(static_cast<std::size_t>(n));
    std::vector<double> image(static_cast<std::size_t>(n));
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) grid[k] = (k - half) / half;

    // With p - 1 even the map only sees m^2, so the mirrored half is free.
    const bool even_map = rhs.order % 2 == 0;
    for (int k = n - 1; k >= 0; --k) {
        const int mirror = n - 1 - k;
        image[k] = even_map && mirror > k ? image[mirror] : rhs(grid[k]);
        g[k] = grid[k] - image[k];
    }

    std::vector<Candidate> candidates;
    for (int k = 0; k < n; ++k) {
        if (g[k] == 0.0) {
            candidates.push_back({grid[k], grid[k], grid[k]});
            continue;
        }
        if (k + 1 < n && g[k + 1] != 0.0 && std::signbit(g[k]) != std::signbit(g[k + 1])) {
            double lo = grid[k];
            double hi = grid[k + 1];
            double glo = g[k];
            double ghi = g[k + 1];
            double root = std::numeric_limits<double>::quiet_NaN();
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double gm = residual(mid);
                if (gm == 0.0) {
                    root = mid;
                    break;
                }
                if (std::signbit(gm) == std::signbit(glo)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                    ghi = gm;
                }
                if (hi - lo <= options.bisection_tol &&
                    std::min(std::abs(glo), std::abs(ghi)) <= 0.01 * options.residual_tol)
                    break;
            }
            if (std::isnan(root)) root = std::abs(glo) <= std::abs(ghi) ? lo : hi;

            if (std::abs(residual(root)) < options.residual_tol) {
                candidates.push_back({root, grid[k], grid[k + 1]});
            } else if (!rhs.can_jump()) {
                std::ostringstream msg;
                msg << "fixed-point refinement stalled in [" << lo << ", " << hi
                    << "] with residual " << residual(root) << " (s=" << at.s
                    << ", lambda=" << at.lambda << ", beta=" << at.beta << ")";
                throw EquilibriumError(msg.str());
            }
            // Otherwise the sign change straddles a jump of the T = 0 map, not a root.
        }
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.m < b.m; });

    EquilibriumSolution out;
    for (const auto& cand : candidates) {
        if (!out.branches.empty() && cand.m - out.branches.back().m <= options.dedupe_tol) {
            out.branches.back().bracket_hi = cand.hi;
            continue;
        }
        out.branches.push_back({cand.m, free_energy(cand.m, at, guess, model), cand.lo, cand.hi});
    }
    if (out.branches.empty()) {
        std::ostringstream msg;
        msg << "no fixed point found (s=" << at.s << ", lambda=" << at.lambda
            << ", beta=" << at.beta << ", c=" << guess.c << ")";
        throw EquilibriumError(msg.str());
    }

    const Branch* best = &out.branches.front();
    for (const auto& b : out.branches) {
        if (b.f < best->f - options.tie_tol ||
            (std::abs(b.f - best->f) <= options.tie_tol && b.m > best->m)) {
            best = &b;
        }
    }
    out.m_star = best->m;
    out.f_star = best->f;
    for (const auto& b : out.branches) {
        if (&b != best && std::abs(b.f - best->f) <= options.tie_tol) out.tie = true;
    }
    out.converged = true;
    return out;
}

EquilibriumSolution classical_endpoint(double beta, const ModelSpec& model,
                                       const SolverOptions& options) {
    return solve_equilibrium({1.0, 1.0, beta}, InitialGuess{1.0}, model, options);
}

}  // namespace ara::equilibrium
