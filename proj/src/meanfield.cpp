#include "ara/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ara/error.hpp"

namespace ara::meanfield {

void ModelSpec::validate() const {
    if (p < 2) throw ConfigError("model.p must be >= 2");
}

void InitialGuess::validate() const {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("guess.c must lie in [0, 1]");
}

Protocol Protocol::linear(double tau, double dt) {
    Protocol p;
    p.tau = tau;
    p.dt = dt;
    return p;
}

void Protocol::validate() const {
    if (!(std::isfinite(tau) && tau > 0.0)) throw ConfigError("protocol.tau must be > 0");
    if (!(std::isfinite(dt) && dt > 0.0)) throw ConfigError("protocol.dt must be > 0");
    if (path.size() < 2) throw ConfigError("protocol.path needs at least two control points");
    if (path.front().u != 0.0 || path.back().u != 1.0)
        throw ConfigError("protocol.path must start at u = 0 and end at u = 1");
    if (path.front().s != 0.0 || path.front().lambda != 0.0)
        throw ConfigError("protocol.path must start at (s, lambda) = (0, 0)");
    if (path.back().s != 1.0 || path.back().lambda != 1.0)
        throw ConfigError("protocol.path must end at (s, lambda) = (1, 1)");
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto& cp = path[k];
        if (!(cp.s >= 0.0 && cp.s <= 1.0 && cp.lambda >= 0.0 && cp.lambda <= 1.0))
            throw ConfigError("protocol.path values must lie in [0, 1]");
        if (k > 0 && !(cp.u > path[k - 1].u))
            throw ConfigError("protocol.path fractions must be strictly increasing");
    }
}

std::pair<double, double> Protocol::controls(double t) const {
    const double u = std::clamp(t / tau, 0.0, 1.0);
    auto it = std::upper_bound(path.begin(), path.end(), u,
                               [](double v, const ControlPoint& cp) { return v < cp.u; });
    if (it == path.end()) return {path.back().s, path.back().lambda};
    if (it == path.begin()) return {path.front().s, path.front().lambda};
    const ControlPoint& b = *it;
    const ControlPoint& a = *(it - 1);
    const double w = (u - a.u) / (b.u - a.u);
    return {a.s + w * (b.s - a.s), a.lambda + w * (b.lambda - a.lambda)};
}

long Protocol::steps() const {
    // Guard against tau = n * dt landing a hair above n after rounding.
    const double ratio = tau / dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest))
        return std::max(1L, static_cast<long>(nearest));
    return static_cast<long>(std::ceil(ratio));
}

double Protocol::time_at(long k) const {
    return k >= steps() ? tau : static_cast<double>(k) * dt;
}

double mean_field_h(double s, double m, const ModelSpec& model) {
    double power = 1.0;
    for (int k = 0; k < model.p - 1; ++k) power *= m;
    return s * model.p * power;
}

double ensemble_magnetization(const spin::SpinState& rho_u, const spin::SpinState& rho_d,
                              const InitialGuess& guess) {
    return guess.c * rho_u.z() + (1.0 - guess.c) * rho_d.z();
}

Trajectory run_trajectory(const ModelSpec& model, const Protocol& protocol,
                          const bath::BathSpec& bath, const InitialGuess& guess,
                          const TrajectoryOptions& options) {
    model.validate();
    protocol.validate();
    bath.validate();
    guess.validate();

    const long n = protocol.steps();
    Trajectory out;
    out.reserve(static_cast<std::size_t>(n) + 1);

    bath::LambShiftCache lamb_cache;
    spin::SpinState rho_u = spin::SpinState::up();
    spin::SpinState rho_d = spin::SpinState::down();

    for (long k = 0;; ++k) {
        const double t = protocol.time_at(k);
        const auto [s, lambda] = protocol.controls(t);
        const double m = ensemble_magnetization(rho_u, rho_d, guess);
        if (!std::isfinite(m)) {
            std::ostringstream msg;
            msg << "magnetization became non-finite at step " << k << " (t=" << t << ")";
            throw TrajectoryError(msg.str(), k);
        }
        const double h = mean_field_h(s, m, model);
        out.push_back({t, s, lambda, h, m, rho_u.bloch, rho_d.bloch});
        if (k == n) break;

        const double step = protocol.time_at(k + 1) - t;
        const auto gen_u =
            spin::build_generator(spin::effective_fields(s, lambda, h, +1), bath, lamb_cache);
        const auto gen_d =
            spin::build_generator(spin::effective_fields(s, lambda, h, -1), bath, lamb_cache);
        try {
            rho_u = spin::propagate_step(rho_u, gen_u, step, options.step);
            rho_d = spin::propagate_step(rho_d, gen_d, step, options.step);
        } catch (const PositivityError& e) {
            std::ostringstream msg;
            msg << "step " << k << ": " << e.what();
            throw TrajectoryError(msg.str(), k);
        }
    }
    return out;
}

}  // namespace ara::meanfield
