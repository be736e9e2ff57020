#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ara/bath.hpp"
#include "ara/spin_dynamics.hpp"

namespace ara::meanfield {

// Order of the uniform p-spin interaction H0 = -N m^p.
struct ModelSpec {
    int p{3};
    void validate() const;
};

// Fraction c of spins whose guessed orientation (epsilon = +1) matches the ground state.
struct InitialGuess {
    double c{0.9};
    void validate() const;
};

// Control point of a piecewise-linear annealing path. `u` is the fraction of the runtime,
// so t = u * tau; the first point has u = 0 and the last u = 1.
struct ControlPoint {
    double u{0.0};
    double s{0.0};
    double lambda{0.0};
};

struct Protocol {
    std::vector<ControlPoint> path{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    double tau{1.0};
    double dt{0.1};

    static Protocol linear(double tau, double dt = 0.1);

    void validate() const;
    // (s, lambda) at time t in [0, tau].
    std::pair<double, double> controls(double t) const;
    // Outer steps needed to reach tau; the last one is shortened if tau is not a multiple of dt.
    long steps() const;
    double time_at(long k) const;
};

struct TrajectoryRecord {
    double t{0.0};
    double s{0.0};
    double lambda{0.0};
    double h{0.0};
    double m{0.0};
    Eigen::Vector3d bloch_u{0.0, 0.0, 1.0};
    Eigen::Vector3d bloch_d{0.0, 0.0, -1.0};
};

using Trajectory = std::vector<TrajectoryRecord>;

struct TrajectoryOptions {
    spin::StepOptions step{};
};

// h = s p m^(p-1).
double mean_field_h(double s, double m, const ModelSpec& model);

// m = c z_u + (1 - c) z_d.
double ensemble_magnetization(const spin::SpinState& rho_u, const spin::SpinState& rho_d,
                              const InitialGuess& guess);

// Causal self-consistent evolution of the two representative spins. Each outer step freezes
// s, lambda and h at its left endpoint, builds one generator per epsilon and applies its exact
// exponential. Records t = 0, dt, ..., tau (steps() + 1 rows).
// Throws TrajectoryError (with the step index) on a non-finite magnetization and lets
// PositivityError / QuadratureError from the single-spin layer through.
Trajectory run_trajectory(const ModelSpec& model, const Protocol& protocol,
                          const bath::BathSpec& bath, const InitialGuess& guess,
                          const TrajectoryOptions& options = {});

}  // namespace ara::meanfield
