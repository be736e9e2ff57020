#pragma once

#include <limits>
#include <vector>

#include "ara/meanfield.hpp"

namespace ara::equilibrium {

using meanfield::InitialGuess;
using meanfield::ModelSpec;

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

// beta for a temperature, with T = 0 mapped to +inf.
double beta_from_temperature(double temperature);

// Point in the (s, lambda) control plane plus the bath inverse temperature (may be +inf).
struct ControlPoint {
    double s{0.0};
    double lambda{0.0};
    double beta{1.0};
};

struct Branch {
    double m{0.0};
    double f{0.0};
    // Sign-change bracket on the scan grid that produced this root.
    double bracket_lo{0.0};
    double bracket_hi{0.0};
};

struct EquilibriumSolution {
    double m_star{0.0};
    double f_star{0.0};
    std::vector<Branch> branches;
    bool converged{false};
    // Two branches within 1e-10 in free energy; the larger m was selected.
    bool tie{false};
};

// c F(+1) + (1 - c) F(-1) with F(eps) = u / r tanh(beta r), u = s p m^(p-1) + (1-s)(1-lambda) eps,
// v = (1 - s) lambda, r = sqrt(u^2 + v^2). tanh -> 1 at beta = inf; F = 0 when r = 0.
double magnetization_rhs(double m, const ControlPoint& at, const InitialGuess& guess,
                         const ModelSpec& model);

// s (p - 1) m^p - sum_eps w_eps beta^-1 log 2cosh(beta r_eps); at beta = inf the log 2cosh term
// becomes |r| (the constant log 2 / beta is dropped consistently).
double free_energy(double m, const ControlPoint& at, const InitialGuess& guess,
                   const ModelSpec& model);

struct SolverOptions {
    int grid_points{2001};
    double bisection_tol{1e-12};
    double dedupe_tol{1e-9};
    double residual_tol{1e-10};
    double tie_tol{1e-10};
};

// Enumerates every fixed point of magnetization_rhs on [-1, 1] by bracketing on a uniform grid
// and bisecting, then picks the lowest free energy. Throws EquilibriumError if no root survives.
EquilibriumSolution solve_equilibrium(const ControlPoint& at, const InitialGuess& guess,
                                      const ModelSpec& model, const SolverOptions& options = {});

// s = 1 specialization: roots of m = tanh(beta p m^(p-1)), independent of the guess.
EquilibriumSolution classical_endpoint(double beta, const ModelSpec& model,
                                       const SolverOptions& options = {});

// Mean energy density of H0 at magnetization m: -m^p.
double model_energy_density(double m, const ModelSpec& model);

}  // namespace ara::equilibrium
