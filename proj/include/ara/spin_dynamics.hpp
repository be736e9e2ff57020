#pragma once

#include <Eigen/Dense>

#include "ara/bath.hpp"

namespace ara::spin {

using Matrix2c = Eigen::Matrix2cd;
using Superoperator = Eigen::Matrix4d;

// Single-spin density matrix rho = (I + r . sigma) / 2 stored as its Bloch vector r.
struct SpinState {
    Eigen::Vector3d bloch{0.0, 0.0, 1.0};

    static SpinState up() { return SpinState{{0.0, 0.0, 1.0}}; }
    static SpinState down() { return SpinState{{0.0, 0.0, -1.0}}; }

    double x() const { return bloch.x(); }
    double y() const { return bloch.y(); }
    double z() const { return bloch.z(); }

    Matrix2c density_matrix() const;
    static SpinState from_density_matrix(const Matrix2c& rho);
};

// Overall longitudinal (nu) and transverse (gamma_x) fields felt by one spin:
// H = -nu sigma^z - gamma_x sigma^x.
struct EffectiveFields {
    double nu{0.0};
    double gamma_x{0.0};
};

// Gaps with nu^2 + Gamma^2 below this are treated as fully degenerate.
inline constexpr double kDegenerateGap2 = 1e-24;

struct Eigensystem {
    double lower{0.0};  // -sqrt(nu^2 + Gamma^2)
    double upper{0.0};  // +sqrt(nu^2 + Gamma^2)
    // Columns are the normalized eigenvectors for `lower` and `upper`.
    Eigen::Matrix2d vectors{Eigen::Matrix2d::Identity()};
    bool degenerate{false};
};

// Eigenbasis-resolved pieces of sigma^z. L0 sits at frequency 0, Lplus at +omega_gap
// (relaxation) and Lminus at -omega_gap (excitation).
struct JumpSet {
    Matrix2c L0{Matrix2c::Zero()};
    Matrix2c Lplus{Matrix2c::Zero()};
    Matrix2c Lminus{Matrix2c::Zero()};
    double omega_gap{0.0};
    bool degenerate{false};
};

EffectiveFields effective_fields(double s, double lambda, double h, int epsilon);
Eigensystem eigensystem(const EffectiveFields& f);
JumpSet jump_operators(const EffectiveFields& f);

Matrix2c hamiltonian(const EffectiveFields& f);
Matrix2c pauli_x();
Matrix2c pauli_y();
Matrix2c pauli_z();

// Frozen Lindblad generator in the Pauli basis {I, X, Y, Z}: d/dt (1, r) = G (1, r).
class Generator {
public:
    Generator(const Superoperator& matrix, const EffectiveFields& fields, const bath::BathSpec& bath)
        : matrix_(matrix), fields_(fields), bath_(bath) {}

    const Superoperator& matrix() const { return matrix_; }
    const EffectiveFields& fields() const { return fields_; }
    const bath::BathSpec& bath() const { return bath_; }

    // Time derivative of the Bloch vector.
    Eigen::Vector3d apply(const SpinState& state) const;
    // Full action on an arbitrary 2x2 operator (not necessarily a state).
    Matrix2c apply(const Matrix2c& op) const;

private:
    Superoperator matrix_;
    EffectiveFields fields_;
    bath::BathSpec bath_;
};

// -i[H + H_LS, .] + sum_w gamma(w) (L_w . L_w^dag - {L_w^dag L_w, .}/2), w in {0, +gap, -gap}.
Generator build_generator(const EffectiveFields& f, const bath::BathSpec& bath);
// Same, but Lamb-shift coefficients come from `cache`.
Generator build_generator(const EffectiveFields& f, const bath::BathSpec& bath,
                          bath::LambShiftCache& cache);

enum class Integrator { Exact, RK4 };

struct StepOptions {
    Integrator integrator{Integrator::Exact};
    int rk4_substeps{20};
};

// Bloch-norm excess that is reported as a broken generator rather than rounding.
inline constexpr double kPositivityTolerance = 1e-6;

// exp(dt G) applied to `state`. Throws PositivityError if |r| exceeds 1 + 1e-6.
SpinState propagate_step(const SpinState& state, const Generator& gen, double dt,
                         const StepOptions& options = {});

// Thermal state exp(-beta H) / Z of the effective Hamiltonian; beta = inf gives the ground state.
SpinState gibbs_state(const EffectiveFields& f, double beta);

}  // namespace ara::spin
