#include "ara/spin_dynamics.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "ara/error.hpp"

namespace ara::spin {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

struct Channel {
    double rate;
    const Matrix2c* jump;
};

// Evaluates the Lindbladian on an arbitrary operator X.
Matrix2c lindblad_action(const Matrix2c& h_total, const std::array<Channel, 3>& channels,
                         const Matrix2c& x) {
    Matrix2c out = -kI * (h_total * x - x * h_total);
    for (const auto& ch : channels) {
        if (ch.rate == 0.0) continue;
        const Matrix2c& l = *ch.jump;
        const Matrix2c ldl = l.adjoint() * l;
        out += ch.rate * (l * x * l.adjoint() - 0.5 * (ldl * x + x * ldl));
    }
    return out;
}

const std::array<Matrix2c, 4>& pauli_basis() {
    static const std::array<Matrix2c, 4> basis{Matrix2c::Identity(), pauli_x(), pauli_y(),
                                               pauli_z()};
    return basis;
}

Generator assemble(const EffectiveFields& f, const bath::BathSpec& bath,
                   const std::function<double(double)>& lamb) {
    const JumpSet jumps = jump_operators(f);
    const double gap = jumps.omega_gap;

    const std::array<Channel, 3> channels{
        Channel{bath::relaxation_rate(0.0, bath), &jumps.L0},
        Channel{jumps.degenerate ? 0.0 : bath::relaxation_rate(gap, bath), &jumps.Lplus},
        Channel{jumps.degenerate ? 0.0 : bath::relaxation_rate(-gap, bath), &jumps.Lminus},
    };

    Matrix2c h_total = hamiltonian(f);
    if (bath.lamb_shift_enabled) {
        const std::array<std::pair<double, const Matrix2c*>, 3> terms{
            std::pair{0.0, &jumps.L0}, std::pair{gap, &jumps.Lplus}, std::pair{-gap, &jumps.Lminus}};
        for (const auto& [omega, l] : terms) {
            if (l->isZero(0.0)) continue;
            h_total += lamb(omega) * (l->adjoint() * *l);
        }
    }

    Superoperator g = Superoperator::Zero();
    const auto& basis = pauli_basis();
    for (int j = 0; j < 4; ++j) {
        const Matrix2c image = lindblad_action(h_total, channels, basis[j]);
        for (int i = 0; i < 4; ++i) {
            g(i, j) = 0.5 * (basis[i] * image).trace().real();
        }
    }
    return Generator(g, f, bath);
}

Eigen::Vector4d homogeneous(const SpinState& s) {
    return {1.0, s.bloch.x(), s.bloch.y(), s.bloch.z()};
}

}  // namespace

Matrix2c pauli_x() {
    Matrix2c m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix2c pauli_y() {
    Matrix2c m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}

Matrix2c pauli_z() {
    Matrix2c m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix2c SpinState::density_matrix() const {
    return 0.5 * (Matrix2c::Identity() + bloch.x() * pauli_x() + bloch.y() * pauli_y() +
                  bloch.z() * pauli_z());
}

SpinState SpinState::from_density_matrix(const Matrix2c& rho) {
    return SpinState{{(rho * pauli_x()).trace().real(), (rho * pauli_y()).trace().real(),
                      (rho * pauli_z()).trace().real()}};
}

EffectiveFields effective_fields(double s, double lambda, double h, int epsilon) {
    return {h + (1.0 - s) * (1.0 - lambda) * epsilon, (1.0 - s) * lambda};
}

Matrix2c hamiltonian(const EffectiveFields& f) {
    return -f.nu * pauli_z() - f.gamma_x * pauli_x();
}

Eigensystem eigensystem(const EffectiveFields& f) {
    const double nu = f.nu;
    const double g = f.gamma_x;
    const double e2 = nu * nu + g * g;
    Eigensystem out;
    if (e2 < kDegenerateGap2) {
        out.degenerate = true;
        return out;
    }
    const double e = std::sqrt(e2);
    out.lower = -e;
    out.upper = e;
    for (int k = 0; k < 2; ++k) {
        const double eps = k == 0 ? -e : e;
        // (Gamma, -(eps + nu)) and (nu - eps, Gamma) span the same line; use the better
        // conditioned one (the first collapses when Gamma -> 0 with eps = -nu).
        Eigen::Vector2d a{g, -(eps + nu)};
        Eigen::Vector2d b{nu - eps, g};
        Eigen::Vector2d v = a.squaredNorm() >= b.squaredNorm() ? a : b;
        out.vectors.col(k) = v.normalized();
    }
    return out;
}

JumpSet jump_operators(const EffectiveFields& f) {
    const double nu = f.nu;
    const double g = f.gamma_x;
    const double e2 = nu * nu + g * g;
    JumpSet out;
    if (e2 < kDegenerateGap2) {
        out.L0 = pauli_z();
        out.degenerate = true;
        return out;
    }
    const double e = std::sqrt(e2);
    out.omega_gap = 2.0 * e;

    const double c0 = nu / e2;
    out.L0 << c0 * nu, c0 * g, c0 * g, -c0 * nu;

    const double cp = g / (2.0 * e2);
    out.Lplus << cp * g, cp * (-e - nu), cp * (e - nu), -cp * g;
    out.Lminus << cp * g, cp * (e - nu), cp * (-e - nu), -cp * g;
    return out;
}

Eigen::Vector3d Generator::apply(const SpinState& state) const {
    return (matrix_ * homogeneous(state)).tail<3>();
}

Matrix2c Generator::apply(const Matrix2c& op) const {
    const auto& basis = pauli_basis();
    Eigen::Vector4cd coeff;
    for (int i = 0; i < 4; ++i) coeff(i) = 0.5 * (basis[i] * op).trace();
    const Eigen::Vector4cd image = matrix_.cast<cd>() * coeff;
    Matrix2c out = Matrix2c::Zero();
    for (int i = 0; i < 4; ++i) out += image(i) * basis[i];
    return out;
}

Generator build_generator(const EffectiveFields& f, const bath::BathSpec& bath) {
    return assemble(f, bath, [&bath](double w) { return bath::lamb_shift_coefficient(w, bath); });
}

Generator build_generator(const EffectiveFields& f, const bath::BathSpec& bath,
                          bath::LambShiftCache& cache) {
    return assemble(f, bath, [&](double w) { return cache(w, bath); });
}

SpinState propagate_step(const SpinState& state, const Generator& gen, double dt,
                         const StepOptions& options) {
    if (dt == 0.0) return state;
    Eigen::Vector4d v = homogeneous(state);
    if (options.integrator == Integrator::Exact) {
        const Superoperator prop = (dt * gen.matrix()).exp();
        v = prop * v;
    } else {
        const int n = std::max(1, options.rk4_substeps);
        const double h = dt / n;
        const Superoperator& g = gen.matrix();
        for (int k = 0; k < n; ++k) {
            const Eigen::Vector4d k1 = g * v;
            const Eigen::Vector4d k2 = g * (v + 0.5 * h * k1);
            const Eigen::Vector4d k3 = g * (v + 0.5 * h * k2);
            const Eigen::Vector4d k4 = g * (v + h * k3);
            v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    SpinState out{v.tail<3>()};
    const double norm = out.bloch.norm();
    if (!(norm <= 1.0 + kPositivityTolerance)) {
        std::ostringstream msg;
        msg << "propagation left the Bloch ball: |r| = " << norm << " (nu=" << gen.fields().nu
            << ", Gamma=" << gen.fields().gamma_x << ", dt=" << dt << ")";
        throw PositivityError(msg.str(), norm);
    }
    return out;
}

SpinState gibbs_state(const EffectiveFields& f, double beta) {
    const double e2 = f.nu * f.nu + f.gamma_x * f.gamma_x;
    if (e2 < kDegenerateGap2) return SpinState{Eigen::Vector3d::Zero()};
    const double e = std::sqrt(e2);
    const double polarization = std::isinf(beta) ? 1.0 : std::tanh(beta * e);
    // Ground state of -E n.sigma points along n = (Gamma, 0, nu) / E.
    return SpinState{polarization * Eigen::Vector3d{f.gamma_x / e, 0.0, f.nu / e}};
}

}  // namespace ara::spin
