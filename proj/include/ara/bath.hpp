#pragma once

#include <cstddef>
#include <mutex>
#include <numbers>
#include <tuple>
#include <unordered_map>

namespace ara::bath {

// Ohmic bath seen by each spin. Energies are in units of the p-spin coupling.
struct BathSpec {
    double eta{1e-3};                        // dimensionless coupling, proportional to g^2
    double omega_c{8.0 * std::numbers::pi};  // high-frequency cutoff
    double temperature{0.0};                 // T = 1/beta; T == 0 is treated as beta = inf
    bool lamb_shift_enabled{true};

    // Throws ConfigError if eta < 0, omega_c <= 0, temperature < 0 or any is non-finite.
    void validate() const;

    bool zero_temperature() const noexcept { return temperature == 0.0; }
    // Returns +inf at zero temperature.
    double beta() const noexcept;

    friend bool operator==(const BathSpec&, const BathSpec&) = default;
};

// gamma(w) = 2 pi eta w exp(-|w|/omega_c) / (1 - exp(-beta w)).
// Total: w = 0 gives the limit 2 pi eta / beta, and T = 0 gives the one-sided emission rate.
double relaxation_rate(double omega, const BathSpec& bath);

// S(w) = P int dw'/(2 pi) gamma(w') / (w - w'), truncated to [-10 omega_c, 10 omega_c].
// Exactly zero when the Lamb shift is disabled. Throws QuadratureError when adaptive
// refinement cannot reach relative tolerance 1e-8.
double lamb_shift_coefficient(double omega, const BathSpec& bath);

// Memoizes lamb_shift_coefficient on (bath, omega rounded to 1e-12). Safe for concurrent use;
// the table is cleared once it holds `capacity` entries so long trajectories stay bounded.
class LambShiftCache {
public:
    explicit LambShiftCache(std::size_t capacity = 4096) : capacity_(capacity) {}

    double operator()(double omega, const BathSpec& bath);

    std::size_t hits() const;
    std::size_t misses() const;

private:
    using Key = std::tuple<double, double, double, long long>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::unordered_map<Key, double, KeyHash> table_;
    std::size_t hits_{0};
    std::size_t misses_{0};
};

}  // namespace ara::bath
