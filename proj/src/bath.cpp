#include "ara/bath.hpp"

#include <cmath>
#include <limits>
#include <functional>
#include <queue>
#include <vector>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ara/error.hpp"

namespace ara::bath {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kWindowInCutoffs = 10.0;
constexpr double kRelTol = 1e-8;
constexpr std::size_t kMaxSegments = 20000;

struct Segment {
    double a;
    double b;
    double value;
    double error;
    double l1;
    std::size_t piece;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// Globally adaptive Gauss-Kronrod (7/15) over several integrands on their own intervals: keep
// bisecting the segment with the largest error estimate until the summed error is below
// kRelTol times the summed L1 norm. Boost's recursive driver tests each half against its own
// estimate, which never converges on pieces whose integral nearly cancels.
class Integrator {
public:
    using Function = std::function<double(double)>;

    // Adds f over [a, b], split at `kink` when it lies strictly inside.
    void add(Function f, double a, double b, double kink) {
        if (!(b > a)) return;
        pieces_.push_back(std::move(f));
        const std::size_t id = pieces_.size() - 1;
        if (kink > a && kink < b) {
            push(id, a, kink);
            push(id, kink, b);
        } else {
            push(id, a, b);
        }
    }

    void refine() {
        while (!converged() && !heap_.empty() && heap_.size() < kMaxSegments) {
            const Segment worst = heap_.top();
            const double mid = 0.5 * (worst.a + worst.b);
            if (!(mid > worst.a && mid < worst.b)) return;
            heap_.pop();
            value_ -= worst.value;
            error_ -= worst.error;
            l1_ -= worst.l1;
            push(worst.piece, worst.a, mid);
            push(worst.piece, mid, worst.b);
        }
    }

    bool converged() const { return error_ <= kRelTol * l1_; }
    double value() const { return value_; }
    double error() const { return error_; }
    double l1() const { return l1_; }

private:
    void push(std::size_t id, double a, double b) {
        Segment s{a, b, 0.0, 0.0, 0.0, id};
        s.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            pieces_[id], a, b, 0, 0.0, &s.error, &s.l1);
        s.error *= 0.5 * (b - a);  // Boost reports it for the rule on [-1, 1]
        value_ += s.value;
        error_ += s.error;
        l1_ += s.l1;
        heap_.push(s);
    }

    std::vector<Function> pieces_;
    std::priority_queue<Segment> heap_;
    double value_{0.0};
    double error_{0.0};
    double l1_{0.0};
};

}  // namespace

void BathSpec::validate() const {
    if (!std::isfinite(eta) || eta < 0.0) throw ConfigError("bath.eta must be finite and >= 0");
    if (!std::isfinite(omega_c) || omega_c <= 0.0)
        throw ConfigError("bath.omega_c must be finite and > 0");
    if (!std::isfinite(temperature) || temperature < 0.0)
        throw ConfigError("bath.temperature must be finite and >= 0");
}

double BathSpec::beta() const noexcept {
    return zero_temperature() ? std::numeric_limits<double>::infinity() : 1.0 / temperature;
}

double relaxation_rate(double omega, const BathSpec& bath) {
    const double prefactor = kTwoPi * bath.eta;
    if (bath.zero_temperature()) {
        return omega > 0.0 ? prefactor * omega * std::exp(-omega / bath.omega_c) : 0.0;
    }
    if (omega == 0.0) return prefactor * bath.temperature;

    // Both signs share the denominator 1 - exp(-beta |w|); the absorption side picks up
    // exp(-beta |w|) explicitly so that detailed balance holds to rounding.
    const double beta = 1.0 / bath.temperature;
    const double x = std::abs(omega);
    const double emission = prefactor * x * std::exp(-x / bath.omega_c) / -std::expm1(-beta * x);
    return omega > 0.0 ? emission : emission * std::exp(-beta * x);
}

double lamb_shift_coefficient(double omega, const BathSpec& bath) {
    if (!bath.lamb_shift_enabled) return 0.0;

    const double lo = -kWindowInCutoffs * bath.omega_c;
    const double hi = kWindowInCutoffs * bath.omega_c;
    const double delta = std::min(1.0, bath.omega_c) / 10.0;

    auto gamma = [&bath](double w) { return relaxation_rate(w, bath); };

    auto outer = [&](double w) { return gamma(w) / (omega - w); };
    // P int_{w-d}^{w+d} gamma(w')/(w - w') dw' = int_0^d [gamma(w - u) - gamma(w + u)] / u du
    auto folded = [&](double u) { return (gamma(omega - u) - gamma(omega + u)) / u; };

    Integrator total;
    if (omega - delta >= hi || omega + delta <= lo) {
        // Pole outside the truncated support: ordinary integral.
        total.add(outer, lo, hi, 0.0);
    } else {
        total.add(outer, lo, omega - delta, 0.0);
        total.add(outer, omega + delta, hi, 0.0);
        total.add(folded, 0.0, delta, std::abs(omega));
    }
    total.refine();

    if (!total.converged() || !std::isfinite(total.value())) {
        std::ostringstream msg;
        msg << "Lamb-shift quadrature did not converge at omega=" << omega
            << " (error estimate " << total.error() << ", L1 " << total.l1() << ")";
        throw QuadratureError(msg.str(), total.error());
    }
    return total.value() / kTwoPi;
}

std::size_t LambShiftCache::KeyHash::operator()(const Key& k) const noexcept {
    std::size_t h = std::hash<double>{}(std::get<0>(k));
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(std::hash<double>{}(std::get<1>(k)));
    mix(std::hash<double>{}(std::get<2>(k)));
    mix(std::hash<long long>{}(std::get<3>(k)));
    return h;
}

double LambShiftCache::operator()(double omega, const BathSpec& bath) {
    if (!bath.lamb_shift_enabled) return 0.0;
    const Key key{bath.eta, bath.omega_c, bath.temperature, std::llround(omega * 1e12)};
    {
        std::lock_guard lock(mutex_);
        if (auto it = table_.find(key); it != table_.end()) {
            ++hits_;
            return it->second;
        }
    }
    // Evaluate at the rounded frequency so a hit and a miss give bit-identical values.
    const double value = lamb_shift_coefficient(static_cast<double>(std::get<3>(key)) * 1e-12, bath);
    std::lock_guard lock(mutex_);
    ++misses_;
    if (table_.size() >= capacity_) table_.clear();
    table_.emplace(key, value);
    return value;
}

std::size_t LambShiftCache::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

std::size_t LambShiftCache::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

}  // namespace ara::bath
