#include <doctest.h>

#include <cmath>

#include "ara/error.hpp"
#include "ara/meanfield.hpp"
#include "oracles.hpp"

using namespace ara::meanfield;
using ara::bath::BathSpec;

namespace {

BathSpec bath_at(double temperature, double eta = 1e-3) {
    BathSpec b;
    b.temperature = temperature;
    b.eta = eta;
    return b;
}

}  // namespace

TEST_SUITE("meanfield") {

TEST_CASE("model and guess validation") {
    CHECK_THROWS_AS(ModelSpec{1}.validate(), ara::ConfigError);
    CHECK_NOTHROW(ModelSpec{3}.validate());
    CHECK_THROWS_AS(InitialGuess{1.2}.validate(), ara::ConfigError);
    CHECK_THROWS_AS(InitialGuess{-0.1}.validate(), ara::ConfigError);
    CHECK_NOTHROW(InitialGuess{0.0}.validate());
}

TEST_CASE("protocol validation") {
    Protocol p = Protocol::linear(10.0);
    CHECK_NOTHROW(p.validate());
    p.tau = 0.0;
    CHECK_THROWS_AS(p.validate(), ara::ConfigError);
    p = Protocol::linear(10.0, -0.1);
    CHECK_THROWS_AS(p.validate(), ara::ConfigError);
    p = Protocol::linear(10.0);
    p.path = {{0.0, 0.0, 0.0}, {0.5, 0.2, 0.1}, {0.5, 0.5, 0.5}, {1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(p.validate(), ara::ConfigError);
    p.path = {{0.0, 0.0, 0.0}, {1.0, 1.0, 0.9}};
    CHECK_THROWS_AS(p.validate(), ara::ConfigError);
    p.path = {{0.0, 0.0, 0.0}, {0.5, 1.2, 0.1}, {1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(p.validate(), ara::ConfigError);
}

TEST_CASE("piecewise-linear controls") {
    Protocol p = Protocol::linear(20.0);
    auto [s, l] = p.controls(5.0);
    CHECK(s == doctest::Approx(0.25));
    CHECK(l == doctest::Approx(0.25));
    p.path = {{0.0, 0.0, 0.0}, {0.5, 0.8, 0.2}, {1.0, 1.0, 1.0}};
    std::tie(s, l) = p.controls(5.0);
    CHECK(s == doctest::Approx(0.4));
    CHECK(l == doctest::Approx(0.1));
    std::tie(s, l) = p.controls(15.0);
    CHECK(s == doctest::Approx(0.9));
    CHECK(l == doctest::Approx(0.6));
    std::tie(s, l) = p.controls(20.0);
    CHECK(s == 1.0);
    CHECK(l == 1.0);
}

TEST_CASE("step count and final partial step") {
    CHECK(Protocol::linear(1.0, 0.1).steps() == 10);
    CHECK(Protocol::linear(100.0, 0.1).steps() == 1000);
    const Protocol p = Protocol::linear(1.05, 0.1);
    CHECK(p.steps() == 11);
    CHECK(p.time_at(11) == 1.05);
    CHECK(p.time_at(10) == doctest::Approx(1.0));
    CHECK(Protocol::linear(0.3, 0.3).steps() == 1);
}

TEST_CASE("mean field and magnetization") {
    CHECK(mean_field_h(0.5, 0.4, {3}) == doctest::Approx(0.5 * 3 * 0.16));
    CHECK(mean_field_h(0.0, 0.9, {3}) == 0.0);
    CHECK(ensemble_magnetization(ara::spin::SpinState::up(), ara::spin::SpinState::down(), {0.9}) ==
          doctest::Approx(0.8));
}

TEST_CASE("initial state and a single-step protocol") {
    const auto traj = run_trajectory({3}, Protocol::linear(0.5, 0.5), bath_at(0.4), {0.9});
    REQUIRE(traj.size() == 2);
    CHECK(traj[0].t == 0.0);
    CHECK(traj[0].m == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(traj[0].s == 0.0);
    CHECK(traj[0].h == 0.0);
    CHECK(traj[1].t == 0.5);
    CHECK(traj[1].s == 1.0);
    CHECK(traj[1].lambda == 1.0);
}

TEST_CASE("closed-system trajectories match the spinor oracle") {
    for (double c : {0.9, 0.725, 0.6}) {
        for (double tau : {5.0, 50.0, 300.0}) {
            const auto traj = run_trajectory({3}, Protocol::linear(tau), bath_at(0.7, 0.0), {c});
            const auto ref = oracle::closed_trajectory(3, c, tau, 0.1L);
            REQUIRE(ref.size() == traj.size());
            double worst = 0.0;
            for (std::size_t k = 0; k < traj.size(); ++k) {
                CHECK(traj[k].t == doctest::Approx(static_cast<double>(ref[k].t)));
                worst = std::max(worst, std::abs(traj[k].m - static_cast<double>(ref[k].m)));
            }
            INFO("c=" << c << " tau=" << tau);
            CHECK(worst < 1e-10);
        }
    }
}

TEST_CASE("closed-system evolution keeps both spins pure") {
    const auto traj = run_trajectory({3}, Protocol::linear(40.0), bath_at(0.0, 0.0), {0.8});
    for (const auto& r : traj) {
        CHECK(r.bloch_u.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.bloch_d.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("RK4 and exact steps agree along a trajectory") {
    TrajectoryOptions rk4;
    rk4.step = {ara::spin::Integrator::RK4, 20};
    const auto a = run_trajectory({3}, Protocol::linear(30.0), bath_at(1.0, 0.01), {0.9});
    const auto b = run_trajectory({3}, Protocol::linear(30.0), bath_at(1.0, 0.01), {0.9}, rk4);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k].m - b[k].m) < 1e-10);
}

TEST_CASE("trajectories are deterministic") {
    const auto a = run_trajectory({3}, Protocol::linear(20.0), bath_at(1.57), {0.9});
    const auto b = run_trajectory({3}, Protocol::linear(20.0), bath_at(1.57), {0.9});
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].m == b[k].m);
        CHECK(a[k].bloch_u == b[k].bloch_u);
    }
}

TEST_CASE("strong bath drives the ensemble to the final Gibbs state") {
    // With a large coupling the final state is thermal for H = -h Z at s = 1.
    const auto traj = run_trajectory({3}, Protocol::linear(200.0), bath_at(3.5, 0.2), {0.9});
    CHECK(std::abs(traj.back().m) < 1e-3);
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(run_trajectory({3}, Protocol::linear(-1.0), bath_at(0.4), {0.9}),
                    ara::ConfigError);
    CHECK_THROWS_AS(run_trajectory({3}, Protocol::linear(1.0), bath_at(-0.4), {0.9}),
                    ara::ConfigError);
    CHECK_THROWS_AS(run_trajectory({3}, Protocol::linear(1.0), bath_at(0.4), {1.5}),
                    ara::ConfigError);
}

}  // TEST_SUITE
