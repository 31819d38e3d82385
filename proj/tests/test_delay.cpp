#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "riskresp/integrator.hpp"

using namespace riskresp;
using doctest::Approx;

namespace {

Vector<double> stages(std::initializer_list<double> v)
{
    Vector<double> out(Index(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

} // namespace

TEST_CASE("delay_chain_rhs examples")
{
    CHECK(delay_chain_rhs<double>(100, stages({100}), {1, 20})(0) == 0.0);
    CHECK(delay_chain_rhs<double>(100, stages({0}), {1, 20})(0) == Approx(5.0));
    CHECK(delay_chain_rhs<double>(42, stages({42, 42, 42}), {3, 20}).isZero(0.0));
    CHECK(delay_chain_rhs<double>(42, Vector<double>(0), {0, 20}).size() == 0);

    // Every stage shares tauF / n.
    const auto d = delay_chain_rhs<double>(90, stages({60, 30}), {2, 20});
    CHECK(d(0) == Approx(30.0 / 10.0));
    CHECK(d(1) == Approx(30.0 / 10.0));
}

TEST_CASE("delay_chain_rhs shape mismatch")
{
    CHECK_THROWS_AS(delay_chain_rhs<double>(1, stages({1, 2}), {3, 20}), ShapeError);
    CHECK_THROWS_AS(perceived_signal<double>(1, stages({1}), {0, 20}), ShapeError);
}

TEST_CASE("perceived_signal")
{
    CHECK(perceived_signal<double>(42, Vector<double>(0), {0, 20}) == 42);
    CHECK(perceived_signal<double>(0, stages({10, 7}), {2, 20}) == 7);
}

TEST_CASE("steady state: constant input leaves a chain at that input fixed")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1e4);
    for (int n = 1; n <= 6; ++n) {
        const double level = u(rng);
        const Vector<double> at = Vector<double>::Constant(n, level);
        CHECK(delay_chain_rhs<double>(level, at, {n, 20}).isZero(0.0));
    }
}

TEST_CASE("constant input drives F_n to I by t = 20 tauF")
{
    const double I = 250;
    for (int n : {1, 2, 3, 5}) {
        const DelayChain<double> chain{n, 20};
        const auto rhs = [&](double, const Vector<double>& F) { return delay_chain_rhs<double>(I, F, chain); };
        Vector<double> F = Vector<double>::Zero(n);
        const double dt = 0.05;
        const long long steps = std::llround(20 * chain.tauF / dt);
        for (long long s = 0; s < steps; ++s) F = rk4_step(rhs, s * dt, F, dt);
        CHECK(std::abs(perceived_signal<double>(I, F, chain) - I) < 1e-6 * I);
    }
}

TEST_CASE("impulse response has unit mass and mean tauF for every order")
{
    // Quadrature of the free response from a unit impulse into stage 1.
    for (int n = 1; n <= 5; ++n) {
        const DelayChain<double> chain{n, 20};
        const auto rhs = [&](double, const Vector<double>& F) { return delay_chain_rhs<double>(0.0, F, chain); };
        Vector<double> F = Vector<double>::Zero(n);
        F(0) = 1.0 / chain.stage_time_constant();
        const double dt = 0.01;
        double mass = 0, moment = 0;
        double prev = F(n - 1), t = 0;
        for (int s = 0; s < 60000; ++s) {
            F = rk4_step(rhs, t, F, dt);
            const double cur = F(n - 1);
            mass += 0.5 * dt * (prev + cur);
            moment += 0.5 * dt * (t * prev + (t + dt) * cur);
            prev = cur;
            t += dt;
        }
        CHECK(mass == Approx(1.0).epsilon(1e-4));
        CHECK(moment / mass == Approx(chain.tauF).epsilon(1e-4));
    }
}

TEST_CASE("first-order lag stays within the input range")
{
    const DelayChain<double> chain{1, 20};
    const auto input = [](double t) { return 100 + 60 * std::sin(t / 7.0) + 30 * std::cos(t / 3.0); };
    const auto rhs = [&](double t, const Vector<double>& F) { return delay_chain_rhs<double>(input(t), F, chain); };
    Vector<double> F = Vector<double>::Constant(1, input(0));
    double lo = input(0), hi = input(0);
    const double dt = 0.05;
    for (int s = 0; s < 8000; ++s) {
        F = rk4_step(rhs, s * dt, F, dt);
        for (double tt = s * dt; tt <= (s + 1) * dt; tt += dt / 4) {
            lo = std::min(lo, input(tt));
            hi = std::max(hi, input(tt));
        }
        CHECK(F(0) >= lo - 1e-9);
        CHECK(F(0) <= hi + 1e-9);
    }
}

TEST_CASE("DelayChain validation")
{
    CHECK_THROWS_AS((DelayChain<double>{-1, 20}.validate()), ConfigError);
    CHECK_THROWS_AS((DelayChain<double>{2, 0}.validate()), ConfigError);
    CHECK_NOTHROW((DelayChain<double>{0, 0}.validate()));
}
