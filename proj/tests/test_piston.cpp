#include "amprb/errors.hpp"
#include "amprb/piston.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace amprb::piston;

TEST_SUITE("piston") {

TEST_CASE("added mass of the fluid column") {
    PistonParams p;
    CHECK(piston_added_mass(0.0, p) == doctest::Approx(1.5));
    CHECK(piston_added_mass(0.25, p) == doctest::Approx(1.25));
    CHECK(piston_added_mass(1.5 - 1e-12, p) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(piston_added_mass(1.5, p), amprb::DomainError);
}

TEST_CASE("exact solution") {
    PistonParams p;
    const auto s0 = exact_state(0.0, p);
    CHECK(s0.x_b == doctest::Approx(-0.5));
    CHECK(s0.v_b == doctest::Approx(std::numbers::pi / 2));
    CHECK(s0.a_b == 0.0);
    CHECK(s0.p_L == 0.0);
    const auto s = exact_state(0.25, p);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(s.p_L == doctest::Approx(2.25 * pi2).epsilon(1e-14));
    CHECK(s.p_L == doctest::Approx(22.207).epsilon(1e-4));
}

TEST_CASE("momentum identity of the exact solution") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (double rb : {0.0, 1e-7, 1.0, 1e7}) {
        PistonParams p;
        p.rho_b = rb;
        const auto m = Motion::sinusoid(p.alpha_b);
        for (int k = 0; k < 50; ++k) {
            const double t = u(rng);
            const auto s = exact_state(t, p, m);
            const double pI = exact_pressure(m.x(t), t, p, m);
            CHECK(std::abs(p.m_b() * s.a_b + p.H * p.W * pI) <= 1e-12 * std::max(1.0, std::abs(p.m_b() * s.a_b)));
            CHECK(exact_pressure(p.L, t, p, m) == doctest::Approx(applied_pressure(t, p, m)).epsilon(1e-12));
        }
    }
}

TEST_CASE("rest stays at rest") {
    PistonParams p;
    const auto m = Motion::uniform_acceleration(0.0, 0.0, 0.0);
    auto s = initial_state(0.0, 0.01, p, m);
    for (int k = 0; k < 100; ++k) s = step_amp_piston(s, 0.01, p, m);
    CHECK(s.x_b == -0.5);
    CHECK(s.v_b == 0.0);
    CHECK(s.a_b == 0.0);
}

TEST_CASE("constant acceleration is reproduced exactly") {
    for (double rb : {0.0, 1.0, 1e3}) {
        PistonParams p;
        p.rho_b = rb;
        const auto m = Motion::uniform_acceleration(0.0, 0.3, -0.7);
        const auto run = simulate(p, 0.05, 1.0, m);
        CHECK(run.max_error < 1e-13);
    }
}

TEST_CASE("second-order convergence across body densities") {
    for (double rb : {1e-7, 1.0, 1e7}) {
        PistonParams p;
        p.rho_b = rb;
        const auto rows = convergence_study(p, {0.02, 0.01, 0.005, 0.0025});
        for (std::size_t k = 1; k < rows.size(); ++k) {
            CHECK(rows[k].order >= 1.8);
            CHECK(rows[k].order <= 2.2);
        }
    }
}

TEST_CASE("massless body") {
    PistonParams light, unit;
    light.rho_b = 0.0;
    const double e0 = simulate(light, 0.01, 0.8).final_error;
    const double e1 = simulate(unit, 0.01, 0.8).final_error;
    CHECK(std::isfinite(e0));
    CHECK(e0 <= 2.0 * e1);
    CHECK(simulate(light, 0.01, 20.0).max_error < 1e-2);
}

TEST_CASE("bad input") {
    PistonParams p;
    CHECK_THROWS_AS(simulate(p, 0.03, 0.8), std::invalid_argument);
    CHECK_THROWS_AS(simulate(p, -0.01, 0.8), std::invalid_argument);
    p.rho_b = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    PistonParams shallow;
    shallow.L = 0.1;
    CHECK_THROWS_AS(simulate(shallow, 0.01, 0.8), amprb::DomainError);
}

}
