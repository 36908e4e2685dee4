#include "amprb/errors.hpp"
#include "amprb/model_am.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace amprb;

TEST_SUITE("model_am") {

TEST_CASE("added mass") {
    const double inf_limit = 2.0 / 3.0 * std::numbers::pi;
    CHECK(std::abs(am::added_mass({1.0, 1e4}, 1.0) / inf_limit - 1.0) < 1e-6);
    CHECK(am::added_mass({1.0, 2.0}, 1.0) == doctest::Approx(4.0 * std::numbers::pi / 3.0 * 5.0 / 7.0).epsilon(1e-14));
    CHECK(am::added_mass({1.0, 2.0}, 0.0) == 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int k = 0; k < 20; ++k) {
        const double r1 = u(rng), r2 = r1 * (1.0 + u(rng)), rho = u(rng);
        CHECK(am::added_mass({r1, r2}, rho) ==
              doctest::Approx(static_cast<double>(oracle::added_mass(r1, r2, rho))).epsilon(1e-13));
    }
}

TEST_CASE("added mass decreases with the outer radius and diverges at contact") {
    double prev = INFINITY;
    for (double r2 : {1.0001, 1.001, 1.01, 1.1, 2.0, 10.0}) {
        const double m = am::added_mass({1.0, r2}, 1.0);
        CHECK(m < prev);
        prev = m;
    }
    CHECK(am::added_mass({1.0, 1.0 + 1e-9}, 1.0) > 1e8);
}

TEST_CASE("well-posedness predicate") {
    CHECK(am::is_wellposed(0.0, 2.0944, 1e-6));
    CHECK_FALSE(am::is_wellposed(0.0, 0.0, 1e-6));
    CHECK(am::is_wellposed(1e-7, am::added_mass({1.0, 2.0}, 1.0), 1.0));
}

TEST_CASE("zero forcing gives the zero solution") {
    am::AmProblem p;
    p.f_e = [](double) { return 0.0; };
    for (double t : {0.0, 0.5, 3.0}) {
        const auto s = am::exact_state(p, t);
        CHECK(s.w_b == 0.0);
        CHECK(s.a_w == 0.0);
        for (double r : {1.0, 1.5, 2.0}) {
            CHECK(s.p_hat(r) == 0.0);
            CHECK(s.u_hat(r) == 0.0);
            CHECK(s.v_hat(r) == 0.0);
        }
    }
}

TEST_CASE("constant force on a massless body") {
    am::AmProblem p;
    p.m_b = 0.0;
    p.f_e = [](double) { return 1.0; };
    const double Ma = static_cast<double>(oracle::added_mass(1, 2, 1));
    const auto s = am::exact_state(p, 1.0);
    CHECK(s.w_b == doctest::Approx(1.0 / Ma).epsilon(1e-10));
    CHECK(s.w_b == doctest::Approx(0.33423).epsilon(1e-4));
    CHECK(s.u_hat(1.0) == doctest::Approx(s.w_b).epsilon(1e-15));
    CHECK(std::abs(s.u_hat(2.0)) < 1e-15);
}

TEST_CASE("exact fields satisfy continuity to second order") {
    am::AmProblem p;
    p.m_b = 0.3;
    p.f_e = [](double t) { return std::sin(t); };
    const auto s = am::exact_state(p, 1.3);
    for (double r : {1.2, 1.5, 1.8}) {
        auto res = [&](double h) {
            auto q = [&](double x) { return x * x * s.u_hat(x); };
            return std::abs((q(r + h) - q(r - h)) / (2 * h) / (r * r) - 2.0 * s.v_hat(r) / r);
        };
        const double e1 = res(1e-2), e2 = res(5e-3);
        CHECK(e1 < 1e-3);
        CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.02));
    }
}

TEST_CASE("body velocity from trapezoidal force sums converges at second order") {
    am::AmProblem p;
    p.m_b = 0.7;
    p.f_e = [](double t) { return std::sin(t); };
    const double T = 2.0;
    const double mass = p.m_b + am::added_mass(p.geom, p.rho);
    const double ref = am::exact_state(p, T).w_b;
    auto trap = [&](int n) {
        const double h = T / n;
        double s = 0.5 * (p.f_e(0.0) + p.f_e(T));
        for (int k = 1; k < n; ++k) s += p.f_e(k * h);
        return s * h / mass;
    };
    const double e1 = std::abs(trap(20) - ref), e2 = std::abs(trap(40) - ref);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.01));
    CHECK(ref == doctest::Approx((1.0 - std::cos(T)) / mass).epsilon(1e-10));
}

TEST_CASE("pressure BVP reproduces the exact pressure over random draws") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        am::AmProblem p;
        p.geom.r1 = 0.2 + 2.0 * u(rng);
        p.geom.r2 = p.geom.r1 * (1.05 + 4.0 * u(rng));
        p.rho = 0.1 + 5.0 * u(rng);
        p.m_b = 10.0 * u(rng);
        p.f_e = [](double t) { return std::sin(t); };
        const double t = 10.0 * u(rng);
        const auto sol = am::solve_amp_pressure_bvp(p, p.f_e(t));
        const auto ex = am::exact_state(p, t);
        CHECK(std::abs(sol.a_w - ex.a_w) <= 1e-10 * std::abs(ex.a_w) + 1e-300);
        double pmax = 0.0, err = 0.0;
        for (int j = 0; j < 20; ++j) {
            const double r = p.geom.r1 + (p.geom.r2 - p.geom.r1) * j / 19.0;
            pmax = std::max(pmax, std::abs(ex.p_hat(r)));
            err = std::max(err, std::abs(sol.p_hat(r) - ex.p_hat(r)));
        }
        CHECK(err <= 1e-10 * pmax);
        CHECK(std::abs(sol.dp_hat(p.geom.r2)) <= 1e-12 * (std::abs(sol.c1) + 1.0));
    }
}

TEST_CASE("pressure BVP special cases") {
    am::AmProblem p;
    p.m_b = 0.0;
    const auto zero = am::solve_amp_pressure_bvp(p, 0.0);
    CHECK(zero.a_w == 0.0);
    CHECK(zero.p_hat(1.5) == 0.0);
    const auto one = am::solve_amp_pressure_bvp(p, 1.0);
    CHECK(one.a_w == doctest::Approx(0.33423).epsilon(1e-4));
    p.f_e = [](double) { return 1.0; };
    CHECK(one.p_hat(1.0) == doctest::Approx(am::exact_state(p, 0.4).p_hat(1.0)).epsilon(1e-12));
}

TEST_CASE("threshold violations are singular") {
    am::AmProblem p;
    p.K = 1e3;
    CHECK_THROWS_AS(am::exact_state(p, 1.0), SingularityError);
    CHECK_THROWS_AS(am::solve_amp_pressure_bvp(p, 1.0), SingularityError);
}

TEST_CASE("adaptive trapezoid") {
    CHECK(am::adaptive_trapezoid([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-10));
    CHECK(am::adaptive_trapezoid([](double x) { return x; }, 2.0, 2.0) == 0.0);
}

}
