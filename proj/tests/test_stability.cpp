#include "amprb/errors.hpp"
#include "amprb/model_ad.hpp"
#include "amprb/stability.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace amprb;
using oracle::CLD;

namespace {

stab::StabilityParams at(double delta, double beta, double I_bar = 0.0) {
    stab::StabilityParams p;
    p.delta = delta;
    p.beta_d = beta;
    p.I_bar = I_bar;
    return p;
}

oracle::Nv oracle_for(const stab::StabilityParams& p) {
    return {p.geom.r1, p.geom.r2, p.dr, p.delta, p.beta_d, p.I_bar};
}

Complex to_c(CLD z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("transfer coefficient") {
    auto p = at(1.0, 1.0);
    // Steady limit evaluated from the closed-form profile.
    auto f0 = [](double r) { return static_cast<double>(oracle::phi_steady(r, 1, 2)) / r; };
    const double c0 = 0.5 * (3.0 * f0(1.0) - 4.0 * f0(1.05) + f0(1.1));
    CHECK(stab::transfer_coefficient(1e-9, p).real() == doctest::Approx(c0).epsilon(1e-12));
    CHECK(c0 > 0.0);
    p.dr = 0.01;
    CHECK(stab::transfer_coefficient(20.0 / 0.01, p).real() == doctest::Approx(1.5).epsilon(0.02));
    p.dr = 0.05;
    const Complex a = stab::transfer_coefficient({3, 2}, p), b = stab::transfer_coefficient({3, -2}, p);
    CHECK(std::abs(a - std::conj(b)) < 1e-12 * std::abs(a));
    CHECK(stab::transfer_coefficient(4.0, p).imag() == 0.0);
}

TEST_CASE("amplification function matches the extended-precision rebuild") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ld(-2.0, 2.0), beta(0.0, 3.0), mod(1.001, 10.0), ang(-3.14, 3.14),
        ib(0.0, 2.0);
    for (int k = 0; k < 30; ++k) {
        const auto p = at(std::pow(10.0, ld(rng)), beta(rng), k % 3 ? 0.0 : ib(rng));
        const stab::AmplificationEquation eq(p);
        const auto ref = oracle_for(p);
        CHECK(eq.c1() == doctest::Approx(static_cast<double>(ref.C1)).epsilon(1e-12));
        for (int j = 0; j < 5; ++j) {
            const Complex A = std::polar(mod(rng), ang(rng));
            const Complex got = eq.nv(A);
            const CLD want = ref(CLD(A.real(), A.imag()));
            CHECK(std::abs(got - to_c(want)) < 1e-10 * eq.nv_scale(A));
            CHECK(std::abs(eq.nv(std::conj(A)) - std::conj(got)) < 1e-12 * eq.nv_scale(A));
            const Complex B = 1.0 / A;
            CHECK(std::abs(eq.g(B) - got * B * B * B) < 1e-12 * eq.nv_scale(A) * std::norm(B) * std::abs(B));
        }
    }
}

TEST_CASE("amplification function is singular at minus one") {
    const stab::AmplificationEquation eq(at(1.0, 1.0));
    CHECK_THROWS_AS(eq.nv(-1.0), SingularityError);
}

TEST_CASE("vanishing cubic coefficient leaves a double root at zero") {
    auto p = at(2.0, 1.0);
    const double c1 = stab::AmplificationEquation(p).c1();
    p.beta_d = c1 / (2.0 * p.d_bar());
    const stab::AmplificationEquation eq(p);
    CHECK(std::abs(eq.gamma_v()) < 1e-24);
    // Off the real axis: real A in (-1, 1) maps to imaginary zeta, near the
    // Dirichlet eigenvalues where C varies quickly.
    const Complex dir = std::polar(1.0, 0.7);
    const Complex a1 = eq.nv(1e-5 * dir), a2 = eq.nv(2e-5 * dir);
    CHECK(std::abs(a2 / a1) == doctest::Approx(4.0).epsilon(1e-2));
}

TEST_CASE("derivative matches the analytic cubic part") {
    auto p = at(3.0, 0.7);
    const stab::AmplificationEquation eq(p);
    for (Complex A : {Complex(2, 1), Complex(-1.5, 3), Complex(0.2, -1.4)}) {
        const double h = 1e-4;
        const Complex fd = (eq.nv(A + h) - eq.nv(A - h)) / (2 * h);
        CHECK(std::abs(eq.nv_derivative(A) - fd) < 1e-6 * eq.nv_scale(A));
    }
}

TEST_CASE("no evaluation errors on the counting annulus") {
    for (auto p : {at(0.01, 1.0), at(1.0, 0.0), at(100.0, 2.5), at(0.3, 1.2, 1.0)}) {
        const stab::AmplificationEquation eq(p);
        for (double m : {1.001, 1.1, 2.0, 5.0, 10.0})
            for (int k = 0; k < 64; ++k) {
                const Complex v = eq.nv(std::polar(m, 2.0 * 3.141592653589793 * (k + 0.5) / 64));
                CHECK(std::isfinite(v.real()));
                CHECK(std::isfinite(v.imag()));
            }
    }
}

TEST_CASE("reference verdicts") {
    CHECK(stab::count_unstable_roots(at(1.0, 1.0)) == 0);
    CHECK(stab::find_roots_outside(at(1.0, 1.0)).max_modulus <= 1.0);
    CHECK(stab::count_unstable_roots(at(10.0, 0.0)) >= 1);
    CHECK(stab::count_unstable_roots(at(100.0, 0.0)) >= 1);
    const auto v = stab::find_roots_outside(at(10.0, 2.0));
    REQUIRE(v.roots.size() == 2);
    CHECK(v.roots[0].real() == doctest::Approx(0.103966).epsilon(1e-5));
    CHECK(std::abs(v.roots[0].imag()) == doctest::Approx(1.0429).epsilon(1e-4));
}

TEST_CASE("counts agree with an independent argument-principle count") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ld(-1.5, 2.0), beta(0.05, 3.0);
    int compared = 0;
    for (int k = 0; k < 20; ++k) {
        const auto p = at(std::pow(10.0, ld(rng)), beta(rng));
        const auto v = stab::find_roots_outside(p, 1e-3, 10.0);
        CHECK(v.unstable_root_count == stab::count_unstable_roots(p, 1e-3, 10.0));
        CHECK(v.unstable_root_count == static_cast<int>(v.roots.size()));
        const bool near_circle = std::any_of(v.roots.begin(), v.roots.end(), [](Complex z) {
            return std::abs(std::abs(z) - 1.001) < 1e-3 || std::abs(std::abs(z) - 10.0) < 1e-2;
        });
        if (near_circle) continue;
        const auto ref = oracle_for(p);
        CHECK(v.unstable_root_count == oracle::zeros_in_annulus(ref, 1.001L, 10.0L));
        ++compared;
    }
    CHECK(compared >= 15);
}

TEST_CASE("located roots are zeros and closed under conjugation") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ld(-2.0, 2.0), beta(0.0, 3.0);
    for (int k = 0; k < 20; ++k) {
        const auto p = at(std::pow(10.0, ld(rng)), beta(rng));
        const auto v = stab::find_roots_outside(p);
        const stab::AmplificationEquation eq(p);
        for (const Complex z : v.roots) {
            if (std::isinf(z.real())) continue;
            CHECK(std::abs(eq.nv(z)) < 1e-10 * eq.nv_scale(z));
            if (std::abs(z.imag()) > 1e-8) {
                const bool paired = std::any_of(v.roots.begin(), v.roots.end(),
                                                [&](Complex w) { return std::abs(w - std::conj(z)) < 1e-10 * std::abs(z); });
                CHECK(paired);
            }
        }
    }
}

TEST_CASE("scan over the production band") {
    const std::vector<double> deltas{0.1, 1.0, 10.0, 100.0}, betas{0.0, 1.0};
    const auto m = stab::scan_region(deltas, betas, 0.0, stab::StabilityParams{});
    for (std::size_t i = 0; i < deltas.size(); ++i) CHECK(m.at(i, 1).stable());
    bool any_unstable = false;
    for (std::size_t i = 0; i < deltas.size(); ++i) any_unstable |= !m.at(i, 0).stable();
    CHECK(any_unstable);
    const auto again = stab::scan_region_serial(deltas, betas, 0.0, stab::StabilityParams{});
    for (std::size_t k = 0; k < m.cells.size(); ++k) {
        CHECK(m.cells[k].count == again.cells[k].count);
        CHECK(m.cells[k].max_modulus == again.cells[k].max_modulus);
    }
}

TEST_CASE("scan records per-cell errors and continues") {
    const std::vector<double> deltas{-1.0, 1.0}, betas{1.0};
    const auto m = stab::scan_region(deltas, betas, 0.0, stab::StabilityParams{});
    CHECK_FALSE(m.at(0, 0).ok());
    CHECK(m.at(1, 0).stable());
}

TEST_CASE("boundary tracing") {
    stab::TraceOptions o;
    o.ds_max = 0.05;
    o.max_points = 40;
    const auto tr = stab::trace_boundary(stab::StabilityParams{}, 10.0, 1.75, o);
    REQUIRE(tr.points.size() > 10);
    CHECK_FALSE(tr.real_crossing);
    for (const auto& pt : tr.points) {
        CHECK(pt.verified);
        CHECK(pt.residual < 1e-10);
    }

    SUBCASE("continuation bisection agrees with simulation bisection") {
        const auto g = ad::RadialGrid::make({1.0, 2.0}, 200);
        const auto& pt = *std::min_element(tr.points.begin(), tr.points.end(), [](const auto& a, const auto& b) {
            return std::abs(std::log(a.delta / 10.0)) < std::abs(std::log(b.delta / 10.0));
        });
        double lo = pt.beta_d - 0.3, hi = pt.beta_d + 0.3;  // stable below, unstable above
        auto unstable = [&](double b) {
            return ad::measure_growth(ad::matched_params(g.geom, 0.05, pt.delta, b, 0.0), g, 2000, 200) > 1.0 + 1e-3;
        };
        REQUIRE_FALSE(unstable(lo));
        REQUIRE(unstable(hi));
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            (unstable(mid) ? hi : lo) = mid;
        }
        CHECK(std::abs(0.5 * (lo + hi) - pt.beta_d) < 0.05);
    }

    SUBCASE("restart from an interior point reproduces the curve") {
        const auto& mid = tr.points[tr.points.size() / 2];
        const auto again = stab::continue_boundary(stab::StabilityParams{}, mid, tr.real_crossing, +1, o);
        REQUIRE(again.points.size() > 3);
        // Compare against the original polyline, linear in log(delta).
        auto beta_on_original = [&](double d) {
            for (std::size_t k = 0; k + 1 < tr.points.size(); ++k) {
                const auto &a = tr.points[k], &b = tr.points[k + 1];
                if ((d - a.delta) * (d - b.delta) <= 0.0) {
                    const double s = std::log(d / a.delta) / std::log(b.delta / a.delta);
                    return a.beta_d + s * (b.beta_d - a.beta_d);
                }
            }
            return std::numeric_limits<double>::quiet_NaN();
        };
        int overlap = 0;
        for (const auto& q : again.points) {
            const double b = beta_on_original(q.delta);
            if (std::isnan(b)) continue;
            CHECK(std::abs(b - q.beta_d) < 1e-4);
            ++overlap;
        }
        CHECK(overlap >= 3);
    }
}

TEST_CASE("bisection needs a verdict change") {
    CHECK_THROWS_AS(stab::bisect_boundary_beta(stab::StabilityParams{}, 1.0, 0.9, 1.1), DomainError);
    const double b = stab::bisect_boundary_beta(stab::StabilityParams{}, 10.0, 1.5, 2.0);
    CHECK(b == doctest::Approx(1.7745).epsilon(1e-3));
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(at(-1.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(at(1.0, -1.0).validate(), std::invalid_argument);
    auto p = at(1.0, 1.0);
    p.dr = 0.6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

}
