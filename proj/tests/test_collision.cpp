#include "amprb/collision.hpp"
#include "amprb/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace amprb::collision;

namespace {

double max_energy_drift(const std::vector<TrajectoryRow>& tr, bool layer_only) {
    const double e0 = tr.front().E;
    double d = 0.0;
    for (const auto& r : tr)
        if (!layer_only || r.in_layer) d = std::max(d, std::abs(r.E - e0) / std::abs(e0));
    return d;
}

const CollisionScenario& scenario(const std::string& name) {
    static const auto all = reference_scenarios();
    for (const auto& s : all)
        if (s.name == name) return s;
    throw std::logic_error("no scenario " + name);
}

}  // namespace

TEST_SUITE("collision") {

TEST_CASE("repulsion profile") {
    const RepulsionParams p{0.5, 0.1, 0.01, 7.0};
    CHECK(g_rf(0.5 + 0.2, p) == 0.0);
    CHECK(g_rf(0.5, p) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(g_rf(0.55, p) == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(g_rf(0.2, p) == doctest::Approx(100.0));
    CHECK(damping_B(0.55, p) == doctest::Approx(7.0 / 4.0).epsilon(1e-12));
    CHECK(damping_B(0.4, p) == 7.0);
    CHECK(damping_B(0.61, p) == 0.0);
    // Continuity and a vanishing slope at the outer edge.
    for (double y : {0.5, 0.6}) {
        CHECK(std::abs(g_rf(y - 1e-12, p) - g_rf(y + 1e-12, p)) < 1e-8);
        CHECK(std::abs(damping_B(y - 1e-12, p) - damping_B(y + 1e-12, p)) < 1e-8);
    }
    const double h = 1e-7;
    CHECK(std::abs((g_rf(0.6, p) - g_rf(0.6 - h, p)) / h) < 1e-3);
}

TEST_CASE("angular profiles") {
    const AngularParams p;
    const double mid = 0.5 * (p.theta_min + p.theta_max);
    CHECK(g_rt(mid, p) == 0.0);
    CHECK(damping_B_theta(mid, p) == 0.0);
    CHECK(g_rt(p.theta_min, p) == doctest::Approx(1.0 / p.eps1));
    CHECK(damping_B_theta(p.theta_min, p) == doctest::Approx(p.B0));
    CHECK(g_rt(p.theta_max, p) == doctest::Approx(-1.0 / p.eps2));
    CHECK(damping_B_theta(p.theta_max, p) == doctest::Approx(p.B0));
    CHECK(damping_B_theta(p.theta_max + 0.1, p) == p.B0);
    for (double b : {p.theta_min, p.theta_min + p.delta, p.theta_max - p.delta, p.theta_max}) {
        const double lo = std::nextafter(b, -1.0), hi = std::nextafter(b, 2.0);
        CHECK(std::abs(g_rt(lo, p) - g_rt(hi, p)) < 1e-12 * (1.0 / p.eps2));
        CHECK(std::abs(damping_B_theta(lo, p) - damping_B_theta(hi, p)) < 1e-12 * p.B0);
    }
    AngularParams bad = p;
    bad.theta_max = bad.theta_min + bad.delta;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("pairwise force") {
    const Eigen::Vector3d x1(0, 0, 0);
    const double R1 = 0.3, R2 = 0.2, d = 0.1, eps = 0.05;
    CHECK(pairwise_repulsion(x1, Eigen::Vector3d(R1 + R2 + 2 * d, 0, 0), R1, R2, d, eps).isZero());
    const Eigen::Vector3d x2(0, R1 + R2, 0);
    const auto f = pairwise_repulsion(x1, x2, R1, R2, d, eps);
    CHECK(f.norm() == doctest::Approx(1.0 / eps).epsilon(1e-14));
    CHECK(f.y() < 0.0);  // pushes body 1 away from body 2
    const Eigen::Vector3d x3(0.2, 0.25, -0.1);
    CHECK((pairwise_repulsion(x1, x3, R1, R2, d, eps) + pairwise_repulsion(x3, x1, R2, R1, d, eps)).norm() < 1e-14);
    CHECK_THROWS_AS(pairwise_repulsion(x1, x1, R1, R2, d, eps), amprb::DomainError);
}

TEST_CASE("normalization") {
    MprfSystem s;
    s.m_b = 2.0;
    s.rho = 3.0;
    s.L = 0.5;
    s.H = 2.0;
    CHECK(s.added_mass() == doctest::Approx(3.0));
    const auto n = s.normalized({0.5, 0.1, 0.01, 10.0});
    CHECK(n.eps == doctest::Approx(0.05));
    CHECK(n.B0 == doctest::Approx(2.0));
}

TEST_CASE("energy is continuous at the layer edge") {
    const RepulsionParams p{0.5, 0.1, 0.01, 0.0};
    CHECK(energy(0.6, 0.3, p) == doctest::Approx(0.045 + 0.6).epsilon(1e-14));
    CHECK(std::abs(energy(0.6 - 1e-12, 0.3, p) - energy(0.6 + 1e-12, 0.3, p)) < 1e-10);
}

TEST_CASE("undamped rebound conserves energy") {
    MprfSystem sys;
    const auto& sc = scenario("case-II");
    const auto tr = simulate_mprf(sys, sc.normalized, 1e-4, 5.0);
    CHECK(max_energy_drift(tr, true) < 1e-6);
    CHECK(max_energy_drift(tr, false) < 1e-6);
    // Drift shrinks at fourth order in the step.
    const double e1 = max_energy_drift(simulate_mprf(sys, sc.normalized, 4e-3, 2.0), false);
    const double e2 = max_energy_drift(simulate_mprf(sys, sc.normalized, 2e-3, 2.0), false);
    CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("damping dissipates energy at the rate B v^2") {
    MprfSystem sys;
    const auto& sc = scenario("case-III");
    const double dt = 1e-4;
    const auto tr = simulate_mprf(sys, sc.normalized, dt, 3.0);
    for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr[k].E <= tr[k - 1].E + 1e-12);
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
        const double dEdt = (tr[k + 1].E - tr[k - 1].E) / (2 * dt);
        const double rate = -damping_B(tr[k].y, sc.normalized) * tr[k].v * tr[k].v;
        worst = std::max(worst, std::abs(dEdt - rate));
        scale = std::max(scale, std::abs(rate));
    }
    CHECK(worst < 1e-4 * scale);
}

TEST_CASE("four regimes") {
    MprfSystem sys;
    auto run = [&](const std::string& name) {
        const auto& sc = scenario(name);
        return classify(simulate_mprf(sys, sc.normalized, 1e-4, 10.0, 10), sc.normalized);
    };
    const auto c1 = run("case-I"), c2 = run("case-II"), c3 = run("case-III"), c4 = run("case-IV");
    CHECK(c1.kind == CollisionCase::penetration);
    CHECK(c1.min_y < 0.5);
    CHECK(c2.kind == CollisionCase::elastic_rebound);
    CHECK(c2.min_y > 0.5);
    CHECK(c3.kind == CollisionCase::under_damped);
    CHECK(c3.velocity_sign_changes >= 2);
    CHECK(c4.kind == CollisionCase::over_damped);
    CHECK(c4.velocity_sign_changes == 0);
}

TEST_CASE("classification depends only on the trajectory") {
    const RepulsionParams p{0.5, 0.1, 0.01, 0.0};
    std::vector<TrajectoryRow> tr{{0, 1.0, -1.0, 0, false, false},
                                  {1, 0.55, -0.5, 0, true, false},
                                  {2, 0.52, 0.0, 0, true, false},
                                  {3, 0.56, 0.4, 0, true, false}};
    CHECK(classify(tr, p).kind == CollisionCase::transitional);
    tr.push_back({4, 0.45, -0.1, 0, false, true});
    CHECK(classify(tr, p).kind == CollisionCase::penetration);
}

TEST_CASE("blow-up guard") {
    MprfSystem sys;
    sys.f_tilde = -1e13;
    CHECK_THROWS_AS(simulate_mprf(sys, {0.5, 0.1, 0.01, 0.0}, 1e-2, 10.0), amprb::ConvergenceError);
    CHECK_THROWS_AS(simulate_mprf(sys, {0.5, 0.1, 0.01, 0.0}, 0.0, 1.0), std::invalid_argument);
}

}
