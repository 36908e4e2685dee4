#include "amprb/errors.hpp"
#include "amprb/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace amprb::quad;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd grid_function(const CompositeGrid& g, const std::function<double(double, double)>& f) {
    const auto s = sample(g, f);
    return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

// Point ids whose row is of the given kind.
std::vector<int> rows_of(const NeumannSystem& sys, PointKind k) {
    std::vector<int> out;
    for (std::size_t i = 0; i < sys.rows.size(); ++i)
        if (sys.rows[i].kind == k) out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("constants lie in the kernel and linears give the outward slope") {
    for (auto style : {BoundaryStyle::ghost, BoundaryStyle::one_sided}) {
        const auto g = segment_grid(20, 0.0, 1.0, style);
        const auto sys = build_neumann_operator(g);
        const Eigen::VectorXd one = sys.A * grid_function(g, [](double, double) { return 1.0; });
        CHECK(one.cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::VectorXd lin = sys.A * grid_function(g, [](double x, double) { return 3.0 * x; });
        for (int i : rows_of(sys, PointKind::discretization)) CHECK(std::abs(lin[i]) < 1e-10);
        for (int i : rows_of(sys, PointKind::boundary)) {
            const double outward = sys.rows[i].boundary_id == 0 ? -3.0 : 3.0;
            CHECK(lin[i] == doctest::Approx(outward).epsilon(1e-12));
        }
    }
}

TEST_CASE("annulus Laplacian of r squared") {
    double prev = 0.0;
    for (int nr : {8, 16, 32}) {
        const auto g = two_patch_annulus(nr, 4 * nr);
        const auto sys = build_neumann_operator(g);
        const Eigen::VectorXd lap = sys.A * grid_function(g, [](double r, double) { return r * r; });
        double err = 0.0;
        for (int i : rows_of(sys, PointKind::discretization)) err = std::max(err, std::abs(lap[i] - 4.0));
        CHECK(err < 1e-8);  // the polar five-point stencil is exact on r^2
        prev = err;
    }
    (void)prev;
    // A non-polynomial check that does converge at second order.
    double e_prev = 0.0;
    for (int nr : {8, 16, 32}) {
        const auto g = two_patch_annulus(nr, 4 * nr);
        const auto sys = build_neumann_operator(g);
        const Eigen::VectorXd lap =
            sys.A * grid_function(g, [](double r, double th) { return std::pow(r, 3) * std::cos(th); });
        double err = 0.0;
        for (int i : rows_of(sys, PointKind::discretization)) {
            const auto& p = g.points[static_cast<std::size_t>(i)];
            err = std::max(err, std::abs(lap[i] - 8.0 * p.a * std::cos(p.b)));
        }
        if (e_prev > 0.0) CHECK(std::log2(e_prev / err) > 1.8);
        e_prev = err;
    }
}

TEST_CASE("single segment gives trapezoid weights") {
    const int n = 20;
    const auto g = segment_grid(n);
    const auto w = compute_weights(g);
    const double h = 1.0 / n;
    for (std::size_t k = 0; k < g.points.size(); ++k) {
        const auto& p = g.points[k];
        if (p.kind != PointKind::discretization) continue;
        const bool end = p.a < 0.5 * h || p.a > 1.0 - 0.5 * h;
        CHECK(w.volume[k] == doctest::Approx(end ? 0.5 * h : h).epsilon(1e-10));
    }
    CHECK(std::abs(w.volume_sum() - 1.0) < 1e-12);
    CHECK(std::abs(w.surface_sum(0) - 1.0) < 1e-10);
    CHECK(std::abs(w.surface_sum(1) - 1.0) < 1e-10);
    CHECK(w.residual < 1e-10);
    CHECK(w.negative_volume.empty());
}

TEST_CASE("raw null vector is sign-normalized and deterministic") {
    const auto g = segment_grid(12);
    const auto sys = build_neumann_operator(g);
    const auto a = left_null_vector(sys.A), b = left_null_vector(sys.A);
    CHECK(a.w == b.w);
    CHECK(a.residual < 1e-10);
    int pos = 0, neg = 0;
    for (int i : rows_of(sys, PointKind::discretization)) (a.w[i] > 0 ? pos : neg)++;
    CHECK(pos > neg);
}

TEST_CASE("two-dimensional null space is detected") {
    // Two disconnected Neumann segments have two independent compatibility conditions.
    const auto g = segment_grid(10);
    const auto sys = build_neumann_operator(g);
    const Eigen::Index n = sys.A.rows();
    Eigen::SparseMatrix<double> B(2 * n, 2 * n);
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < sys.A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it) {
            trip.emplace_back(it.row(), it.col(), it.value());
            trip.emplace_back(it.row() + n, it.col() + n, 2.0 * it.value());
        }
    B.setFromTriplets(trip.begin(), trip.end());
    CHECK_THROWS_AS(left_null_vector(B), amprb::DomainError);
}

TEST_CASE("overlapping segments count the overlap once") {
    double prev = 0.0;
    for (int n : {20, 40, 80}) {
        const auto g = overlapping_segments(n);
        g.validate();
        const auto w = compute_weights(g);
        const double err = std::abs(w.volume_sum() - 1.0);
        CHECK(err < 1e-3);
        CHECK(w.residual < 1e-10);
        CHECK(std::abs(w.surface_sum(0) - 1.0) < 1e-8);
        CHECK(std::abs(w.surface_sum(1) - 1.0) < 1e-8);
        if (prev > 1e-11 && err > 1e-11) CHECK(prev / err > 3.0);
        prev = err;
        // Linear integrand: exact mean of x over [0, 1].
        CHECK(integrate(w, sample(g, [](double x, double) { return x; })) == doctest::Approx(0.5).epsilon(1e-3));
    }
}

TEST_CASE("two-patch annulus area and perimeters") {
    const auto st = two_patch_convergence(16, 3);
    REQUIRE(st.levels.size() == 3);
    for (const auto& l : st.levels) {
        CHECK(l.residual < 1e-10);
        CHECK(l.area_error < 1e-3 * 3 * kPi);
    }
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(st.area_order[k] >= 1.9);
        CHECK(st.inner_order[k] >= 1.9);
        CHECK(st.outer_order[k] >= 1.9);
    }
}

TEST_CASE("integration and compatibility identity") {
    const auto g = two_patch_annulus(16, 64);
    const auto sys = build_neumann_operator(g);
    const auto w = compute_weights(g);
    CHECK(integrate(w, sample(g, [](double, double) { return 0.0; })) == 0.0);
    CHECK(integrate(w, sample(g, [](double, double) { return 1.0; })) == doctest::Approx(3 * kPi).epsilon(1e-3));
    CHECK(integrate_surface(w, sample(g, [](double, double) { return 1.0; }), 0) ==
          doctest::Approx(2 * kPi).epsilon(1e-3));
    // Sum over interior and boundary rows of w (A phi) vanishes for any phi.
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    Eigen::VectorXd phi(sys.A.cols());
    for (auto& x : phi) x = nd(rng);
    const Eigen::VectorXd Aphi = sys.A * phi;
    double s = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < w.volume.size(); ++i) {
        // Surface weights carry the sign of the outward normal derivative row.
        const double wi = w.volume[i] - w.surface[i] + w.interpolation[i];
        s += wi * Aphi[static_cast<Eigen::Index>(i)];
        scale += std::abs(wi * Aphi[static_cast<Eigen::Index>(i)]);
    }
    CHECK(std::abs(s) < 1e-10 * scale);
    CHECK(w.negatives_near_overlap);
}

TEST_CASE("single annulus away from overlap matches cell volumes") {
    const auto g = annulus_grid(16, 64);
    const auto w = compute_weights(g);
    const double hr = 1.0 / 16, ht = 2 * kPi / 64;
    for (std::size_t k = 0; k < g.points.size(); ++k) {
        const auto& p = g.points[k];
        if (p.kind != PointKind::discretization) continue;
        if (p.a < 1.0 + 3 * hr || p.a > 2.0 - 3 * hr) continue;
        CHECK(w.volume[k] == doctest::Approx(p.a * hr * ht).epsilon(1e-8));
    }
}

TEST_CASE("observed order helper") {
    CHECK(observed_order(4e-4, 1e-4, 1e-12) == doctest::Approx(2.0));
    CHECK(std::isinf(observed_order(1e-14, 1e-15, 1e-12)));
}

}
