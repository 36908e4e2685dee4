#include "amprb/errors.hpp"
#include "amprb/stability.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amprb::stab {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Boundary curve in (theta, log delta, beta_d) for a complex crossing, or in
// (log delta, beta_d) for a crossing at A = 1.
struct Curve {
    StabilityParams base;
    bool real;

    int dim() const { return real ? 2 : 3; }
    int neq() const { return real ? 1 : 2; }
    int iu() const { return real ? 0 : 1; }
    int ib() const { return real ? 1 : 2; }

    StabilityParams params(const Vec& x) const {
        StabilityParams p = base;
        p.delta = std::exp(x[iu()]);
        p.beta_d = x[ib()];
        return p;
    }

    Complex nv(const Vec& x) const {
        AmplificationEquation eq(params(x));
        return eq.nv(real ? Complex(1.0, 0.0) : std::polar(1.0, x[0]));
    }

    Vec residual(const Vec& x) const {
        Complex n = nv(x);
        Vec r(neq());
        r[0] = n.real();
        if (!real) r[1] = n.imag();
        return r;
    }

    Mat jacobian(const Vec& x) const {
        Mat J(neq(), dim());
        for (int k = 0; k < dim(); ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
            Vec xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            J.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
        }
        return J;
    }

    BoundaryPoint point(const Vec& x) const {
        BoundaryPoint bp;
        bp.delta = std::exp(x[iu()]);
        bp.beta_d = x[ib()];
        bp.theta = real ? 0.0 : x[0];
        bp.residual = std::abs(nv(x));
        return bp;
    }

    bool inside(const Vec& x, const TraceOptions& o) const {
        double d = std::exp(x[iu()]), b = x[ib()];
        if (d < o.delta_min || d > o.delta_max || b < o.beta_min || b > o.beta_max) return false;
        if (!real && (x[0] <= 1e-6 || x[0] >= std::numbers::pi - 1e-6)) return false;
        return true;
    }
};

struct Correction {
    bool ok = false;
    int iterations = 0;
};

// Newton on {F(y) = 0, t.(y - anchor) = ds}.
Correction correct(const Curve& c, Vec& y, const Vec& anchor, const Vec& t, double ds,
                   double tol) {
    Correction out;
    const int n = c.dim();
    try {
        for (int it = 1; it <= 15; ++it) {
            Vec F = c.residual(y);
            Mat M(n, n);
            M.topRows(c.neq()) = c.jacobian(y);
            M.row(n - 1) = t.transpose();
            Vec G(n);
            G.head(c.neq()) = F;
            G[n - 1] = t.dot(y - anchor) - ds;
            Vec dy = M.fullPivLu().solve(-G);
            if (!dy.allFinite()) return out;
            y += dy;
            out.iterations = it;
            if (dy.norm() < 1e-12 && c.residual(y).norm() < tol) {
                out.ok = true;
                return out;
            }
            if (dy.norm() > 1.0) return out;
        }
    } catch (const NumericalError&) {
        return out;
    }
    return out;
}

Vec tangent(const Curve& c, const Vec& x, const Vec& orient) {
    const int n = c.dim();
    Mat M(n, n);
    M.topRows(c.neq()) = c.jacobian(x);
    M.row(n - 1) = orient.transpose();
    Vec e = Vec::Zero(n);
    e[n - 1] = 1.0;
    Vec t = M.fullPivLu().solve(e);
    if (!t.allFinite() || t.norm() == 0.0) throw ConvergenceError("degenerate tangent on boundary curve");
    return t / t.norm();
}

Vec unit(int n, int k) {
    Vec e = Vec::Zero(n);
    e[k] = 1.0;
    return e;
}

std::string march(const Curve& c, const Vec& x0, int direction, const TraceOptions& o,
                  std::vector<Vec>& out) {
    Vec x = x0;
    Vec t;
    try {
        t = tangent(c, x, unit(c.dim(), c.iu()));
    } catch (const ConvergenceError&) {
        t = tangent(c, x, unit(c.dim(), c.ib()));
    }
    if (direction < 0) t = -t;
    double ds = o.ds0;
    while (static_cast<int>(out.size()) < o.max_points) {
        Vec y = x + ds * t;
        Correction cr = correct(c, y, x, t, ds, 0.01 * o.residual_tol);
        if (!cr.ok) {
            ds *= 0.5;
            if (ds < o.ds_min) return "step size underflow";
            continue;
        }
        if (!c.inside(y, o)) return "left parameter window";
        Vec tn = tangent(c, y, t);
        out.push_back(y);
        x = y;
        t = tn;
        if (cr.iterations <= 3) ds = std::min(1.5 * ds, o.ds_max);
    }
    return "max points reached";
}

void verify_points(const StabilityParams& base, std::vector<BoundaryPoint>& pts,
                   const TraceOptions& o) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto& bp = pts[static_cast<std::size_t>(i)];
        StabilityParams lo = base, hi = base;
        lo.delta = hi.delta = bp.delta;
        lo.beta_d = std::max(0.0, bp.beta_d - o.verify_offset);
        hi.beta_d = bp.beta_d + o.verify_offset;
        try {
            bp.verified = count_unstable_roots(lo, 1e-7) != count_unstable_roots(hi, 1e-7);
        } catch (const std::exception&) {
            bp.verified = false;
        }
    }
}

Vec start_vector(const Curve& c, const BoundaryPoint& p) {
    Vec x(c.dim());
    if (!c.real) x[0] = p.theta;
    x[c.iu()] = std::log(p.delta);
    x[c.ib()] = p.beta_d;
    return x;
}

// Puts a point exactly on the curve while keeping delta fixed.
Vec correct_at_fixed_delta(const Curve& c, Vec x, const TraceOptions& o) {
    Vec anchor = x;
    Correction cr = correct(c, x, anchor, unit(c.dim(), c.iu()), 0.0, 0.01 * o.residual_tol);
    if (!cr.ok) throw ConvergenceError("could not place the start point on the boundary curve");
    return x;
}

BoundaryTrace finish(const Curve& c, std::vector<Vec> backward, const Vec& x0, std::vector<Vec> forward,
                     const TraceOptions& o) {
    BoundaryTrace tr;
    tr.real_crossing = c.real;
    std::reverse(backward.begin(), backward.end());
    for (const auto& x : backward) tr.points.push_back(c.point(x));
    tr.points.push_back(c.point(x0));
    for (const auto& x : forward) tr.points.push_back(c.point(x));
    if (o.verify) verify_points(c.base, tr.points, o);
    return tr;
}

}  // namespace

double bisect_boundary_beta(const StabilityParams& base, double delta, double beta_lo,
                            double beta_hi, double tol) {
    StabilityParams p = base;
    p.delta = delta;
    auto count_at = [&](double b) {
        p.beta_d = b;
        return count_unstable_roots(p, 1e-6);
    };
    const int c_lo = count_at(beta_lo);
    if (count_at(beta_hi) == c_lo) throw DomainError("no verdict change in the beta_d bracket");
    while (beta_hi - beta_lo > tol) {
        double mid = 0.5 * (beta_lo + beta_hi);
        if (count_at(mid) == c_lo) beta_lo = mid;
        else beta_hi = mid;
    }
    return 0.5 * (beta_lo + beta_hi);
}

BoundaryTrace continue_boundary(const StabilityParams& base, const BoundaryPoint& start,
                                bool real_crossing, int direction, const TraceOptions& opts) {
    Curve c{base, real_crossing};
    c.base.validate();
    Vec x0 = correct_at_fixed_delta(c, start_vector(c, start), opts);
    std::vector<Vec> fwd;
    std::string why = march(c, x0, direction >= 0 ? 1 : -1, opts, fwd);
    BoundaryTrace tr = finish(c, {}, x0, fwd, opts);
    tr.stop_reason = why;
    return tr;
}

BoundaryTrace trace_boundary(const StabilityParams& base, double delta0, double beta0,
                             const TraceOptions& opts) {
    base.validate();
    if (!(delta0 > 0.0)) throw std::invalid_argument("start delta must be positive");
    const double lo = std::max(opts.beta_min, beta0 - opts.bracket_width);
    const double hi = std::min(opts.beta_max, beta0 + opts.bracket_width);
    constexpr int kSamples = 33;
    StabilityParams p = base;
    p.delta = delta0;
    std::vector<double> bs(kSamples);
    std::vector<int> counts(kSamples);
    for (int k = 0; k < kSamples; ++k) {
        bs[k] = lo + (hi - lo) * k / (kSamples - 1);
        p.beta_d = bs[k];
        counts[k] = count_unstable_roots(p, 1e-6);
    }
    int best = -1;
    for (int k = 0; k + 1 < kSamples; ++k) {
        // Only stable/unstable transitions; a change between two nonzero counts
        // is not a stability boundary.
        if ((counts[k] == 0) == (counts[k + 1] == 0)) continue;
        if (best < 0 || std::abs(0.5 * (bs[k] + bs[k + 1]) - beta0) <
                            std::abs(0.5 * (bs[best] + bs[best + 1]) - beta0))
            best = k;
    }
    if (best < 0) throw DomainError("no stability boundary bracketed near the start point");

    const double b_star = bisect_boundary_beta(base, delta0, bs[best], bs[best + 1], 1e-7);
    // The crossing root sits just outside the unit circle on the side with more roots.
    const bool upper_unstable = counts[best + 1] > counts[best];
    p.beta_d = upper_unstable ? b_star + 1e-6 : std::max(0.0, b_star - 1e-6);
    StabilityVerdict v = find_roots_outside(p, 1e-9, 1.1);
    if (v.roots.empty()) throw ConvergenceError("crossing root not found next to the boundary");
    Complex A = *std::min_element(v.roots.begin(), v.roots.end(),
                                  [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
    const double theta = std::abs(std::arg(A));
    if (theta > std::numbers::pi - 1e-4)
        throw DomainError("boundary crossing at A = -1 cannot be traced");

    Curve c{base, theta < 1e-4};
    BoundaryPoint guess{delta0, b_star, theta, 0.0, false};
    Vec x0 = correct_at_fixed_delta(c, start_vector(c, guess), opts);
    std::vector<Vec> fwd, bwd;
    std::string why_f = march(c, x0, +1, opts, fwd);
    std::string why_b = opts.both_directions ? march(c, x0, -1, opts, bwd) : "not traced";
    BoundaryTrace tr = finish(c, bwd, x0, fwd, opts);
    tr.stop_reason = "increasing delta: " + why_f + "; decreasing delta: " + why_b;
    return tr;
}

}  // namespace amprb::stab
