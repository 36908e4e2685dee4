#include "amprb/quadrature.hpp"

#include "amprb/errors.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace amprb::quad {

const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::discretization: return "interior";
        case PointKind::interpolation: return "interpolation";
        case PointKind::boundary: return "boundary";
        case PointKind::unused: return "unused";
    }
    return "?";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::array<double, 3> lagrange3(const std::array<double, 3>& xs, double x) {
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i) {
        double p = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) p *= (x - xs[j]) / (xs[i] - xs[j]);
        w[i] = p;
    }
    return w;
}

// Lays out points of all components and classifies them.
void layout(CompositeGrid& g) {
    g.offsets.clear();
    g.points.clear();
    for (std::size_t c = 0; c < g.comps.size(); ++c) {
        Component& k = g.comps[c];
        const bool ghost = g.style == BoundaryStyle::ghost;
        k.ghost_lo = (ghost && k.lo == EndKind::boundary) ? 1 : 0;
        k.ghost_hi = (ghost && k.hi == EndKind::boundary) ? 1 : 0;
        g.offsets.push_back(static_cast<int>(g.points.size()));
        for (int j = 0; j < k.nb; ++j) {
            for (int i = 0; i < k.ni(); ++i) {
                GridPoint p;
                p.comp = static_cast<int>(c);
                p.i = i;
                p.j = j;
                p.a = k.a(i);
                p.b = k.dim == 2 ? k.b(j) : 0.0;
                const bool first = i == 0, last = i == k.ni() - 1;
                if (k.dim == 2 && !k.periodic && (j == 0 || j == k.nb - 1)) {
                    p.kind = PointKind::interpolation;
                } else if (first && k.lo == EndKind::interpolation) {
                    p.kind = PointKind::interpolation;
                } else if (last && k.hi == EndKind::interpolation) {
                    p.kind = PointKind::interpolation;
                } else if (first && k.lo == EndKind::boundary) {
                    p.kind = PointKind::boundary;
                    p.boundary_id = k.boundary_lo;
                } else if (last && k.hi == EndKind::boundary) {
                    p.kind = PointKind::boundary;
                    p.boundary_id = k.boundary_hi;
                }
                g.points.push_back(p);
            }
        }
    }
}

bool usable_donor(const CompositeGrid& g, int pid) {
    auto k = g.points[static_cast<std::size_t>(pid)].kind;
    return k == PointKind::discretization || k == PointKind::boundary;
}

// Physical node window [k0, k0 + 2] along axis a of component d around a value.
std::vector<int> a_windows(const Component& d, double a) {
    int kc = static_cast<int>(std::lround((a - d.a0) / d.ha));
    std::vector<int> out;
    for (int k0 : {kc - 1, kc - 2, kc, kc - 3, kc + 1}) {
        int kk = std::clamp(k0, 0, d.na - 2);
        if (std::find(out.begin(), out.end(), kk) == out.end()) out.push_back(kk);
    }
    return out;
}

// Builds the quadratic (1D) or biquadratic (2D) stencil of point pid from component dc.
bool try_stencil(const CompositeGrid& g, int pid, int dc, InterpStencil& st) {
    const GridPoint& p = g.points[static_cast<std::size_t>(pid)];
    const Component& d = g.comps[static_cast<std::size_t>(dc)];
    // Ghost points of an interpolation layer sit one cell outside the donor
    // and are extrapolated from its first three nodes.
    const double slack = (1.0 + 1e-9) * d.ha;
    if (p.a < d.a0 - slack || p.a > d.a0 + d.na * d.ha + slack) return false;
    double bt = 0.0;
    std::vector<int> jwins{0};
    if (d.dim == 2) {
        bt = d.b0 + std::fmod(std::fmod(p.b - d.b0, kTwoPi) + kTwoPi, kTwoPi);
        if (!d.periodic && (bt < d.b(1) - 1e-12 || bt > d.b(d.nb - 2) + 1e-12)) return false;
        int jc = static_cast<int>(std::lround((bt - d.b0) / d.hb));
        jwins = {jc - 1, jc - 2, jc, jc - 3, jc + 1};
    }
    for (int j0 : jwins) {
        if (d.dim == 2 && !d.periodic && (j0 < 0 || j0 + 2 >= d.nb)) continue;
        for (int k0 : a_windows(d, p.a)) {
            InterpStencil s;
            s.point = pid;
            std::array<double, 3> wa = lagrange3({d.a0 + k0 * d.ha, d.a0 + (k0 + 1) * d.ha,
                                                  d.a0 + (k0 + 2) * d.ha},
                                                 p.a);
            std::array<double, 3> wb{1.0, 0.0, 0.0};
            if (d.dim == 2) wb = lagrange3({d.b(j0), d.b(j0 + 1), d.b(j0 + 2)}, bt);
            bool ok = true;
            for (int jb = 0; jb < (d.dim == 2 ? 3 : 1) && ok; ++jb) {
                int j = d.dim == 2 ? j0 + jb : 0;
                if (d.periodic) j = ((j % d.nb) + d.nb) % d.nb;
                for (int ia = 0; ia < 3; ++ia) {
                    int q = g.id(dc, k0 + ia + d.ghost_lo, j);
                    if (!usable_donor(g, q)) {
                        ok = false;
                        break;
                    }
                    s.donors.push_back(q);
                    s.coeffs.push_back(wa[ia] * wb[jb]);
                }
            }
            if (ok) {
                st = std::move(s);
                return true;
            }
        }
    }
    return false;
}

void build_stencils(CompositeGrid& g) {
    g.interp.clear();
    for (std::size_t pid = 0; pid < g.points.size(); ++pid) {
        if (g.points[pid].kind != PointKind::interpolation) continue;
        InterpStencil st;
        bool found = false;
        for (std::size_t dc = 0; dc < g.comps.size() && !found; ++dc) {
            if (static_cast<int>(dc) == g.points[pid].comp) continue;
            found = try_stencil(g, static_cast<int>(pid), static_cast<int>(dc), st);
        }
        if (!found) throw DomainError("incomplete interpolation stencil for point " + std::to_string(pid));
        g.interp.push_back(std::move(st));
    }
}

CompositeGrid finish_grid(CompositeGrid g) {
    layout(g);
    build_stencils(g);
    g.validate();
    return g;
}

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void CompositeGrid::validate() const {
    std::vector<int> has(points.size(), 0);
    for (const auto& s : interp) {
        if (s.donors.empty() || s.donors.size() != s.coeffs.size())
            throw DomainError("incomplete interpolation stencil");
        for (int q : s.donors) {
            if (points[static_cast<std::size_t>(q)].comp == points[static_cast<std::size_t>(s.point)].comp ||
                !usable_donor(*this, q))
                throw DomainError("interpolation donor is not a discretization point of another component");
        }
        has[static_cast<std::size_t>(s.point)] = 1;
    }
    for (std::size_t p = 0; p < points.size(); ++p)
        if (points[p].kind == PointKind::interpolation && !has[p])
            throw DomainError("interpolation point without a donor stencil");
}

CompositeGrid segment_grid(int n, double x0, double x1, BoundaryStyle style) {
    require(n >= 8, "segment needs at least 8 cells");
    require(x1 > x0, "segment must have positive length");
    CompositeGrid g;
    g.style = style;
    g.boundary_names = {"left", "right"};
    Component c;
    c.a0 = x0;
    c.ha = (x1 - x0) / n;
    c.na = n;
    g.comps.push_back(c);
    return finish_grid(std::move(g));
}

CompositeGrid overlapping_segments(int n, double half_overlap, double ratio, BoundaryStyle style) {
    require(half_overlap > 0.0 && half_overlap < 0.5, "overlap must lie in (0, 0.5)");
    require(ratio > 0.0, "ratio must be positive");
    const double len = 0.5 + half_overlap;
    const int n1 = static_cast<int>(std::lround(len * n));
    const int n2 = static_cast<int>(std::lround(len * ratio * n));
    require(n1 >= 8 && n2 >= 8, "each segment needs at least 8 cells");
    CompositeGrid g;
    g.style = style;
    g.boundary_names = {"left", "right"};
    Component c1;
    c1.a0 = 0.0;
    c1.ha = len / n1;
    c1.na = n1;
    c1.hi = EndKind::interpolation;
    Component c2;
    c2.a0 = 1.0 - len;
    c2.ha = len / n2;
    c2.na = n2;
    c2.lo = EndKind::interpolation;
    g.comps = {c1, c2};
    return finish_grid(std::move(g));
}

CompositeGrid annulus_grid(int nr, int ntheta, double r1, double r2, BoundaryStyle style) {
    require(nr >= 8 && ntheta >= 8, "annulus needs at least 8 cells in each direction");
    require(r1 > 0.0 && r2 > r1, "annulus radii must satisfy 0 < r1 < r2");
    CompositeGrid g;
    g.style = style;
    g.boundary_names = {"inner", "outer"};
    Component c;
    c.dim = 2;
    c.a0 = r1;
    c.ha = (r2 - r1) / nr;
    c.na = nr;
    c.b0 = 0.0;
    c.hb = kTwoPi / ntheta;
    c.nb = ntheta;
    c.periodic = true;
    g.comps.push_back(c);
    return finish_grid(std::move(g));
}

CompositeGrid two_patch_annulus(int nr, int ntheta, double r1, double r2, int overlap, double ratio,
                                BoundaryStyle style) {
    require(nr >= 8 && ntheta >= 8, "annulus patches need at least 8 cells in each direction");
    require(r1 > 0.0 && r2 > r1, "annulus radii must satisfy 0 < r1 < r2");
    require(overlap >= 2, "overlap must be at least 2 cells");
    require(ratio > 0.0, "ratio must be positive");
    CompositeGrid g;
    g.style = style;
    g.boundary_names = {"inner", "outer"};
    for (int k = 0; k < 2; ++k) {
        const int nt = k == 0 ? ntheta : static_cast<int>(std::lround(ratio * ntheta));
        require(nt >= 8, "patch needs at least 8 angular cells");
        Component c;
        c.dim = 2;
        c.a0 = r1;
        c.ha = (r2 - r1) / nr;
        c.na = nr;
        c.hb = std::numbers::pi / nt;
        c.b0 = k * std::numbers::pi - (overlap + 1) * c.hb;
        c.nb = nt + 2 * overlap + 3;
        g.comps.push_back(c);
    }
    return finish_grid(std::move(g));
}

NeumannSystem build_neumann_operator(const CompositeGrid& grid) {
    const int n = static_cast<int>(grid.points.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    NeumannSystem sys;
    sys.rows.resize(static_cast<std::size_t>(n));
    std::vector<const InterpStencil*> stencil(static_cast<std::size_t>(n), nullptr);
    for (const auto& s : grid.interp) stencil[static_cast<std::size_t>(s.point)] = &s;

    for (int row = 0; row < n; ++row) {
        const GridPoint& p = grid.points[static_cast<std::size_t>(row)];
        const Component& c = grid.comps[static_cast<std::size_t>(p.comp)];
        sys.rows[static_cast<std::size_t>(row)] = {p.kind, p.boundary_id};
        auto at = [&](int i, int j) {
            if (c.periodic) j = ((j % c.nb) + c.nb) % c.nb;
            if (i < 0 || i >= c.ni() || j < 0 || j >= c.nb)
                throw DomainError("stencil leaves component at point " + std::to_string(row));
            int q = grid.id(p.comp, i, j);
            if (grid.points[static_cast<std::size_t>(q)].kind == PointKind::unused)
                throw DomainError("stencil touches an unused point");
            return q;
        };
        switch (p.kind) {
            case PointKind::unused:
                trip.emplace_back(row, row, 1.0);
                break;
            case PointKind::interpolation: {
                const InterpStencil* s = stencil[static_cast<std::size_t>(row)];
                if (!s) throw DomainError("interpolation point without a stencil");
                trip.emplace_back(row, row, 1.0);
                for (std::size_t m = 0; m < s->donors.size(); ++m)
                    trip.emplace_back(row, s->donors[m], -s->coeffs[m]);
                break;
            }
            case PointKind::boundary: {
                const double h = c.ha;
                const bool lo = p.i == 0;
                // Outward normal derivative, written from the point towards the interior.
                const int dir = lo ? 1 : -1;
                if (grid.style == BoundaryStyle::ghost) {
                    trip.emplace_back(row, row, 1.0 / (2.0 * h));
                    trip.emplace_back(row, at(p.i + 2 * dir, p.j), -1.0 / (2.0 * h));
                } else {
                    trip.emplace_back(row, row, 3.0 / (2.0 * h));
                    trip.emplace_back(row, at(p.i + dir, p.j), -4.0 / (2.0 * h));
                    trip.emplace_back(row, at(p.i + 2 * dir, p.j), 1.0 / (2.0 * h));
                }
                break;
            }
            case PointKind::discretization: {
                const double h = c.ha;
                if (c.dim == 1) {
                    const double s = 1.0 / (h * h);
                    trip.emplace_back(row, at(p.i - 1, p.j), s);
                    trip.emplace_back(row, row, -2.0 * s);
                    trip.emplace_back(row, at(p.i + 1, p.j), s);
                } else {
                    const double r = p.a, rm = r - 0.5 * h, rp = r + 0.5 * h;
                    const double s = 1.0 / (r * h * h);
                    const double t = 1.0 / (r * r * c.hb * c.hb);
                    trip.emplace_back(row, at(p.i - 1, p.j), rm * s);
                    trip.emplace_back(row, at(p.i + 1, p.j), rp * s);
                    trip.emplace_back(row, at(p.i, p.j - 1), t);
                    trip.emplace_back(row, at(p.i, p.j + 1), t);
                    trip.emplace_back(row, row, -(rm + rp) * s - 2.0 * t);
                }
                break;
            }
        }
    }
    sys.A.resize(n, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    Eigen::VectorXd rs = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < sys.A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it) rs[it.row()] += std::abs(it.value());
    sys.norm_inf = rs.maxCoeff();
    return sys;
}

namespace {

double norm_inf(const Eigen::SparseMatrix<double>& A) {
    Eigen::VectorXd rs = Eigen::VectorXd::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) rs[it.row()] += std::abs(it.value());
    return rs.size() ? rs.maxCoeff() : 0.0;
}

double relative_residual(const Eigen::SparseMatrix<double>& At, const Eigen::VectorXd& w, double anorm) {
    return (At * w).cwiseAbs().maxCoeff() / (anorm * w.cwiseAbs().maxCoeff());
}

}  // namespace

NullVector left_null_vector(const Eigen::SparseMatrix<double>& A, double tol, int max_iter) {
    if (A.rows() != A.cols() || A.rows() == 0) throw std::invalid_argument("operator must be square");
    const double anorm = norm_inf(A);
    Eigen::SparseMatrix<double> At = A.transpose();
    Eigen::SparseMatrix<double> I(A.rows(), A.cols());
    I.setIdentity();
    Eigen::SparseMatrix<double> M = At - 1e-10 * anorm * I;
    M.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(M);
    lu.factorize(M);
    if (lu.info() != Eigen::Success) throw SingularityError("sparse factorisation of the shifted operator failed");

    auto iterate = [&](Eigen::VectorXd x) {
        NullVector nv;
        x.normalize();
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 1; it <= max_iter; ++it) {
            x = lu.solve(x);
            if (!x.allFinite()) throw SingularityError("inverse iteration produced non-finite values");
            x.normalize();
            nv.iterations = it;
            nv.residual = relative_residual(At, x, anorm);
            // Past the tolerance, keep going while the residual still drops.
            if (nv.residual < tol && nv.residual > 0.5 * prev) break;
            prev = nv.residual;
        }
        nv.w = x;
        return nv;
    };

    NullVector a = iterate(Eigen::VectorXd::Ones(A.rows()));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd s(A.rows());
    for (auto& v : s) v = u(rng);
    NullVector b = iterate(s);
    if (a.residual >= tol && b.residual >= tol)
        throw ConvergenceError("inverse iteration did not reach the null-vector tolerance");
    if (a.residual < tol && b.residual < tol) {
        double c = std::min(1.0, std::abs(a.w.dot(b.w)));
        if (std::acos(c) > 1e-3) throw DomainError("left null space is not one-dimensional");
    }
    NullVector out = a.residual <= b.residual ? a : b;
    const auto pos = (out.w.array() > 0.0).count();
    const auto neg = (out.w.array() < 0.0).count();
    if (neg > pos || (neg == pos && out.w.sum() < 0.0)) out.w = -out.w;
    return out;
}

double WeightVector::volume_sum() const {
    double s = 0.0;
    for (double v : volume) s += v;
    return s;
}

double WeightVector::surface_sum(int id) const {
    double s = 0.0;
    for (std::size_t k = 0; k < surface.size(); ++k)
        if (boundary_id[k] == id) s += surface[k];
    return s;
}

namespace {

// Distance in cells from point p to the nearest end of its component along
// each axis (ends are boundaries or interpolation layers).
int cells_from_edges(const CompositeGrid& g, const GridPoint& p) {
    const Component& c = g.comps[static_cast<std::size_t>(p.comp)];
    int k = p.i - c.ghost_lo;
    int d = std::min(k, c.na - k);
    if (c.dim == 2 && !c.periodic) d = std::min({d, p.j, c.nb - 1 - p.j});
    return d;
}

double cell_volume(const CompositeGrid& g, const GridPoint& p) {
    const Component& c = g.comps[static_cast<std::size_t>(p.comp)];
    return c.dim == 1 ? c.ha : p.a * c.ha * c.hb;
}

// Distance in cells to the nearest interpolation layer (overlap edge).
int cells_from_overlap(const CompositeGrid& g, const GridPoint& p) {
    const Component& c = g.comps[static_cast<std::size_t>(p.comp)];
    int d = std::numeric_limits<int>::max();
    int k = p.i - c.ghost_lo;
    if (c.lo == EndKind::interpolation) d = std::min(d, k);
    if (c.hi == EndKind::interpolation) d = std::min(d, c.na - k);
    if (c.dim == 2 && !c.periodic) d = std::min({d, p.j, c.nb - 1 - p.j});
    return d;
}

}  // namespace

WeightVector extract_weights(const Eigen::VectorXd& raw, const CompositeGrid& grid,
                             const NeumannSystem& sys) {
    const std::size_t n = grid.points.size();
    if (static_cast<std::size_t>(raw.size()) != n) throw std::invalid_argument("weight vector size mismatch");
    int ref = -1;
    double best = std::numeric_limits<double>::max();
    for (std::size_t k = 0; k < n; ++k) {
        const GridPoint& p = grid.points[k];
        if (p.kind != PointKind::discretization || cells_from_edges(grid, p) < 3) continue;
        const Component& c = grid.comps[static_cast<std::size_t>(p.comp)];
        // Prefer the first component, then the point nearest its centre.
        double da = (p.i - 0.5 * (c.ni() - 1)) / c.ni();
        double db = c.dim == 2 ? (p.j - 0.5 * (c.nb - 1)) / c.nb : 0.0;
        double score = p.comp * 10.0 + da * da + db * db;
        if (score < best) {
            best = score;
            ref = static_cast<int>(k);
        }
    }
    if (ref < 0) throw DomainError("no interior point at least 3 cells from the overlap and boundary");
    if (raw[ref] == 0.0) throw DomainError("null vector vanishes at the reference point");

    WeightVector wv;
    wv.reference_point = ref;
    wv.scale = cell_volume(grid, grid.points[static_cast<std::size_t>(ref)]) / raw[ref];
    Eigen::VectorXd w = wv.scale * raw;
    Eigen::SparseMatrix<double> At = sys.A.transpose();
    wv.residual = relative_residual(At, w, sys.norm_inf);
    wv.volume.assign(n, 0.0);
    wv.surface.assign(n, 0.0);
    wv.interpolation.assign(n, 0.0);
    wv.boundary_id.assign(n, -1);
    for (std::size_t k = 0; k < n; ++k) {
        const GridPoint& p = grid.points[k];
        wv.boundary_id[k] = p.boundary_id;
        switch (p.kind) {
            case PointKind::discretization:
                wv.volume[k] = w[static_cast<Eigen::Index>(k)];
                if (wv.volume[k] < 0.0) {
                    wv.negative_volume.push_back(static_cast<int>(k));
                    if (cells_from_overlap(grid, p) > 3) wv.negatives_near_overlap = false;
                }
                break;
            case PointKind::boundary:
                wv.surface[k] = -w[static_cast<Eigen::Index>(k)];
                break;
            case PointKind::interpolation:
                wv.interpolation[k] = w[static_cast<Eigen::Index>(k)];
                break;
            case PointKind::unused:
                break;
        }
    }
    return wv;
}

WeightVector compute_weights(const CompositeGrid& grid) {
    NeumannSystem sys = build_neumann_operator(grid);
    NullVector nv = left_null_vector(sys.A);
    return extract_weights(nv.w, grid, sys);
}

std::vector<double> sample(const CompositeGrid& grid, const std::function<double(double, double)>& f) {
    std::vector<double> out;
    out.reserve(grid.points.size());
    for (const auto& p : grid.points) out.push_back(f(p.a, p.b));
    return out;
}

double integrate(const WeightVector& w, const std::vector<double>& f) {
    if (f.size() != w.volume.size()) throw std::invalid_argument("sample layout does not match weights");
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += w.volume[k] * f[k];
    return s;
}

double integrate_surface(const WeightVector& w, const std::vector<double>& g, int boundary_id) {
    if (g.size() != w.surface.size()) throw std::invalid_argument("sample layout does not match weights");
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (w.boundary_id[k] == boundary_id) s += w.surface[k] * g[k];
    return s;
}

double observed_order(double e_coarse, double e_fine, double floor) {
    e_coarse = std::abs(e_coarse);
    e_fine = std::abs(e_fine);
    if (e_coarse <= floor && e_fine <= floor) return std::numeric_limits<double>::infinity();
    return std::log2(e_coarse / std::max(e_fine, std::numeric_limits<double>::min()));
}

ConvergenceStudy two_patch_convergence(int nr0, int n_levels, double r1, double r2, BoundaryStyle style) {
    if (n_levels < 2) throw std::invalid_argument("need at least two refinement levels");
    ConvergenceStudy cs;
    const double area = std::numbers::pi * (r2 * r2 - r1 * r1);
    for (int l = 0; l < n_levels; ++l) {
        const int nr = nr0 << l;
        CompositeGrid g = two_patch_annulus(nr, 4 * nr, r1, r2, 3, 1.25, style);
        WeightVector w = compute_weights(g);
        LevelResult lr;
        lr.nr = nr;
        lr.ntheta = 4 * nr;
        lr.unknowns = g.points.size();
        lr.area_error = w.volume_sum() - area;
        lr.inner_perimeter_error = w.surface_sum(0) - kTwoPi * r1;
        lr.outer_perimeter_error = w.surface_sum(1) - kTwoPi * r2;
        lr.residual = w.residual;
        lr.negative_weights = static_cast<int>(w.negative_volume.size());
        cs.levels.push_back(lr);
    }
    for (int l = 1; l < n_levels; ++l) {
        const auto& a = cs.levels[static_cast<std::size_t>(l - 1)];
        const auto& b = cs.levels[static_cast<std::size_t>(l)];
        cs.area_order.push_back(observed_order(a.area_error, b.area_error, 1e-10 * area));
        cs.inner_order.push_back(observed_order(a.inner_perimeter_error, b.inner_perimeter_error, 1e-10 * kTwoPi * r1));
        cs.outer_order.push_back(observed_order(a.outer_perimeter_error, b.outer_perimeter_error, 1e-10 * kTwoPi * r2));
    }
    return cs;
}

}  // namespace amprb::quad
