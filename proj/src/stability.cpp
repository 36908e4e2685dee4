#include "amprb/stability.hpp"

#include "amprb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace amprb::stab {

void StabilityParams::validate() const {
    geom.validate();
    if (!(dr > 0.0)) throw std::invalid_argument("dr must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (beta_d < 0.0) throw std::invalid_argument("beta_d must be non-negative");
    if (I_bar < 0.0) throw std::invalid_argument("I_bar must be non-negative");
    if (!(geom.r1 + 2.0 * dr < geom.r2))
        throw std::invalid_argument("r1 + 2 dr must lie inside the shell");
}

double StabilityParams::d_bar() const { return -std::expm1(-delta); }

Complex transfer_coefficient(Complex zeta, const StabilityParams& p) {
    const double r1 = p.geom.r1, dr = p.dr;
    auto term = [&](double r) { return phi_profile(zeta, r, p.geom) / r; };
    return 0.5 * r1 * (3.0 * term(r1) - 4.0 * term(r1 + dr) + term(r1 + 2.0 * dr));
}

AmplificationEquation::AmplificationEquation(const StabilityParams& p) : p_(p) {
    p_.validate();
    c1_ = transfer_coefficient(Complex(p_.zeta1(), 0.0), p_).real();
    d_bar_ = p_.d_bar();
    const double bd = p_.beta_d * d_bar_;
    gamma_v_ = (2.0 * bd - c1_) * (2.0 * bd - c1_);
    gamma_0_ = p_.I_bar + 4.0 * bd - c1_;
}

// C2 at zeta_2 = zeta_1 sqrt(s), s = (A - 1)/(A + 1), principal branch.
Complex AmplificationEquation::c2(Complex s) const {
    return transfer_coefficient(p_.zeta1() * std::sqrt(s), p_);
}

Complex AmplificationEquation::nv(Complex A) const {
    if (std::abs(A + 1.0) < 1e-14) throw SingularityError("N_v is singular at A = -1");
    const Complex am = A - 1.0, ap = A + 1.0;
    return gamma_v_ * am * am * am + gamma_0_ * (p_.I_bar * am + c2(am / ap) * ap) * A * A;
}

double AmplificationEquation::nv_scale(Complex A) const {
    const double am = std::abs(A - 1.0), ap = std::abs(A + 1.0), a2 = std::norm(A);
    Complex C = c2((A - 1.0) / (A + 1.0));
    return std::abs(gamma_v_) * am * am * am +
           std::abs(gamma_0_) * (p_.I_bar * am + std::abs(C) * ap) * a2;
}

Complex AmplificationEquation::g(Complex B) const {
    if (std::abs(B + 1.0) < 1e-14) throw SingularityError("g is singular at B = -1");
    const Complex bm = 1.0 - B, bp = 1.0 + B;
    return gamma_v_ * bm * bm * bm + gamma_0_ * (p_.I_bar * bm + c2(bm / bp) * bp);
}

Complex AmplificationEquation::nv_derivative(Complex A) const {
    const double h = 1e-5 * std::max(1.0, std::abs(A));
    return (-nv(A + 2.0 * h) + 8.0 * nv(A + h) - 8.0 * nv(A - h) + nv(A - 2.0 * h)) / (12.0 * h);
}

namespace {

Complex g_derivative(const AmplificationEquation& eq, Complex B) {
    const double h = 1e-5 * std::max(1e-3, std::abs(B));
    return (-eq.g(B + 2.0 * h) + 8.0 * eq.g(B + h) - 8.0 * eq.g(B - h) + eq.g(B - 2.0 * h)) /
           (12.0 * h);
}

// Raised when a contour passes (numerically) through a zero of g.
struct ContourHit {};

using Path = std::function<Complex(double)>;

// Continuous change of arg g along a path, by adaptive bisection of the
// parameter interval until successive phase increments are small and agree.
class PhaseTracker {
public:
    explicit PhaseTracker(const AmplificationEquation& eq) : eq_(eq) {}

    double arg_change(const Path& z, int n0) const {
        double total = 0.0;
        double ta = 0.0;
        Complex fa = eval(z(0.0));
        for (int k = 1; k <= n0; ++k) {
            double tb = static_cast<double>(k) / n0;
            Complex fb = eval(z(tb));
            total += track(z, ta, tb, fa, fb, 0);
            ta = tb;
            fa = fb;
        }
        return total;
    }

private:
    Complex eval(Complex B) const {
        Complex v = eq_.g(B);
        if (!(std::abs(v) > 0.0) || !std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ContourHit{};
        return v;
    }

    double track(const Path& z, double ta, double tb, Complex fa, Complex fb, int depth) const {
        constexpr double kMaxStep = std::numbers::pi / 8.0;
        double tm = 0.5 * (ta + tb);
        Complex fm = eval(z(tm));
        double d1 = std::arg(fm / fa), d2 = std::arg(fb / fm), d = std::arg(fb / fa);
        if (std::abs(d1) < kMaxStep && std::abs(d2) < kMaxStep && std::abs(d1 + d2 - d) < 1e-9)
            return d;
        if (depth >= 48) throw ContourHit{};
        return track(z, ta, tm, fa, fm, depth + 1) + track(z, tm, tb, fm, fb, depth + 1);
    }

    const AmplificationEquation& eq_;
};

int to_winding(double total_arg) {
    double w = total_arg / (2.0 * std::numbers::pi);
    double wr = std::round(w);
    if (std::abs(w - wr) > 0.05) throw ContourHit{};
    return static_cast<int>(wr);
}

int circle_winding(const PhaseTracker& tr, double radius) {
    Path z = [radius](double t) { return std::polar(radius, 2.0 * std::numbers::pi * t); };
    return to_winding(tr.arg_change(z, 128));
}

// Closed cell in the B-plane: an annular sector, or a disk when ra == 0.
struct Cell {
    double ra, rb, ta, tb;
    bool disk() const { return ra == 0.0; }
    Complex centre() const {
        if (disk()) return {0.0, 0.0};
        return std::polar(0.5 * (ra + rb), 0.5 * (ta + tb));
    }
    double size() const { return disk() ? 2.0 * rb : (rb - ra) + rb * (tb - ta); }
    bool contains(Complex B, double tol) const {
        double r = std::abs(B);
        if (disk()) return r <= rb + tol;
        if (r < ra - tol || r > rb + tol) return false;
        double th = std::arg(B);
        double mid = 0.5 * (ta + tb);
        double d = std::remainder(th - mid, 2.0 * std::numbers::pi);
        return std::abs(d) <= 0.5 * (tb - ta) + tol / std::max(r, 1e-300);
    }
    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << "cell r=[" << ra << "," << rb << "] theta=[" << ta << "," << tb << "]";
        return os.str();
    }
};

int cell_winding(const PhaseTracker& tr, const Cell& c) {
    if (c.disk()) return circle_winding(tr, c.rb);
    const double ra = c.ra, rb = c.rb, ta = c.ta, tb = c.tb;
    double total = 0.0;
    total += tr.arg_change([=](double t) { return std::polar(rb, ta + (tb - ta) * t); }, 8);
    total += tr.arg_change([=](double t) { return std::polar(rb + (ra - rb) * t, tb); }, 4);
    total += tr.arg_change([=](double t) { return std::polar(ra, tb + (ta - tb) * t); }, 8);
    total += tr.arg_change([=](double t) { return std::polar(ra + (rb - ra) * t, ta); }, 4);
    return to_winding(total);
}

std::vector<Cell> split(const Cell& c, double frac) {
    std::vector<Cell> out;
    if (c.disk()) {
        double ri = frac * 0.5 * c.rb;
        out.push_back({0.0, ri, 0.0, 0.0});
        const double off = 0.3819660112501051;
        for (int k = 0; k < 8; ++k) {
            double a = off + k * std::numbers::pi / 4.0;
            out.push_back({ri, c.rb, a, a + std::numbers::pi / 4.0});
        }
        return out;
    }
    double rm = c.ra + frac * (c.rb - c.ra);
    double tm = c.ta + frac * (c.tb - c.ta);
    out.push_back({c.ra, rm, c.ta, tm});
    out.push_back({rm, c.rb, c.ta, tm});
    out.push_back({c.ra, rm, tm, c.tb});
    out.push_back({rm, c.rb, tm, c.tb});
    return out;
}

// Newton on g in the B-plane from the cell centre; returns false if it
// fails to converge or leaves the cell.
bool polish_b(const AmplificationEquation& eq, const Cell& c, Complex& B) {
    B = c.centre();
    if (c.disk()) B = std::polar(0.1 * c.rb, 0.7);
    for (int it = 0; it < 80; ++it) {
        Complex gv = eq.g(B);
        if (gv == 0.0) return c.contains(B, 1e-9 * c.size());
        Complex dg = g_derivative(eq, B);
        if (dg == 0.0) return false;
        Complex step = gv / dg;
        B -= step;
        if (!std::isfinite(B.real()) || !std::isfinite(B.imag()) || std::abs(B) >= 1.0) return false;
        if (std::abs(step) <= 1e-15 + 1e-13 * std::abs(B)) return c.contains(B, 1e-9 * c.size());
    }
    return false;
}

// Refines a finite root in the A-plane on N_v itself.
Complex polish_a(const AmplificationEquation& eq, Complex A) {
    for (int it = 0; it < 20; ++it) {
        Complex N = eq.nv(A);
        if (std::abs(N) <= 1e-15 * eq.nv_scale(A)) break;
        Complex step = N / eq.nv_derivative(A);
        Complex next = A - step;
        if (!(std::abs(eq.nv(next)) < std::abs(N))) break;
        A = next;
        if (std::abs(step) <= 1e-15 * std::abs(A)) break;
    }
    return A;
}

struct RootSearch {
    const AmplificationEquation& eq;
    PhaseTracker tracker;
    std::vector<Complex> roots_b;
    int cells_visited = 0;

    void explore(const Cell& c, int count, int depth) {
        if (count <= 0) return;
        ++cells_visited;
        if (count == 1 && depth > 0) {
            Complex B;
            if (polish_b(eq, c, B)) {
                roots_b.push_back(B);
                return;
            }
        }
        if (c.size() < 1e-11) {
            // Multiple root or a root Newton cannot isolate further.
            Complex B = c.centre();
            polish_b(eq, c, B);
            for (int k = 0; k < count; ++k) roots_b.push_back(B);
            return;
        }
        if (depth >= 60) throw ConvergenceError("root isolation exceeded max depth at " + c.describe());
        for (double frac : {0.5, 0.4631, 0.5719, 0.4173}) {
            std::vector<Cell> kids = split(c, frac);
            std::vector<int> counts;
            try {
                for (const auto& k : kids) counts.push_back(cell_winding(tracker, k));
            } catch (const ContourHit&) {
                continue;
            }
            int sum = 0;
            for (int n : counts) sum += n;
            if (sum != count) continue;
            for (std::size_t i = 0; i < kids.size(); ++i) explore(kids[i], counts[i], depth + 1);
            return;
        }
        throw ConvergenceError("could not subdivide " + c.describe() + " without touching a root");
    }
};

template <class F>
auto with_jitter(double eps, double R_outer, F&& body) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(R_outer > 1.0 + eps)) throw std::invalid_argument("R_outer must exceed 1 + eps");
    double e = eps;
    for (int attempt = 0; attempt < 6; ++attempt) {
        try {
            return body(1.0 / (1.0 + e), std::isinf(R_outer) ? 0.0 : 1.0 / R_outer);
        } catch (const ContourHit&) {
            e *= 1.0 + 0.137 * (attempt + 1);
        }
    }
    throw ConvergenceError("contour passes through a root for every jittered eps");
}

}  // namespace

int count_unstable_roots(const StabilityParams& p, double eps, double R_outer) {
    AmplificationEquation eq(p);
    PhaseTracker tr(eq);
    return with_jitter(eps, R_outer, [&](double rho_out, double rho_in) {
        int n = circle_winding(tr, rho_out);
        if (rho_in > 0.0) n -= circle_winding(tr, rho_in);
        return n;
    });
}

StabilityVerdict find_roots_outside(const StabilityParams& p, double eps, double R_outer) {
    AmplificationEquation eq(p);
    return with_jitter(eps, R_outer, [&](double rho_out, double rho_in) {
        RootSearch search{eq, PhaseTracker(eq), {}, 0};
        int total = circle_winding(search.tracker, rho_out);
        if (rho_in > 0.0) total -= circle_winding(search.tracker, rho_in);

        std::vector<Cell> top;
        const double off = 0.3819660112501051;
        double r_split = rho_in;
        if (rho_in == 0.0) {
            r_split = 0.25 * rho_out;
            top.push_back({0.0, r_split, 0.0, 0.0});
        }
        for (int k = 0; k < 8; ++k) {
            double a = off + k * std::numbers::pi / 4.0;
            top.push_back({r_split, rho_out, a, a + std::numbers::pi / 4.0});
        }
        int sum = 0;
        std::vector<int> counts;
        for (const auto& c : top) {
            counts.push_back(cell_winding(search.tracker, c));
            sum += counts.back();
        }
        if (sum != total) throw ContourHit{};
        for (std::size_t i = 0; i < top.size(); ++i) search.explore(top[i], counts[i], 1);

        StabilityVerdict v;
        v.unstable_root_count = total;
        for (Complex B : search.roots_b) {
            if (std::abs(B.imag()) < 1e-12 * std::abs(B)) B = Complex(B.real(), 0.0);
            Complex A;
            if (std::abs(B) < 1e-10) {
                A = Complex(kInf, 0.0);
            } else {
                A = polish_a(eq, 1.0 / B);
                if (B.imag() == 0.0) A = Complex(A.real(), 0.0);
            }
            v.roots.push_back(A);
        }
        std::sort(v.roots.begin(), v.roots.end(), [](Complex a, Complex b) {
            double ma = std::abs(a), mb = std::abs(b);
            if (ma != mb) return ma > mb;
            return a.imag() > b.imag();
        });
        v.max_modulus = 1.0;
        for (Complex A : v.roots) v.max_modulus = std::max(v.max_modulus, std::abs(A));
        return v;
    });
}

namespace {

ScanCell scan_cell(double delta, double beta, double I_bar, const StabilityParams& base,
                   const ScanOptions& opts) {
    ScanCell cell;
    cell.delta = delta;
    cell.beta_d = beta;
    try {
        StabilityParams p = base;
        p.delta = delta;
        p.beta_d = beta;
        p.I_bar = I_bar;
        if (opts.locate_roots) {
            auto v = find_roots_outside(p, opts.eps);
            cell.count = v.unstable_root_count;
            cell.max_modulus = v.max_modulus;
        } else {
            cell.count = count_unstable_roots(p, opts.eps);
            cell.max_modulus = std::numeric_limits<double>::quiet_NaN();
        }
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

void check_increasing(std::span<const double> v, const char* name) {
    if (v.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw std::invalid_argument(std::string(name) + " grid must be strictly increasing");
}

StabilityMap make_map(std::span<const double> deltas, std::span<const double> betas) {
    check_increasing(deltas, "delta");
    check_increasing(betas, "beta_d");
    StabilityMap m;
    m.deltas.assign(deltas.begin(), deltas.end());
    m.betas.assign(betas.begin(), betas.end());
    m.cells.resize(deltas.size() * betas.size());
    return m;
}

}  // namespace

StabilityMap scan_region_serial(std::span<const double> deltas, std::span<const double> betas,
                                double I_bar, const StabilityParams& base, const ScanOptions& opts) {
    StabilityMap m = make_map(deltas, betas);
    for (std::size_t i = 0; i < deltas.size(); ++i)
        for (std::size_t j = 0; j < betas.size(); ++j)
            m.cells[i * betas.size() + j] = scan_cell(deltas[i], betas[j], I_bar, base, opts);
    return m;
}

StabilityMap scan_region(std::span<const double> deltas, std::span<const double> betas,
                         double I_bar, const StabilityParams& base, const ScanOptions& opts) {
    StabilityMap m = make_map(deltas, betas);
    const std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(betas.size());
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(deltas.size()) * nb;
#ifdef _OPENMP
    const int nt = opts.workers > 0 ? opts.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
#endif
    for (std::ptrdiff_t k = 0; k < total; ++k) {
        m.cells[static_cast<std::size_t>(k)] =
            scan_cell(deltas[static_cast<std::size_t>(k / nb)], betas[static_cast<std::size_t>(k % nb)],
                      I_bar, base, opts);
    }
    return m;
}

}  // namespace amprb::stab
