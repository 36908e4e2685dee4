#include "amprb/model_am.hpp"

#include "amprb/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace amprb::am {

using std::numbers::pi;

double added_mass(const ShellGeometry& geom, double rho) {
    geom.validate();
    const double q = std::pow(geom.r1 / geom.r2, 3);
    return 4.0 / 3.0 * rho * pi * std::pow(geom.r1, 3) * (1.0 + 2.0 * q) / (2.0 - 2.0 * q);
}

bool is_wellposed(double m_b, double M_a, double K) {
    if (!(K > 0.0)) throw std::invalid_argument("is_wellposed: K must be positive");
    return m_b + M_a >= K;
}

void AmProblem::validate() const {
    geom.validate();
    if (!(rho > 0.0)) throw std::invalid_argument("AmProblem: rho must be positive");
    if (!(m_b >= 0.0)) throw std::invalid_argument("AmProblem: m_b must be non-negative");
    if (!f_e) throw std::invalid_argument("AmProblem: f_e is empty");
    if (K && !(*K > 0.0)) throw std::invalid_argument("AmProblem: K must be positive");
}

double AmProblem::threshold() const {
    if (K) return *K;
    const double total = m_b + added_mass(geom, rho);
    return total > 0.0 ? 1e-12 * total : std::numeric_limits<double>::min();
}

namespace {

void require_wellposed(const AmProblem& p) {
    const double M_a = added_mass(p.geom, p.rho);
    if (!is_wellposed(p.m_b, M_a, p.threshold())) {
        std::ostringstream os;
        os << "MP-AM ill-posed: m_b + M_a = " << p.m_b + M_a << " below K = " << p.threshold();
        throw SingularityError(os.str());
    }
}

double trapezoid_refine(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double left = 0.5 * (m - a) * (fa + fm);
    const double right = 0.5 * (b - m) * (fm + fb);
    const double halves = left + right;
    // trapezoid error drops by 4 per halving, so |halves - whole| ~ 3 |error(halves)|
    if (depth <= 0 || std::abs(halves - whole) <= 3.0 * tol) return halves;
    return trapezoid_refine(f, a, m, fa, fm, left, 0.5 * tol, depth - 1) +
           trapezoid_refine(f, m, b, fm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_trapezoid(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts) {
    if (a == b) return 0.0;
    // coarse initial panels so that the first error estimate cannot vanish by symmetry
    constexpr int panels = 16;
    const double h = (b - a) / panels;
    double sum = 0.0;
    double x0 = a, f0 = f(a);
    for (int k = 1; k <= panels; ++k) {
        const double x1 = (k == panels) ? b : a + k * h;
        const double f1 = f(x1);
        sum += trapezoid_refine(f, x0, x1, f0, f1, 0.5 * (x1 - x0) * (f0 + f1), opts.tol / panels,
                                opts.max_depth);
        x0 = x1;
        f0 = f1;
    }
    return sum;
}

double AmExactState::p_hat(double r) const {
    const double r1 = geom.r1, r2 = geom.r2;
    const double c = rho * r1 * a_w / ((r2 / r1) * (r2 / r1) - r1 / r2);
    return c * (r / r2 + r2 * r2 / (2.0 * r * r));
}

double AmExactState::u_hat(double r) const {
    const double r1c = std::pow(geom.r1, 3), r2c = std::pow(geom.r2, 3), rc = r * r * r;
    return (r2c - rc) / (r2c - r1c) * (r1c / rc) * w_b;
}

double AmExactState::v_hat(double r) const {
    const double r1c = std::pow(geom.r1, 3), r2c = std::pow(geom.r2, 3), rc = r * r * r;
    return (2.0 * rc + r2c) / (2.0 * r1c - 2.0 * r2c) * (r1c / rc) * w_b;
}

AmExactState exact_state(const AmProblem& problem, double t, const QuadratureOptions& opts) {
    problem.validate();
    require_wellposed(problem);
    const double total = problem.m_b + added_mass(problem.geom, problem.rho);
    AmExactState s;
    s.geom = problem.geom;
    s.rho = problem.rho;
    s.t = t;
    s.w_b = adaptive_trapezoid(problem.f_e, 0.0, t, opts) / total + problem.w_b0;
    s.a_w = problem.f_e(t) / total;
    return s;
}

AmPressureSolution solve_amp_pressure_bvp(const AmProblem& problem, double f_e_np1) {
    problem.validate();
    require_wellposed(problem);
    const double r1 = problem.geom.r1, r2 = problem.geom.r2;
    const double area = 4.0 * pi * r1 * r1 / 3.0;
    Eigen::Matrix3d M;
    // unknowns (c1, c2, a)
    M << 1.0, -2.0 / (r1 * r1 * r1), problem.rho,
         area * r1, area / (r1 * r1), problem.m_b,
         1.0, -2.0 / (r2 * r2 * r2), 0.0;
    const Eigen::Vector3d rhs(0.0, f_e_np1, 0.0);
    const Eigen::Vector3d x = M.fullPivLu().solve(rhs);
    return {x(0), x(1), x(2)};
}

}  // namespace amprb::am
