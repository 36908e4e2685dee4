#pragma once

#include "amprb/specfun.hpp"

#include <functional>
#include <optional>

namespace amprb::am {

/// Added mass of a sphere of radius r1 translating inside a concentric
/// spherical cavity of radius r2 (inviscid, small displacement).
double added_mass(const ShellGeometry& geom, double rho);

/// Well-posedness predicate for the coupled pressure/acceleration system.
bool is_wellposed(double m_b, double M_a, double K);

/// Translating-sphere model problem. f_e is the applied force history.
struct AmProblem {
    ShellGeometry geom;
    double rho = 1.0;
    double m_b = 0.0;
    double w_b0 = 0.0;
    std::function<double(double)> f_e = [](double) { return 0.0; };
    /// Lower bound on m_b + M_a. Defaults to 1e-12 (m_b + M_a).
    std::optional<double> K;

    void validate() const;
    double threshold() const;
};

/// Radial profiles of the exact solution at one instant. The angular factors
/// (cos, -sin) are separated out.
struct AmExactState {
    ShellGeometry geom;
    double rho = 1.0;
    double t = 0.0;
    double w_b = 0.0;
    double a_w = 0.0;

    double p_hat(double r) const;
    double u_hat(double r) const;
    double v_hat(double r) const;
};

struct QuadratureOptions {
    double tol = 1e-10;
    int max_depth = 40;
};

/// Integral of f over [a, b] by adaptive composite trapezoid with
/// Richardson-checked bisection.
double adaptive_trapezoid(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts = {});

/// Exact solution at time t. Throws SingularityError if m_b + M_a < K.
AmExactState exact_state(const AmProblem& problem, double t, const QuadratureOptions& opts = {});

/// Solution of the semi-discrete pressure boundary-value problem solved in the
/// AMP pressure step, p*(r) = c1 r + c2 / r^2.
struct AmPressureSolution {
    double c1 = 0.0;
    double c2 = 0.0;
    double a_w = 0.0;

    double p_hat(double r) const { return c1 * r + c2 / (r * r); }
    double dp_hat(double r) const { return c1 - 2.0 * c2 / (r * r * r); }
};

/// Solves  (r^2 p')' - 2p = 0,  p'(r1) + rho a = 0,  p'(r2) = 0,
/// m_b a + (4 pi r1^2 / 3) p(r1) = f  as a 3x3 linear system for (c1, c2, a).
AmPressureSolution solve_amp_pressure_bvp(const AmProblem& problem, double f_e_np1);

}  // namespace amprb::am
