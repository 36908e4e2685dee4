#pragma once

#include "amprb/specfun.hpp"

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace amprb::stab {

struct StabilityParams {
    ShellGeometry geom;
    double dr = 0.05;
    double delta = 1.0;
    double beta_d = 1.0;
    double I_bar = 0.0;

    void validate() const;
    double zeta1() const { return delta / dr; }
    /// Dimensionless added-damping coefficient 1 - e^{-delta}.
    double d_bar() const;
};

struct StabilityVerdict {
    int unstable_root_count = 0;
    std::vector<Complex> roots;
    /// Largest |A| among the located roots; 1 when none lies outside the contour.
    double max_modulus = 1.0;
    bool stable() const { return unstable_root_count == 0; }
};

/// Dirichlet-to-Neumann transfer coefficient of the one-sided stencil at r1.
Complex transfer_coefficient(Complex zeta, const StabilityParams& p);

/// Amplification-factor polynomial-like function with C1 cached.
class AmplificationEquation {
public:
    explicit AmplificationEquation(const StabilityParams& p);

    const StabilityParams& params() const { return p_; }
    double c1() const { return c1_; }
    double gamma_v() const { return gamma_v_; }
    double gamma_0() const { return gamma_0_; }

    /// N_v(A). Throws SingularityError at A = -1.
    Complex nv(Complex A) const;
    /// Scale used for relative residuals: sum of the moduli of the terms of N_v(A).
    double nv_scale(Complex A) const;
    /// N_v(1/B) B^3, analytic in |B| < 1. Zeros with 0 < |B| < 1 are roots
    /// with |A| > 1; a zero at B = 0 is a root at infinity.
    Complex g(Complex B) const;
    /// 4th-order central difference, step 1e-5 max(1, |A|).
    Complex nv_derivative(Complex A) const;

private:
    Complex c2(Complex s) const;
    StabilityParams p_;
    double c1_ = 0.0;
    double d_bar_ = 0.0;
    double gamma_v_ = 0.0;
    double gamma_0_ = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Number of roots with 1 + eps < |A| < R_outer, counting a root at infinity
/// when R_outer is infinite. Uses the winding number of g around |B| = 1/(1+eps).
int count_unstable_roots(const StabilityParams& p, double eps = 1e-3, double R_outer = kInf);

/// Locates every root counted by count_unstable_roots by recursive cell
/// subdivision and Newton polishing. A root at infinity is returned as
/// Complex(inf, 0).
StabilityVerdict find_roots_outside(const StabilityParams& p, double eps = 1e-3,
                                    double R_outer = kInf);

struct ScanCell {
    double delta = 0.0;
    double beta_d = 0.0;
    int count = -1;
    double max_modulus = 0.0;
    std::string error;
    bool ok() const { return error.empty(); }
    bool stable() const { return ok() && count == 0; }
};

struct StabilityMap {
    std::vector<double> deltas;
    std::vector<double> betas;
    /// Row-major in delta.
    std::vector<ScanCell> cells;
    const ScanCell& at(std::size_t i_delta, std::size_t i_beta) const {
        return cells[i_delta * betas.size() + i_beta];
    }
};

struct ScanOptions {
    double eps = 1e-3;
    bool locate_roots = true;
    int workers = 0;
};

/// Classifies every (delta, beta_d) cell. Errors are recorded per cell.
StabilityMap scan_region(std::span<const double> deltas, std::span<const double> betas,
                         double I_bar, const StabilityParams& base, const ScanOptions& opts = {});
StabilityMap scan_region_serial(std::span<const double> deltas, std::span<const double> betas,
                                double I_bar, const StabilityParams& base,
                                const ScanOptions& opts = {});

struct BoundaryPoint {
    double delta = 0.0;
    double beta_d = 0.0;
    double theta = 0.0;
    double residual = 0.0;
    bool verified = false;
};

struct TraceOptions {
    double ds0 = 0.05;
    double ds_min = 1e-6;
    double ds_max = 0.2;
    int max_points = 400;
    double delta_min = 1e-2;
    double delta_max = 1e2;
    double beta_min = 0.0;
    double beta_max = 5.0;
    /// Half-width of the beta_d window searched for a verdict change.
    double bracket_width = 0.5;
    /// Trace towards increasing and decreasing delta from the start point.
    bool both_directions = true;
    /// Check that the verdict flips across each point at beta_d +- verify_offset.
    bool verify = true;
    double verify_offset = 1e-3;
    double residual_tol = 1e-10;
};

struct BoundaryTrace {
    std::vector<BoundaryPoint> points;
    /// True when the crossing root sits at A = 1 (theta = 0).
    bool real_crossing = false;
    std::string stop_reason;
};

/// beta_d at which the verdict changes inside [beta_lo, beta_hi] at fixed delta,
/// by bisection on the root count. Throws DomainError if the ends agree.
double bisect_boundary_beta(const StabilityParams& base, double delta, double beta_lo,
                            double beta_hi, double tol = 1e-6);

/// Pseudo-arclength continuation of the curve on which a root of N_v lies on
/// |A| = 1, starting from the verdict change nearest to (delta0, beta0).
BoundaryTrace trace_boundary(const StabilityParams& base, double delta0, double beta0,
                             const TraceOptions& opts = {});

/// Continuation from an exact boundary point (e.g. the end of a previous trace).
BoundaryTrace continue_boundary(const StabilityParams& base, const BoundaryPoint& start,
                                bool real_crossing, int direction, const TraceOptions& opts = {});

}  // namespace amprb::stab
