#pragma once

#include "amprb/specfun.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace amprb::ad {

/// Uniform radial grid on [r1, r2].
struct RadialGrid {
    ShellGeometry geom;
    int n_cells = 0;
    double h = 0.0;
    std::vector<double> nodes;

    /// Throws std::invalid_argument if n_cells < 8 or the geometry is invalid.
    static RadialGrid make(const ShellGeometry& geom, int n_cells);
    std::size_t size() const { return nodes.size(); }
};

/// Physical and scheme parameters for the rotating-sphere problem.
struct AdParams {
    double rho = 1.0;
    double mu = 1.0;
    double I_b = 0.0;
    double beta_d = 1.0;
    double dt = 1e-2;
    /// Spacing of the one-sided torque stencil; defaults to the grid spacing.
    std::optional<double> dr;

    double nu() const { return mu / rho; }
    void validate() const;
    /// Resolved stencil spacing; must be an integer multiple of grid.h.
    double stencil_spacing(const RadialGrid& grid) const;
};

/// Parameters of a simulation matched to a dimensionless stability point:
/// dt = 2 (dr / delta)^2 / nu and I_b = I_bar rho (2 V_b r1) dr / delta^2.
AdParams matched_params(const ShellGeometry& geom, double dr, double delta, double beta_d,
                        double I_bar, double rho = 1.0, double mu = 1.0);

/// Body volume (4/3) pi r1^3.
double body_volume(double r1);

/// delta = dr / sqrt(nu dt / 2).
double boundary_layer_ratio(const AdParams& p, double dr);

/// Added-damping coefficient of the rotating sphere,
/// mu (8/3) pi r1^4 (1 - e^{-delta}) / dr.
double added_damping_scalar(const AdParams& p, double r1, double dr);

/// One-sided second-order difference (-3 f0 + 4 f1 - f2) / (2 dr).
double d_rh(double f0, double f1, double f2, double dr);

/// Second-order conservative discretisation of
/// L w = (1/r^2)(r^2 w')' - 2 w / r^2 at interior nodes; boundary entries are zero.
std::vector<double> lop_apply(std::span<const double> w, const RadialGrid& grid);

/// Crank-Nicolson step (I - c L_h) w = (I + c L_h) w_n with c = nu dt / 2,
/// w(r1) = bc_inner, w(r2) = 0. Throws SingularityError on a vanishing pivot.
std::vector<double> cn_solve(std::span<const double> w_n, double bc_inner, const AdParams& params,
                             const RadialGrid& grid);

/// Torque 2 V_b mu [r D_rh(w / r)] at r = r1.
double surface_torque(std::span<const double> w, const AdParams& params, const RadialGrid& grid);

struct AdState {
    double t = 0.0;
    std::vector<double> w_hat;
    double omega_b = 0.0;
    double b_omega = 0.0;
    double prev_omega_b = 0.0;
    double prev_b_omega = 0.0;
};

struct StepOptions {
    /// Final fluid solve with the corrected body velocity. When false the
    /// corrector profile is kept and w(r1) = r1 omega_p.
    bool velocity_correction = true;
    /// Holds the body at rest; only the fluid diffuses.
    bool freeze_body = false;
};

/// Start-up state: the body acceleration is taken from the body equation
/// with the initial profile, and the one-step history repeats the initial
/// values. w0 is copied and its end values overwritten by the boundary data.
AdState initial_state(std::span<const double> w0, double omega0, double g_e0,
                      const AdParams& params, const RadialGrid& grid,
                      const StepOptions& opts = {});

/// One step of the added-mass partitioned scheme for the rotating sphere
/// (extrapolation, prediction, correction and fluid-velocity correction).
/// g_e is the applied torque at the new time level.
AdState step_ampad(const AdState& state, double g_e, const AdParams& params,
                   const RadialGrid& grid, const StepOptions& opts = {});

/// Empirical per-step amplification |A| from random initial data with zero
/// applied torque: geometric mean of successive norm ratios after the transient.
double measure_growth(const AdParams& params, const RadialGrid& grid, int n_steps, int n_transient,
                      std::uint64_t seed = 12345, const StepOptions& opts = {});

/// One cell of a (delta, beta_d) growth sweep.
struct GrowthCell {
    double delta = 0.0;
    double beta_d = 0.0;
    double growth = 0.0;
};

struct SweepSpec {
    ShellGeometry geom;
    int n_cells = 200;
    double dr = 0.05;
    double I_bar = 0.0;
    int n_steps = 2000;
    int n_transient = 200;
    std::uint64_t seed = 12345;
};

/// Growth factors over the tensor grid delta x beta_d (row-major in delta).
/// The parallel version distributes cells over OpenMP threads; both return
/// identical results.
std::vector<GrowthCell> growth_sweep(std::span<const double> deltas, std::span<const double> betas,
                                     const SweepSpec& spec, int workers = 0);
std::vector<GrowthCell> growth_sweep_serial(std::span<const double> deltas,
                                            std::span<const double> betas, const SweepSpec& spec);

}  // namespace amprb::ad
