#pragma once

#include <functional>
#include <vector>

namespace amprb::piston {

struct PistonParams {
    double rho = 1.0;
    double H = 1.0;
    double W = 1.0;
    double L = 1.5;
    double L_b = 1.0;
    double rho_b = 1.0;
    double alpha_b = 0.25;

    double m_b() const { return rho_b * L_b * H * W; }
    void validate() const;
};

/// Prescribed interface motion x_I(t) with its first two derivatives.
struct Motion {
    std::function<double(double)> x, v, a;
    /// alpha sin(2 pi t).
    static Motion sinusoid(double alpha);
    /// x0 + v0 t + a0 t^2 / 2.
    static Motion uniform_acceleration(double x0, double v0, double a0);
};

/// rho H W (L - x_I). Throws DomainError when the fluid column vanishes.
double piston_added_mass(double x_I, const PistonParams& p);

struct PistonState {
    double t = 0.0;
    double x_b = 0.0;
    double v_b = 0.0;
    double a_b = 0.0;
    double p_L = 0.0;
    /// Acceleration one step back; the predictor's history.
    double a_prev = 0.0;
};

/// Applied end pressure that produces the prescribed motion,
/// p_L = -(m_b + M_a) a_I / (H W).
double applied_pressure(double t, const PistonParams& p, const Motion& m);

/// Exact state; a_prev is left equal to a_b.
PistonState exact_state(double t, const PistonParams& p, const Motion& m);
inline PistonState exact_state(double t, const PistonParams& p) {
    return exact_state(t, p, Motion::sinusoid(p.alpha_b));
}

/// Pressure p(x, t) of the exact solution, linear between x_I and L.
double exact_pressure(double x, double t, const PistonParams& p, const Motion& m);

/// Exact state at t0 with the history taken from the exact solution at t0 - dt.
PistonState initial_state(double t0, double dt, const PistonParams& p, const Motion& m);

/// One step of the added-mass partitioned scheme for the piston: extrapolated
/// acceleration, scalar pressure-acceleration solve with the added mass at
/// the predicted position, trapezoidal updates, and one correction pass.
PistonState step_amp_piston(const PistonState& s, double dt, const PistonParams& p, const Motion& m);

struct RunResult {
    std::vector<PistonState> states;
    /// max(|x_b - x_exact|, |v_b - v_exact|) at the final time.
    double final_error = 0.0;
    /// Same quantity maximised over all steps.
    double max_error = 0.0;
};

RunResult simulate(const PistonParams& p, double dt, double T, const Motion& m, int stride = 1);
inline RunResult simulate(const PistonParams& p, double dt, double T) {
    return simulate(p, dt, T, Motion::sinusoid(p.alpha_b));
}

struct ConvergenceRow {
    double dt = 0.0;
    double error = 0.0;
    double order = 0.0;  ///< relative to the previous row; 0 for the first
};

/// Errors at T for each dt (halving sequence expected) and observed orders.
std::vector<ConvergenceRow> convergence_study(const PistonParams& p, const std::vector<double>& dts,
                                              double T = 0.8);

}  // namespace amprb::piston
