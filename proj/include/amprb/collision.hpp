#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace amprb::collision {

struct RepulsionParams {
    double y0 = 0.5;
    double delta = 0.1;
    double eps = 0.01;
    double B0 = 0.0;
    void validate() const;
};

/// Repulsive force: 0 above y0 + delta, quadratic ramp inside the layer, 1/eps below y0.
double g_rf(double y, const RepulsionParams& p);
/// Damping coefficient with the same ramp and plateau B0.
double damping_B(double y, const RepulsionParams& p);

/// Angular limits of a hinged leaflet (radians).
struct AngularParams {
    double theta_min = 0.0;
    double theta_max = 1.0;
    double delta = 3.0 * 0.017453292519943295;
    double eps1 = 0.05;
    double eps2 = 0.01;
    double B0 = 20.0;
    void validate() const;
};

/// Positive torque near theta_min (1/eps1 scale), negative near theta_max (1/eps2 scale).
double g_rt(double theta, const AngularParams& p);
double damping_B_theta(double theta, const AngularParams& p);

/// Force on body 1 from body 2 for spheres of radii R1, R2.
Eigen::Vector3d pairwise_repulsion(const Eigen::Vector3d& x1, const Eigen::Vector3d& x2, double R1,
                                   double R2, double delta, double eps);

/// Body in a fluid column with added mass rho L H; the normalized equation is
/// dv/dt = f_tilde + g_rf(y) - B(y) v with eps_tilde = eps (m_b + M_a) and
/// B0_tilde = B0 / (m_b + M_a).
struct MprfSystem {
    double m_b = 0.0;
    double rho = 1.0;
    double L = 1.0;
    double H = 1.0;
    double f_tilde = -1.0;
    double y_init = 1.0;
    double v_init = 0.0;

    double added_mass() const { return rho * L * H; }
    double total_mass() const { return m_b + added_mass(); }
    void validate() const;
    /// Parameters of the normalized equation.
    RepulsionParams normalized(const RepulsionParams& physical) const;
};

/// Total energy v^2/2 - f_tilde y - (y - y0 - delta)^3 / (3 eps delta^2) in
/// the layer; the repulsion term is dropped outside [y0, y0 + delta].
/// `p` holds the normalized parameters.
double energy(double y, double v, const RepulsionParams& p, double f_tilde = -1.0);

struct TrajectoryRow {
    double t, y, v, E;
    bool in_layer;
    bool penetrated;
};

/// Classical fourth-order Runge-Kutta integration of the normalized equation
/// up to T. `physical` is scaled by the system mass. Throws ConvergenceError
/// if |y| or |v| exceeds 1e12. Every `stride`-th step is recorded.
std::vector<TrajectoryRow> simulate_mprf(const MprfSystem& sys, const RepulsionParams& physical,
                                         double dt, double T, int stride = 1);

enum class CollisionCase { penetration, elastic_rebound, under_damped, over_damped, transitional };
const char* to_string(CollisionCase c);

struct CaseReport {
    CollisionCase kind = CollisionCase::transitional;
    double min_y = 0.0;
    int velocity_sign_changes = 0;
    double relative_energy_loss = 0.0;
};

/// Penetration if min y < y0; otherwise sign changes of v after the first
/// entry into the layer decide: none is over-damped, one is transitional,
/// two or more are an elastic rebound when energy is conserved to 1e-3 and
/// under-damped otherwise.
CaseReport classify(const std::vector<TrajectoryRow>& traj, const RepulsionParams& normalized);

struct CollisionScenario {
    std::string name;
    RepulsionParams normalized;
};

/// Representative parameters for the four cases with f_tilde = -1,
/// y(0) = 1, y0 = 0.5, delta = 0.1.
std::vector<CollisionScenario> reference_scenarios();

}  // namespace amprb::collision
