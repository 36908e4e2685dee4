#include "amprb/collision.hpp"

#include "amprb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amprb::collision {

void RepulsionParams::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (B0 < 0.0) throw std::invalid_argument("B0 must be non-negative");
}

namespace {

// ((y - y0 - delta)/delta)^2, the common ramp of the layer.
double ramp(double y, double y0, double delta) {
    const double s = (y - y0 - delta) / delta;
    return s * s;
}

}  // namespace

double g_rf(double y, const RepulsionParams& p) {
    if (y > p.y0 + p.delta) return 0.0;
    if (y >= p.y0) return ramp(y, p.y0, p.delta) / p.eps;
    return 1.0 / p.eps;
}

double damping_B(double y, const RepulsionParams& p) {
    if (y > p.y0 + p.delta) return 0.0;
    if (y >= p.y0) return p.B0 * ramp(y, p.y0, p.delta);
    return p.B0;
}

void AngularParams::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw std::invalid_argument("eps1 and eps2 must be positive");
    if (B0 < 0.0) throw std::invalid_argument("B0 must be non-negative");
    if (!(theta_min + delta < theta_max - delta))
        throw std::invalid_argument("angle range must exceed twice the activation width");
}

double g_rt(double theta, const AngularParams& p) {
    if (theta <= p.theta_min) return 1.0 / p.eps1;
    if (theta <= p.theta_min + p.delta) return ramp(theta, p.theta_min, p.delta) / p.eps1;
    if (theta < p.theta_max - p.delta) return 0.0;
    if (theta <= p.theta_max) return -ramp(theta, p.theta_max - 2.0 * p.delta, p.delta) / p.eps2;
    return -1.0 / p.eps2;
}

double damping_B_theta(double theta, const AngularParams& p) {
    // The plateau applies strictly outside [theta_min, theta_max]; the ramps
    // take the endpoints, where both branches agree.
    if (theta < p.theta_min || theta > p.theta_max) return p.B0;
    if (theta <= p.theta_min + p.delta) return p.B0 * ramp(theta, p.theta_min, p.delta);
    if (theta < p.theta_max - p.delta) return 0.0;
    return p.B0 * ramp(theta, p.theta_max - 2.0 * p.delta, p.delta);
}

Eigen::Vector3d pairwise_repulsion(const Eigen::Vector3d& x1, const Eigen::Vector3d& x2, double R1,
                                   double R2, double delta, double eps) {
    if (!(delta > 0.0) || !(eps > 0.0)) throw std::invalid_argument("delta and eps must be positive");
    const Eigen::Vector3d d = x1 - x2;
    const double D = d.norm();
    if (!(D > 0.0)) throw DomainError("coincident particle centres");
    if (D > R1 + R2 + delta) return Eigen::Vector3d::Zero();
    const double s = (D - R1 - R2 - delta) / delta;
    return (s * s / eps) * d / D;
}

void MprfSystem::validate() const {
    if (m_b < 0.0 || rho < 0.0) throw std::invalid_argument("masses and density must be non-negative");
    if (!(L > 0.0) || !(H > 0.0)) throw std::invalid_argument("L and H must be positive");
    if (!(total_mass() > 0.0)) throw std::invalid_argument("m_b + M_a must be positive");
}

RepulsionParams MprfSystem::normalized(const RepulsionParams& physical) const {
    validate();
    physical.validate();
    RepulsionParams n = physical;
    n.eps = physical.eps * total_mass();
    n.B0 = physical.B0 / total_mass();
    return n;
}

double energy(double y, double v, const RepulsionParams& p, double f_tilde) {
    double e = 0.5 * v * v - f_tilde * y;
    if (y >= p.y0 && y <= p.y0 + p.delta) {
        const double s = y - p.y0 - p.delta;
        e -= s * s * s / (3.0 * p.eps * p.delta * p.delta);
    }
    return e;
}

std::vector<TrajectoryRow> simulate_mprf(const MprfSystem& sys, const RepulsionParams& physical,
                                         double dt, double T, int stride) {
    if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("dt must be positive and T non-negative");
    if (stride < 1) throw std::invalid_argument("stride must be at least 1");
    const RepulsionParams p = sys.normalized(physical);
    const double f = sys.f_tilde;
    auto accel = [&](double y, double v) { return f + g_rf(y, p) - damping_B(y, p) * v; };

    std::vector<TrajectoryRow> out;
    double y = sys.y_init, v = sys.v_init, t = 0.0;
    bool penetrated = y < p.y0;
    auto record = [&] {
        out.push_back({t, y, v, energy(y, v, p, f), y >= p.y0 && y <= p.y0 + p.delta, penetrated});
    };
    record();
    const long n = static_cast<long>(std::ceil(T / dt - 1e-9));
    for (long k = 1; k <= n; ++k) {
        const double h = std::min(dt, T - t);
        const double k1y = v, k1v = accel(y, v);
        const double k2y = v + 0.5 * h * k1v, k2v = accel(y + 0.5 * h * k1y, k2y);
        const double k3y = v + 0.5 * h * k2v, k3v = accel(y + 0.5 * h * k2y, k3y);
        const double k4y = v + h * k3v, k4v = accel(y + h * k3y, k4y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t = k == n ? T : k * dt;
        if (!(std::abs(y) <= 1e12) || !(std::abs(v) <= 1e12))
            throw ConvergenceError("collision trajectory blew up at t = " + std::to_string(t));
        penetrated = penetrated || y < p.y0;
        if (k % stride == 0 || k == n) record();
    }
    return out;
}

const char* to_string(CollisionCase c) {
    switch (c) {
        case CollisionCase::penetration: return "I-penetration";
        case CollisionCase::elastic_rebound: return "II-elastic-rebound";
        case CollisionCase::under_damped: return "III-under-damped";
        case CollisionCase::over_damped: return "IV-over-damped";
        case CollisionCase::transitional: return "transitional";
    }
    return "?";
}

CaseReport classify(const std::vector<TrajectoryRow>& traj, const RepulsionParams& p) {
    if (traj.empty()) throw std::invalid_argument("empty trajectory");
    CaseReport r;
    r.min_y = traj.front().y;
    for (const auto& row : traj) r.min_y = std::min(r.min_y, row.y);
    const double e0 = traj.front().E;
    r.relative_energy_loss = (e0 - traj.back().E) / std::max(std::abs(e0), 1e-300);
    if (r.min_y < p.y0) {
        r.kind = CollisionCase::penetration;
        return r;
    }
    std::size_t entry = 0;
    while (entry < traj.size() && traj[entry].y > p.y0 + p.delta) ++entry;
    int last_sign = 0;
    for (std::size_t k = entry; k < traj.size(); ++k) {
        const double v = traj[k].v;
        // Ignore velocities at roundoff level around a resting state.
        if (std::abs(v) < 1e-10) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++r.velocity_sign_changes;
        last_sign = s;
    }
    if (r.velocity_sign_changes == 0) r.kind = CollisionCase::over_damped;
    else if (r.velocity_sign_changes == 1) r.kind = CollisionCase::transitional;
    else if (std::abs(r.relative_energy_loss) < 1e-3) r.kind = CollisionCase::elastic_rebound;
    else r.kind = CollisionCase::under_damped;
    return r;
}

std::vector<CollisionScenario> reference_scenarios() {
    return {
        {"case-I", {0.5, 0.1, 1.0, 0.0}},
        {"case-II", {0.5, 0.1, 0.01, 0.0}},
        {"case-III", {0.5, 0.1, 0.01, 100.0}},
        {"case-IV", {0.5, 0.1, 0.01, 1.0e6}},
    };
}

}  // namespace amprb::collision
