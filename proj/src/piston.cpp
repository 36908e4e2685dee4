#include "amprb/piston.hpp"

#include "amprb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amprb::piston {

void PistonParams::validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    if (!(H > 0.0) || !(W > 0.0) || !(L > 0.0) || !(L_b > 0.0))
        throw std::invalid_argument("channel and body dimensions must be positive");
    if (rho_b < 0.0) throw std::invalid_argument("rho_b must be non-negative");
}

Motion Motion::sinusoid(double alpha) {
    const double w = 2.0 * std::numbers::pi;
    return {[=](double t) { return alpha * std::sin(w * t); },
            [=](double t) { return alpha * w * std::cos(w * t); },
            [=](double t) { return -alpha * w * w * std::sin(w * t); }};
}

Motion Motion::uniform_acceleration(double x0, double v0, double a0) {
    return {[=](double t) { return x0 + v0 * t + 0.5 * a0 * t * t; },
            [=](double t) { return v0 + a0 * t; },
            [=](double) { return a0; }};
}

double piston_added_mass(double x_I, const PistonParams& p) {
    if (!(x_I < p.L)) throw DomainError("interface reached the end of the channel");
    return p.rho * p.H * p.W * (p.L - x_I);
}

double applied_pressure(double t, const PistonParams& p, const Motion& m) {
    return -(p.m_b() + piston_added_mass(m.x(t), p)) * m.a(t) / (p.H * p.W);
}

PistonState exact_state(double t, const PistonParams& p, const Motion& m) {
    p.validate();
    PistonState s;
    s.t = t;
    s.x_b = m.x(t) - 0.5 * p.L_b;
    s.v_b = m.v(t);
    s.a_b = m.a(t);
    s.p_L = applied_pressure(t, p, m);
    s.a_prev = s.a_b;
    return s;
}

double exact_pressure(double x, double t, const PistonParams& p, const Motion& m) {
    const double xi = m.x(t);
    const double Ma = piston_added_mass(xi, p);
    const double pL = applied_pressure(t, p, m);
    return pL + (p.L - x) / (p.L - xi) * (-pL / (p.m_b() / Ma + 1.0));
}

PistonState initial_state(double t0, double dt, const PistonParams& p, const Motion& m) {
    PistonState s = exact_state(t0, p, m);
    s.a_prev = m.a(t0 - dt);
    return s;
}

PistonState step_amp_piston(const PistonState& s, double dt, const PistonParams& p, const Motion& m) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double t1 = s.t + dt;
    const double pL = applied_pressure(t1, p, m);
    const double force = -p.H * p.W * pL;
    const double half = 0.5 * p.L_b;
    auto solve_accel = [&](double x_b) {
        const double mass = p.m_b() + piston_added_mass(x_b + half, p);
        if (!(mass > 0.0)) throw SingularityError("piston mass plus added mass vanished");
        return force / mass;
    };

    const double a_e = 2.0 * s.a_b - s.a_prev;
    const double v_e = s.v_b + 0.5 * dt * (a_e + s.a_b);
    const double x_e = s.x_b + 0.5 * dt * (v_e + s.v_b);

    const double a_p = solve_accel(x_e);
    const double v_p = s.v_b + 0.5 * dt * (a_p + s.a_b);
    const double x_p = s.x_b + 0.5 * dt * (v_p + s.v_b);

    PistonState n;
    n.t = t1;
    n.a_b = solve_accel(x_p);
    n.v_b = s.v_b + 0.5 * dt * (n.a_b + s.a_b);
    n.x_b = s.x_b + 0.5 * dt * (n.v_b + s.v_b);
    n.p_L = pL;
    n.a_prev = s.a_b;
    return n;
}

RunResult simulate(const PistonParams& p, double dt, double T, const Motion& m, int stride) {
    p.validate();
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("dt and T must be positive");
    if (stride < 1) throw std::invalid_argument("stride must be at least 1");
    const long n = std::lround(T / dt);
    if (std::abs(n * dt - T) > 1e-9 * T) throw std::invalid_argument("T must be a multiple of dt");
    RunResult r;
    PistonState s = initial_state(0.0, dt, p, m);
    r.states.push_back(s);
    auto err = [&](const PistonState& st) {
        PistonState e = exact_state(st.t, p, m);
        return std::max(std::abs(st.x_b - e.x_b), std::abs(st.v_b - e.v_b));
    };
    for (long k = 1; k <= n; ++k) {
        s = step_amp_piston(s, dt, p, m);
        s.t = k * dt;
        if (!std::isfinite(s.x_b) || !std::isfinite(s.v_b)) throw ConvergenceError("piston run produced non-finite state");
        r.max_error = std::max(r.max_error, err(s));
        if (k % stride == 0 || k == n) r.states.push_back(s);
    }
    r.final_error = err(s);
    return r;
}

std::vector<ConvergenceRow> convergence_study(const PistonParams& p, const std::vector<double>& dts,
                                              double T) {
    std::vector<ConvergenceRow> rows;
    for (double dt : dts) {
        ConvergenceRow row;
        row.dt = dt;
        row.error = simulate(p, dt, T).final_error;
        if (!rows.empty()) row.order = std::log(rows.back().error / row.error) / std::log(rows.back().dt / dt);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace amprb::piston
