#include "amprb/model_ad.hpp"

#include "amprb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace amprb::ad {

RadialGrid RadialGrid::make(const ShellGeometry& geom, int n_cells) {
    geom.validate();
    if (n_cells < 8) throw std::invalid_argument("radial grid needs at least 8 cells");
    RadialGrid g;
    g.geom = geom;
    g.n_cells = n_cells;
    g.h = (geom.r2 - geom.r1) / n_cells;
    g.nodes.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int j = 0; j <= n_cells; ++j) g.nodes[j] = geom.r1 + j * g.h;
    g.nodes.back() = geom.r2;
    return g;
}

void AdParams::validate() const {
    if (!(rho > 0.0) || !(mu > 0.0)) throw std::invalid_argument("rho and mu must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (I_b < 0.0) throw std::invalid_argument("I_b must be non-negative");
    if (beta_d < 0.0) throw std::invalid_argument("beta_d must be non-negative");
    if (dr && !(*dr > 0.0)) throw std::invalid_argument("dr must be positive");
}

double AdParams::stencil_spacing(const RadialGrid& grid) const {
    if (!dr) return grid.h;
    double k = *dr / grid.h;
    double kr = std::round(k);
    if (kr < 1.0 || std::abs(k - kr) > 1e-9 * std::max(1.0, k))
        throw std::invalid_argument("dr must be an integer multiple of the grid spacing");
    if (2 * static_cast<int>(kr) > grid.n_cells)
        throw std::invalid_argument("torque stencil does not fit in the grid");
    return kr * grid.h;
}

double body_volume(double r1) { return 4.0 / 3.0 * std::numbers::pi * r1 * r1 * r1; }

AdParams matched_params(const ShellGeometry& geom, double dr, double delta, double beta_d,
                        double I_bar, double rho, double mu) {
    if (!(delta > 0.0) || !(dr > 0.0)) throw std::invalid_argument("delta and dr must be positive");
    AdParams p;
    p.rho = rho;
    p.mu = mu;
    p.beta_d = beta_d;
    p.dr = dr;
    p.dt = 2.0 * (dr / delta) * (dr / delta) / p.nu();
    p.I_b = I_bar * rho * 2.0 * body_volume(geom.r1) * geom.r1 * dr / (delta * delta);
    return p;
}

double boundary_layer_ratio(const AdParams& p, double dr) {
    return dr / std::sqrt(p.nu() * p.dt / 2.0);
}

double added_damping_scalar(const AdParams& p, double r1, double dr) {
    double delta = boundary_layer_ratio(p, dr);
    return p.mu * (8.0 / 3.0) * std::numbers::pi * std::pow(r1, 4) * (-std::expm1(-delta)) / dr;
}

double d_rh(double f0, double f1, double f2, double dr) {
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * dr);
}

namespace {

// Tridiagonal coefficients of L_h at interior node j.
struct Stencil {
    double lo, di, up;
};

Stencil stencil_at(const RadialGrid& g, std::size_t j) {
    double r = g.nodes[j];
    double rm = r - 0.5 * g.h, rp = r + 0.5 * g.h;
    double s = 1.0 / (r * r * g.h * g.h);
    double lo = rm * rm * s, up = rp * rp * s;
    return {lo, -(lo + up) - 2.0 / (r * r), up};
}

void check_size(std::span<const double> w, const RadialGrid& g) {
    if (w.size() != g.size()) throw std::invalid_argument("profile size does not match grid");
}

}  // namespace

std::vector<double> lop_apply(std::span<const double> w, const RadialGrid& grid) {
    check_size(w, grid);
    std::vector<double> out(w.size(), 0.0);
    for (std::size_t j = 1; j + 1 < w.size(); ++j) {
        auto s = stencil_at(grid, j);
        out[j] = s.lo * w[j - 1] + s.di * w[j] + s.up * w[j + 1];
    }
    return out;
}

std::vector<double> cn_solve(std::span<const double> w_n, double bc_inner, const AdParams& params,
                             const RadialGrid& grid) {
    check_size(w_n, grid);
    const std::size_t n = w_n.size();
    const double c = 0.5 * params.nu() * params.dt;

    // Thomas algorithm on the interior unknowns 1..n-2.
    std::vector<double> cp(n, 0.0), dp(n, 0.0), out(n, 0.0);
    out[0] = bc_inner;
    out[n - 1] = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        auto s = stencil_at(grid, j);
        double a = -c * s.lo, b = 1.0 - c * s.di, cc = -c * s.up;
        double rhs = w_n[j] + c * (s.lo * w_n[j - 1] + s.di * w_n[j] + s.up * w_n[j + 1]);
        if (j == 1) {
            rhs -= a * bc_inner;
            a = 0.0;
        }
        if (j + 2 == n) cc = 0.0;
        double piv = b - a * cp[j - 1];
        if (std::abs(piv) < 1e-14) throw SingularityError("vanishing pivot in Crank-Nicolson solve");
        cp[j] = cc / piv;
        dp[j] = (rhs - a * dp[j - 1]) / piv;
    }
    for (std::size_t j = n - 2; j >= 1; --j) {
        out[j] = dp[j] - cp[j] * out[j + 1];
    }
    return out;
}

double surface_torque(std::span<const double> w, const AdParams& params, const RadialGrid& grid) {
    check_size(w, grid);
    double dr = params.stencil_spacing(grid);
    auto k = static_cast<std::size_t>(std::lround(dr / grid.h));
    const auto& r = grid.nodes;
    double r1 = grid.geom.r1;
    double deriv = d_rh(w[0] / r[0], w[k] / r[k], w[2 * k] / r[2 * k], dr);
    return 2.0 * body_volume(r1) * params.mu * r1 * deriv;
}

namespace {

double body_matrix(const AdParams& p, const RadialGrid& grid, double& damping) {
    damping = added_damping_scalar(p, grid.geom.r1, p.stencil_spacing(grid));
    double m = p.I_b + p.beta_d * p.dt * damping;
    if (!(std::abs(m) > 0.0)) throw SingularityError("body equation is singular (I_b + beta dt D = 0)");
    return m;
}

}  // namespace

AdState initial_state(std::span<const double> w0, double omega0, double g_e0,
                      const AdParams& params, const RadialGrid& grid, const StepOptions& opts) {
    params.validate();
    check_size(w0, grid);
    AdState s;
    s.w_hat.assign(w0.begin(), w0.end());
    s.omega_b = opts.freeze_body ? 0.0 : omega0;
    s.w_hat.front() = grid.geom.r1 * s.omega_b;
    s.w_hat.back() = 0.0;
    if (!opts.freeze_body) {
        double damping = 0.0;
        double m = body_matrix(params, grid, damping);
        s.b_omega = (surface_torque(s.w_hat, params, grid) + g_e0) / m;
    }
    s.prev_omega_b = s.omega_b;
    s.prev_b_omega = s.b_omega;
    return s;
}

AdState step_ampad(const AdState& st, double g_e, const AdParams& params, const RadialGrid& grid,
                   const StepOptions& opts) {
    const double dt = params.dt;
    const double r1 = grid.geom.r1;
    AdState next;
    next.t = st.t + dt;
    next.prev_omega_b = st.omega_b;
    next.prev_b_omega = st.b_omega;

    if (opts.freeze_body) {
        next.w_hat = cn_solve(st.w_hat, 0.0, params, grid);
        return next;
    }

    double damping = 0.0;
    const double m = body_matrix(params, grid, damping);
    const double bdd = params.beta_d * dt * damping;

    double b_e = 2.0 * st.b_omega - st.prev_b_omega;
    double omega_e = st.prev_omega_b + 2.0 * dt * st.b_omega;

    auto w_p = cn_solve(st.w_hat, r1 * omega_e, params, grid);
    double b_p = (surface_torque(w_p, params, grid) + bdd * b_e + g_e) / m;
    double omega_p = st.omega_b + 0.5 * dt * (b_p + st.b_omega);

    auto w_c = cn_solve(st.w_hat, r1 * omega_p, params, grid);
    next.b_omega = (surface_torque(w_c, params, grid) + bdd * b_p + g_e) / m;
    next.omega_b = st.omega_b + 0.5 * dt * (next.b_omega + st.b_omega);

    if (opts.velocity_correction) {
        next.w_hat = cn_solve(st.w_hat, r1 * next.omega_b, params, grid);
    } else {
        next.w_hat = std::move(w_c);
    }
    return next;
}

namespace {

double state_norm(const AdState& s, double r1) {
    double m = r1 * std::abs(s.omega_b);
    for (double v : s.w_hat) m = std::max(m, std::abs(v));
    return m;
}

void rescale(AdState& s, double f) {
    for (double& v : s.w_hat) v *= f;
    s.omega_b *= f;
    s.b_omega *= f;
    s.prev_omega_b *= f;
    s.prev_b_omega *= f;
}

}  // namespace

double measure_growth(const AdParams& params, const RadialGrid& grid, int n_steps, int n_transient,
                      std::uint64_t seed, const StepOptions& opts) {
    if (n_steps <= n_transient || n_transient < 0)
        throw std::invalid_argument("n_steps must exceed n_transient");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> w0(grid.size());
    for (double& v : w0) v = normal(rng);
    double omega0 = normal(rng);

    AdState s = initial_state(w0, omega0, 0.0, params, grid, opts);
    double prev = state_norm(s, grid.geom.r1);
    double log_sum = 0.0;
    int counted = 0;
    for (int n = 1; n <= n_steps; ++n) {
        s = step_ampad(s, 0.0, params, grid, opts);
        double cur = state_norm(s, grid.geom.r1);
        if (!std::isfinite(cur)) throw ConvergenceError("non-finite state while measuring growth");
        if (cur == 0.0) return 0.0;
        if (n > n_transient) {
            log_sum += std::log(cur / prev);
            ++counted;
        }
        prev = cur;
        if (cur > 1e200 || cur < 1e-200) {
            rescale(s, 1.0 / cur);
            prev = 1.0;
        }
    }
    return std::exp(log_sum / counted);
}

namespace {

GrowthCell sweep_cell(double delta, double beta, const SweepSpec& spec) {
    auto grid = RadialGrid::make(spec.geom, spec.n_cells);
    auto p = matched_params(spec.geom, spec.dr, delta, beta, spec.I_bar);
    return {delta, beta, measure_growth(p, grid, spec.n_steps, spec.n_transient, spec.seed)};
}

}  // namespace

std::vector<GrowthCell> growth_sweep_serial(std::span<const double> deltas,
                                            std::span<const double> betas, const SweepSpec& spec) {
    std::vector<GrowthCell> out;
    out.reserve(deltas.size() * betas.size());
    for (double d : deltas)
        for (double b : betas) out.push_back(sweep_cell(d, b, spec));
    return out;
}

std::vector<GrowthCell> growth_sweep(std::span<const double> deltas, std::span<const double> betas,
                                     const SweepSpec& spec, int workers) {
    const std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(betas.size());
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(deltas.size()) * nb;
    std::vector<GrowthCell> out(static_cast<std::size_t>(total));
    // Each cell seeds its own generator, so the result does not depend on scheduling.
#ifdef _OPENMP
    int nt = workers > 0 ? workers : 0;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt > 0 ? nt : omp_get_max_threads())
#else
    (void)workers;
#endif
    for (std::ptrdiff_t i = 0; i < total; ++i) {
        out[static_cast<std::size_t>(i)] =
            sweep_cell(deltas[static_cast<std::size_t>(i / nb)], betas[static_cast<std::size_t>(i % nb)], spec);
    }
    return out;
}

}  // namespace amprb::ad
