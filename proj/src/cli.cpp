#include "amprb/cli.hpp"

#include "amprb/collision.hpp"
#include "amprb/config.hpp"
#include "amprb/damping_tensors.hpp"
#include "amprb/errors.hpp"
#include "amprb/model_ad.hpp"
#include "amprb/model_am.hpp"
#include "amprb/piston.hpp"
#include "amprb/quadrature.hpp"
#include "amprb/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace amprb::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width mismatch in table " + name);
    rows.push_back(std::move(row));
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string cell_text(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return format_double(*d);
    if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (auto b = std::get_if<bool>(&c)) return *b ? "1" : "0";
    return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_double(*d);
    }
    if (auto i = std::get_if<long long>(&c)) return *i;
    if (auto b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
}

}  // namespace

std::string to_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell_text(row[k]);
        os << '\n';
    }
    return os.str();
}

namespace {

struct Globals {
    std::string format = "csv";
    int workers = 0;
    std::uint64_t seed = 12345;
};

struct Result {
    std::vector<Table> tables;
    json summary = json::object();
};

using Runner = std::function<Result(const ParamSet&, const Globals&)>;

struct Experiment {
    std::string group, action, help;
    std::vector<ParamSpec> params;
    Runner fn;
    bool uses_seed = false;
    bool uses_workers = false;
};

ShellGeometry shell(const ParamSet& p) {
    ShellGeometry g{p.num("r1"), p.num("r2")};
    g.validate();
    return g;
}

int as_int(const ParamSet& p, const std::string& key) { return static_cast<int>(p.integer(key)); }

const std::vector<ParamSpec> kShell = {{"r1", "1", "body radius"}, {"r2", "2", "outer radius"}};

std::vector<ParamSpec> with(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// ---- mp-am ---------------------------------------------------------------

const std::vector<ParamSpec> kAm = with(kShell, {
    {"rho", "1", "fluid density"},
    {"m_b", "1", "body mass"},
    {"w_b0", "0", "initial body velocity"},
    {"force", "sine", "applied force: zero|constant|sine|cosine"},
    {"f0", "1", "force amplitude"},
    {"omega", "1", "force angular frequency"},
    {"t", "0", "evaluation time"},
    {"n_r", "11", "radial sample count"},
});

am::AmProblem am_problem(const ParamSet& p) {
    am::AmProblem prob;
    prob.geom = shell(p);
    prob.rho = p.num("rho");
    prob.m_b = p.num("m_b");
    prob.w_b0 = p.num("w_b0");
    const double f0 = p.num("f0"), w = p.num("omega");
    const std::string& kind = p.str("force");
    if (kind == "zero") prob.f_e = [](double) { return 0.0; };
    else if (kind == "constant") prob.f_e = [=](double) { return f0; };
    else if (kind == "sine") prob.f_e = [=](double t) { return f0 * std::sin(w * t); };
    else if (kind == "cosine") prob.f_e = [=](double t) { return f0 * std::cos(w * t); };
    else throw std::invalid_argument("force must be zero|constant|sine|cosine");
    prob.validate();
    return prob;
}

std::vector<double> radial_samples(const ShellGeometry& g, int n) {
    if (n < 2) throw std::invalid_argument("n_r must be at least 2");
    std::vector<double> r(n);
    for (int k = 0; k < n; ++k) r[k] = g.r1 + (g.r2 - g.r1) * k / (n - 1);
    return r;
}

Result am_exact(const ParamSet& p, const Globals&) {
    const auto prob = am_problem(p);
    const double t = p.num("t");
    const auto s = am::exact_state(prob, t);
    Table tab{"profile", {"r", "p_hat", "u_hat", "v_hat", "w_b", "a_w"}, {}};
    for (double r : radial_samples(prob.geom, as_int(p, "n_r")))
        tab.add({r, s.p_hat(r), s.u_hat(r), s.v_hat(r), s.w_b, s.a_w});
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["added_mass"] = am::added_mass(prob.geom, prob.rho);
    res.summary["w_b"] = s.w_b;
    res.summary["a_w"] = s.a_w;
    return res;
}

Result am_bvp(const ParamSet& p, const Globals&) {
    const auto prob = am_problem(p);
    const double t = p.num("t");
    const auto sol = am::solve_amp_pressure_bvp(prob, prob.f_e(t));
    const auto ex = am::exact_state(prob, t);
    Table tab{"pressure", {"r", "p_star", "p_exact", "difference"}, {}};
    for (double r : radial_samples(prob.geom, as_int(p, "n_r"))) {
        const double a = sol.p_hat(r), b = ex.p_hat(r);
        tab.add({r, a, b, a - b});
    }
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["a_star"] = sol.a_w;
    res.summary["a_exact"] = ex.a_w;
    res.summary["c1"] = sol.c1;
    res.summary["c2"] = sol.c2;
    return res;
}

// ---- mp-ad ---------------------------------------------------------------

const std::vector<ParamSpec> kAdCommon = with(kShell, {
    {"n_cells", "200", "radial cells"},
    {"dr", "0.05", "spacing of the torque stencil"},
    {"I_bar", "0", "dimensionless body inertia"},
    {"rho", "1", "fluid density"},
    {"mu", "1", "fluid viscosity"},
});

Result ad_simulate(const ParamSet& p, const Globals& g) {
    const auto geom = shell(p);
    const auto grid = ad::RadialGrid::make(geom, as_int(p, "n_cells"));
    const auto params = ad::matched_params(geom, p.num("dr"), p.num("delta"), p.num("beta_d"),
                                           p.num("I_bar"), p.num("rho"), p.num("mu"));
    ad::StepOptions opts;
    opts.velocity_correction = p.flag("velocity_correction");
    std::vector<double> w0(grid.size(), 0.0);
    const std::string& init = p.str("initial");
    if (init == "random") {
        std::mt19937_64 rng(g.seed);
        std::normal_distribution<double> nd;
        for (auto& x : w0) x = nd(rng);
    } else if (init != "rest") {
        throw std::invalid_argument("initial must be rest|random");
    }
    const double g_e = p.num("torque");
    auto s = ad::initial_state(w0, p.num("omega0"), g_e, params, grid, opts);
    const int n = as_int(p, "n_steps"), stride = as_int(p, "stride");
    if (n < 1 || stride < 1) throw std::invalid_argument("n_steps and stride must be positive");
    Table tab{"history", {"step", "t", "omega_b", "b_omega", "w_max"}, {}};
    auto record = [&](long long k) {
        double wm = 0.0;
        for (double x : s.w_hat) wm = std::max(wm, std::abs(x));
        tab.add({k, s.t, s.omega_b, s.b_omega, wm});
    };
    record(0);
    for (int k = 1; k <= n; ++k) {
        s = ad::step_ampad(s, g_e, params, grid, opts);
        if (!std::isfinite(s.omega_b)) throw ConvergenceError("body velocity became non-finite");
        if (k % stride == 0 || k == n) record(k);
    }
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["dt"] = params.dt;
    res.summary["I_b"] = params.I_b;
    res.summary["grid_spacing"] = grid.h;
    return res;
}

Result ad_growth(const ParamSet& p, const Globals& g) {
    ad::SweepSpec spec;
    spec.geom = shell(p);
    spec.n_cells = as_int(p, "n_cells");
    spec.dr = p.num("dr");
    spec.I_bar = p.num("I_bar");
    spec.n_steps = as_int(p, "n_steps");
    spec.n_transient = as_int(p, "n_transient");
    spec.seed = g.seed;
    const auto deltas = p.list("deltas"), betas = p.list("betas");
    const auto cells = ad::growth_sweep(deltas, betas, spec, g.workers);
    Table tab{"growth", {"delta", "beta_d", "growth"}, {}};
    for (const auto& c : cells) tab.add({c.delta, c.beta_d, c.growth});
    Result res;
    res.tables.push_back(std::move(tab));
    return res;
}

// ---- stability ------------------------------------------------------------

const std::vector<ParamSpec> kStab = with(kShell, {
    {"dr", "0.05", "normal grid spacing"},
    {"I_bar", "0", "dimensionless body inertia"},
    {"eps", "0.001", "contour offset: roots with |A| > 1 + eps count"},
});

stab::StabilityParams stab_base(const ParamSet& p) {
    stab::StabilityParams s;
    s.geom = shell(p);
    s.dr = p.num("dr");
    s.I_bar = p.num("I_bar");
    return s;
}

Result stab_roots(const ParamSet& p, const Globals&) {
    auto s = stab_base(p);
    s.delta = p.num("delta");
    s.beta_d = p.num("beta_d");
    s.validate();
    const auto v = stab::find_roots_outside(s, p.num("eps"));
    stab::AmplificationEquation eq(s);
    Table tab{"roots", {"re", "im", "modulus"}, {}};
    for (const auto& z : v.roots) tab.add({z.real(), z.imag(), std::isinf(z.real()) ? z.real() : std::abs(z)});
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["unstable_root_count"] = v.unstable_root_count;
    res.summary["stable"] = v.stable();
    res.summary["max_modulus"] = format_double(v.max_modulus);
    res.summary["gamma_v"] = eq.gamma_v();
    res.summary["gamma_0"] = eq.gamma_0();
    res.summary["c1"] = eq.c1();
    return res;
}

Result stab_scan(const ParamSet& p, const Globals& g) {
    const auto base = stab_base(p);
    stab::ScanOptions opts;
    opts.eps = p.num("eps");
    opts.locate_roots = p.flag("locate_roots");
    opts.workers = g.workers;
    const auto deltas = p.list("deltas"), betas = p.list("betas");
    const auto map = stab::scan_region(deltas, betas, base.I_bar, base, opts);
    Table tab{"scan", {"delta", "beta_d", "verdict", "count", "max_modulus", "error"}, {}};
    long long n_stable = 0;
    for (const auto& c : map.cells) {
        const std::string verdict = !c.ok() ? "error" : (c.stable() ? "stable" : "unstable");
        n_stable += c.stable();
        tab.add({c.delta, c.beta_d, verdict, static_cast<long long>(c.count), c.max_modulus, c.error});
    }
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["cells"] = map.cells.size();
    res.summary["stable_cells"] = n_stable;
    return res;
}

Result stab_boundary(const ParamSet& p, const Globals&) {
    const auto base = stab_base(p);
    stab::TraceOptions opts;
    opts.ds0 = p.num("ds0");
    opts.max_points = as_int(p, "max_points");
    opts.delta_min = p.num("delta_min");
    opts.delta_max = p.num("delta_max");
    opts.beta_max = p.num("beta_max");
    opts.verify = p.flag("verify");
    const auto tr = stab::trace_boundary(base, p.num("delta0"), p.num("beta0"), opts);
    Table tab{"boundary", {"delta", "beta_d", "theta", "residual", "verified"}, {}};
    for (const auto& pt : tr.points) tab.add({pt.delta, pt.beta_d, pt.theta, pt.residual, pt.verified});
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["points"] = tr.points.size();
    res.summary["real_crossing"] = tr.real_crossing;
    res.summary["stop_reason"] = tr.stop_reason;
    return res;
}

// ---- tensors --------------------------------------------------------------

const std::vector<ParamSpec> kDamp = {
    {"mu", "1", "fluid viscosity"},
    {"nu", "1", "kinematic viscosity"},
    {"dt", "0.01", "time step"},
    {"alpha", "0.5", "implicit coefficient"},
};

damping::DampingParams damp_params(const ParamSet& p) {
    damping::DampingParams d{p.num("mu"), p.num("nu"), p.num("dt"), p.num("alpha")};
    d.validate();
    return d;
}

void add_blocks(Table& tab, const damping::Mat6& m) {
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) tab.add({static_cast<long long>(i), static_cast<long long>(j), m(i, j)});
}

json tensor_summary(const damping::Mat6& m) {
    Eigen::SelfAdjointEigenSolver<damping::Mat6> es(0.5 * (m + m.transpose()));
    json s;
    s["min_eigenvalue"] = es.eigenvalues().minCoeff();
    s["max_eigenvalue"] = es.eigenvalues().maxCoeff();
    s["asymmetry"] = (m - m.transpose()).cwiseAbs().maxCoeff();
    return s;
}

Result tensors_sphere(const ParamSet& p, const Globals& g) {
    const auto d = damp_params(p);
    const double r = p.num("radius"), ds = p.num("ds_n");
    const double dn = damping::delta_n(ds, d.nu, d.dt, d.alpha);
    const auto mesh = damping::latlong_sphere(r, as_int(p, "n_lat"), as_int(p, "n_lon"), ds);
    const auto num = damping::assemble_tensors(mesh, d, g.workers).full();
    const auto ref = damping::sphere_closed_form(r, d.mu, dn).full();
    Table tab{"sphere", {"i", "j", "mesh", "closed_form"}, {}};
    double worst = 0.0, off = 0.0;
    const double scale = ref.cwiseAbs().maxCoeff();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            tab.add({static_cast<long long>(i), static_cast<long long>(j), num(i, j), ref(i, j)});
            if (i == j) worst = std::max(worst, std::abs(num(i, j) / ref(i, j) - 1.0));
            else off = std::max(off, std::abs(num(i, j)) / scale);
        }
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["delta_n"] = dn;
    res.summary["max_diagonal_relative_error"] = worst;
    res.summary["max_offdiagonal_relative"] = off;
    res.summary["points"] = mesh.size();
    return res;
}

damping::SurfaceMesh read_mesh(const std::string& path) {
    if (path.empty()) throw std::invalid_argument("mesh: a CSV path is required");
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open mesh file '" + path + "'");
    damping::SurfaceMesh m;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::vector<double> v;
        try {
            v = parse_list(line);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (v.size() != 8)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected x,y,z,nx,ny,nz,weight,ds_n");
        m.points.emplace_back(v[0], v[1], v[2]);
        m.normals.emplace_back(v[3], v[4], v[5]);
        m.weights.push_back(v[6]);
        m.ds_n.push_back(v[7]);
    }
    return m;
}

Result tensors_mesh(const ParamSet& p, const Globals& g) {
    const auto d = damp_params(p);
    auto mesh = read_mesh(p.str("mesh"));
    mesh.x_b = damping::Vec3(p.num("xb"), p.num("yb"), p.num("zb"));
    mesh.validate();
    const auto m = damping::assemble_tensors(mesh, d, g.workers).full();
    Table tab{"tensor", {"i", "j", "value"}, {}};
    add_blocks(tab, m);
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary = tensor_summary(m);
    res.summary["points"] = mesh.size();
    res.summary["area"] = mesh.area();
    return res;
}

// ---- quadrature -----------------------------------------------------------

quad::BoundaryStyle style_of(const ParamSet& p) {
    const std::string& s = p.str("style");
    if (s == "ghost") return quad::BoundaryStyle::ghost;
    if (s == "one_sided") return quad::BoundaryStyle::one_sided;
    throw std::invalid_argument("style must be ghost|one_sided");
}

Result quad_weights(const ParamSet& p, const Globals&) {
    const auto style = style_of(p);
    const std::string& kind = p.str("grid");
    const int n = as_int(p, "n"), nth = as_int(p, "ntheta");
    const double r1 = p.num("r1"), r2 = p.num("r2");
    quad::CompositeGrid grid;
    if (kind == "segment") grid = quad::segment_grid(n, 0.0, 1.0, style);
    else if (kind == "overlapping_segments") grid = quad::overlapping_segments(n, 0.1, 1.25, style);
    else if (kind == "annulus") grid = quad::annulus_grid(n, nth, r1, r2, style);
    else if (kind == "two_patch_annulus") grid = quad::two_patch_annulus(n, nth, r1, r2, 3, 1.25, style);
    else throw std::invalid_argument("grid must be segment|overlapping_segments|annulus|two_patch_annulus");
    const auto w = quad::compute_weights(grid);
    Table tab{"weights", {"comp", "i", "j", "kind", "boundary_id", "a", "b", "volume", "surface"}, {}};
    for (std::size_t k = 0; k < grid.points.size(); ++k) {
        const auto& pt = grid.points[k];
        tab.add({static_cast<long long>(pt.comp), static_cast<long long>(pt.i), static_cast<long long>(pt.j),
                 std::string(quad::to_string(pt.kind)), static_cast<long long>(pt.boundary_id), pt.a, pt.b,
                 w.volume[k], w.surface[k]});
    }
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["volume_sum"] = w.volume_sum();
    res.summary["surface_sum_0"] = w.surface_sum(0);
    res.summary["surface_sum_1"] = w.surface_sum(1);
    res.summary["residual"] = w.residual;
    res.summary["negative_volume_weights"] = w.negative_volume.size();
    return res;
}

Result quad_converge(const ParamSet& p, const Globals&) {
    const auto st = quad::two_patch_convergence(as_int(p, "nr0"), as_int(p, "levels"), p.num("r1"), p.num("r2"),
                                                style_of(p));
    Table tab{"levels", {"nr", "ntheta", "unknowns", "area_error", "inner_perimeter_error", "outer_perimeter_error",
                         "residual", "area_order", "inner_order", "outer_order"}, {}};
    for (std::size_t k = 0; k < st.levels.size(); ++k) {
        const auto& l = st.levels[k];
        const double nan = std::nan("");
        tab.add({static_cast<long long>(l.nr), static_cast<long long>(l.ntheta), static_cast<long long>(l.unknowns),
                 l.area_error, l.inner_perimeter_error, l.outer_perimeter_error, l.residual,
                 k ? st.area_order[k - 1] : nan, k ? st.inner_order[k - 1] : nan, k ? st.outer_order[k - 1] : nan});
    }
    Result res;
    res.tables.push_back(std::move(tab));
    return res;
}

// ---- collision ------------------------------------------------------------

const std::vector<ParamSpec> kRepulsion = {
    {"y0", "0.5", "wall position"},
    {"delta", "0.1", "layer thickness"},
    {"eps", "0.01", "repulsion softness"},
    {"B0", "0", "damping plateau"},
};

collision::RepulsionParams repulsion(const ParamSet& p) {
    collision::RepulsionParams r{p.num("y0"), p.num("delta"), p.num("eps"), p.num("B0")};
    r.validate();
    return r;
}

Result collision_simulate(const ParamSet& p, const Globals&) {
    collision::MprfSystem sys;
    sys.m_b = p.num("m_b");
    sys.rho = p.num("rho");
    sys.L = p.num("L");
    sys.H = p.num("H");
    sys.f_tilde = p.num("f_tilde");
    sys.y_init = p.num("y_init");
    sys.v_init = p.num("v_init");
    sys.validate();
    collision::RepulsionParams phys = repulsion(p);
    const std::string& scen = p.str("scenario");
    if (scen != "custom") {
        bool found = false;
        for (const auto& sc : collision::reference_scenarios())
            if (sc.name == scen) {
                // Scenario values are normalized; undo the mass scaling.
                const double m = sys.total_mass();
                phys = {sc.normalized.y0, sc.normalized.delta, sc.normalized.eps / m, sc.normalized.B0 * m};
                found = true;
            }
        if (!found) throw std::invalid_argument("scenario must be custom|case-I|case-II|case-III|case-IV");
    }
    const auto traj = collision::simulate_mprf(sys, phys, p.num("dt"), p.num("T"), as_int(p, "stride"));
    const auto norm = sys.normalized(phys);
    const auto rep = collision::classify(traj, norm);
    Table tab{"trajectory", {"t", "y", "v", "E", "in_layer", "penetrated"}, {}};
    for (const auto& r : traj) tab.add({r.t, r.y, r.v, r.E, r.in_layer, r.penetrated});
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["case"] = collision::to_string(rep.kind);
    res.summary["min_y"] = rep.min_y;
    res.summary["velocity_sign_changes"] = rep.velocity_sign_changes;
    res.summary["relative_energy_loss"] = rep.relative_energy_loss;
    res.summary["eps_tilde"] = norm.eps;
    res.summary["B0_tilde"] = norm.B0;
    return res;
}

Result collision_profiles(const ParamSet& p, const Globals&) {
    const auto rp = repulsion(p);
    collision::AngularParams ap;
    ap.theta_min = p.num("theta_min");
    ap.theta_max = p.num("theta_max");
    ap.delta = p.num("theta_delta");
    ap.eps1 = p.num("eps1");
    ap.eps2 = p.num("eps2");
    ap.B0 = p.num("B0_theta");
    ap.validate();
    const int n = as_int(p, "n");
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    Table lin{"linear", {"y", "g_rf", "B"}, {}};
    const double y_lo = p.num("y_min"), y_hi = p.num("y_max");
    for (int k = 0; k < n; ++k) {
        const double y = y_lo + (y_hi - y_lo) * k / (n - 1);
        lin.add({y, collision::g_rf(y, rp), collision::damping_B(y, rp)});
    }
    Table ang{"angular", {"theta", "g_rt", "B_theta"}, {}};
    const double pad = 2.0 * ap.delta;
    for (int k = 0; k < n; ++k) {
        const double th = ap.theta_min - pad + (ap.theta_max - ap.theta_min + 2.0 * pad) * k / (n - 1);
        ang.add({th, collision::g_rt(th, ap), collision::damping_B_theta(th, ap)});
    }
    Result res;
    res.tables.push_back(std::move(lin));
    res.tables.push_back(std::move(ang));
    return res;
}

// ---- piston ---------------------------------------------------------------

const std::vector<ParamSpec> kPiston = {
    {"rho", "1", "fluid density"},
    {"H", "1", "channel height"},
    {"W", "1", "channel width"},
    {"L", "1.5", "channel end"},
    {"L_b", "1", "body length"},
    {"rho_b", "1", "body density"},
    {"alpha_b", "0.25", "interface motion amplitude"},
};

piston::PistonParams piston_params(const ParamSet& p) {
    piston::PistonParams pp;
    pp.rho = p.num("rho");
    pp.H = p.num("H");
    pp.W = p.num("W");
    pp.L = p.num("L");
    pp.L_b = p.num("L_b");
    pp.rho_b = p.num("rho_b");
    pp.alpha_b = p.num("alpha_b");
    pp.validate();
    return pp;
}

Result piston_exact(const ParamSet& p, const Globals&) {
    const auto pp = piston_params(p);
    const auto motion = piston::Motion::sinusoid(pp.alpha_b);
    const int n = as_int(p, "n");
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    const double T = p.num("T");
    Table tab{"exact", {"t", "x_b", "v_b", "a_b", "p_L", "p_interface", "momentum_residual"}, {}};
    for (int k = 0; k < n; ++k) {
        const double t = T * k / (n - 1);
        const auto s = piston::exact_state(t, pp, motion);
        const double pI = piston::exact_pressure(motion.x(t), t, pp, motion);
        tab.add({t, s.x_b, s.v_b, s.a_b, s.p_L, pI, pp.m_b() * s.a_b + pp.H * pp.W * pI});
    }
    Result res;
    res.tables.push_back(std::move(tab));
    return res;
}

Result piston_simulate(const ParamSet& p, const Globals&) {
    const auto pp = piston_params(p);
    const auto motion = piston::Motion::sinusoid(pp.alpha_b);
    const auto run = piston::simulate(pp, p.num("dt"), p.num("T"), motion, as_int(p, "stride"));
    Table tab{"history", {"t", "x_b", "v_b", "a_b", "x_error", "v_error"}, {}};
    for (const auto& s : run.states) {
        const auto e = piston::exact_state(s.t, pp, motion);
        tab.add({s.t, s.x_b, s.v_b, s.a_b, s.x_b - e.x_b, s.v_b - e.v_b});
    }
    Result res;
    res.tables.push_back(std::move(tab));
    res.summary["final_error"] = run.final_error;
    res.summary["max_error"] = run.max_error;
    return res;
}

Result piston_converge(const ParamSet& p, const Globals&) {
    auto pp = piston_params(p);
    const auto dts = p.list("dts");
    const double T = p.num("T");
    Table tab{"convergence", {"rho_b", "dt", "error", "order"}, {}};
    for (double rb : p.list("densities")) {
        pp.rho_b = rb;
        pp.validate();
        const auto rows = piston::convergence_study(pp, dts, T);
        for (std::size_t k = 0; k < rows.size(); ++k)
            tab.add({rb, rows[k].dt, rows[k].error, k ? rows[k].order : std::nan("")});
    }
    Result res;
    res.tables.push_back(std::move(tab));
    return res;
}

// ---- registry -------------------------------------------------------------

const std::vector<Experiment>& registry() {
    static const std::vector<Experiment> exps = [] {
        std::vector<Experiment> e;
        e.push_back({"mp-am", "exact", "exact translating-sphere solution", kAm, am_exact});
        e.push_back({"mp-am", "bvp", "AMP pressure boundary-value problem vs exact", kAm, am_bvp});
        e.push_back({"mp-ad", "simulate", "rotating-sphere AMP time stepping",
                     with(kAdCommon, {{"delta", "1", "boundary-layer ratio"},
                                      {"beta_d", "1", "added-damping parameter"},
                                      {"omega0", "1", "initial body angular velocity"},
                                      {"torque", "0", "applied torque"},
                                      {"initial", "rest", "initial fluid: rest|random"},
                                      {"velocity_correction", "1", "final fluid-velocity correction"},
                                      {"n_steps", "200", "time steps"},
                                      {"stride", "1", "output every stride steps"}}),
                     ad_simulate, true});
        e.push_back({"mp-ad", "growth", "measured amplification over a (delta, beta_d) grid",
                     with(kAdCommon, {{"deltas", "log:-2:2:10", "boundary-layer ratios"},
                                      {"betas", "lin:0.25:2.5:10", "added-damping parameters"},
                                      {"n_steps", "2000", "time steps per cell"},
                                      {"n_transient", "200", "steps discarded before measuring"}}),
                     ad_growth, true, true});
        e.push_back({"stability", "roots", "roots of the amplification equation with |A| > 1",
                     with(kStab, {{"delta", "1", "boundary-layer ratio"}, {"beta_d", "1", "added-damping parameter"}}),
                     stab_roots});
        e.push_back({"stability", "scan", "stable/unstable classification over a (delta, beta_d) grid",
                     with(kStab, {{"deltas", "log:-2:2:21", "boundary-layer ratios"},
                                  {"betas", "lin:0:2.5:26", "added-damping parameters"},
                                  {"locate_roots", "1", "also locate roots for max |A|"}}),
                     stab_scan, false, true});
        e.push_back({"stability", "boundary", "continuation of the stability boundary",
                     with(kStab, {{"delta0", "10", "start delta"},
                                  {"beta0", "1.75", "start beta_d guess"},
                                  {"ds0", "0.05", "initial arclength step"},
                                  {"max_points", "400", "point budget per direction"},
                                  {"delta_min", "0.01", "lower delta bound"},
                                  {"delta_max", "100", "upper delta bound"},
                                  {"beta_max", "5", "upper beta_d bound"},
                                  {"verify", "1", "check the verdict flips across each point"}}),
                     stab_boundary});
        e.push_back({"tensors", "sphere", "added-damping tensors of a sphere: mesh vs closed form",
                     with(kDamp, {{"radius", "0.5", "sphere radius"},
                                  {"ds_n", "0.01", "normal grid spacing"},
                                  {"n_lat", "128", "latitude intervals"},
                                  {"n_lon", "256", "longitude points"}}),
                     tensors_sphere, false, true});
        e.push_back({"tensors", "mesh", "added-damping tensors of a surface mesh from CSV",
                     with(kDamp, {{"mesh", "", "CSV with x,y,z,nx,ny,nz,weight,ds_n"},
                                  {"xb", "0", "reference point x"},
                                  {"yb", "0", "reference point y"},
                                  {"zb", "0", "reference point z"}}),
                     tensors_mesh, false, true});
        e.push_back({"quadrature", "weights", "null-vector quadrature weights of a composite grid",
                     with(kShell, {{"grid", "two_patch_annulus", "segment|overlapping_segments|annulus|two_patch_annulus"},
                                   {"n", "16", "cells (radial cells for annuli)"},
                                   {"ntheta", "64", "angular cells"},
                                   {"style", "ghost", "boundary rows: ghost|one_sided"}}),
                     quad_weights});
        e.push_back({"quadrature", "converge", "two-patch annulus area and perimeter convergence",
                     with(kShell, {{"nr0", "16", "coarsest radial cells"},
                                   {"levels", "3", "refinement levels"},
                                   {"style", "ghost", "boundary rows: ghost|one_sided"}}),
                     quad_converge});
        e.push_back({"collision", "simulate", "falling body against a repulsive layer",
                     with(kRepulsion, {{"scenario", "custom", "custom|case-I|case-II|case-III|case-IV"},
                                       {"m_b", "0", "body mass"},
                                       {"rho", "1", "fluid density"},
                                       {"L", "1", "fluid column length"},
                                       {"H", "1", "fluid column height"},
                                       {"f_tilde", "-1", "normalized applied force"},
                                       {"y_init", "1", "initial position"},
                                       {"v_init", "0", "initial velocity"},
                                       {"dt", "1e-4", "time step"},
                                       {"T", "10", "final time"},
                                       {"stride", "100", "output every stride steps"}}),
                     collision_simulate});
        e.push_back({"collision", "profiles", "repulsion and damping profiles",
                     with(kRepulsion, {{"y_min", "0.3", "lower y"},
                                       {"y_max", "0.7", "upper y"},
                                       {"theta_min", "0", "lower angular limit"},
                                       {"theta_max", "1", "upper angular limit"},
                                       {"theta_delta", "0.05235987755982988", "angular layer width"},
                                       {"eps1", "0.05", "softness near theta_min"},
                                       {"eps2", "0.01", "softness near theta_max"},
                                       {"B0_theta", "20", "angular damping plateau"},
                                       {"n", "401", "samples"}}),
                     collision_profiles});
        e.push_back({"piston", "exact", "exact piston solution",
                     with(kPiston, {{"T", "1", "final time"}, {"n", "101", "samples"}}), piston_exact});
        e.push_back({"piston", "simulate", "reduced AMP piston stepper",
                     with(kPiston, {{"dt", "0.01", "time step"}, {"T", "0.8", "final time"}, {"stride", "1", "output stride"}}),
                     piston_simulate});
        e.push_back({"piston", "converge", "piston errors and observed orders",
                     with(kPiston, {{"dts", "0.02,0.01,0.005,0.0025", "time steps"},
                                    {"T", "0.8", "evaluation time"},
                                    {"densities", "1e-7,1,1e7,0", "body densities"}}),
                     piston_converge});
        return e;
    }();
    return exps;
}

/// Applies [group] and [group.action] sections. Keys in [group] must be known
/// to some action of the group and are applied where declared.
void apply_config(const IniFile& ini, const Experiment& exp, ParamSet& params) {
    for (const auto& [name, entries] : ini.sections) {
        bool known = false;
        for (const auto& e : registry())
            if (name == e.group || name == e.group + "." + e.action) known = true;
        if (!known) {
            if (!entries.empty() || !name.empty())
                throw std::invalid_argument("config: unknown section [" + name + "]");
            continue;
        }
        const bool group_section = name == exp.group;
        const bool own_section = name == exp.group + "." + exp.action;
        for (const auto& [key, value] : entries) {
            bool declared_in_group = false;
            for (const auto& e : registry()) {
                if (name != e.group && name != e.group + "." + e.action) continue;
                for (const auto& s : e.params) declared_in_group |= s.key == key;
            }
            if (!declared_in_group) throw std::invalid_argument("config: unknown key '" + key + "' in [" + name + "]");
            if ((group_section || own_section) && params.has(key)) params.set(key, value);
        }
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + path.string() + "'");
    f << text;
}

std::string table_json(const Table& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json o = json::object();
        for (std::size_t k = 0; k < r.size(); ++k) o[t.columns[k]] = cell_json(r[k]);
        rows.push_back(std::move(o));
    }
    return rows.dump(1) + "\n";
}

void write_error(const fs::path& dir, int code, const std::string& kind, const std::string& msg,
                 const std::string& experiment) {
    std::cerr << "error (" << kind << "): " << msg << "\n";
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    json e;
    e["status"] = "error";
    e["exit_code"] = code;
    e["kind"] = kind;
    e["message"] = msg;
    e["experiment"] = experiment;
    std::ofstream f(dir / "error.json");
    if (f) f << e.dump(2) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Added-mass partitioned rigid-body model problems and analysis tools", "amprb"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_dir = "out", format = "csv";
    int workers = 0;
    std::uint64_t seed = 12345;
    app.add_option("--config", config_path, "INI file with [group] and [group.action] sections");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--workers", workers, "worker threads for sweeps (0: all)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "seed for randomized initial data")->capture_default_str();

    struct Leaf {
        const Experiment* exp;
        CLI::App* cmd;
        std::vector<std::pair<std::string, CLI::Option*>> opts;
        std::unique_ptr<std::vector<std::string>> values;
    };
    std::vector<Leaf> leaves;
    std::map<std::string, CLI::App*> groups;
    for (const auto& e : registry()) {
        auto& g = groups[e.group];
        if (!g) {
            g = app.add_subcommand(e.group, e.group + " experiments");
            g->require_subcommand(1);
            g->fallthrough();
        }
        Leaf leaf{&e, g->add_subcommand(e.action, e.help), {}, std::make_unique<std::vector<std::string>>(e.params.size())};
        leaf.cmd->fallthrough();
        for (std::size_t k = 0; k < e.params.size(); ++k) {
            const auto& s = e.params[k];
            auto* o = leaf.cmd->add_option("--" + s.key, (*leaf.values)[k], s.help + " [" + s.default_value + "]");
            leaf.opts.emplace_back(s.key, o);
        }
        leaves.push_back(std::move(leaf));
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const Leaf* chosen = nullptr;
    for (const auto& l : leaves)
        if (l.cmd->parsed()) chosen = &l;
    if (!chosen) {
        std::cerr << app.help();
        return 1;
    }
    const Experiment& exp = *chosen->exp;
    const std::string name = exp.group + " " + exp.action;
    const fs::path out(out_dir);

    ParamSet params(exp.params);
    Globals globals{format, workers, seed};
    json manifest;
    try {
        if (!config_path.empty()) apply_config(IniFile::load(config_path), exp, params);
        for (std::size_t k = 0; k < chosen->opts.size(); ++k)
            if (chosen->opts[k].second->count() > 0) params.set(chosen->opts[k].first, (*chosen->values)[k]);

        const Result res = exp.fn(params, globals);

        fs::create_directories(out);
        fs::remove(out / "error.json");
        json files = json::array();
        const std::string stem = exp.group + "_" + exp.action;
        for (const auto& t : res.tables) {
            const std::string base = res.tables.size() == 1 ? stem : stem + "_" + t.name;
            const std::string file = base + (format == "csv" ? ".csv" : ".json");
            write_file(out / file, format == "csv" ? to_csv(t) : table_json(t));
            files.push_back({{"table", t.name}, {"file", file}, {"rows", t.rows.size()}});
        }
        manifest["experiment"] = name;
        manifest["status"] = "ok";
        manifest["format"] = format;
        if (exp.uses_workers) manifest["workers"] = workers;
        if (exp.uses_seed) manifest["seed"] = seed;
        json pj = json::object();
        for (const auto& [k, v] : params.items()) pj[k] = v;
        manifest["parameters"] = pj;
        manifest["outputs"] = files;
        manifest["summary"] = res.summary;
        write_file(out / "manifest.json", manifest.dump(2) + "\n");
    } catch (const NumericalError& e) {
        write_error(out, 2, e.kind(), e.what(), name);
        return 2;
    } catch (const std::invalid_argument& e) {
        write_error(out, 1, "config", e.what(), name);
        return 1;
    } catch (const fs::filesystem_error& e) {
        write_error({}, 1, "config", e.what(), name);
        return 1;
    } catch (const std::exception& e) {
        write_error(out, 2, "internal", e.what(), name);
        return 2;
    }
    return 0;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace amprb::cli
