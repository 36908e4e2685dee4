#include "amprb/damping_tensors.hpp"

#include "amprb/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace amprb::damping {

double SurfaceMesh::area() const {
    double a = 0.0;
    for (double w : weights) a += w;
    return a;
}

void SurfaceMesh::validate() const {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("surface mesh is empty");
    if (normals.size() != n || weights.size() != n || ds_n.size() != n)
        throw std::invalid_argument("surface mesh arrays differ in length");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("surface weights must be positive");
        if (!(ds_n[i] > 0.0)) throw std::invalid_argument("normal spacing must be positive");
        if (!(std::abs(normals[i].norm() - 1.0) <= 1e-12))
            throw DomainError("degenerate normal at surface point " + std::to_string(i));
    }
}

Mat6 Tensor6::full() const {
    Mat6 m;
    m << vv, vw, wv, ww;
    return m;
}

Tensor6 Tensor6::from_full(const Mat6& m) {
    Tensor6 t;
    t.vv = m.topLeftCorner<3, 3>();
    t.vw = m.topRightCorner<3, 3>();
    t.wv = m.bottomLeftCorner<3, 3>();
    t.ww = m.bottomRightCorner<3, 3>();
    return t;
}

Tensor6& Tensor6::operator+=(const Tensor6& o) {
    vv += o.vv;
    vw += o.vw;
    wv += o.wv;
    ww += o.ww;
    return *this;
}

void DampingParams::validate() const {
    if (!(mu > 0.0) || !(nu > 0.0) || !(dt > 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("mu, nu, dt and alpha must be positive");
}

double delta_n(double ds_n, double nu, double dt, double alpha) {
    if (!(ds_n > 0.0) || !(nu > 0.0) || !(dt > 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("delta_n inputs must be positive");
    const double delta = ds_n / std::sqrt(alpha * nu * dt);
    return ds_n / -std::expm1(-delta);
}

namespace {

Mat3 cross_matrix(const Vec3& a) {
    Mat3 m;
    m << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
    return m;
}

// Adds the contribution of point i; vw is filled from wv at the end.
void accumulate(const SurfaceMesh& mesh, const DampingParams& p, std::size_t i, Tensor6& t) {
    const Vec3& n = mesh.normals[i];
    const Mat3 P = Mat3::Identity() - n * n.transpose();
    const Mat3 X = cross_matrix(mesh.points[i] - mesh.x_b);
    const double c = p.mu * mesh.weights[i] / delta_n(mesh.ds_n[i], p.nu, p.dt, p.alpha);
    const Mat3 XP = X * P;
    t.vv += c * P;
    t.wv += c * XP;
    t.ww += c * XP * X.transpose();
}

void finish(Tensor6& t) {
    t.vv = 0.5 * (t.vv + t.vv.transpose()).eval();
    t.ww = 0.5 * (t.ww + t.ww.transpose()).eval();
    t.vw = t.wv.transpose();
}

constexpr std::size_t kChunk = 256;

}  // namespace

Tensor6 assemble_tensors_serial(const SurfaceMesh& mesh, const DampingParams& p) {
    mesh.validate();
    p.validate();
    Tensor6 t;
    for (std::size_t i = 0; i < mesh.size(); ++i) accumulate(mesh, p, i, t);
    finish(t);
    return t;
}

Tensor6 assemble_tensors(const SurfaceMesh& mesh, const DampingParams& p, int workers) {
    mesh.validate();
    p.validate();
    const std::size_t n_chunks = (mesh.size() + kChunk - 1) / kChunk;
    std::vector<Tensor6> partial(n_chunks);
    const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(n_chunks);
#ifdef _OPENMP
    const int nt = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
#else
    (void)workers;
#endif
    for (std::ptrdiff_t c = 0; c < nc; ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        const std::size_t hi = std::min(lo + kChunk, mesh.size());
        for (std::size_t i = lo; i < hi; ++i) accumulate(mesh, p, i, partial[static_cast<std::size_t>(c)]);
    }
    // Pairwise tree reduction in a fixed order.
    for (std::size_t stride = 1; stride < n_chunks; stride *= 2)
        for (std::size_t i = 0; i + stride < n_chunks; i += 2 * stride) partial[i] += partial[i + stride];
    Tensor6 t = partial.front();
    finish(t);
    return t;
}

Tensor6 sphere_closed_form(double r, double mu, double dn) {
    if (!(r > 0.0) || !(dn > 0.0)) throw std::invalid_argument("radius and length scale must be positive");
    const double c = mu / dn * (8.0 / 3.0) * std::numbers::pi;
    Tensor6 t;
    t.vv = c * r * r * Mat3::Identity();
    t.ww = c * r * r * r * r * Mat3::Identity();
    return t;
}

Tensor6 rotate_tensor(const Tensor6& d0, const Mat3& R) {
    if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10 ||
        std::abs(R.determinant() - 1.0) > 1e-10)
        throw std::invalid_argument("rotation matrix must be orthogonal with determinant 1");
    Tensor6 t;
    t.vv = R * d0.vv * R.transpose();
    t.vw = R * d0.vw * R.transpose();
    t.wv = R * d0.wv * R.transpose();
    t.ww = R * d0.ww * R.transpose();
    return t;
}

SurfaceMesh latlong_sphere(double r, int n_lat, int n_lon, double ds_n, const Vec3& centre) {
    if (!(r > 0.0) || !(ds_n > 0.0)) throw std::invalid_argument("radius and spacing must be positive");
    if (n_lat < 2 || n_lon < 3) throw std::invalid_argument("sphere mesh needs n_lat >= 2 and n_lon >= 3");
    SurfaceMesh m;
    m.x_b = centre;
    const double ht = std::numbers::pi / n_lat;
    const double hp = 2.0 * std::numbers::pi / n_lon;
    auto add = [&](const Vec3& n, double w) {
        m.points.push_back(centre + r * n);
        m.normals.push_back(n);
        m.weights.push_back(w);
        m.ds_n.push_back(ds_n);
    };
    const double cap = 2.0 * std::numbers::pi * r * r * (1.0 - std::cos(0.5 * ht));
    add(Vec3(0, 0, 1), cap);
    for (int i = 1; i < n_lat; ++i) {
        const double th = i * ht;
        const double band = r * r * (std::cos(th - 0.5 * ht) - std::cos(th + 0.5 * ht)) * hp;
        for (int j = 0; j < n_lon; ++j) {
            const double ph = j * hp;
            add(Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)), band);
        }
    }
    add(Vec3(0, 0, -1), cap);
    return m;
}

}  // namespace amprb::damping
