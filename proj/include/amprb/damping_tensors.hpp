#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace amprb::damping {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Sampled body surface: positions, unit normals, area weights and the
/// normal grid spacing at each point.
struct SurfaceMesh {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<double> weights;
    std::vector<double> ds_n;
    Vec3 x_b = Vec3::Zero();

    std::size_t size() const { return points.size(); }
    double area() const;
    /// Throws std::invalid_argument on size mismatch, non-positive weights or
    /// spacings, and DomainError on normals that are not unit length.
    void validate() const;
};

/// Composite added-damping tensor in 3x3 blocks.
struct Tensor6 {
    Mat3 vv = Mat3::Zero();
    Mat3 vw = Mat3::Zero();
    Mat3 wv = Mat3::Zero();
    Mat3 ww = Mat3::Zero();

    Mat6 full() const;
    static Tensor6 from_full(const Mat6& m);
    Tensor6& operator+=(const Tensor6& o);
};

struct DampingParams {
    double mu = 1.0;
    double nu = 1.0;
    double dt = 1e-2;
    /// Implicit coefficient of the viscous time stepping.
    double alpha = 0.5;
    void validate() const;
};

/// Added-damping length scale ds_n / (1 - e^{-delta}), delta = ds_n / sqrt(alpha nu dt).
double delta_n(double ds_n, double nu, double dt, double alpha = 0.5);

/// Surface quadrature of the four blocks with per-point length scale.
/// Points are summed in fixed-size chunks reduced pairwise, so the result
/// does not depend on the number of threads.
Tensor6 assemble_tensors(const SurfaceMesh& mesh, const DampingParams& p, int workers = 0);
/// Plain sequential sum; reference for the parallel version.
Tensor6 assemble_tensors_serial(const SurfaceMesh& mesh, const DampingParams& p);

/// Closed-form tensors of a sphere of radius r with uniform length scale.
Tensor6 sphere_closed_form(double r, double mu, double dn);

/// R D R^T for every block. R must be a proper rotation to 1e-10.
Tensor6 rotate_tensor(const Tensor6& d0, const Mat3& R);

/// Latitude-longitude sphere: n_lat - 1 rings of n_lon points plus the two
/// poles, which carry the area of the polar caps.
SurfaceMesh latlong_sphere(double r, int n_lat, int n_lon, double ds_n,
                           const Vec3& centre = Vec3::Zero());

}  // namespace amprb::damping
