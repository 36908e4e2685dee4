#pragma once

#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace amprb::quad {

enum class PointKind { discretization, interpolation, boundary, unused };
/// Boundary rows either live on ghost points (centred normal difference) or
/// on the boundary nodes themselves (one-sided second-order difference).
enum class BoundaryStyle { ghost, one_sided };
enum class EndKind { boundary, interpolation };

const char* to_string(PointKind k);

/// Structured component: a segment (dim 1) or a polar patch (dim 2) with
/// radial axis a and angular axis b.
struct Component {
    int dim = 1;
    double a0 = 0.0, ha = 0.0;
    int na = 0;  ///< physical nodes a0 + k ha, k = 0..na
    EndKind lo = EndKind::boundary, hi = EndKind::boundary;
    int boundary_lo = 0, boundary_hi = 1;
    double b0 = 0.0, hb = 0.0;
    int nb = 1;  ///< angular nodes b0 + j hb, j = 0..nb-1
    bool periodic = false;
    int ghost_lo = 0, ghost_hi = 0;

    int ni() const { return na + 1 + ghost_lo + ghost_hi; }
    double a(int i) const { return a0 + (i - ghost_lo) * ha; }
    double b(int j) const { return b0 + j * hb; }
};

struct GridPoint {
    int comp = 0, i = 0, j = 0;
    PointKind kind = PointKind::discretization;
    int boundary_id = -1;
    double a = 0.0, b = 0.0;  ///< (x, 0) for segments, (r, theta) for polar patches
};

struct InterpStencil {
    int point = 0;
    std::vector<int> donors;
    std::vector<double> coeffs;
};

struct CompositeGrid {
    std::vector<Component> comps;
    std::vector<GridPoint> points;
    std::vector<InterpStencil> interp;
    std::vector<int> offsets;
    BoundaryStyle style = BoundaryStyle::ghost;
    std::vector<std::string> boundary_names;

    int id(int c, int i, int j) const { return offsets[c] + j * comps[c].ni() + i; }
    /// Every interpolation point has a complete donor stencil of
    /// non-interpolation points on another component.
    void validate() const;
};

/// Catalog. Boundary ids: segments 0 = left, 1 = right; annuli 0 = inner, 1 = outer.
CompositeGrid segment_grid(int n, double x0 = 0.0, double x1 = 1.0,
                           BoundaryStyle style = BoundaryStyle::ghost);
/// Segments [0, 0.5 + w] and [0.5 - w, 1] with n and round(ratio n) cells per unit length.
CompositeGrid overlapping_segments(int n, double half_overlap = 0.1, double ratio = 1.25,
                                   BoundaryStyle style = BoundaryStyle::ghost);
CompositeGrid annulus_grid(int nr, int ntheta, double r1 = 1.0, double r2 = 2.0,
                           BoundaryStyle style = BoundaryStyle::ghost);
/// Two half-annulus patches, each extended by `overlap` cells plus one
/// interpolation layer past its half; patch 2 has round(ratio ntheta) angular cells.
CompositeGrid two_patch_annulus(int nr, int ntheta, double r1 = 1.0, double r2 = 2.0,
                                int overlap = 3, double ratio = 1.25,
                                BoundaryStyle style = BoundaryStyle::ghost);

struct RowInfo {
    PointKind kind;
    int boundary_id;
};

struct NeumannSystem {
    Eigen::SparseMatrix<double> A;
    std::vector<RowInfo> rows;
    /// Maximum absolute row sum.
    double norm_inf = 0.0;
};

/// One row per point: Laplacian at discretization points, outward normal
/// derivative at boundary points, interpolation identities elsewhere.
NeumannSystem build_neumann_operator(const CompositeGrid& grid);

struct NullVector {
    Eigen::VectorXd w;
    /// ||A^T w||_inf / (||A||_inf ||w||_inf)
    double residual = 0.0;
    int iterations = 0;
};

/// Inverse iteration on A^T - sigma I with sigma = 1e-10 ||A||, from two
/// starting vectors. Throws DomainError if they converge to independent
/// vectors, ConvergenceError if the residual stays above tol.
NullVector left_null_vector(const Eigen::SparseMatrix<double>& A, double tol = 1e-10,
                            int max_iter = 50);

struct WeightVector {
    std::vector<double> volume;         ///< nonzero on discretization rows
    std::vector<double> surface;        ///< nonzero on boundary rows
    std::vector<double> interpolation;  ///< diagnostics on interpolation rows
    std::vector<int> boundary_id;
    double scale = 0.0;
    int reference_point = -1;
    /// Scaled residual ||A^T w||_inf / (||A||_inf ||w||_inf).
    double residual = 0.0;
    std::vector<int> negative_volume;
    /// True when every negative volume weight lies within 3 cells of an overlap.
    bool negatives_near_overlap = true;

    double volume_sum() const;
    double surface_sum(int id) const;
};

/// Scales the raw vector so the weight at a point at least 3 cells from any
/// boundary or interpolation point equals its cell volume.
WeightVector extract_weights(const Eigen::VectorXd& raw, const CompositeGrid& grid,
                             const NeumannSystem& sys);

/// Full pipeline: operator, null vector, weights.
WeightVector compute_weights(const CompositeGrid& grid);

/// Samples f(a, b) at every point of the grid.
std::vector<double> sample(const CompositeGrid& grid, const std::function<double(double, double)>& f);
double integrate(const WeightVector& w, const std::vector<double>& f);
double integrate_surface(const WeightVector& w, const std::vector<double>& g, int boundary_id);

struct LevelResult {
    int nr = 0, ntheta = 0;
    std::size_t unknowns = 0;
    double area_error = 0.0;
    double inner_perimeter_error = 0.0;
    double outer_perimeter_error = 0.0;
    double residual = 0.0;
    int negative_weights = 0;
};

struct ConvergenceStudy {
    std::vector<LevelResult> levels;
    /// Observed orders between consecutive levels; +inf when both errors are at roundoff.
    std::vector<double> area_order, inner_order, outer_order;
};

/// Area and perimeter errors of the two-patch annulus for nr = nr0 2^k,
/// ntheta = 4 nr, k = 0..n_levels-1.
ConvergenceStudy two_patch_convergence(int nr0, int n_levels, double r1 = 1.0, double r2 = 2.0,
                                       BoundaryStyle style = BoundaryStyle::ghost);

/// Observed order log2(e_coarse / e_fine), +inf when both are below floor.
double observed_order(double e_coarse, double e_fine, double floor);

}  // namespace amprb::quad
