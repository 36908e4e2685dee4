#pragma once

#include <complex>

namespace amprb {

using Complex = std::complex<double>;

/// Spherical shell r1 < r < r2 occupied by fluid around a sphere of radius r1.
struct ShellGeometry {
    double r1 = 1.0;
    double r2 = 2.0;

    /// Throws std::invalid_argument unless 0 < r1 < r2.
    void validate() const;
};

/// Modified spherical Bessel function of the first kind, order one:
/// i1(z) = (z cosh z - sinh z) / z^2, with a series branch for |z| < 1e-2.
Complex msb_i1(Complex z);

/// Modified spherical Bessel function of the second kind, order one:
/// k1(z) = e^{-z} (z + 1) / z^2. Throws DomainError at z = 0.
Complex msb_k1(Complex z);

struct PhiOptions {
    /// |zeta (r2 - r1)| below which the steady profile is returned.
    double small_zeta = 1e-6;
    /// |Re(zeta) r2| above which the exponentially scaled form is used.
    double scaled_threshold = 300.0;
    /// Relative size of the denominator below which a resonance is reported.
    double resonance_tol = 1e-12;
};

/// Solution of  L phi = zeta^2 phi  on (r1, r2) with phi(r1) = 1, phi(r2) = 0,
/// where L f = (1/r^2)(r^2 f')' - 2 f / r^2. Even in zeta.
/// Throws ResonanceError when zeta^2 sits on a Dirichlet eigenvalue of L.
Complex phi_profile(Complex zeta, double r, const ShellGeometry& geom,
                    const PhiOptions& opts = {});

/// The zeta -> 0 limit of phi_profile: r1^2 (r2^3/r^2 - r) / (r2^3 - r1^3).
double phi_steady(double r, const ShellGeometry& geom);

}  // namespace amprb
