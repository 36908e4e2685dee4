#include "amprb/specfun.hpp"

#include "amprb/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace amprb {

void ShellGeometry::validate() const {
    if (!(r1 > 0.0) || !(r2 > r1) || !std::isfinite(r2)) {
        std::ostringstream os;
        os << "invalid shell geometry: need 0 < r1 < r2, got r1=" << r1 << " r2=" << r2;
        throw std::invalid_argument(os.str());
    }
}

Complex msb_i1(Complex z) {
    if (std::abs(z) < 1e-2) {
        const Complex z2 = z * z;
        return z * (1.0 / 3.0 + z2 * (1.0 / 30.0 + z2 / 840.0));
    }
    return (z * std::cosh(z) - std::sinh(z)) / (z * z);
}

Complex msb_k1(Complex z) {
    if (z == Complex(0.0, 0.0)) {
        throw DomainError("msb_k1: singular at z = 0");
    }
    return std::exp(-z) * (z + 1.0) / (z * z);
}

double phi_steady(double r, const ShellGeometry& geom) {
    const double r1 = geom.r1;
    const double r2c = geom.r2 * geom.r2 * geom.r2;
    return r1 * r1 * (r2c / (r * r) - r) / (r2c - r1 * r1 * r1);
}

namespace {

// i1(z) = e^z itilde(z) / (2 z^2)
Complex itilde(Complex z) { return (z - 1.0) + (z + 1.0) * std::exp(-2.0 * z); }

[[noreturn]] void throw_resonance(Complex zeta, const ShellGeometry& geom) {
    std::ostringstream os;
    os << "phi_profile: zeta^2 = " << zeta * zeta
       << " is (numerically) a Dirichlet eigenvalue of L on [" << geom.r1 << ", " << geom.r2 << "]";
    throw ResonanceError(os.str());
}

Complex phi_scaled(Complex zeta, double r, const ShellGeometry& geom, double tol) {
    if (zeta.real() < 0.0) zeta = -zeta;
    const double r1 = geom.r1, r2 = geom.r2;
    const Complex num = std::exp(-2.0 * zeta * (r2 - r)) * itilde(zeta * r) * (zeta * r2 + 1.0) -
                        itilde(zeta * r2) * (zeta * r + 1.0);
    const Complex d1 = std::exp(-2.0 * zeta * (r2 - r1)) * itilde(zeta * r1) * (zeta * r2 + 1.0);
    const Complex d2 = itilde(zeta * r2) * (zeta * r1 + 1.0);
    const Complex den = d1 - d2;
    if (std::abs(den) <= tol * (std::abs(d1) + std::abs(d2))) throw_resonance(zeta, geom);
    return (r1 * r1) / (r * r) * std::exp(-zeta * (r - r1)) * num / den;
}

}  // namespace

Complex phi_profile(Complex zeta, double r, const ShellGeometry& geom, const PhiOptions& opts) {
    geom.validate();
    if (r == geom.r1) return 1.0;
    if (r == geom.r2) return 0.0;
    if (std::abs(zeta) * (geom.r2 - geom.r1) < opts.small_zeta) return phi_steady(r, geom);
    // phi is even in zeta; with Re zeta < 0 both cross-product terms grow and cancel.
    if (zeta.real() < 0.0) zeta = -zeta;
    if (std::abs(zeta.real()) * geom.r2 > opts.scaled_threshold) {
        return phi_scaled(zeta, r, geom, opts.resonance_tol);
    }
    const Complex a = msb_i1(zeta * geom.r1) * msb_k1(zeta * geom.r2);
    const Complex b = msb_i1(zeta * geom.r2) * msb_k1(zeta * geom.r1);
    const Complex den = a - b;
    if (std::abs(den) <= opts.resonance_tol * (std::abs(a) + std::abs(b))) throw_resonance(zeta, geom);
    const Complex num = msb_i1(zeta * r) * msb_k1(zeta * geom.r2) - msb_i1(zeta * geom.r2) * msb_k1(zeta * r);
    return num / den;
}

}  // namespace amprb
