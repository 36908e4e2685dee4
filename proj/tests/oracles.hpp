#pragma once

// Reference computations used by the tests. Nothing here calls into the
// library: every value is rebuilt from closed forms, power series or brute
// force in long double.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using LD = long double;
using CLD = std::complex<long double>;

inline constexpr LD kPi = std::numbers::pi_v<long double>;

/// i1(z) = z sum_k (z^2/2)^k / (k! (2k+3)!!)
inline CLD i1_series(CLD z) {
    CLD term = z / LD(3);
    CLD sum = term;
    const CLD h = z * z / LD(2);
    for (int k = 1; k < 400; ++k) {
        term *= h / (LD(k) * LD(2 * k + 3));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return sum;
}

inline CLD k1_closed(CLD z) { return std::exp(-z) * (z + LD(1)) / (z * z); }

/// Series below |z| = 1, closed form above.
inline CLD i1_any(CLD z) {
    if (std::abs(z) < 1) return i1_series(z);
    return (z * std::cosh(z) - std::sinh(z)) / (z * z);
}

/// Cross-product form of the Dirichlet profile; fine for moderate |zeta|.
inline CLD phi(CLD zeta, LD r, LD r1, LD r2) {
    auto num = i1_any(zeta * r) * k1_closed(zeta * r2) - i1_any(zeta * r2) * k1_closed(zeta * r);
    auto den = i1_any(zeta * r1) * k1_closed(zeta * r2) - i1_any(zeta * r2) * k1_closed(zeta * r1);
    return num / den;
}

inline LD phi_steady(LD r, LD r1, LD r2) {
    return r1 * r1 * (r2 * r2 * r2 / (r * r) - r) / (r2 * r2 * r2 - r1 * r1 * r1);
}

inline LD added_mass(LD r1, LD r2, LD rho) {
    const LD q = (r1 / r2) * (r1 / r2) * (r1 / r2);
    return LD(4) / 3 * rho * kPi * r1 * r1 * r1 * (1 + 2 * q) / (2 - 2 * q);
}

/// z^2 f'' + 2 z f' - (z^2 + 2) f by central differences with step h.
template <class F>
CLD bessel_residual(F f, CLD z, LD h) {
    const CLD fp = (f(z + h) - f(z - h)) / (2 * h);
    const CLD fpp = (f(z + h) - LD(2) * f(z) + f(z - h)) / (h * h);
    return z * z * fpp + LD(2) * z * fp - (z * z + LD(2)) * f(z);
}

/// Amplification function rebuilt from its coefficients, all in long double.
struct Nv {
    LD r1, r2, dr, delta, beta, I_bar;
    LD zeta1, dbar, C1, gv, g0;

    Nv(LD r1_, LD r2_, LD dr_, LD delta_, LD beta_, LD I_bar_)
        : r1(r1_), r2(r2_), dr(dr_), delta(delta_), beta(beta_), I_bar(I_bar_) {
        zeta1 = delta / dr;
        dbar = 1 - std::exp(-delta);
        C1 = C(CLD(zeta1)).real();
        const LD a = 2 * beta * dbar - C1;
        gv = a * a;
        g0 = I_bar + 4 * beta * dbar - C1;
    }

    CLD profile(CLD zeta, LD r) const {
        if (std::abs(zeta) * (r2 - r1) < 1e-9L) return phi_steady(r, r1, r2);
        if (zeta.real() < 0) zeta = -zeta;
        if (zeta.real() * r2 < 40) return phi(zeta, r, r1, r2);
        // i1(z) = e^z i1s(z), k1(z) = e^{-z} k1s(z); multiplying through by
        // e^{-zeta (r2 - r1)} leaves only decaying exponentials.
        auto i1s = [](CLD z) { return ((z - LD(1)) + (z + LD(1)) * std::exp(LD(-2) * z)) / (LD(2) * z * z); };
        auto k1s = [](CLD z) { return (z + LD(1)) / (z * z); };
        const CLD num = std::exp(zeta * (r - 2 * r2 + r1)) * i1s(zeta * r) * k1s(zeta * r2) -
                        std::exp(zeta * (r1 - r)) * i1s(zeta * r2) * k1s(zeta * r);
        const CLD den = std::exp(LD(2) * zeta * (r1 - r2)) * i1s(zeta * r1) * k1s(zeta * r2) -
                        i1s(zeta * r2) * k1s(zeta * r1);
        return num / den;
    }

    CLD C(CLD zeta) const {
        auto f = [&](LD r) { return profile(zeta, r) / r; };
        return r1 / 2 * (LD(3) * f(r1) - LD(4) * f(r1 + dr) + f(r1 + 2 * dr));
    }

    CLD operator()(CLD A) const {
        CLD s = std::sqrt((A - LD(1)) / (A + LD(1)));
        if (s.real() < 0) s = -s;
        const CLD C2 = C(zeta1 * s);
        const CLD Am1 = A - LD(1);
        return gv * Am1 * Am1 * Am1 + g0 * (I_bar * Am1 + C2 * (A + LD(1))) * A * A;
    }
};

/// Zeros of f inside the annulus rho_in < |A| < rho_out by the argument
/// principle with dense uniform phase sampling on both circles.
template <class F>
int zeros_in_annulus(const F& f, LD rho_in, LD rho_out, int samples = 8192) {
    auto winding = [&](LD rho) {
        LD total = 0;
        CLD prev = f(std::polar(rho, LD(0)));
        for (int k = 1; k <= samples; ++k) {
            const CLD cur = f(std::polar(rho, 2 * kPi * k / samples));
            total += std::arg(cur / prev);
            prev = cur;
        }
        return std::lround(total / (2 * kPi));
    };
    return static_cast<int>(winding(rho_out) - winding(rho_in));
}

}  // namespace oracle
