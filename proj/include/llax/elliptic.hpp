#pragma once

// Elliptic building blocks: the odd Jacobi theta function, the Kronecker
// function phi and its u-derivative f, the Eisenstein-type functions E1, E2,
// the Weierstrass function wp, and rho.  All follow the conventions
//
//   theta(z|tau) = -sum_{k in Z} exp(pi i tau (k+1/2)^2 + 2 pi i (z+1/2)(k+1/2))
//   phi(z,u)     = theta'(0) theta(z+u) / (theta(z) theta(u))
//   f(z,u)       = d/du phi(z,u) = phi(z,u) (E1(z+u) - E1(u))
//   E1(z)        = theta'(z)/theta(z),   E2(z) = -E1'(z)
//   wp(z)        = E2(z) + theta'''(0)/(3 theta'(0))
//   rho(z)       = (E1(z)^2 - wp(z))/2
//
// theta is entire and odd with simple zeros on Z + tau Z; phi has simple poles
// in each variable on that lattice with residue 1 at z = 0.  Every function
// here evaluates the literal series/quotient; no branch adjustments are made,
// so callers should keep arguments inside a fundamental cell around 0.

#include <cmath>
#include <complex>
#include <string>

#include "llax/errors.hpp"

namespace llax {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline const cplx iunit{0.0, 1.0};

// Evaluation context: rank N, modular parameter tau (Im tau > 0), and the
// truncation policy for all theta series.
struct EllipticContext {
    int N = 2;
    cplx tau{0.0, 1.0};
    double series_tol = 1e-14;
    int series_cap = 200; // terms per side of the symmetric window

    EllipticContext() = default;
    EllipticContext(int N_, cplx tau_, double tol = 1e-14, int cap = 200)
        : N(N_), tau(tau_), series_tol(tol), series_cap(cap) {
        if (N < 2) throw std::invalid_argument("EllipticContext: N must be >= 2");
        if (!(tau.imag() > 0.0)) throw std::invalid_argument("EllipticContext: Im tau must be positive");
        if (!(series_tol > 0.0) || series_tol > 1e-8)
            throw std::invalid_argument("EllipticContext: series_tol must lie in (0, 1e-8]");
        if (series_cap < 50) throw std::invalid_argument("EllipticContext: series_cap must be >= 50");
    }
};

namespace detail {

// Shared series driver: sums weight(k) * exp(pi i tau (k+1/2)^2 + 2 pi i (z+1/2)(k+1/2))
// over the symmetric window k = m, -1-m, m = 0, 1, ...  Terms are added in
// pairs; the loop stops once a pair (with at least two pairs summed) drops
// below series_tol * (1 + |partial sum|).
template <typename Weight>
cplx theta_series(cplx z, const EllipticContext& ctx, Weight weight, const char* label) {
    cplx sum = 0.0;
    for (int m = 0; m < ctx.series_cap; ++m) {
        const double k1 = m + 0.5;        // k = m
        const double k2 = -(m + 0.5);     // k = -1-m
        const cplx e1 = weight(k1) * std::exp(pi * iunit * ctx.tau * k1 * k1 + 2.0 * pi * iunit * (z + 0.5) * k1);
        const cplx e2 = weight(k2) * std::exp(pi * iunit * ctx.tau * k2 * k2 + 2.0 * pi * iunit * (z + 0.5) * k2);
        sum += e1 + e2;
        if (m >= 1 && std::abs(e1) + std::abs(e2) < ctx.series_tol * (1.0 + std::abs(sum)))
            return -sum;
    }
    throw PrecisionError(std::string(label) + ": theta series did not converge within series_cap terms");
}

} // namespace detail

inline cplx theta(cplx z, const EllipticContext& ctx) {
    return detail::theta_series(z, ctx, [](double) { return cplx{1.0, 0.0}; }, "theta");
}

// d^order/dz^order theta, order in {1,2,3}, via the termwise-differentiated series.
inline cplx theta_derivative(cplx z, const EllipticContext& ctx, int order) {
    if (order < 1 || order > 3) throw std::invalid_argument("theta_derivative: order must be 1, 2, or 3");
    return detail::theta_series(
        z, ctx,
        [order](double k) {
            cplx fac = 2.0 * pi * iunit * k;
            cplx w = fac;
            for (int j = 1; j < order; ++j) w *= fac;
            return w;
        },
        "theta_derivative");
}

namespace detail {

// theta with the near-pole guard used whenever the value lands in a denominator.
inline cplx theta_denominator(cplx arg, const EllipticContext& ctx, const char* slot) {
    const cplx v = theta(arg, ctx);
    if (std::abs(v) < 1e3 * ctx.series_tol)
        throw NearPoleError(slot, std::string("argument '") + slot + "' is within the pole guard of the theta lattice");
    return v;
}

} // namespace detail

// Kronecker function phi(z,u); simple pole with residue 1 as either argument
// approaches the lattice.  Raises NearPoleError naming the offending slot.
inline cplx kronecker_phi(cplx z, cplx u, const EllipticContext& ctx) {
    const cplx tz = detail::theta_denominator(z, ctx, "z");
    const cplx tu = detail::theta_denominator(u, ctx, "u");
    return theta_derivative(cplx{0.0, 0.0}, ctx, 1) * theta(z + u, ctx) / (tz * tu);
}

inline cplx e1(cplx z, const EllipticContext& ctx) {
    return theta_derivative(z, ctx, 1) / detail::theta_denominator(z, ctx, "z");
}

inline cplx e2(cplx z, const EllipticContext& ctx) {
    const cplx t = detail::theta_denominator(z, ctx, "z");
    const cplx d1 = theta_derivative(z, ctx, 1) / t;
    const cplx d2 = theta_derivative(z, ctx, 2) / t;
    return d1 * d1 - d2; // -d/dz E1
}

// f(z,u) = d/du phi(z,u).
inline cplx kronecker_f(cplx z, cplx u, const EllipticContext& ctx) {
    return kronecker_phi(z, u, ctx) * (e1(z + u, ctx) - e1(u, ctx));
}

// Ratio theta'''(0)/(3 theta'(0)); the additive constant relating E2 and wp.
inline cplx theta_third_ratio(const EllipticContext& ctx) {
    return theta_derivative(cplx{0.0, 0.0}, ctx, 3) / (3.0 * theta_derivative(cplx{0.0, 0.0}, ctx, 1));
}

inline cplx wp(cplx z, const EllipticContext& ctx) {
    return e2(z, ctx) + theta_third_ratio(ctx);
}

inline cplx rho(cplx z, const EllipticContext& ctx) {
    const cplx v = e1(z, ctx);
    return (v * v - wp(z, ctx)) / 2.0;
}

// d/dz phi(z,u) = phi(z,u) (E1(z+u) - E1(z)).
inline cplx kronecker_phi_dz(cplx z, cplx u, const EllipticContext& ctx) {
    return kronecker_phi(z, u, ctx) * (e1(z + u, ctx) - e1(z, ctx));
}

// d/dz f(z,u) = phi(z,u) [ (E1(z+u)-E1(z))(E1(z+u)-E1(u)) - E2(z+u) ].
inline cplx kronecker_f_dz(cplx z, cplx u, const EllipticContext& ctx) {
    const cplx s = e1(z + u, ctx);
    return kronecker_phi(z, u, ctx) * ((s - e1(z, ctx)) * (s - e1(u, ctx)) - e2(z + u, ctx));
}

// d/dz rho = -E1 E2 - wp'/2 with wp' = -E1'' expressed through theta quotients.
inline cplx rho_dz(cplx z, const EllipticContext& ctx) {
    const cplx t = detail::theta_denominator(z, ctx, "z");
    const cplx t1 = theta_derivative(z, ctx, 1) / t;
    const cplx t2 = theta_derivative(z, ctx, 2) / t;
    const cplx t3 = theta_derivative(z, ctx, 3) / t;
    const cplx e1v = t1;
    const cplx e2v = t1 * t1 - t2;
    const cplx e1pp = t3 - 3.0 * t1 * t2 + 2.0 * t1 * t1 * t1; // E1''
    return -e1v * e2v + e1pp / 2.0;
}

// Half-period sections for N = 2 (the three functions multiplying the Pauli
// directions of the rank-2 classical r-matrix):
//   phi_1(z) = e^{pi i z} phi(z, tau/2)
//   phi_2(z) = e^{pi i z} phi(z, (1+tau)/2)
//   phi_3(z) = phi(z, 1/2)
// They satisfy phi_k(z)^2 = wp(z) - wp(omega_k) with omega_1 = tau/2,
// omega_2 = (1+tau)/2, omega_3 = 1/2, and d/dz phi_i = -phi_j phi_k.
inline cplx phi_k(int k, cplx z, const EllipticContext& ctx) {
    if (ctx.N != 2) throw std::invalid_argument("phi_k: requires an N = 2 context");
    switch (k) {
        case 1: return std::exp(pi * iunit * z) * kronecker_phi(z, ctx.tau / 2.0, ctx);
        case 2: return std::exp(pi * iunit * z) * kronecker_phi(z, (1.0 + ctx.tau) / 2.0, ctx);
        case 3: return kronecker_phi(z, cplx{0.5, 0.0}, ctx);
        default: throw std::invalid_argument("phi_k: k must be 1, 2, or 3");
    }
}

inline cplx half_period(int k, const EllipticContext& ctx) {
    switch (k) {
        case 1: return ctx.tau / 2.0;
        case 2: return (1.0 + ctx.tau) / 2.0;
        case 3: return cplx{0.5, 0.0};
        default: throw std::invalid_argument("half_period: k must be 1, 2, or 3");
    }
}

// Scalar degenerations of the Kronecker function, kept for documentation and
// for stating the trigonometric/rational limits of the unitarity constant.
inline cplx phi_trig(cplx hbar, cplx z) {
    return pi / std::tan(pi * z) + pi / std::tan(pi * hbar);
}

inline cplx phi_rat(cplx hbar, cplx z) {
    return 1.0 / hbar + 1.0 / z;
}

// Distance from w to the nearest point of the lattice {m + n tau}.
inline double lattice_distance(cplx w, cplx tau) {
    const double beta = w.imag() / tau.imag();
    const double alpha = w.real() - beta * tau.real();
    const double a0 = std::floor(alpha), b0 = std::floor(beta);
    double best = std::abs(w);
    for (int dm = -1; dm <= 2; ++dm)
        for (int dn = -1; dn <= 2; ++dn) {
            const cplx p = (a0 + dm) + (b0 + dn) * tau;
            best = std::min(best, std::abs(w - p));
        }
    return best;
}

// Distance from w to the nearest point of the refined lattice {(m + n tau)/N}.
inline double refined_lattice_distance(cplx w, cplx tau, int N) {
    return lattice_distance(static_cast<double>(N) * w, tau) / static_cast<double>(N);
}

} // namespace llax
