/**
 * @file theta.hpp
 * @brief The odd Jacobi theta kernel and its rational degeneration.
 *
 * The elliptic kernel is the first Jacobi theta function normalized so that
 *
 *   theta(u) = -sum_{m in Z} exp(pi*i*tau*(m+1/2)^2 + 2*pi*i*(m+1/2)*(u+1/2)),
 *
 * an odd entire function with simple zeros exactly on the lattice Z + tau*Z
 * and quasi-periods
 *
 *   theta(u+1)   = -theta(u),
 *   theta(u+tau) = -exp(-2*pi*i*u - pi*i*tau) * theta(u).
 *
 * It also admits the triple-product form
 *
 *   theta(u) = 2 e^{pi i tau/4} sin(pi u)
 *              prod_{s>=1} (1-q^s)(1-q^s e^{2 pi i u})(1-q^s e^{-2 pi i u}),
 *
 * with q = e^{2 pi i tau}; the product is used as an independent oracle in
 * the tests, while the library evaluates the series.
 *
 * The rational degeneration replaces theta(u) by the linear function u.
 */

#pragma once

#include "ew/common.hpp"

namespace ew {

enum class KernelKind { Elliptic, Rational };

/// Global numeric parameters of a run.
struct ModularParams {
    Cplx tau{0.0, 0.5};
    Cplx gamma{0.317, 0.211};
    int N = 2;
    KernelKind kernel = KernelKind::Elliptic;

    void validate() const;  // throws ConfigError on bad data
};

/// Series evaluation of theta(u; tau).  Terms are added symmetrically in m
/// and the sum stops once three consecutive terms fall below tol times the
/// partial sum (hard cap 10^4 terms).
Cplx theta_eval(Cplx u, Cplx tau, double tol = 1e-14);

/// Independent product-formula evaluation (used by test oracles).
Cplx theta_product(Cplx u, Cplx tau, double tol = 1e-14);

/// Kernel dispatch: elliptic -> theta_eval(u, tau), rational -> u.
Cplx kernel_eval(Cplx u, const ModularParams& params);

/// Magnitude envelope of the kernel series at u: the sum of absolute values
/// of the series terms (rational kernel: |u|).  The absolute rounding error
/// of kernel_eval is about machine epsilon times this, which matters near
/// the kernel's zeros where the value itself is far smaller.
double kernel_scale(Cplx u, const ModularParams& params);

}  // namespace ew
