#include "ew/theta.hpp"

#include <cmath>

namespace ew {

namespace {
constexpr double kPi = 3.14159265358979323846;
const Cplx kI(0.0, 1.0);
constexpr int kMaxTerms = 10000;
}  // namespace

void ModularParams::validate() const {
    if (N < 2) throw ConfigError("N must be at least 2");
    if (gamma == Cplx(0.0, 0.0)) throw ConfigError("gamma must be nonzero");
    if (kernel == KernelKind::Elliptic && tau.imag() <= 0.0)
        throw ConfigError("Im(tau) must be positive for the elliptic kernel");
}

Cplx theta_eval(Cplx u, Cplx tau, double tol) {
    if (tau.imag() <= 0.0) throw ConfigError("theta_eval requires Im(tau) > 0");
    auto term = [&](long m) {
        Cplx half(m + 0.5, 0.0);
        return std::exp(kPi * kI * tau * half * half + 2.0 * kPi * kI * half * (u + 0.5));
    };
    // m = 0, -1, 1, -2, 2, ... : the exponent decays like exp(-pi Im(tau) m^2),
    // so three consecutive negligible terms certify the tail is negligible.
    Cplx sum = term(0);
    int small_run = 0;
    for (long k = 1; k <= kMaxTerms; ++k) {
        for (long m : {-k, k}) {
            Cplx t = term(m);
            sum += t;
            if (std::abs(t) < tol * (1.0 + std::abs(sum))) {
                ++small_run;
            } else {
                small_run = 0;
            }
        }
        if (small_run >= 3) break;
    }
    return -sum;
}

Cplx theta_product(Cplx u, Cplx tau, double tol) {
    Cplx q = std::exp(2.0 * kPi * kI * tau);
    Cplx e2u = std::exp(2.0 * kPi * kI * u);
    Cplx prod = 2.0 * std::exp(kPi * kI * tau / 4.0) * std::sin(kPi * u);
    Cplx qs(1.0, 0.0);
    int small_run = 0;
    for (int s = 1; s <= kMaxTerms; ++s) {
        qs *= q;
        Cplx f = (1.0 - qs) * (1.0 - qs * e2u) * (1.0 - qs / e2u);
        prod *= f;
        if (std::abs(f - 1.0) < tol) {
            if (++small_run >= 3) break;
        } else {
            small_run = 0;
        }
    }
    return prod;
}

Cplx kernel_eval(Cplx u, const ModularParams& params) {
    return params.kernel == KernelKind::Elliptic ? theta_eval(u, params.tau) : u;
}

double kernel_scale(Cplx u, const ModularParams& params) {
    if (params.kernel == KernelKind::Rational) return std::abs(u);
    auto term_mag = [&](long m) {
        double half = m + 0.5;
        return std::exp(-kPi * params.tau.imag() * half * half -
                        2.0 * kPi * half * u.imag());
    };
    double sum = term_mag(0);
    int small_run = 0;
    for (long k = 1; k <= kMaxTerms; ++k) {
        for (long m : {-k, k}) {
            double t = term_mag(m);
            sum += t;
            if (t < 1e-14 * (1.0 + sum)) ++small_run;
            else small_run = 0;
        }
        if (small_run >= 3) break;
    }
    return sum;
}

}  // namespace ew
