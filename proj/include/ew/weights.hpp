/**
 * @file weights.hpp
 * @brief Type-A weight lattice: epsilon basis, simple roots, fundamental
 *        weights, rho, the bilinear form, shifted Weyl action, dominance, and
 *        an independent Freudenthal multiplicity oracle.
 *
 * A weight is stored as N exact rational coordinates (lambda_1..lambda_N)
 * with sum zero; epsilon_a has coordinates delta_{ab} - 1/N.  The pairing is
 * (lambda, mu) = sum_a lambda_a mu_a, so (lambda, eps_a) = lambda_a for
 * traceless lambda and lambda_{ab} = lambda_a - lambda_b.
 */

#pragma once

#include <map>
#include <vector>

#include "ew/common.hpp"

namespace ew {

struct Weight {
    std::vector<Rat> coords;  // size N, sum zero

    int N() const { return static_cast<int>(coords.size()); }
    static Weight zero(int N) { return Weight{std::vector<Rat>(N, Rat(0))}; }

    Weight operator+(const Weight& o) const;
    Weight operator-(const Weight& o) const;
    Weight operator*(const Rat& s) const;
    Weight operator-() const { return *this * Rat(-1); }
    bool operator==(const Weight& o) const { return coords == o.coords; }
    bool operator<(const Weight& o) const { return coords < o.coords; }

    /// lambda_a - lambda_b (1-based indices).
    Rat diff(int a, int b) const { return coords[a - 1] - coords[b - 1]; }
};

/// epsilon_a: coordinates delta_{ab} - 1/N (1-based a).
Weight eps(int a, int N);
/// Simple root alpha_a = eps_a - eps_{a+1}, a = 1..N-1.
Weight alpha(int a, int N);
/// Fundamental weight omega_a with (alpha_a, omega_b) = delta_{ab}.
Weight omega(int a, int N);
/// rho = sum_a omega_a; coordinates ((N+1)/2 - a)_a.
Weight rho(int N);

/// (lambda, mu) = sum lambda_a mu_a, exact.
Rat pairing(const Weight& l, const Weight& m);

/// Shifted action w . lambda = w(lambda + rho) - rho, with w a permutation
/// of the coordinates (w[i] is the 0-based image of position i).
Weight shifted_weyl(const std::vector<int>& w, const Weight& l);

/// True iff (mu, alpha_a) is a nonnegative integer for every simple root.
bool dominant_integral(const Weight& mu);

/// True iff lambda - mu is a nonnegative integer combination of simple roots.
bool dominates(const Weight& lambda, const Weight& mu);

/**
 * Independent multiplicity oracle: dim V^{sl}_mu[nu] for the irreducible
 * finite-dimensional sl_N-module of dominant integral highest weight mu,
 * computed by Freudenthal's recursion
 *
 *   (|mu+rho|^2 - |nu+rho|^2) m_nu
 *       = 2 sum_{alpha>0} sum_{k>=1} m_{nu+k alpha} (nu + k alpha, alpha)
 *
 * over exact rationals, extended to non-dominant nu through the unshifted
 * Weyl symmetry.  Shares no code with the quantum side.
 */
class FreudenthalOracle {
public:
    explicit FreudenthalOracle(const Weight& mu);  // throws NotDominant
    long multiplicity(const Weight& nu);
    long total_dim();  // sum over the finitely many weights of V_mu

private:
    Weight mu_;
    int N_;
    std::map<Weight, long> memo_;
    long dominant_mult(const Weight& nu);
};

/// All weight drops beta = sum c_a alpha_a with integer c_a >= 0 and
/// sum c_a <= depth, as weights (includes beta = 0).
std::vector<Weight> weight_drops(int N, int depth);

}  // namespace ew
