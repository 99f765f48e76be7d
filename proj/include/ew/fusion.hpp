/**
 * @file fusion.hpp
 * @brief Rational degeneration toolkit: finite-dimensional sl_N-modules,
 *        ABRR fusion matrices solved blockwise at a numeric point, exchange
 *        R-matrices and their dynamical Yang-Baxter / cocycle checks, the
 *        functor carrying an sl_N-module to a rational dynamical module,
 *        B_X(lambda) product series, and the translation between the t-action
 *        and the exchange-group L-operators.
 *
 * Throughout this module the kernel is rational (theta(u) -> u) and the step
 * gamma equals 1; lambda shifts act through unit coordinate vectors (all
 * coefficients depend on differences lambda_ab only, so the traceless
 * projection is immaterial).
 */

#pragma once

#include "ew/emodules.hpp"

namespace ew {

// ---------------------------------------------------------------------------
// Finite-dimensional sl_N-modules

/// Weight-graded module with matrices for the gl_N generators e_ab
/// (traceless combinations span the sl_N-action).
struct SlnModule {
    int N = 0, dim = 0;
    std::vector<Weight> wts;          // weight of each basis vector
    std::vector<MatrixXcd> e;         // row-major (a-1)*N + (b-1)

    const MatrixXcd& E(int a, int b) const { return e[(a - 1) * N + (b - 1)]; }
};

/// C^N with e_ab -> E_ab; basis weights eps_1..eps_N.
SlnModule sln_vector_rep(int N);

/// Tensor product via e_ab -> e_ab (x) 1 + 1 (x) e_ab;
/// index (i,j) -> i*W.dim + j.
SlnModule sln_tensor(const SlnModule& V, const SlnModule& W);

/// Max residual of [e_ab, e_cd] = d_bc e_ad - d_ad e_cb and of the weight
/// grading e_ab : V[nu] -> V[nu + eps_a - eps_b].
double sln_relations_residual(const SlnModule& V);

/// Xi = 1/2 sum_a e_aa^2 - (1/(2N)) (sum_a e_aa)^2 acts on a weight-nu
/// vector by 1/2 sum_a nu_a^2 (the second term vanishes on traceless nu).
Rat xi_scalar(const Weight& nu);

/// The matrix of Xi on V (diagonal in the weight basis).
MatrixXcd xi_matrix(const SlnModule& V);

/// <lam0, nu> = sum_a lam0_a nu_a.
Cplx weight_pair(const VectorXcd& lam0, const Weight& nu);

// ---------------------------------------------------------------------------
// Fusion and exchange matrices

struct FusionMatrix {
    VectorXcd lam0;
    MatrixXcd J;  // on V (x) W
};

struct ExchangeMatrix {
    VectorXcd lam0;
    MatrixXcd R;  // on V (x) W
};

/// The unique solution of J (1 (x) (lam - Xi)) = (1 (x) (lam - Xi)
/// + sum_{a<b} e_ab (x) e_ba) J with J - 1 strictly raising the first
/// factor and lowering the second, solved blockwise:
/// J_{rc} (d_c - d_r) = (K J)_{rc} with d_x = <lam0, nu2(x)> - xi(nu2(x)).
/// Throws ResonantPoint when a needed denominator magnitude is below guard.
FusionMatrix fusion_J(const SlnModule& V, const SlnModule& W, const VectorXcd& lam0,
                      double guard = 1e-8);

/// R_VW(lam0) = J_VW(lam0)^{-1} (J_WV(lam0))^{(21)}.
ExchangeMatrix exchange_R(const SlnModule& V, const SlnModule& W, const VectorXcd& lam0,
                          double guard = 1e-8);

/// Closed form on C^N (x) C^N:
/// R_UU = sum E_aa (x) E_bb - sum_{a<b} E_aa (x) E_bb / lam_ab^2
///        - sum_{a != b} E_ab (x) E_ba / lam_ab.
MatrixXcd ratR_UU(int N, const VectorXcd& lam);

/// Closed form of the EV-normalized matrix:
/// Rtilde_UU = sum E_aa (x) E_bb - sum_{a<b} E_bb (x) E_aa / (lam_ab - a + b)^2
///             - sum_{a != b} E_ab (x) E_ba / (lam_ab - a + b).
MatrixXcd ratRtilde_UU(int N, const VectorXcd& lam);

/// X = sum_a (-1)^{a-1} E_{a,N-a+1}; the longest Weyl element w_X reverses
/// coordinates.
MatrixXcd longest_X(int N);
VectorXcd wX_coords(const VectorXcd& lam);
VectorXcd rho_coords(int N);

/// Rtilde_VW(lam) = (Xv (x) Xw) R_VW(w_X(lam + rho)) (Xv (x) Xw)^{-1}, where
/// Xv, Xw realize the group element X on V and W (longest_X(N) on C^N,
/// Kronecker powers on tensor powers).
MatrixXcd exchange_Rtilde(const SlnModule& V, const SlnModule& W, const MatrixXcd& Xv,
                          const MatrixXcd& Xw, const VectorXcd& lam, double guard = 1e-8);

/// Residual of the dynamical 2-cocycle identity
/// J_{U(x)V,W}(lam0) (J_UV(lam0 - h3) (x) 1) = J_{U,V(x)W}(lam0) (1 (x) J_VW(lam0)).
double check_J_cocycle(const SlnModule& U, const SlnModule& V, const SlnModule& W,
                       const VectorXcd& lam0);

/// Residual of R12(lam - h3) R13(lam) R23(lam - h1)
///   = R23(lam) R13(lam - h2) R12(lam) for the exchange matrices.
double check_exchange_dyb(const SlnModule& V1, const SlnModule& V2, const SlnModule& V3,
                          const VectorXcd& lam0);

// ---------------------------------------------------------------------------
// The functor to rational dynamical modules

/// hat-ell_ab(lam) read off from R_{UV}(lam) = sum E_ba (x) hat-ell_ab(lam).
MatrixXcd ellhat_matrix(const SlnModule& V, int a, int b, const VectorXcd& lam,
                        double guard = 1e-8);

/// The rational dynamical module structure on V: unhatted matrices
/// ell_ab(lam)[i,j] = prod_{c<a} (lam_ca)^{-1} prod_{c<b} (lam - nu_i)_{cb}
/// * hat-ell_ab(lam)[i,j] with nu_i the outgoing weight; action
/// (t_ab v)(lam) = ell_ab(lam) v(lam - e_a).
SmallModule functor_E(const SlnModule& V, double guard = 1e-8);

/// Tensor product of rational dynamical modules:
/// ell_ab|_{V(x)W}(lam) = sum_c ell_cb(lam - h2) (x) ell_ac(lam),
/// h2 dispatched per outgoing W-component weight.
SmallModule rational_tensor(const SmallModule& V, const SmallModule& W);

/// Residual of D(lam) = 1 on Fun(V), with
/// D = prod_{a<b} (lam1_ab / lam2_ab) sum_i sign(i) t_{N,i_N} ... t_{1,i_1}.
double check_semistandard(const SmallModule& V, Rng& rng, int n_samples);

// ---------------------------------------------------------------------------
// B_X(lambda)

/// Truncated product series G_ab(lam) = sum_k e_ba^k e_ab^k
/// prod_{j=1}^k (j (lam_ab - e_aa + e_bb - j))^{-1} on V (exact by
/// nilpotency); throws ResonantPoint on a small denominator.
MatrixXcd gab_series(const SlnModule& V, int a, int b, const VectorXcd& lam,
                     double guard = 1e-8);

/// Ordered product of the G_ab over 1 <= a < b <= N (lexicographic, G_12
/// leftmost).
MatrixXcd bx_matrix(const SlnModule& V, const VectorXcd& lam, double guard = 1e-8);

// ---------------------------------------------------------------------------
// Exchange-group L-operators

/// Representation by difference operators (T+_ab v)(lam) = L_ab(lam) v(lam - e_b).
struct RationalLRep {
    int N = 0, dim = 0;
    std::vector<GlWeight> wts;
    std::function<MatrixXcd(int a, int b, const VectorXcd& lam)> L;
};

/// L_ab(lam) built from the t-action:
/// L_ab(lam)[i,j] = ell_ba(lam + rho)[i,j] prod_{c<b} ((lam+rho)_cb + 1)
///                  / prod_{c<a} ((lam+rho)_ca + (nu_i)_a - (nu_i)_c + 1).
RationalLRep L_from_small(const SmallModule& V);

/// The inverse translation:
/// ell_ab(lam)[i,j] = prod_{c<a} (lam_ca + 1)^{-1}
///   prod_{c<b} (lam_cb + (nu_i)_b - (nu_i)_c + 1) L_ba(lam - rho)[i,j].
SmallModule small_from_L(const RationalLRep& V);

/// L-operators of the exchange-group construction, read off from
/// Rtilde_{UV}(lam) = sum E_ab (x) L_ab(lam); Xv realizes X on V.
RationalLRep L_from_Rtilde(const SlnModule& V, const MatrixXcd& Xv, double guard = 1e-8);

/// Residual of Rtilde^{12}(lam2) T13 T23 = T23 T13 Rtilde^{12}(lam1) as
/// difference operators on functions with values in C^N (x) C^N (x) V.
double check_rll(const RationalLRep& V, Rng& rng, int n_samples);

/// Residual of Det T+ = 1 with
/// Det T+ = Lambda_id(lam1)^{-1} sum_i sign(i) Lambda_i(lam2)
///          T+_{i_N,N} ... T+_{i_1,1},
/// Lambda_i(lam) = prod_{a<b, i_a<i_b} (1 + lam_ab^{-1}).
double check_detplus(const RationalLRep& V, Rng& rng, int n_samples);

}  // namespace ew
