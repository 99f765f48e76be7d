/**
 * @file emodules.hpp
 * @brief Representations as difference operators: small e-modules
 *        ((t_ab v)(lambda) = ell_ab(lambda) v(lambda - g eps_a)), big
 *        E-modules ((T_ab(u)v)(lambda) = L_ab(u,lambda) v(lambda - g eps_b)),
 *        the vector representation, evaluation modules, tensor products,
 *        quantum-determinant actions, Verma modules with the Shapovalov
 *        pairing, contravariant form, Gram matrices and irreducible
 *        dimensions, and antisymmetrizer (wedge) machinery.
 */

#pragma once

#include <functional>

#include "ew/algebra.hpp"
#include "ew/rmatrix.hpp"

namespace ew {

// ---------------------------------------------------------------------------
// Finite-dimensional module actions

/// Basis weights are stored in gl-style coordinates: (eps_a)_b = delta_ab,
/// so a basis vector of weight nu has nu_a = multiplicity of eps_a.
using GlWeight = std::vector<Rat>;

/// Small e-module: weight basis plus matrices ell_ab(lambda);
/// (t_ab v)(lambda) = ell_ab(lambda) v(lambda - g eps_a), mapping the weight
/// nu component to nu + eps_a - eps_b.
struct SmallModule {
    int N = 0, dim = 0;
    std::vector<GlWeight> wts;  // weight of each basis vector
    std::function<MatrixXcd(int a, int b, const VectorXcd& lam)> ell;  // 1-based a,b
};

/// Big E-module: (T_ab(u) v)(lambda) = L_ab(u,lambda) v(lambda - g eps_b),
/// mapping the weight nu component to nu - eps_a + eps_b.
struct BigModule {
    int N = 0, dim = 0;
    std::vector<GlWeight> wts;
    std::function<MatrixXcd(int a, int b, Cplx u, const VectorXcd& lam)> L;
};

/// The vector representation on C^N: basis v_a of weight eps_a,
/// ell_aa = E_aa + sum_{b != a} th(l_ab + g)/th(l_ab) E_bb and
/// ell_ab = th(g)/th(l_ab) E_ab for a != b.
SmallModule vector_rep(const ModularParams& params);

/// Evaluation module M(x), normalized so that the vector representation
/// evaluates to L(u,lambda) = R(u-x,lambda):
/// L_ab(u,lambda)_{ij} = th(u - x - l_b + l_a - g (nu_i)_a) / th(u - x - g)
/// * ell_ba(lambda)_{ij}, nu_i the gl-weight of the outgoing basis vector.
BigModule eval_module(const SmallModule& M, Cplx x, const ModularParams& params);

/// Full L(u,lambda) on C^N (x) V with row/column index (a,i) -> a*dim + i.
MatrixXcd big_L_matrix(const BigModule& V, Cplx u, const VectorXcd& lam);

/// Coproduct: L_ab|_{V(x)W} = sum_c L_ac(u, lambda - g h^{(2)}) (x) L_cb(u,lambda).
BigModule tensor_big(const BigModule& V, const BigModule& W, const ModularParams& params);

// ---------------------------------------------------------------------------
// Difference operators on vector-valued functions of lambda

using VecFun = std::function<VectorXcd(const VectorXcd&)>;  // lambda -> C^m
using MatFun = std::function<MatrixXcd(const VectorXcd&)>;
using OpFun = std::function<VecFun(const VecFun&)>;

/// T^{(leg, aux+1)}(u) = sum_ab E^{(leg)}_ab (x) T_ab(u) acting on functions
/// lambda -> (C^N)^{(x) n_aux} (x) V; the auxiliary legs are not dynamical.
OpFun bigT_on_leg(const BigModule& V, int n_aux, int leg, Cplx u, const ModularParams& params);

/// R^{(li,lj)}(u, lambda - g h^{V}) on the auxiliary legs, dispatching the
/// dynamical shift per V-weight component (shift_by_module true) or acting
/// with the plain argument lambda (false).
OpFun auxR_on_legs(const BigModule& V, int n_aux, int li, int lj, Cplx u,
                   bool shift_by_module, const ModularParams& params);

/// Det T(u) as a difference operator on Fun(V):
/// [Theta(lambda)/Theta(lambda - g h)] sum_i sign(i)
/// T_{i_N,N}(u+(N-1)g) ... T_{i_1,1}(u).
OpFun bigDetT(const BigModule& V, Cplx u, const ModularParams& params);

/// RTT residual R^{12}(u-v, l-gh^3) T^{13}(u) T^{23}(v)
///   = T^{23}(v) T^{13}(u) R^{12}(u-v, l) at sampled (u,v,lambda,test fn).
double check_rtt(const BigModule& V, const ModularParams& params, Rng& rng, int n_samples);

/// Morphism residual of phi: V -> W, (Phi v)(lambda) = phi(lambda) v(lambda):
/// max over generators of |T^W_ab o Phi - Phi o T^V_ab| on sampled data.
double check_big_morphism(const BigModule& V, const BigModule& W, const MatFun& phi,
                          const ModularParams& params, Rng& rng, int n_samples);

/// Random smooth test function lambda -> C^m built from exponentials (so that
/// lambda-shifts are exact).
VecFun random_vecfun(int m, int N, Rng& rng);

/// t_ab as a difference operator on Fun(V): v -> ell_ab(lambda) v(lambda - g e_a).
OpFun small_op_gen(const SmallModule& M, int a, int b, const ModularParams& params);

/// Action of a general algebra element on Fun(V): generators act per
/// small_op_gen and a coefficient f(l1,l2) multiplies component i by
/// f(lambda, lambda - g nu_i).
VecFun act_small(const SmallModule& M, const AlgebraElement& x, const VecFun& v,
                 const ModularParams& params);

/// Residual of the defining commutation relations realized as difference
/// operators on Fun(V), over sampled (lambda, test function).
double small_relations_residual(const SmallModule& M, const ModularParams& params, Rng& rng,
                                int n_samples);

/// Morphism residual for small modules: max over generators of
/// |phi(lambda) ell^V_ab(lambda) - ell^W_ab(lambda) phi(lambda - g e_a)|
/// at sampled lambda (rational kernels sample well-separated coordinates).
double check_small_morphism(const SmallModule& V, const SmallModule& W, const MatFun& phi,
                            const ModularParams& params, Rng& rng, int n_samples);

// ---------------------------------------------------------------------------
// Antisymmetrizers

/// Projector A_k onto the alternating subspace of (C^N)^{(x)k}.
MatrixXcd antisym_projector(int N, int k);

/// T^{wedge k}(u) = A_k T^{(k,k+1)}(u+(k-1)g) ... T^{(1,k+1)}(u) as an
/// operator on functions lambda -> (C^N)^{(x)k} (x) V.
OpFun wedge_T(const BigModule& V, int k, Cplx u, const ModularParams& params);

/// The matrix of T^{wedge N}(u) on the one-dimensional top exterior power of
/// the auxiliary space, evaluated on constant module vectors at lambda:
/// M[i][j] = <w (x) e_i, T^{wedge N}(u)(w (x) e_j)> / <w, w> with
/// w = sum_p sign(p) e_{p(1)} (x) ... (x) e_{p(N)}.
MatrixXcd wedge_top_matrix(const BigModule& V, Cplx u, const VectorXcd& lam,
                           const ModularParams& params);

// ---------------------------------------------------------------------------
// Verma modules

/// Element of a Verma module: finite combination sum_m f_m(lambda) that_m v
/// over normal-ordered lowering monomials m, with one-variable coefficients.
struct FunElement {
    int N = 0;
    std::map<Mono, CoeffExpr> terms;
};

/// All normal-ordered strictly-lowering monomials with the given weight drop
/// (drop = a nonnegative integer combination of simple roots).
std::vector<Mono> lowering_monomials(int N, const Weight& drop);

/// Height of the weight drop of a lowering monomial: sum_i (a_i - b_i).
int mono_height(const Mono& m);

class VermaModule {
public:
    /// mu: highest weight as N traceless complex coordinates; Q: dynamical
    /// weight (1-cocycle); depth: truncation in weight-drop height.
    VermaModule(const ModularParams& params, std::vector<Cplx> mu, DynWeightQ Q, int depth);
    static std::vector<Cplx> weight_coords(const Weight& mu);

    const ModularParams& params() const { return params_; }
    const std::vector<Cplx>& mu() const { return mu_; }
    const DynWeightQ& Q() const { return Q_; }
    int depth() const { return depth_; }

    FunElement vacuum() const;

    /// Action of that_ab (hatted = true) or t_ab (hatted = false).
    /// Throws DepthExceeded if a resulting monomial leaves the truncation.
    FunElement act_gen(int a, int b, const FunElement& w, bool hatted = true) const;

    /// Action of a general element in the unhatted generators.
    FunElement act_elem(const AlgebraElement& x, const FunElement& w) const;

    /// that_m v for a lowering monomial m (applied right to left).
    FunElement mono_apply(const Mono& m) const;

    /// Shapovalov pairing S_{mu,Q}(m, w): the coefficient of the empty
    /// monomial in pi(that_m) w; vanishes on weight mismatch.
    CoeffExpr pairing(const Mono& m, const FunElement& w) const;

    /// Gram matrix A(lambda) with A_{m,m'}(lambda) = S(m, that_{m'} v)
    /// evaluated at lambda + g zeta(m), zeta(m) = sum eps_{b_i}.
    std::vector<Mono> weight_basis(const Weight& drop) const;
    /// When noise is non-null it receives, entrywise, the evaluation noise
    /// floor of A (machine epsilon times the cancellation envelope): the
    /// amount below which a computed entry is indistinguishable from zero.
    MatrixXcd gram_matrix(const Weight& drop, const VectorXcd& lam0,
                          Eigen::MatrixXd* noise = nullptr) const;

    /// Contravariant form C(m1 v, m2 vtilde)(lambda)
    ///   = S_{mu,Q}(m2, m1 v)(lambda + g zeta''(m2)).
    CoeffExpr contravariant(const Mono& m1, const Mono& m2) const;

private:
    ModularParams params_;
    std::vector<Cplx> mu_;
    DynWeightQ Q_;
    int depth_;

    FunElement act_gen_one(int a, int b, const Mono& m, const CoeffExpr& g, bool hatted) const;
};

/// Numeric comparison of Verma elements at sampled (lambda, u).
double fun_residual(const FunElement& x, const FunElement& y, const ModularParams& params,
                    Rng& rng, int n_samples = 8);

/// Rank with relative pivot threshold 1e-8.
long numeric_rank(const MatrixXcd& A, double rel_threshold = 1e-8);

/// Rank with the singular-value cutoff floored at the matrix' evaluation
/// noise (see gram_matrix): singular values below the noise floor are
/// treated as zero regardless of the relative threshold.
long numeric_rank(const MatrixXcd& A, const Eigen::MatrixXd& noise,
                  double rel_threshold = 1e-8);

/// Table drop -> dim of the irreducible quotient weight space, computed as
/// dim M[mu-drop] - nullity(Gram) at two sampled lambda0 (throws RankUnstable
/// on disagreement).
std::map<Weight, long> irr_dims(const VermaModule& M, int depth, Rng& rng);

/// Number of independent constant-coefficient singular vectors of the given
/// drop: joint numeric nullspace of the simple raising actions at lambda0
/// (cross-checked at a second point; throws RankUnstable on disagreement).
long singular_count(const VermaModule& M, const Weight& drop, Rng& rng);

/// Dual dynamical weight: Qtilde_a(lambda) = Q_a(-lambda + (mu + eps_a) g).
DynWeightQ dual_Q(const DynWeightQ& Q, const std::vector<Cplx>& mu, const ModularParams& params);

/// Residual of Det acting on that_m v against the central scalar
/// prod_a th(u - g(mu_a - a + 1)) * prod_a Q_a(lambda - g sum_{b>a} eps_b),
/// transported across the monomial.
double qdet_action_check(const VermaModule& M, const Mono& m, Rng& rng, int n_samples = 4);

}  // namespace ew
