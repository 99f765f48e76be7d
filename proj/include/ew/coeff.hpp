/**
 * @file coeff.hpp
 * @brief The coefficient ring Fun^{x2}(C) as evaluable expression trees over
 *        kernel atoms with affine arguments, plus multiplicative cocycles.
 *
 * Every coefficient produced by the algebra relations is a quotient of
 * products of kernel values theta(arg) where arg is an affine form
 *
 *   sum_a c1_a lambda^{(1)}_a + sum_a c2_a lambda^{(2)}_a + cu*u + cg*gamma + c0
 *
 * with exact rational linear part.  Expressions are immutable shared trees;
 * evaluation at a sample point is memoized per call.  Identity of
 * expressions is decided numerically at seeded generic points (symbolic
 * normalization of theta expressions is out of scope by design).
 */

#pragma once

#include <memory>
#include <unordered_map>

#include "ew/theta.hpp"
#include "ew/weights.hpp"

namespace ew {

/// Affine argument of a kernel atom.  One-variable functions of lambda are
/// the special case using only the slot-1 coefficients.
struct AffineForm {
    std::vector<Rat> c1, c2;  // size N each
    Rat cu{0};                // coefficient of the spectral parameter u
    Rat cg{0};                // multiple of gamma
    Cplx c0{0.0, 0.0};        // constant

    explicit AffineForm(int N) : c1(N, Rat(0)), c2(N, Rat(0)) {}

    int N() const { return static_cast<int>(c1.size()); }
    bool operator==(const AffineForm& o) const {
        return c1 == o.c1 && c2 == o.c2 && cu == o.cu && cg == o.cg && c0 == o.c0;
    }

    /// lambda^{(slot)}_a  (1-based a)
    static AffineForm lam(int N, int slot, int a);
    /// lambda^{(slot)}_a - lambda^{(slot)}_b
    static AffineForm lam_diff(int N, int slot, int a, int b);
    /// k * gamma
    static AffineForm gamma_mult(int N, Rat k);
    /// the spectral parameter u
    static AffineForm spectral(int N);

    AffineForm operator+(const AffineForm& o) const;
    AffineForm operator-(const AffineForm& o) const;
    AffineForm operator-() const;
    AffineForm plus_gamma(Rat k) const { AffineForm r = *this; r.cg += k; return r; }
    AffineForm plus_const(Cplx c) const { AffineForm r = *this; r.c0 += c; return r; }
};

/// Point of evaluation: (lambda^{(1)}, lambda^{(2)}, u), each lambda summing
/// to zero.  gamma and tau come from ModularParams.
struct SamplePoint {
    std::vector<Cplx> lam1, lam2;
    Cplx u{0.0, 0.0};

    static SamplePoint random(int N, Rng& rng);
};

struct ExprNode;
using CoeffExpr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Const, Kernel, Neg, Add, Mul, Div, IntPow };
    Kind kind;
    Cplx cval{0.0, 0.0};                // Const
    std::unique_ptr<AffineForm> form;   // Kernel
    std::vector<CoeffExpr> kids;        // Neg/Add/Mul: all; Div: {numer, denom}; IntPow: {base}
    long expnt = 0;                     // IntPow (positive)
};

CoeffExpr c_const(Cplx v);
CoeffExpr c_one();
CoeffExpr c_zero();
CoeffExpr c_kernel(const AffineForm& f);
CoeffExpr c_neg(CoeffExpr e);
CoeffExpr c_add(CoeffExpr a, CoeffExpr b);
CoeffExpr c_sub(CoeffExpr a, CoeffExpr b);
CoeffExpr c_mul(CoeffExpr a, CoeffExpr b);
CoeffExpr c_div(CoeffExpr numer, CoeffExpr denom);
CoeffExpr c_pow(CoeffExpr base, long e);  // e >= 1

/// Evaluate with per-call memoization.  Throws SingularPoint when a Div
/// denominator magnitude falls below pole_guard.
class ExprEvaluator {
public:
    ExprEvaluator(const SamplePoint& p, const ModularParams& params,
                  double pole_guard = 1e-8)
        : p_(p), params_(params), guard_(pole_guard) {}

    Cplx eval(const CoeffExpr& e);
    Cplx eval_form(const AffineForm& f) const;  // affine value, before the kernel

    /// Evaluate while propagating a first-order envelope of the magnitudes
    /// cancelled along the way: the absolute rounding error of the returned
    /// value is on the order of machine epsilon times *scale.  Deciding
    /// whether a computed value is numerically zero against this envelope is
    /// sound even when the expression mixes very large and very small
    /// intermediates.
    Cplx eval_scaled(const CoeffExpr& e, double& scale);

private:
    const SamplePoint& p_;
    const ModularParams& params_;
    double guard_;
    std::unordered_map<const ExprNode*, Cplx> memo_;
    std::unordered_map<const ExprNode*, std::pair<Cplx, double>> memo_scaled_;
};

Cplx expr_eval(const CoeffExpr& e, const SamplePoint& p, const ModularParams& params,
               double pole_guard = 1e-8);

/// Substitute lambda^{(slot)} -> lambda^{(slot)} - gamma*mu structurally.
CoeffExpr expr_shift(const CoeffExpr& e, int slot, const Weight& mu);
/// Shift both slots at once (common transport case).
CoeffExpr expr_shift2(const CoeffExpr& e, const Weight& mu1, const Weight& mu2);
/// Substitute (lambda^{(1)}, lambda^{(2)}) -> (-lambda^{(2)}, -lambda^{(1)}).
CoeffExpr expr_pi(const CoeffExpr& e);
/// Substitute lambda^{(1)} -> -lambda^{(1)} in a one-variable expression.
CoeffExpr expr_negate_lambda(const CoeffExpr& e);
/// Collapse to one variable: lambda^{(2)} -> lambda^{(1)} - gamma*nu.
CoeffExpr expr_collapse(const CoeffExpr& e, const Weight& nu);
/// Collapse with a complex weight nu: the gamma*nu part folds into the
/// constant using the numeric gamma.
CoeffExpr expr_collapse_c(const CoeffExpr& e, const std::vector<Cplx>& nu, Cplx gamma);
/// lambda^{(1)} -> lambda^{(1)} - gamma*nu with complex nu.
CoeffExpr expr_shift_c(const CoeffExpr& e, const std::vector<Cplx>& nu, Cplx gamma);
/// lambda^{(1)} -> -lambda^{(1)} + gamma*nu with complex nu.
CoeffExpr expr_reflect_c(const CoeffExpr& e, const std::vector<Cplx>& nu, Cplx gamma);

/// Randomized identity test: true iff |e1-e2| <= tol*(1+max(|e1|,|e2|)) at
/// n_samples seeded generic points, resampling points that trip
/// SingularPoint (bounded retries; InconclusiveSampling past the cap).
bool expr_equal(const CoeffExpr& e1, const CoeffExpr& e2, const ModularParams& params,
                Rng& rng, int n_samples = 8, double tol = 1e-9);

/// Numeric zero test with few samples (used to prune vanishing terms).
bool expr_is_zero(const CoeffExpr& e, const ModularParams& params, Rng& rng,
                  int n_samples = 3, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Dynamical weights (multiplicative 1-cocycles)

/// Q = (Q_1..Q_N), each a one-variable expression, satisfying
/// Q_a(lambda) Q_b(lambda - gamma eps_a) = Q_a(lambda - gamma eps_b) Q_b(lambda).
struct DynWeightQ {
    std::vector<CoeffExpr> Q;  // size N

    static DynWeightQ standard(int N);  // all ones
    /// Q_a(lambda - gamma*shift)
    CoeffExpr shifted(int a, const Weight& shift) const;
};

/// Max cocycle residual over pairs (a,b) at sampled points.
double cocycle_check(const DynWeightQ& Q, const ModularParams& params, Rng& rng,
                     int n_samples = 8);

/// The multiplicative 1-form built from a one-variable f:
/// F_a(lambda) = prod_{c<a} f(lambda_{ca}) * prod_{a<c} f(lambda_{ac}-gamma)^{-1}.
/// f is given as a function of the affine argument xi.
DynWeightQ cocycle_from_f(int N, const std::function<CoeffExpr(const AffineForm&)>& f);

/// Coboundary dG of a one-variable g: Q_a(lambda) = G(lambda-gamma eps_a)/G(lambda)
/// with G(lambda) = prod_{b<c} g(lambda_{bc}).
DynWeightQ coboundary_from_g(int N, const std::function<CoeffExpr(const AffineForm&)>& g);

}  // namespace ew
