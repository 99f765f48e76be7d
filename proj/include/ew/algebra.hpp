/**
 * @file algebra.hpp
 * @brief The operator algebra of the small elliptic quantum group: monomials
 *        in the generators t_{ab}, coefficient transport, PBW normal
 *        ordering by a terminating rewriting system, the hatted generators,
 *        anti/automorphisms, the eta projection onto the Cartan subalgebra,
 *        the Shapovalov form, and the quantum determinant element.
 *
 * Defining relations (lambda^{(i)}_{ab} = lambda^{(i)}_a - lambda^{(i)}_b):
 *
 *   t_ab f(l1,l2) = f(l1 - g eps_a, l2 - g eps_b) t_ab                   (transport)
 *   t_ab t_ac = t_ac t_ab                                                (same row)
 *   t_ac t_bc = [th(l1_ab+g)/th(l1_ab-g)] t_bc t_ac            (a != b, same col)
 *   [th(l2_bd+g)/th(l2_bd)] t_ab t_cd - [th(l1_ac+g)/th(l1_ac)] t_cd t_ab
 *       = [th(l1_ac+l2_bd) th(g) / (th(l1_ac) th(l2_bd))] t_ad t_cb     (a!=c, b!=d)
 *
 * together with the equivalent companion form
 *
 *   [th(l1_ac-g)/th(l1_ac)] t_ab t_cd - [th(l2_bd-g)/th(l2_bd)] t_cd t_ab
 *       = [th(l1_ac+l2_bd) th(g) / (th(l1_ac) th(l2_bd))] t_cb t_ad.
 *
 * Normal order: t_ab before t_cd iff a-b > c-d, or a-b = c-d and a < c
 * (lowering leftmost, raising rightmost).  Each rewrite strictly decreases
 * the lexicographic grading (r, -r') with r(m) = sum_i i(a_i - b_i) and
 * r'(m) = sum_i i*b_i, so the system terminates; confluence is tested.
 */

#pragma once

#include "ew/coeff.hpp"

namespace ew {

struct Gen {
    int a, b;  // 1-based row/column of t_{ab}
    bool operator==(const Gen& o) const { return a == o.a && b == o.b; }
    bool operator<(const Gen& o) const { return a != o.a ? a < o.a : b < o.b; }
};

using Mono = std::vector<Gen>;

enum class OrderKind { Normal, Row };
enum class Strategy { Leftmost, Rightmost };

/// True iff g1 may stand immediately before g2 (g1 precedes-or-equals g2).
bool pair_ordered(OrderKind kind, const Gen& g1, const Gen& g2);
bool mono_ordered(OrderKind kind, const Mono& m);

Weight zeta1(const Mono& m, int N);  // sum eps_{a_i}
Weight zeta2(const Mono& m, int N);  // sum eps_{b_i}
Weight mono_weight(const Mono& m, int N);  // zeta1 - zeta2

struct AlgebraElement {
    int N = 0;
    std::map<Mono, CoeffExpr> terms;  // coefficient stands to the LEFT of the monomial
};

AlgebraElement ae_zero(int N);
AlgebraElement ae_one(int N);
AlgebraElement ae_gen(int N, int a, int b);
AlgebraElement ae_func(int N, CoeffExpr f);  // coefficient times the unit
AlgebraElement ae_add(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement ae_scale(const CoeffExpr& f, const AlgebraElement& x);  // left multiply

/// Product with exact coefficient transport: moving a coefficient leftward
/// across a monomial m substitutes lambda^{(1)} -> lambda^{(1)} - g zeta1(m)
/// and lambda^{(2)} -> lambda^{(2)} - g zeta2(m).
AlgebraElement mul(const AlgebraElement& x, const AlgebraElement& y);

/// Single local rewrite of the disordered adjacent product t_g1 t_g2 into a
/// combination of length-2 monomials (1 or 2 output terms).
std::vector<std::pair<CoeffExpr, Mono>> swap_rule(OrderKind kind, const Gen& g1,
                                                  const Gen& g2, int N);

/// Repeated local rewriting until every monomial is ordered.  The strategy
/// picks which disordered adjacent pair to rewrite first; all strategies
/// produce the same result (tested property).
AlgebraElement normal_order(const AlgebraElement& x, OrderKind kind = OrderKind::Normal,
                            Strategy strategy = Strategy::Leftmost);

/// Drop terms whose coefficients vanish numerically at sampled points.
AlgebraElement prune_zero_terms(const AlgebraElement& x, const ModularParams& params, Rng& rng);

/// Numeric equality of elements: normal-order both sides, then compare
/// coefficients monomial-by-monomial by randomized sampling.
bool elem_equal(const AlgebraElement& x, const AlgebraElement& y, const ModularParams& params,
                Rng& rng, int n_samples = 8, double tol = 1e-9);
/// Largest coefficient residual |coef_x - coef_y| over sampled points.
double elem_residual(const AlgebraElement& x, const AlgebraElement& y,
                     const ModularParams& params, Rng& rng, int n_samples = 8);

/// Validates every emitted swap rule against the defining relations by
/// numeric residual at sampled points; throws std::logic_error on failure.
void validate_swap_rules(const ModularParams& params, Rng& rng);

// ---------------------------------------------------------------------------
// Hatted generators:  t-hat_ab = prod_{c<a} th(l1_ca) / prod_{c<b} th(l2_cb) * t_ab

CoeffExpr hat_prefactor(int N, int a, int b);
AlgebraElement hat_gen(int N, int a, int b);
/// The product t-hat_{a1b1} ... t-hat_{akbk} as a (single-term) element in
/// the unhatted generators.
AlgebraElement hatted_elem(int N, const Mono& m);

// ---------------------------------------------------------------------------
// Anti/automorphisms

/// Involutive antiautomorphism with pi(t-hat_ab) = t-hat_ba:
/// f(l1,l2) -> f(-l2,-l1) and
/// t_ab -> prod_{c<b} th(l1_cb) th(l1_bc - g) / prod_{c<a} th(l2_ca) th(l2_ac - g) * t_ba.
AlgebraElement pi_antiauto(const AlgebraElement& x);

/// The Cartan-type involutive antiautomorphism
/// f(l1,l2) -> f(-l2,-l1),  t_ab -> prod_{c!=b} th(l1_cb) / prod_{c!=a} th(l2_ca + g) * t_ba.
AlgebraElement cart_antiauto(const AlgebraElement& x);

/// Endomorphisms t_ab -> Q_a(l1) t_ab (side 1) or t_ab -> Q_b(l2) t_ab
/// (side 2) for a multiplicative 1-cocycle Q.
AlgebraElement faut_endo(const AlgebraElement& x, const DynWeightQ& Q, int side);

// ---------------------------------------------------------------------------
// The Cartan quotient e(h) and the Shapovalov form

/// Element of e(h): commuting generators q-hat_a with coefficient transport
/// q-hat_a f(l1,l2) = f(l1 - g eps_a, l2 - g eps_a) q-hat_a.
struct EHElement {
    int N = 0;
    std::map<std::vector<int>, CoeffExpr> terms;  // sorted q-hat index multisets
};

EHElement eh_mul(const EHElement& x, const EHElement& y);
bool eh_equal(const EHElement& x, const EHElement& y, const ModularParams& params,
              Rng& rng, int n_samples = 8, double tol = 1e-9);

/// Projection onto e(h): normal-order, discard monomials containing raising
/// (left ideal) or lowering (right ideal) factors, convert the surviving
/// diagonal monomials to q-hat products.
EHElement eta_project(const AlgebraElement& x);

/// S(x,y) = eta(pi(x) y), valued in e(h).
EHElement shapovalov(const AlgebraElement& x, const AlgebraElement& y);

/// chi_{mu,Q}: f(l1,l2) -> f(l, l - g mu); q-hat_a -> Q_a(l) followed by the
/// shift l -> l - g eps_a.  Returns the one-variable function chi(x) * 1.
CoeffExpr chi_apply(const EHElement& x, const Weight& mu, const DynWeightQ& Q);

// ---------------------------------------------------------------------------
// Quantum determinant and exterior elements

/// Det as an element: Theta(l1)/Theta(l2) * sum_{perm i} sign(i) *
/// prod_a th(u + (a-1)g - l1_a + l2_{i_a}) * t_{N,i_N} ... t_{1,i_1}.
AlgebraElement qdet_element(int N);

/// Rational top exterior element t^{wedge N} = sum_i sign(i) t_{N,i_N}...t_{1,i_1}.
AlgebraElement twedge_element(int N);

/// Signed complementary-minor generators t-bar_ab (rational case):
/// (-1)^{a+b} sum_{j in S_{N-1}} sign(j) t_{i^a_{N-1}, i^b_{j_{N-1}}} ... t_{i^a_1, i^b_{j_1}}
/// with i^a = (1,...,a-1,a+1,...,N).
AlgebraElement tbar_element(int N, int a, int b);

/// All permutations of {0..N-1} with signs.
std::vector<std::pair<std::vector<int>, int>> permutations_with_sign(int N);

}  // namespace ew
