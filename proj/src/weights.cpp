#include "ew/weights.hpp"

#include <algorithm>
#include <set>

namespace ew {

Weight Weight::operator+(const Weight& o) const {
    Weight r = *this;
    for (size_t i = 0; i < coords.size(); ++i) r.coords[i] += o.coords[i];
    return r;
}
Weight Weight::operator-(const Weight& o) const {
    Weight r = *this;
    for (size_t i = 0; i < coords.size(); ++i) r.coords[i] -= o.coords[i];
    return r;
}
Weight Weight::operator*(const Rat& s) const {
    Weight r = *this;
    for (auto& c : r.coords) c *= s;
    return r;
}

Weight eps(int a, int N) {
    Weight w = Weight::zero(N);
    for (int i = 0; i < N; ++i) w.coords[i] = Rat(-1, N);
    w.coords[a - 1] += Rat(1);
    return w;
}

Weight alpha(int a, int N) { return eps(a, N) - eps(a + 1, N); }

Weight omega(int a, int N) {
    // omega_a = eps_1 + ... + eps_a
    Weight w = Weight::zero(N);
    for (int i = 1; i <= a; ++i) w = w + eps(i, N);
    return w;
}

Weight rho(int N) {
    Weight w = Weight::zero(N);
    for (int a = 1; a <= N; ++a) w.coords[a - 1] = Rat(N + 1, 2) - Rat(a);
    return w;
}

Rat pairing(const Weight& l, const Weight& m) {
    Rat s(0);
    for (size_t i = 0; i < l.coords.size(); ++i) s += l.coords[i] * m.coords[i];
    return s;
}

Weight shifted_weyl(const std::vector<int>& w, const Weight& l) {
    int N = l.N();
    Weight shifted = l + rho(N);
    Weight out = Weight::zero(N);
    for (int i = 0; i < N; ++i) out.coords[w[i]] = shifted.coords[i];
    return out - rho(N);
}

bool dominant_integral(const Weight& mu) {
    for (int a = 1; a < mu.N(); ++a) {
        Rat d = mu.diff(a, a + 1);
        if (d < Rat(0) || d.denominator() != 1) return false;
    }
    return true;
}

bool dominates(const Weight& lambda, const Weight& mu) {
    // lambda - mu = sum c_a alpha_a with c_a the partial coordinate sums.
    Rat partial(0);
    for (int a = 0; a < lambda.N() - 1; ++a) {
        partial += lambda.coords[a] - mu.coords[a];
        if (partial < Rat(0) || partial.denominator() != 1) return false;
    }
    partial += lambda.coords[lambda.N() - 1] - mu.coords[lambda.N() - 1];
    return partial == Rat(0);
}

namespace {

/// Height of lambda - mu, i.e. the sum of its simple-root coefficients.
/// Only meaningful when dominates(lambda, mu) holds.
long drop_height(const Weight& lambda, const Weight& mu) {
    Rat h(0), partial(0);
    for (int a = 0; a < lambda.N() - 1; ++a) {
        partial += lambda.coords[a] - mu.coords[a];
        h += partial;
    }
    return static_cast<long>(h.numerator() / h.denominator());
}

Weight dominant_rep(const Weight& nu) {
    Weight d = nu;
    std::sort(d.coords.begin(), d.coords.end(),
              [](const Rat& x, const Rat& y) { return y < x; });
    return d;
}

}  // namespace

FreudenthalOracle::FreudenthalOracle(const Weight& mu) : mu_(mu), N_(mu.N()) {
    if (!dominant_integral(mu)) throw NotDominant("Freudenthal oracle needs a dominant integral weight");
    memo_[mu_] = 1;
}

long FreudenthalOracle::dominant_mult(const Weight& nu) {
    auto it = memo_.find(nu);
    if (it != memo_.end()) return it->second;
    if (!dominates(mu_, nu)) return memo_[nu] = 0;
    // Freudenthal numerator: 2 sum_{alpha>0} sum_{k>=1} m(nu+k*alpha)(nu+k*alpha, alpha).
    Rat numer(0);
    long kmax = drop_height(mu_, nu);
    for (int a = 1; a <= N_; ++a) {
        for (int b = a + 1; b <= N_; ++b) {
            Weight al = eps(a, N_) - eps(b, N_);
            for (long k = 1; k <= kmax; ++k) {
                Weight up = nu + al * Rat(k);
                long m = multiplicity(up);
                if (m != 0) numer += Rat(2 * m) * pairing(up, al);
            }
        }
    }
    Weight r = rho(N_);
    Rat denom = pairing(mu_ + r, mu_ + r) - pairing(nu + r, nu + r);
    if (denom == Rat(0)) return memo_[nu] = 0;  // cannot happen for dominant nu < mu
    Rat m = numer / denom;
    return memo_[nu] = static_cast<long>(m.numerator() / m.denominator());
}

long FreudenthalOracle::multiplicity(const Weight& nu) {
    return dominant_mult(dominant_rep(nu));
}

long FreudenthalOracle::total_dim() {
    long H = drop_height(mu_, -dominant_rep(-mu_));  // height down to the lowest weight
    long total = 0;
    std::set<Weight> seen;
    for (const Weight& beta : weight_drops(N_, static_cast<int>(H))) {
        Weight nu = mu_ - beta;
        if (!seen.insert(nu).second) continue;
        total += multiplicity(nu);
    }
    return total;
}

std::vector<Weight> weight_drops(int N, int depth) {
    std::vector<Weight> out;
    std::vector<int> c(N - 1, 0);
    // Enumerate all (c_1..c_{N-1}) with sum <= depth.
    while (true) {
        int sum = 0;
        for (int x : c) sum += x;
        if (sum <= depth) {
            Weight beta = Weight::zero(N);
            for (int a = 1; a < N; ++a) beta = beta + alpha(a, N) * Rat(c[a - 1]);
            out.push_back(beta);
        }
        int i = 0;
        for (; i < N - 1; ++i) {
            if (++c[i] <= depth) break;
            c[i] = 0;
        }
        if (i == N - 1) break;
    }
    return out;
}

}  // namespace ew
