#include "ew/coeff.hpp"

#include <cmath>
#include <functional>

namespace ew {

// ---------------------------------------------------------------------------
// AffineForm

AffineForm AffineForm::lam(int N, int slot, int a) {
    AffineForm f(N);
    (slot == 1 ? f.c1 : f.c2)[a - 1] = Rat(1);
    return f;
}
AffineForm AffineForm::lam_diff(int N, int slot, int a, int b) {
    AffineForm f(N);
    auto& c = (slot == 1 ? f.c1 : f.c2);
    c[a - 1] += Rat(1);
    c[b - 1] -= Rat(1);
    return f;
}
AffineForm AffineForm::gamma_mult(int N, Rat k) {
    AffineForm f(N);
    f.cg = k;
    return f;
}
AffineForm AffineForm::spectral(int N) {
    AffineForm f(N);
    f.cu = Rat(1);
    return f;
}
AffineForm AffineForm::operator+(const AffineForm& o) const {
    AffineForm r = *this;
    for (int i = 0; i < N(); ++i) { r.c1[i] += o.c1[i]; r.c2[i] += o.c2[i]; }
    r.cu += o.cu; r.cg += o.cg; r.c0 += o.c0;
    return r;
}
AffineForm AffineForm::operator-(const AffineForm& o) const { return *this + (-o); }
AffineForm AffineForm::operator-() const {
    AffineForm r = *this;
    for (int i = 0; i < N(); ++i) { r.c1[i] = -r.c1[i]; r.c2[i] = -r.c2[i]; }
    r.cu = -r.cu; r.cg = -r.cg; r.c0 = -r.c0;
    return r;
}

SamplePoint SamplePoint::random(int N, Rng& rng) {
    SamplePoint p;
    p.lam1.resize(N); p.lam2.resize(N);
    for (auto* lam : {&p.lam1, &p.lam2}) {
        Cplx mean(0.0, 0.0);
        for (int i = 0; i < N; ++i) { (*lam)[i] = rng.generic_point(); mean += (*lam)[i]; }
        mean /= static_cast<double>(N);
        for (int i = 0; i < N; ++i) (*lam)[i] -= mean;  // points of h* sum to zero
    }
    p.u = rng.generic_point();
    return p;
}

// ---------------------------------------------------------------------------
// Expression constructors

namespace {
std::shared_ptr<ExprNode> make_node(ExprNode::Kind k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    return n;
}
}  // namespace

CoeffExpr c_const(Cplx v) {
    auto n = make_node(ExprNode::Kind::Const);
    n->cval = v;
    return n;
}
CoeffExpr c_one() {
    static const CoeffExpr one = c_const(Cplx(1.0, 0.0));
    return one;
}
CoeffExpr c_zero() {
    static const CoeffExpr zero = c_const(Cplx(0.0, 0.0));
    return zero;
}
CoeffExpr c_kernel(const AffineForm& f) {
    auto n = make_node(ExprNode::Kind::Kernel);
    n->form = std::make_unique<AffineForm>(f);
    return n;
}
CoeffExpr c_neg(CoeffExpr e) {
    if (e->kind == ExprNode::Kind::Const) return c_const(-e->cval);
    auto n = make_node(ExprNode::Kind::Neg);
    n->kids = {std::move(e)};
    return n;
}
CoeffExpr c_add(CoeffExpr a, CoeffExpr b) {
    if (a->kind == ExprNode::Kind::Const && a->cval == Cplx(0.0, 0.0)) return b;
    if (b->kind == ExprNode::Kind::Const && b->cval == Cplx(0.0, 0.0)) return a;
    auto n = make_node(ExprNode::Kind::Add);
    n->kids = {std::move(a), std::move(b)};
    return n;
}
CoeffExpr c_sub(CoeffExpr a, CoeffExpr b) { return c_add(std::move(a), c_neg(std::move(b))); }
CoeffExpr c_mul(CoeffExpr a, CoeffExpr b) {
    if (a->kind == ExprNode::Kind::Const) {
        if (a->cval == Cplx(1.0, 0.0)) return b;
        if (a->cval == Cplx(0.0, 0.0)) return a;
    }
    if (b->kind == ExprNode::Kind::Const) {
        if (b->cval == Cplx(1.0, 0.0)) return a;
        if (b->cval == Cplx(0.0, 0.0)) return b;
    }
    auto n = make_node(ExprNode::Kind::Mul);
    n->kids = {std::move(a), std::move(b)};
    return n;
}
CoeffExpr c_div(CoeffExpr numer, CoeffExpr denom) {
    if (denom->kind == ExprNode::Kind::Const && denom->cval == Cplx(1.0, 0.0)) return numer;
    auto n = make_node(ExprNode::Kind::Div);
    n->kids = {std::move(numer), std::move(denom)};
    return n;
}
CoeffExpr c_pow(CoeffExpr base, long e) {
    if (e == 1) return base;
    auto n = make_node(ExprNode::Kind::IntPow);
    n->kids = {std::move(base)};
    n->expnt = e;
    return n;
}

// ---------------------------------------------------------------------------
// Evaluation

Cplx ExprEvaluator::eval_form(const AffineForm& f) const {
    Cplx v = f.c0;
    for (int i = 0; i < f.N(); ++i) {
        if (f.c1[i] != Rat(0)) v += to_c(f.c1[i]) * p_.lam1[i];
        if (f.c2[i] != Rat(0)) v += to_c(f.c2[i]) * p_.lam2[i];
    }
    if (f.cu != Rat(0)) v += to_c(f.cu) * p_.u;
    if (f.cg != Rat(0)) v += to_c(f.cg) * params_.gamma;
    return v;
}

Cplx ExprEvaluator::eval(const CoeffExpr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Cplx v;
    switch (e->kind) {
        case ExprNode::Kind::Const: v = e->cval; break;
        case ExprNode::Kind::Kernel: v = kernel_eval(eval_form(*e->form), params_); break;
        case ExprNode::Kind::Neg: v = -eval(e->kids[0]); break;
        case ExprNode::Kind::Add: {
            v = Cplx(0.0, 0.0);
            for (const auto& k : e->kids) v += eval(k);
            break;
        }
        case ExprNode::Kind::Mul: {
            v = Cplx(1.0, 0.0);
            for (const auto& k : e->kids) v *= eval(k);
            break;
        }
        case ExprNode::Kind::Div: {
            Cplx den = eval(e->kids[1]);
            if (std::abs(den) < guard_) throw SingularPoint("denominator below pole guard");
            v = eval(e->kids[0]) / den;
            break;
        }
        case ExprNode::Kind::IntPow: v = std::pow(eval(e->kids[0]), static_cast<double>(e->expnt)); break;
    }
    memo_.emplace(e.get(), v);
    return v;
}

Cplx ExprEvaluator::eval_scaled(const CoeffExpr& e, double& scale) {
    auto it = memo_scaled_.find(e.get());
    if (it != memo_scaled_.end()) {
        scale = it->second.second;
        return it->second.first;
    }
    Cplx v;
    double s = 0.0;
    switch (e->kind) {
        case ExprNode::Kind::Const:
            v = e->cval;
            s = std::abs(v);
            break;
        case ExprNode::Kind::Kernel: {
            Cplx arg = eval_form(*e->form);
            v = kernel_eval(arg, params_);
            // Near a kernel zero the value is far below the series terms
            // that cancelled to produce it; the envelope keeps track.
            s = kernel_scale(arg, params_);
            break;
        }
        case ExprNode::Kind::Neg:
            v = -eval_scaled(e->kids[0], s);
            break;
        case ExprNode::Kind::Add: {
            v = Cplx(0.0, 0.0);
            for (const auto& k : e->kids) {
                double sk = 0.0;
                v += eval_scaled(k, sk);
                s += sk;  // cancellation leaves the error of the large terms
            }
            break;
        }
        case ExprNode::Kind::Mul: {
            v = Cplx(1.0, 0.0);
            s = 0.0;
            for (const auto& k : e->kids) {
                double sk = 0.0;
                Cplx vk = eval_scaled(k, sk);
                s = s * std::abs(vk) + std::abs(v) * sk;
                v *= vk;
            }
            break;
        }
        case ExprNode::Kind::Div: {
            double sn = 0.0, sd = 0.0;
            Cplx num = eval_scaled(e->kids[0], sn);
            Cplx den = eval_scaled(e->kids[1], sd);
            double ad = std::abs(den);
            if (ad < guard_) throw SingularPoint("denominator below pole guard");
            v = num / den;
            s = sn / ad + std::abs(num) * sd / (ad * ad);
            break;
        }
        case ExprNode::Kind::IntPow: {
            double sb = 0.0;
            Cplx base = eval_scaled(e->kids[0], sb);
            double n = static_cast<double>(e->expnt);
            v = std::pow(base, n);
            s = n * std::pow(std::abs(base), n - 1.0) * sb;
            break;
        }
    }
    memo_scaled_.emplace(e.get(), std::make_pair(v, s));
    scale = s;
    return v;
}

Cplx expr_eval(const CoeffExpr& e, const SamplePoint& p, const ModularParams& params,
               double pole_guard) {
    ExprEvaluator ev(p, params, pole_guard);
    return ev.eval(e);
}

// ---------------------------------------------------------------------------
// Structural transforms

namespace {

/// Rebuild a tree applying a map to every affine form, preserving sharing.
CoeffExpr transform(const CoeffExpr& e,
                    const std::function<AffineForm(const AffineForm&)>& fmap,
                    std::unordered_map<const ExprNode*, CoeffExpr>& memo) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    CoeffExpr out;
    switch (e->kind) {
        case ExprNode::Kind::Const: out = e; break;
        case ExprNode::Kind::Kernel: {
            AffineForm mapped = fmap(*e->form);
            out = (mapped == *e->form) ? e : c_kernel(mapped);
            break;
        }
        default: {
            auto n = std::make_shared<ExprNode>();
            n->kind = e->kind;
            n->expnt = e->expnt;
            bool changed = false;
            n->kids.reserve(e->kids.size());
            for (const auto& k : e->kids) {
                CoeffExpr t = transform(k, fmap, memo);
                changed = changed || (t.get() != k.get());
                n->kids.push_back(std::move(t));
            }
            out = changed ? CoeffExpr(n) : e;
            break;
        }
    }
    memo.emplace(e.get(), out);
    return out;
}

CoeffExpr transform(const CoeffExpr& e,
                    const std::function<AffineForm(const AffineForm&)>& fmap) {
    std::unordered_map<const ExprNode*, CoeffExpr> memo;
    return transform(e, fmap, memo);
}

bool weight_is_zero(const Weight& w) {
    for (const auto& c : w.coords)
        if (c != Rat(0)) return false;
    return true;
}

}  // namespace

CoeffExpr expr_shift(const CoeffExpr& e, int slot, const Weight& mu) {
    if (weight_is_zero(mu)) return e;
    return transform(e, [&](const AffineForm& f) {
        AffineForm r = f;
        const auto& c = (slot == 1 ? f.c1 : f.c2);
        for (int i = 0; i < f.N(); ++i) r.cg -= c[i] * mu.coords[i];
        return r;
    });
}

CoeffExpr expr_shift2(const CoeffExpr& e, const Weight& mu1, const Weight& mu2) {
    if (weight_is_zero(mu1) && weight_is_zero(mu2)) return e;
    return transform(e, [&](const AffineForm& f) {
        AffineForm r = f;
        for (int i = 0; i < f.N(); ++i) {
            r.cg -= f.c1[i] * mu1.coords[i];
            r.cg -= f.c2[i] * mu2.coords[i];
        }
        return r;
    });
}

CoeffExpr expr_pi(const CoeffExpr& e) {
    return transform(e, [](const AffineForm& f) {
        AffineForm r = f;
        for (int i = 0; i < f.N(); ++i) {
            r.c1[i] = -f.c2[i];
            r.c2[i] = -f.c1[i];
        }
        return r;
    });
}

CoeffExpr expr_negate_lambda(const CoeffExpr& e) {
    return transform(e, [](const AffineForm& f) {
        AffineForm r = f;
        for (int i = 0; i < f.N(); ++i) r.c1[i] = -f.c1[i];
        return r;
    });
}

CoeffExpr expr_collapse(const CoeffExpr& e, const Weight& nu) {
    return transform(e, [&](const AffineForm& f) {
        AffineForm r = f;
        for (int i = 0; i < f.N(); ++i) {
            r.c1[i] = f.c1[i] + f.c2[i];
            r.cg -= f.c2[i] * nu.coords[i];
            r.c2[i] = Rat(0);
        }
        return r;
    });
}

CoeffExpr expr_collapse_c(const CoeffExpr& e, const std::vector<Cplx>& nu, Cplx gamma) {
    return transform(e, [&](const AffineForm& f) {
        AffineForm r = f;
        for (int i = 0; i < f.N(); ++i) {
            r.c1[i] = f.c1[i] + f.c2[i];
            r.c0 -= gamma * to_d(f.c2[i]) * nu[i];
            r.c2[i] = Rat(0);
        }
        return r;
    });
}

CoeffExpr expr_shift_c(const CoeffExpr& e, const std::vector<Cplx>& nu, Cplx gamma) {
    return transform(e, [&](const AffineForm& f) {
        AffineForm r = f;
        for (int i = 0; i < f.N(); ++i) r.c0 -= gamma * to_d(f.c1[i]) * nu[i];
        return r;
    });
}

CoeffExpr expr_reflect_c(const CoeffExpr& e, const std::vector<Cplx>& nu, Cplx gamma) {
    return transform(e, [&](const AffineForm& f) {
        AffineForm r = f;
        for (int i = 0; i < f.N(); ++i) {
            r.c1[i] = -f.c1[i];
            r.c0 += gamma * to_d(f.c1[i]) * nu[i];
        }
        return r;
    });
}

// ---------------------------------------------------------------------------
// Randomized identity testing

bool expr_equal(const CoeffExpr& e1, const CoeffExpr& e2, const ModularParams& params,
                Rng& rng, int n_samples, double tol) {
    const int retry_cap = 60;
    int done = 0, tries = 0;
    while (done < n_samples) {
        if (++tries > n_samples + retry_cap)
            throw InconclusiveSampling("expr_equal: retry cap exceeded");
        SamplePoint p = SamplePoint::random(params.N, rng);
        try {
            ExprEvaluator ev(p, params);
            Cplx v1 = ev.eval(e1);
            Cplx v2 = ev.eval(e2);
            double scale = 1.0 + std::max(std::abs(v1), std::abs(v2));
            if (std::abs(v1 - v2) > tol * scale) return false;
            ++done;
        } catch (const SingularPoint&) {
            continue;  // resample
        }
    }
    return true;
}

bool expr_is_zero(const CoeffExpr& e, const ModularParams& params, Rng& rng,
                  int n_samples, double tol) {
    int done = 0, tries = 0;
    while (done < n_samples) {
        if (++tries > n_samples + 40) return false;  // give up conservatively: keep the term
        SamplePoint p = SamplePoint::random(params.N, rng);
        try {
            if (std::abs(expr_eval(e, p, params)) > tol) return false;
            ++done;
        } catch (const SingularPoint&) {
            continue;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Dynamical weights

DynWeightQ DynWeightQ::standard(int N) {
    DynWeightQ q;
    q.Q.assign(N, c_one());
    return q;
}

CoeffExpr DynWeightQ::shifted(int a, const Weight& shift) const {
    return expr_shift(Q[a - 1], 1, shift);
}

double cocycle_check(const DynWeightQ& Q, const ModularParams& params, Rng& rng,
                     int n_samples) {
    int N = params.N;
    double worst = 0.0;
    for (int a = 1; a <= N; ++a) {
        for (int b = 1; b <= N; ++b) {
            if (a == b) continue;
            CoeffExpr lhs = c_mul(Q.Q[a - 1], Q.shifted(b, eps(a, N)));
            CoeffExpr rhs = c_mul(Q.shifted(a, eps(b, N)), Q.Q[b - 1]);
            int done = 0, tries = 0;
            while (done < n_samples && tries < n_samples + 40) {
                ++tries;
                SamplePoint p = SamplePoint::random(N, rng);
                try {
                    ExprEvaluator ev(p, params);
                    worst = std::max(worst, std::abs(ev.eval(lhs) - ev.eval(rhs)));
                    ++done;
                } catch (const SingularPoint&) {
                }
            }
        }
    }
    return worst;
}

DynWeightQ cocycle_from_f(int N, const std::function<CoeffExpr(const AffineForm&)>& f) {
    DynWeightQ q;
    for (int a = 1; a <= N; ++a) {
        CoeffExpr numer = c_one(), denom = c_one();
        for (int c = 1; c < a; ++c)
            numer = c_mul(numer, f(AffineForm::lam_diff(N, 1, c, a)));
        for (int c = a + 1; c <= N; ++c)
            denom = c_mul(denom, f(AffineForm::lam_diff(N, 1, a, c).plus_gamma(Rat(-1))));
        q.Q.push_back(c_div(numer, denom));
    }
    return q;
}

DynWeightQ coboundary_from_g(int N, const std::function<CoeffExpr(const AffineForm&)>& g) {
    CoeffExpr G = c_one();
    for (int b = 1; b <= N; ++b)
        for (int c = b + 1; c <= N; ++c)
            G = c_mul(G, g(AffineForm::lam_diff(N, 1, b, c)));
    DynWeightQ q;
    for (int a = 1; a <= N; ++a)
        q.Q.push_back(c_div(expr_shift(G, 1, eps(a, N)), G));
    return q;
}

}  // namespace ew
