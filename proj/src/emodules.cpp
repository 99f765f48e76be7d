#include "ew/emodules.hpp"

#include <algorithm>

namespace ew {

namespace {

constexpr double kGuard = 1e-8;

Cplx th(Cplx z, const ModularParams& params) { return kernel_eval(z, params); }

Cplx th_inv(Cplx z, const ModularParams& params) {
    Cplx v = th(z, params);
    if (std::abs(v) < kGuard) throw SingularPoint("kernel zero in module coefficient");
    return 1.0 / v;
}

VectorXcd shift_unit(const VectorXcd& lam, int a /*1-based*/, Cplx gamma) {
    VectorXcd out = lam;
    out[a - 1] -= gamma;
    return out;
}

VectorXcd shift_glweight(const VectorXcd& lam, const GlWeight& w, Cplx gamma) {
    VectorXcd out = lam;
    for (size_t i = 0; i < w.size(); ++i) out[i] -= gamma * to_d(w[i]);
    return out;
}

std::vector<Cplx> to_cvec(const Weight& w) {
    std::vector<Cplx> out(w.N());
    for (int i = 0; i < w.N(); ++i) out[i] = to_d(w.coords[i]);
    return out;
}

std::vector<Cplx> add_cvec(const std::vector<Cplx>& a, const Weight& w) {
    std::vector<Cplx> out = a;
    for (size_t i = 0; i < out.size(); ++i) out[i] += to_d(w.coords[i]);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Finite-dimensional modules

SmallModule vector_rep(const ModularParams& params) {
    SmallModule M;
    M.N = params.N;
    M.dim = params.N;
    for (int a = 1; a <= params.N; ++a) {
        GlWeight w(params.N, Rat(0));
        w[a - 1] = Rat(1);
        M.wts.push_back(w);
    }
    ModularParams p = params;
    M.ell = [p](int a, int b, const VectorXcd& lam) {
        int N = p.N;
        MatrixXcd m = MatrixXcd::Zero(N, N);
        if (a == b) {
            m(a - 1, a - 1) = 1.0;
            for (int j = 1; j <= N; ++j) {
                if (j == a) continue;
                Cplx lab = lam[a - 1] - lam[j - 1];
                m(j - 1, j - 1) = th(lab + p.gamma, p) * th_inv(lab, p);
            }
        } else {
            Cplx lab = lam[a - 1] - lam[b - 1];
            m(a - 1, b - 1) = th(p.gamma, p) * th_inv(lab, p);
        }
        return m;
    };
    return M;
}

BigModule eval_module(const SmallModule& M, Cplx x, const ModularParams& params) {
    BigModule B;
    B.N = M.N;
    B.dim = M.dim;
    B.wts = M.wts;
    ModularParams p = params;
    SmallModule Mc = M;
    B.L = [Mc, x, p](int a, int b, Cplx u, const VectorXcd& lam) {
        MatrixXcd base = Mc.ell(b, a, lam);
        Cplx norm = th_inv(u - x - p.gamma, p);
        for (int i = 0; i < Mc.dim; ++i) {
            Cplx arg = u - x - lam[b - 1] + lam[a - 1] - p.gamma * to_d(Mc.wts[i][a - 1]);
            Cplx factor = th(arg, p) * norm;
            base.row(i) *= factor;
        }
        return base;
    };
    return B;
}

MatrixXcd big_L_matrix(const BigModule& V, Cplx u, const VectorXcd& lam) {
    int N = V.N, d = V.dim;
    MatrixXcd out = MatrixXcd::Zero(N * d, N * d);
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b)
            out.block((a - 1) * d, (b - 1) * d, d, d) = V.L(a, b, u, lam);
    return out;
}

BigModule tensor_big(const BigModule& V, const BigModule& W, const ModularParams& params) {
    BigModule B;
    B.N = V.N;
    B.dim = V.dim * W.dim;
    for (int i = 0; i < V.dim; ++i)
        for (int j = 0; j < W.dim; ++j) {
            GlWeight w = V.wts[i];
            for (int k = 0; k < B.N; ++k) w[k] = w[k] + W.wts[j][k];
            B.wts.push_back(w);
        }
    BigModule Vc = V, Wc = W;
    ModularParams p = params;
    B.L = [Vc, Wc, p](int a, int b, Cplx u, const VectorXcd& lam) {
        int dv = Vc.dim, dw = Wc.dim;
        MatrixXcd out = MatrixXcd::Zero(dv * dw, dv * dw);
        for (int c = 1; c <= Vc.N; ++c) {
            MatrixXcd WL = Wc.L(c, b, u, lam);
            // V-factor argument shifted by the weight of the outgoing
            // W-component (the right factor acts first).
            std::map<GlWeight, MatrixXcd> shifted;
            for (int j = 0; j < dw; ++j) {
                if (!shifted.count(Wc.wts[j]))
                    shifted[Wc.wts[j]] = Vc.L(a, c, u, shift_glweight(lam, Wc.wts[j], p.gamma));
            }
            for (int j = 0; j < dw; ++j) {
                const MatrixXcd& VL = shifted[Wc.wts[j]];
                for (int l = 0; l < dw; ++l) {
                    if (WL(j, l) == Cplx(0.0, 0.0)) continue;
                    for (int i = 0; i < dv; ++i)
                        for (int k = 0; k < dv; ++k)
                            out(i * dw + j, k * dw + l) += VL(i, k) * WL(j, l);
                }
            }
        }
        return out;
    };
    return B;
}

// ---------------------------------------------------------------------------
// Difference operators

OpFun bigT_on_leg(const BigModule& V, int n_aux, int leg, Cplx u, const ModularParams& params) {
    BigModule Vc = V;
    ModularParams p = params;
    return [Vc, n_aux, leg, u, p](const VecFun& v) -> VecFun {
        return [Vc, n_aux, leg, u, p, v](const VectorXcd& lam) -> VectorXcd {
            int N = Vc.N, d = Vc.dim;
            long aux_dim = 1;
            for (int i = 0; i < n_aux; ++i) aux_dim *= N;
            long stride_leg = 1;
            for (int i = leg + 1; i < n_aux; ++i) stride_leg *= N;
            VectorXcd out = VectorXcd::Zero(aux_dim * d);
            std::vector<VectorXcd> vb(N);
            for (int b = 1; b <= N; ++b) vb[b - 1] = v(shift_unit(lam, b, p.gamma));
            std::vector<MatrixXcd> L(N * N);
            for (int a = 1; a <= N; ++a)
                for (int b = 1; b <= N; ++b) L[(a - 1) * N + b - 1] = Vc.L(a, b, u, lam);
            for (long alpha = 0; alpha < aux_dim; ++alpha) {
                int a = static_cast<int>((alpha / stride_leg) % N) + 1;
                for (int b = 1; b <= N; ++b) {
                    long beta = alpha + static_cast<long>(b - a) * stride_leg;
                    const MatrixXcd& Lab = L[(a - 1) * N + b - 1];
                    const VectorXcd& w = vb[b - 1];
                    for (int i = 0; i < d; ++i) {
                        Cplx acc(0.0, 0.0);
                        for (int j = 0; j < d; ++j) acc += Lab(i, j) * w[beta * d + j];
                        out[alpha * d + i] += acc;
                    }
                }
            }
            return out;
        };
    };
}

OpFun auxR_on_legs(const BigModule& V, int n_aux, int li, int lj, Cplx u,
                   bool shift_by_module, const ModularParams& params) {
    BigModule Vc = V;
    ModularParams p = params;
    return [Vc, n_aux, li, lj, u, shift_by_module, p](const VecFun& v) -> VecFun {
        return [Vc, n_aux, li, lj, u, shift_by_module, p, v](const VectorXcd& lam) -> VectorXcd {
            int N = Vc.N, d = Vc.dim;
            long aux_dim = 1;
            for (int i = 0; i < n_aux; ++i) aux_dim *= N;
            long si = 1, sj = 1;
            for (int i = li + 1; i < n_aux; ++i) si *= N;
            for (int i = lj + 1; i < n_aux; ++i) sj *= N;
            std::map<GlWeight, MatrixXcd> Rs;
            MatrixXcd Rplain;
            if (shift_by_module) {
                for (int k = 0; k < d; ++k)
                    if (!Rs.count(Vc.wts[k]))
                        Rs[Vc.wts[k]] = Rmat(u, shift_glweight(lam, Vc.wts[k], p.gamma), p);
            } else {
                Rplain = Rmat(u, lam, p);
            }
            VectorXcd in = v(lam);
            VectorXcd out = VectorXcd::Zero(aux_dim * d);
            for (long col = 0; col < aux_dim; ++col) {
                int c = static_cast<int>((col / si) % N);
                int e = static_cast<int>((col / sj) % N);
                for (int k = 0; k < d; ++k) {
                    const MatrixXcd& R = shift_by_module ? Rs[Vc.wts[k]] : Rplain;
                    Cplx val = in[col * d + k];
                    if (val == Cplx(0.0, 0.0)) continue;
                    for (int a = 0; a < N; ++a)
                        for (int b = 0; b < N; ++b) {
                            Cplx r = R(a * N + b, c * N + e);
                            if (r == Cplx(0.0, 0.0)) continue;
                            long row = col + static_cast<long>(a - c) * si +
                                       static_cast<long>(b - e) * sj;
                            out[row * d + k] += r * val;
                        }
                }
            }
            return out;
        };
    };
}

namespace {

/// T_ab(u) on Fun(V) alone.
OpFun bigT_plain(const BigModule& V, int a, int b, Cplx u, const ModularParams& params) {
    BigModule Vc = V;
    ModularParams p = params;
    return [Vc, a, b, u, p](const VecFun& v) -> VecFun {
        return [Vc, a, b, u, p, v](const VectorXcd& lam) -> VectorXcd {
            MatrixXcd L = Vc.L(a, b, u, lam);
            return L * v(shift_unit(lam, b, p.gamma));
        };
    };
}

}  // namespace

OpFun bigDetT(const BigModule& V, Cplx u, const ModularParams& params) {
    BigModule Vc = V;
    ModularParams p = params;
    auto perms = permutations_with_sign(V.N);
    return [Vc, u, p, perms](const VecFun& v) -> VecFun {
        return [Vc, u, p, perms, v](const VectorXcd& lam) -> VectorXcd {
            int N = Vc.N;
            VectorXcd total = VectorXcd::Zero(Vc.dim);
            for (const auto& [perm, sign] : perms) {
                VecFun cur = v;
                for (int a = 1; a <= N; ++a)
                    cur = bigT_plain(Vc, perm[a - 1] + 1, a, u + double(a - 1) * p.gamma, p)(cur);
                total += double(sign) * cur(lam);
            }
            // Prefactor Theta(lambda)/Theta(lambda - g h) per component.
            for (int i = 0; i < Vc.dim; ++i) {
                Cplx f(1.0, 0.0);
                for (int a = 1; a <= N; ++a)
                    for (int b = a + 1; b <= N; ++b) {
                        Cplx lab = lam[a - 1] - lam[b - 1];
                        Cplx drop = p.gamma * to_d(Vc.wts[i][a - 1] - Vc.wts[i][b - 1]);
                        f *= th(lab, p) * th_inv(lab - drop, p);
                    }
                total[i] *= f;
            }
            return total;
        };
    };
}

OpFun small_op_gen(const SmallModule& M, int a, int b, const ModularParams& params) {
    SmallModule Mc = M;
    ModularParams p = params;
    return [Mc, a, b, p](const VecFun& v) -> VecFun {
        return [Mc, a, b, p, v](const VectorXcd& lam) -> VectorXcd {
            return Mc.ell(a, b, lam) * v(shift_unit(lam, a, p.gamma));
        };
    };
}

VecFun act_small(const SmallModule& M, const AlgebraElement& x, const VecFun& v,
                 const ModularParams& params) {
    SmallModule Mc = M;
    ModularParams p = params;
    std::vector<std::pair<CoeffExpr, VecFun>> parts;
    for (const auto& [mono, f] : x.terms) {
        VecFun cur = v;
        for (auto it = mono.rbegin(); it != mono.rend(); ++it)
            cur = small_op_gen(M, it->a, it->b, params)(cur);
        parts.emplace_back(f, cur);
    }
    return [Mc, p, parts](const VectorXcd& lam) -> VectorXcd {
        VectorXcd out = VectorXcd::Zero(Mc.dim);
        for (const auto& [f, w] : parts) {
            VectorXcd val = w(lam);
            for (int i = 0; i < Mc.dim; ++i) {
                SamplePoint sp;
                sp.lam1.resize(Mc.N);
                sp.lam2.resize(Mc.N);
                for (int k = 0; k < Mc.N; ++k) {
                    sp.lam1[k] = lam[k];
                    sp.lam2[k] = lam[k] - p.gamma * to_d(Mc.wts[i][k]);
                }
                out[i] += expr_eval(f, sp, p) * val[i];
            }
        }
        return out;
    };
}

namespace {

CoeffExpr rel_th1(int N, int a, int b, Rat g = Rat(0)) {
    return c_kernel(AffineForm::lam_diff(N, 1, a, b).plus_gamma(g));
}
CoeffExpr rel_th2(int N, int a, int b, Rat g = Rat(0)) {
    return c_kernel(AffineForm::lam_diff(N, 2, a, b).plus_gamma(g));
}

}  // namespace

double small_relations_residual(const SmallModule& M, const ModularParams& params, Rng& rng,
                                int n_samples) {
    int N = M.N;
    std::vector<AlgebraElement> rels;
    auto tt = [&](int a, int b, int c, int d) {
        return mul(ae_gen(N, a, b), ae_gen(N, c, d));
    };
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b)
            for (int c = 1; c <= N; ++c)
                for (int d = 1; d <= N; ++d) {
                    if (a == c && b < d) {  // same row commute
                        rels.push_back(ae_add(tt(a, b, a, d), ae_scale(c_const(-1.0), tt(a, d, a, b))));
                    } else if (b == d && a != c) {  // same column
                        AlgebraElement r = tt(a, b, c, b);
                        CoeffExpr q = c_div(rel_th1(N, a, c, Rat(1)), rel_th1(N, a, c, Rat(-1)));
                        rels.push_back(ae_add(r, ae_scale(c_neg(q), tt(c, b, a, b))));
                    } else if (a != c && b != d) {
                        CoeffExpr s1 = c_div(rel_th2(N, b, d, Rat(1)), rel_th2(N, b, d));
                        CoeffExpr s2 = c_div(rel_th1(N, a, c, Rat(1)), rel_th1(N, a, c));
                        CoeffExpr s3 = c_div(
                            c_mul(c_kernel(AffineForm::lam_diff(N, 1, a, c) +
                                           AffineForm::lam_diff(N, 2, b, d)),
                                  c_kernel(AffineForm::gamma_mult(N, Rat(1)))),
                            c_mul(rel_th1(N, a, c), rel_th2(N, b, d)));
                        AlgebraElement r = ae_scale(s1, tt(a, b, c, d));
                        r = ae_add(r, ae_scale(c_neg(s2), tt(c, d, a, b)));
                        r = ae_add(r, ae_scale(c_neg(s3), tt(a, d, c, b)));
                        rels.push_back(r);
                    }
                }
    double worst = 0.0;
    int done = 0, tries = 0;
    while (done < n_samples && tries < n_samples + 60) {
        ++tries;
        try {
            SamplePoint sp = SamplePoint::random(N, rng);
            VectorXcd lam(N);
            for (int i = 0; i < N; ++i) lam[i] = sp.lam1[i];
            VecFun f = random_vecfun(M.dim, N, rng);
            double local = 0.0;
            for (const auto& r : rels) {
                VectorXcd val = act_small(M, r, f, params)(lam);
                local = std::max(local, val.cwiseAbs().maxCoeff());
            }
            worst = std::max(worst, local);
            ++done;
        } catch (const SingularPoint&) {
        }
    }
    if (done == 0) throw InconclusiveSampling("small_relations_residual: no usable samples");
    return worst;
}

double check_small_morphism(const SmallModule& V, const SmallModule& W, const MatFun& phi,
                            const ModularParams& params, Rng& rng, int n_samples) {
    int N = V.N;
    double worst = 0.0;
    int done = 0, tries = 0;
    while (done < n_samples && tries < n_samples + 60) {
        ++tries;
        try {
            VectorXcd lam(N);
            if (params.kernel == KernelKind::Rational) {
                for (int i = 0; i < N; ++i)
                    lam[i] = Cplx(2.7 * (N - 1 - i) + rng.uniform(0.35, 1.25),
                                  rng.uniform(-0.6, 0.6));
            } else {
                SamplePoint sp = SamplePoint::random(N, rng);
                for (int i = 0; i < N; ++i) lam[i] = sp.lam1[i];
            }
            for (int a = 1; a <= N; ++a)
                for (int b = 1; b <= N; ++b) {
                    MatrixXcd lhs = phi(lam) * V.ell(a, b, lam);
                    MatrixXcd rhs = W.ell(a, b, lam) * phi(shift_unit(lam, a, params.gamma));
                    double scale = 1.0 + std::max(lhs.cwiseAbs().maxCoeff(),
                                                  rhs.cwiseAbs().maxCoeff());
                    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
                }
            ++done;
        } catch (const SingularPoint&) {
        } catch (const ResonantPoint&) {
        }
    }
    if (done == 0) throw InconclusiveSampling("check_small_morphism: no usable sample points");
    return worst;
}

MatrixXcd antisym_projector(int N, int k) {
    long dim = 1;
    for (int i = 0; i < k; ++i) dim *= N;
    MatrixXcd A = MatrixXcd::Zero(dim, dim);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    for (long col = 0; col < dim; ++col) {
        std::vector<int> digits(k);
        long t = col;
        for (int i = k - 1; i >= 0; --i) { digits[i] = static_cast<int>(t % N); t /= N; }
        for (const auto& [perm, sign] : permutations_with_sign(k)) {
            long row = 0;
            for (int i = 0; i < k; ++i) row = row * N + digits[perm[i]];
            A(row, col) += double(sign) / fact;
        }
    }
    return A;
}

OpFun wedge_T(const BigModule& V, int k, Cplx u, const ModularParams& params) {
    BigModule Vc = V;
    ModularParams p = params;
    MatrixXcd A = antisym_projector(V.N, k);
    return [Vc, k, u, p, A](const VecFun& v) -> VecFun {
        VecFun cur = v;
        for (int j = 1; j <= k; ++j)
            cur = bigT_on_leg(Vc, k, j - 1, u + double(j - 1) * p.gamma, p)(cur);
        return [A, cur, d = Vc.dim](const VectorXcd& lam) -> VectorXcd {
            VectorXcd w = cur(lam);
            long aux = A.rows();
            VectorXcd out = VectorXcd::Zero(aux * d);
            for (long r = 0; r < aux; ++r)
                for (long c = 0; c < aux; ++c) {
                    if (A(r, c) == Cplx(0.0, 0.0)) continue;
                    for (int i = 0; i < d; ++i) out[r * d + i] += A(r, c) * w[c * d + i];
                }
            return out;
        };
    };
}

MatrixXcd wedge_top_matrix(const BigModule& V, Cplx u, const VectorXcd& lam,
                           const ModularParams& params) {
    const int N = V.N, d = V.dim;
    long aux = 1;
    for (int i = 0; i < N; ++i) aux *= N;
    const auto perms = permutations_with_sign(N);
    double fact = 1.0;
    for (int i = 2; i <= N; ++i) fact *= i;
    OpFun W = wedge_T(V, N, u, params);
    MatrixXcd M(d, d);
    for (int j = 0; j < d; ++j) {
        VectorXcd base = VectorXcd::Zero(aux * d);
        for (const auto& [perm, sign] : perms) {
            long idx = 0;
            for (int i = 0; i < N; ++i) idx = idx * N + perm[i];
            base[idx * d + j] = double(sign);
        }
        VecFun f = [base](const VectorXcd&) { return base; };
        VectorXcd out = W(f)(lam);
        for (int i = 0; i < d; ++i) {
            Cplx acc = 0.0;
            for (const auto& [perm, sign] : perms) {
                long idx = 0;
                for (int k = 0; k < N; ++k) idx = idx * N + perm[k];
                acc += double(sign) * out[idx * d + i];
            }
            M(i, j) = acc / fact;
        }
    }
    return M;
}

VecFun random_vecfun(int m, int N, Rng& rng) {
    MatrixXcd C(m, N);
    VectorXcd d0(m);
    for (int i = 0; i < m; ++i) {
        d0[i] = Cplx(rng.uniform(0.3, 1.0), rng.uniform(-0.5, 0.5));
        for (int k = 0; k < N; ++k)
            C(i, k) = Cplx(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
    }
    return [C, d0, m, N](const VectorXcd& lam) -> VectorXcd {
        VectorXcd out(m);
        for (int i = 0; i < m; ++i) {
            Cplx e(0.0, 0.0);
            for (int k = 0; k < N; ++k) e += C(i, k) * lam[k];
            out[i] = d0[i] * std::exp(e);
        }
        return out;
    };
}

double check_rtt(const BigModule& V, const ModularParams& params, Rng& rng, int n_samples) {
    int N = V.N;
    double worst = 0.0;
    int done = 0, tries = 0;
    while (done < n_samples && tries < n_samples + 60) {
        ++tries;
        try {
            SamplePoint sp = SamplePoint::random(N, rng);
            VectorXcd lam(N);
            for (int i = 0; i < N; ++i) lam[i] = sp.lam1[i];
            Cplx u = rng.generic_point(), vpar = rng.generic_point();
            VecFun f = random_vecfun(N * N * V.dim, N, rng);
            OpFun T13u = bigT_on_leg(V, 2, 0, u, params);
            OpFun T23v = bigT_on_leg(V, 2, 1, vpar, params);
            VecFun lhs = auxR_on_legs(V, 2, 0, 1, u - vpar, true, params)(T13u(T23v(f)));
            VecFun rhs = T23v(T13u(auxR_on_legs(V, 2, 0, 1, u - vpar, false, params)(f)));
            VectorXcd dl = lhs(lam), dr = rhs(lam);
            double scale = 1.0 + std::max(dl.cwiseAbs().maxCoeff(), dr.cwiseAbs().maxCoeff());
            worst = std::max(worst, (dl - dr).cwiseAbs().maxCoeff() / scale);
            ++done;
        } catch (const SingularPoint&) {
        }
    }
    if (done == 0) throw InconclusiveSampling("check_rtt: no usable sample points");
    return worst;
}

double check_big_morphism(const BigModule& V, const BigModule& W, const MatFun& phi,
                          const ModularParams& params, Rng& rng, int n_samples) {
    int N = V.N;
    double worst = 0.0;
    int done = 0, tries = 0;
    while (done < n_samples && tries < n_samples + 60) {
        ++tries;
        try {
            SamplePoint sp = SamplePoint::random(N, rng);
            VectorXcd lam(N);
            for (int i = 0; i < N; ++i) lam[i] = sp.lam1[i];
            Cplx u = rng.generic_point();
            VecFun f = random_vecfun(V.dim, N, rng);
            for (int a = 1; a <= N; ++a) {
                for (int b = 1; b <= N; ++b) {
                    // T^W_ab (Phi f) at lam
                    VectorXcd lhs = W.L(a, b, u, lam) *
                                    (phi(shift_unit(lam, b, params.gamma)) *
                                     f(shift_unit(lam, b, params.gamma)));
                    VectorXcd rhs = phi(lam) * (V.L(a, b, u, lam) * f(shift_unit(lam, b, params.gamma)));
                    double scale = 1.0 + std::max(lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff());
                    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
                }
            }
            ++done;
        } catch (const SingularPoint&) {
        }
    }
    if (done == 0) throw InconclusiveSampling("check_big_morphism: no usable sample points");
    return worst;
}

// ---------------------------------------------------------------------------
// Verma modules

std::vector<Mono> lowering_monomials(int N, const Weight& drop) {
    std::vector<Gen> gens;
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b)
            if (a > b) gens.push_back(Gen{a, b});
    std::sort(gens.begin(), gens.end(), [](const Gen& x, const Gen& y) {
        if (x.a - x.b != y.a - y.b) return x.a - x.b > y.a - y.b;
        return x.a < y.a;
    });
    // rem is a valid remainder iff it is a nonnegative integer combination of
    // simple roots, i.e. all partial coordinate sums are nonnegative integers.
    auto valid = [N](const Weight& rem) {
        Rat partial(0);
        for (int i = 0; i < N; ++i) {
            partial += rem.coords[i];
            if (partial < Rat(0)) return false;
            if (partial.denominator() != 1) return false;
        }
        return true;
    };
    std::vector<Mono> out;
    if (!valid(drop)) return out;
    Mono cur;
    std::function<void(size_t, Weight)> rec = [&](size_t gi, Weight rem) {
        bool zero = true;
        for (const auto& c : rem.coords)
            if (c != Rat(0)) { zero = false; break; }
        if (zero) {
            out.push_back(cur);
            return;  // every generator adds a positive root
        }
        if (gi == gens.size()) return;
        rec(gi + 1, rem);  // multiplicity 0
        Gen g = gens[gi];
        Weight root = eps(g.b, N) - eps(g.a, N);  // positive root consumed per copy
        for (int k = 1;; ++k) {
            Weight r = rem - root * Rat(k);
            if (!valid(r)) break;
            for (int j = 0; j < k; ++j) cur.push_back(g);
            rec(gi + 1, r);
            for (int j = 0; j < k; ++j) cur.pop_back();
        }
    };
    rec(0, drop);
    return out;
}

int mono_height(const Mono& m) {
    int h = 0;
    for (const Gen& g : m) h += g.a - g.b;
    return h;
}

VermaModule::VermaModule(const ModularParams& params, std::vector<Cplx> mu, DynWeightQ Q,
                         int depth)
    : params_(params), mu_(std::move(mu)), Q_(std::move(Q)), depth_(depth) {
    if (static_cast<int>(mu_.size()) != params_.N) throw ConfigError("mu size mismatch");
}

std::vector<Cplx> VermaModule::weight_coords(const Weight& mu) { return to_cvec(mu); }

FunElement VermaModule::vacuum() const {
    FunElement w{params_.N, {}};
    w.terms[Mono{}] = c_one();
    return w;
}

FunElement VermaModule::act_gen_one(int a, int b, const Mono& m, const CoeffExpr& g,
                                    bool hatted) const {
    int N = params_.N;
    AlgebraElement X = hatted ? hat_gen(N, a, b) : ae_gen(N, a, b);
    X = mul(X, ae_func(N, g));
    X = mul(X, hatted_elem(N, m));
    AlgebraElement z = normal_order(X);
    FunElement out{N, {}};
    for (const auto& [n, f] : z.terms) {
        Mono n_low, n_diag;
        bool raising = false;
        for (const Gen& gg : n) {
            if (gg.a > gg.b) n_low.push_back(gg);
            else if (gg.a == gg.b) n_diag.push_back(gg);
            else { raising = true; break; }
        }
        if (raising) continue;
        if (mono_height(n_low) > depth_)
            throw DepthExceeded("Verma action: monomial leaves the depth truncation");
        // Diagonal part on the highest weight vector.
        CoeffExpr conv = c_one();
        Weight acc = Weight::zero(N);
        for (const Gen& gg : n_diag) {
            conv = c_mul(conv, expr_shift2(c_div(c_one(), hat_prefactor(N, gg.a, gg.a)), acc, acc));
            acc = acc + eps(gg.a, N);
        }
        CoeffExpr phi = expr_collapse_c(conv, mu_, params_.gamma);
        Weight qacc = Weight::zero(N);
        for (const Gen& gg : n_diag) {
            phi = c_mul(phi, Q_.shifted(gg.a, qacc));
            qacc = qacc + eps(gg.a, N);
        }
        // Collapse the outer coefficient and the hatted-basis conversion at
        // the weight of the resulting vector.
        Weight wt = mono_weight(n_low, N);
        std::vector<Cplx> nu_out = add_cvec(mu_, wt);
        AlgebraElement hb = hatted_elem(N, n_low);
        CoeffExpr Chat = hb.terms.begin()->second;
        CoeffExpr coeff = c_mul(expr_collapse_c(f, nu_out, params_.gamma),
                                expr_collapse_c(c_div(c_one(), Chat), nu_out, params_.gamma));
        coeff = c_mul(coeff, expr_shift(phi, 1, zeta1(n_low, N)));
        auto it = out.terms.find(n_low);
        if (it == out.terms.end()) out.terms[n_low] = coeff;
        else it->second = c_add(it->second, coeff);
    }
    return out;
}

FunElement VermaModule::act_gen(int a, int b, const FunElement& w, bool hatted) const {
    FunElement out{params_.N, {}};
    for (const auto& [m, g] : w.terms) {
        FunElement part = act_gen_one(a, b, m, g, hatted);
        for (const auto& [n, f] : part.terms) {
            auto it = out.terms.find(n);
            if (it == out.terms.end()) out.terms[n] = f;
            else it->second = c_add(it->second, f);
        }
    }
    return out;
}

FunElement VermaModule::act_elem(const AlgebraElement& x, const FunElement& w) const {
    FunElement out{params_.N, {}};
    for (const auto& [mono, f] : x.terms) {
        FunElement cur = w;
        for (auto it = mono.rbegin(); it != mono.rend(); ++it)
            cur = act_gen(it->a, it->b, cur, false);
        for (const auto& [n, g] : cur.terms) {
            Weight wt = mono_weight(n, params_.N);
            CoeffExpr fc = expr_collapse_c(f, add_cvec(mu_, wt), params_.gamma);
            CoeffExpr add = c_mul(fc, g);
            auto it2 = out.terms.find(n);
            if (it2 == out.terms.end()) out.terms[n] = add;
            else it2->second = c_add(it2->second, add);
        }
    }
    return out;
}

FunElement VermaModule::mono_apply(const Mono& m) const {
    FunElement w = vacuum();
    for (auto it = m.rbegin(); it != m.rend(); ++it) w = act_gen(it->a, it->b, w, true);
    return w;
}

CoeffExpr VermaModule::pairing(const Mono& m, const FunElement& w) const {
    FunElement cur = w;
    for (const Gen& g : m) cur = act_gen(g.b, g.a, cur, true);
    auto it = cur.terms.find(Mono{});
    return it == cur.terms.end() ? c_zero() : it->second;
}

std::vector<Mono> VermaModule::weight_basis(const Weight& drop) const {
    return lowering_monomials(params_.N, drop);
}

MatrixXcd VermaModule::gram_matrix(const Weight& drop, const VectorXcd& lam0,
                                   Eigen::MatrixXd* noise) const {
    std::vector<Mono> basis = weight_basis(drop);
    int n = static_cast<int>(basis.size());
    MatrixXcd A(n, n);
    if (noise) noise->setZero(n, n);
    SamplePoint p;
    p.lam1.assign(params_.N, Cplx(0.0, 0.0));
    p.lam2.assign(params_.N, Cplx(0.0, 0.0));
    for (int i = 0; i < params_.N; ++i) p.lam1[i] = lam0[i];
    std::vector<FunElement> cols;
    cols.reserve(n);
    for (int j = 0; j < n; ++j) cols.push_back(mono_apply(basis[j]));
    // Build every entry before evaluating: the evaluator memoizes by node
    // address, so all trees must stay alive while it runs.
    std::vector<CoeffExpr> entries;
    entries.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        Weight sh = -zeta2(basis[i], params_.N);  // evaluate at lambda + g zeta(m_i)
        for (int j = 0; j < n; ++j)
            entries.push_back(expr_shift(pairing(basis[i], cols[j]), 1, sh));
    }
    ExprEvaluator ev(p, params_);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double scale = 0.0;
            A(i, j) = ev.eval_scaled(entries[static_cast<std::size_t>(i) * n + j], scale);
            // 1e-15 covers roundoff plus the relative accuracy of the
            // kernel series itself.
            if (noise) (*noise)(i, j) = 1e-15 * scale;
        }
    }
    return A;
}

CoeffExpr VermaModule::contravariant(const Mono& m1, const Mono& m2) const {
    CoeffExpr s = pairing(m2, mono_apply(m1));
    return expr_shift(s, 1, -zeta2(m2, params_.N));
}

double fun_residual(const FunElement& x, const FunElement& y, const ModularParams& params,
                    Rng& rng, int n_samples) {
    std::vector<std::pair<CoeffExpr, CoeffExpr>> pairs;
    for (const auto& [m, f] : x.terms) {
        auto it = y.terms.find(m);
        pairs.emplace_back(f, it == y.terms.end() ? c_zero() : it->second);
    }
    for (const auto& [m, g] : y.terms)
        if (!x.terms.count(m)) pairs.emplace_back(c_zero(), g);
    double worst = 0.0;
    int done = 0, tries = 0;
    while (done < n_samples && tries < n_samples + 60) {
        ++tries;
        SamplePoint p = SamplePoint::random(params.N, rng);
        try {
            ExprEvaluator ev(p, params);
            double local = 0.0;
            for (const auto& [f, g] : pairs) {
                Cplx v1 = ev.eval(f), v2 = ev.eval(g);
                double scale = 1.0 + std::max(std::abs(v1), std::abs(v2));
                local = std::max(local, std::abs(v1 - v2) / scale);
            }
            worst = std::max(worst, local);
            ++done;
        } catch (const SingularPoint&) {
        }
    }
    if (done == 0) throw InconclusiveSampling("fun_residual: no usable sample points");
    return worst;
}

long numeric_rank(const MatrixXcd& A, double rel_threshold) {
    if (A.rows() == 0 || A.cols() == 0) return 0;
    Eigen::JacobiSVD<MatrixXcd> svd(A);
    auto sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    double top = sv[0];
    if (top == 0.0) return 0;
    // Floor the cutoff at the threshold itself so that a matrix whose entries
    // are all numerically zero reports rank 0 instead of scaling the cutoff
    // down with its own noise.
    double cut = rel_threshold * std::max(top, 1.0);
    long r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++r;
    return r;
}

long numeric_rank(const MatrixXcd& A, const Eigen::MatrixXd& noise, double rel_threshold) {
    if (A.rows() == 0 || A.cols() == 0) return 0;
    Eigen::JacobiSVD<MatrixXcd> svd(A);
    auto sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    double top = sv[0];
    if (top == 0.0) return 0;
    // A perturbation of A bounded entrywise by the noise matrix moves every
    // singular value by at most its Frobenius norm; singular values inside a
    // small multiple of that band carry no information.
    double cut = std::max(rel_threshold * top, 100.0 * noise.norm());
    long r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++r;
    return r;
}

namespace {

// Sample points for rank decisions keep the imaginary parts small: theta
// magnitudes then stay moderate, so analytically zero Gram entries sit many
// orders of magnitude below generic ones and the rank cutoff is unambiguous.
VectorXcd random_lam0(int N, Rng& rng) {
    VectorXcd lam(N);
    Cplx mean(0.0, 0.0);
    for (int i = 0; i < N; ++i) {
        lam[i] = Cplx(rng.uniform(-0.45, 0.45), rng.uniform(-0.04, 0.04));
        mean += lam[i];
    }
    mean /= double(N);
    for (int i = 0; i < N; ++i) lam[i] -= mean;
    return lam;
}

}  // namespace

std::map<Weight, long> irr_dims(const VermaModule& M, int depth, Rng& rng) {
    std::map<Weight, long> out;
    int N = M.params().N;
    for (const Weight& drop : weight_drops(N, depth)) {
        std::vector<Mono> basis = M.weight_basis(drop);
        if (basis.empty()) continue;
        long r1 = -1, r2 = -2;
        for (int attempt = 0; attempt < 4 && r1 != r2; ++attempt) {
            try {
                Eigen::MatrixXd noise;
                MatrixXcd A1 = M.gram_matrix(drop, random_lam0(N, rng), &noise);
                r1 = numeric_rank(A1, noise);
                MatrixXcd A2 = M.gram_matrix(drop, random_lam0(N, rng), &noise);
                r2 = numeric_rank(A2, noise);
            } catch (const SingularPoint&) {
                r1 = -1;
                r2 = -2;
            }
        }
        if (r1 != r2) throw RankUnstable("irr_dims: Gram rank differs between sample points");
        out[drop] = r1;
    }
    return out;
}

long singular_count(const VermaModule& M, const Weight& drop, Rng& rng) {
    int N = M.params().N;
    std::vector<Mono> basis = M.weight_basis(drop);
    if (basis.empty()) return 0;
    int d = static_cast<int>(basis.size());
    std::vector<std::vector<Mono>> targets;
    std::vector<std::vector<FunElement>> acts(N - 1);
    for (int a = 1; a < N; ++a) {
        for (int j = 0; j < d; ++j) acts[a - 1].push_back(M.act_gen(a, a + 1, M.mono_apply(basis[j])));
        targets.push_back(lowering_monomials(N, drop - alpha(a, N)));
    }
    auto build = [&](const VectorXcd& lam0) {
        SamplePoint p;
        p.lam1.assign(N, Cplx(0.0, 0.0));
        p.lam2.assign(N, Cplx(0.0, 0.0));
        for (int i = 0; i < N; ++i) p.lam1[i] = lam0[i];
        long rows = 0;
        for (auto& t : targets) rows += static_cast<long>(t.size());
        MatrixXcd A = MatrixXcd::Zero(std::max<long>(rows, 1), d);
        long r0 = 0;
        for (int a = 1; a < N; ++a) {
            const auto& tgt = targets[a - 1];
            for (int j = 0; j < d; ++j) {
                const FunElement& w = acts[a - 1][j];
                for (size_t t = 0; t < tgt.size(); ++t) {
                    auto it = w.terms.find(tgt[t]);
                    if (it != w.terms.end()) A(r0 + static_cast<long>(t), j) = expr_eval(it->second, p, M.params());
                }
            }
            r0 += static_cast<long>(tgt.size());
        }
        return static_cast<long>(d) - numeric_rank(A);
    };
    long n1 = -1, n2 = -2;
    for (int attempt = 0; attempt < 4 && n1 != n2; ++attempt) {
        try {
            n1 = build(random_lam0(N, rng));
            n2 = build(random_lam0(N, rng));
        } catch (const SingularPoint&) {
            n1 = -1;
            n2 = -2;
        }
    }
    if (n1 != n2) throw RankUnstable("singular_count: nullity differs between sample points");
    return n1;
}

DynWeightQ dual_Q(const DynWeightQ& Q, const std::vector<Cplx>& mu, const ModularParams& params) {
    int N = static_cast<int>(Q.Q.size());
    DynWeightQ out;
    for (int a = 1; a <= N; ++a) {
        std::vector<Cplx> nu = mu;
        Weight e = eps(a, N);
        for (int i = 0; i < N; ++i) nu[i] += to_d(e.coords[i]);
        out.Q.push_back(expr_reflect_c(Q.Q[a - 1], nu, params.gamma));
    }
    return out;
}

double qdet_action_check(const VermaModule& M, const Mono& m, Rng& rng, int n_samples) {
    int N = M.params().N;
    FunElement w = M.mono_apply(m);
    FunElement lhs = M.act_elem(qdet_element(N), w);
    // Central scalar: prod_a th(u - g(mu_a - a + 1)) * prod_a Q_a(l - g sum_{b>a} eps_b).
    CoeffExpr s = c_one();
    for (int a = 1; a <= N; ++a) {
        AffineForm f = AffineForm::spectral(N).plus_gamma(Rat(a - 1));
        f.c0 -= M.params().gamma * M.mu()[a - 1];
        s = c_mul(s, c_kernel(f));
        Weight sh = Weight::zero(N);
        for (int b = a + 1; b <= N; ++b) sh = sh + eps(b, N);
        s = c_mul(s, M.Q().shifted(a, sh));
    }
    FunElement rhs{N, {}};
    for (const auto& [bm, f] : w.terms)
        rhs.terms[bm] = c_mul(expr_shift(s, 1, zeta1(bm, N)), f);
    return fun_residual(lhs, rhs, M.params(), rng, n_samples);
}

}  // namespace ew
