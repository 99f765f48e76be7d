#include "ew/fusion.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

#include "ew/algebra.hpp"

namespace ew {

namespace {

MatrixXcd kron(const MatrixXcd& A, const MatrixXcd& B) {
    MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (long i = 0; i < A.rows(); ++i)
        for (long j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

VectorXcd minus_weight(const VectorXcd& lam, const Weight& nu) {
    VectorXcd out = lam;
    for (int a = 0; a < static_cast<int>(nu.coords.size()); ++a) out[a] -= to_c(nu.coords[a]);
    return out;
}

VectorXcd minus_glweight(const VectorXcd& lam, const GlWeight& nu) {
    VectorXcd out = lam;
    for (int a = 0; a < static_cast<int>(nu.size()); ++a) out[a] -= to_c(nu[a]);
    return out;
}

/// lambda - e_a with the unit coordinate vector (1-based a).
VectorXcd minus_unit(const VectorXcd& lam, int a) {
    VectorXcd out = lam;
    out[a - 1] -= 1.0;
    return out;
}

/// Well-separated generic complex coordinates for rational-kernel sampling.
VectorXcd random_lam(int N, Rng& rng) {
    VectorXcd lam(N);
    for (int a = 0; a < N; ++a)
        lam[a] = Cplx(2.7 * (N - 1 - a) + rng.uniform(0.35, 1.25), rng.uniform(-0.6, 0.6));
    return lam;
}

double rel_err(const VectorXcd& x, const VectorXcd& y) {
    double scale = std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
    return (x - y).cwiseAbs().maxCoeff() / scale;
}

double rel_err_mat(const MatrixXcd& x, const MatrixXcd& y) {
    double scale = std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
    return (x - y).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// sl_N-modules

SlnModule sln_vector_rep(int N) {
    SlnModule U;
    U.N = N;
    U.dim = N;
    for (int a = 1; a <= N; ++a) U.wts.push_back(eps(a, N));
    U.e.resize(N * N);
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b) {
            MatrixXcd E = MatrixXcd::Zero(N, N);
            E(a - 1, b - 1) = 1.0;
            U.e[(a - 1) * N + (b - 1)] = E;
        }
    return U;
}

SlnModule sln_tensor(const SlnModule& V, const SlnModule& W) {
    SlnModule T;
    T.N = V.N;
    T.dim = V.dim * W.dim;
    for (int i = 0; i < V.dim; ++i)
        for (int j = 0; j < W.dim; ++j) T.wts.push_back(V.wts[i] + W.wts[j]);
    const MatrixXcd Iv = MatrixXcd::Identity(V.dim, V.dim);
    const MatrixXcd Iw = MatrixXcd::Identity(W.dim, W.dim);
    T.e.resize(T.N * T.N);
    for (int a = 1; a <= T.N; ++a)
        for (int b = 1; b <= T.N; ++b)
            T.e[(a - 1) * T.N + (b - 1)] = kron(V.E(a, b), Iw) + kron(Iv, W.E(a, b));
    return T;
}

double sln_relations_residual(const SlnModule& V) {
    const int N = V.N;
    double worst = 0.0;
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b)
            for (int c = 1; c <= N; ++c)
                for (int d = 1; d <= N; ++d) {
                    MatrixXcd comm = V.E(a, b) * V.E(c, d) - V.E(c, d) * V.E(a, b);
                    if (b == c) comm -= V.E(a, d);
                    if (a == d) comm += V.E(c, b);
                    worst = std::max(worst, comm.cwiseAbs().maxCoeff());
                }
    // weight grading: e_ab maps V[nu] into V[nu + eps_a - eps_b]
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b) {
            const MatrixXcd& E = V.E(a, b);
            for (int i = 0; i < V.dim; ++i)
                for (int j = 0; j < V.dim; ++j) {
                    if (std::abs(E(i, j)) < 1e-14) continue;
                    if (!(V.wts[i] == V.wts[j] + eps(a, N) - eps(b, N)))
                        worst = std::max(worst, std::abs(E(i, j)));
                }
        }
    return worst;
}

Rat xi_scalar(const Weight& nu) {
    Rat s(0);
    Rat tr(0);
    for (const Rat& c : nu.coords) {
        s += c * c;
        tr += c;
    }
    const int N = nu.N();
    return s / 2 - tr * tr / (2 * N);
}

MatrixXcd xi_matrix(const SlnModule& V) {
    MatrixXcd X = MatrixXcd::Zero(V.dim, V.dim);
    for (int a = 1; a <= V.N; ++a) X += 0.5 * (V.E(a, a) * V.E(a, a));
    MatrixXcd tr = MatrixXcd::Zero(V.dim, V.dim);
    for (int a = 1; a <= V.N; ++a) tr += V.E(a, a);
    X -= (1.0 / (2.0 * V.N)) * (tr * tr);
    return X;
}

Cplx weight_pair(const VectorXcd& lam0, const Weight& nu) {
    Cplx s = 0.0;
    for (int a = 0; a < nu.N(); ++a) s += lam0[a] * to_c(nu.coords[a]);
    return s;
}

// ---------------------------------------------------------------------------
// Fusion and exchange matrices

FusionMatrix fusion_J(const SlnModule& V, const SlnModule& W, const VectorXcd& lam0,
                      double guard) {
    const int n = V.dim * W.dim;
    std::vector<Cplx> d(n);
    for (int i = 0; i < V.dim; ++i)
        for (int j = 0; j < W.dim; ++j)
            d[i * W.dim + j] = weight_pair(lam0, W.wts[j]) - to_c(xi_scalar(W.wts[j]));

    MatrixXcd K = MatrixXcd::Zero(n, n);
    for (int a = 1; a <= V.N; ++a)
        for (int b = a + 1; b <= V.N; ++b) K += kron(V.E(a, b), W.E(b, a));

    MatrixXcd J = MatrixXcd::Identity(n, n);
    const int maxit = n + 2;
    for (int it = 0; it < maxit; ++it) {
        const MatrixXcd X = K * J;
        MatrixXcd Jn = MatrixXcd::Identity(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                if (r == c || std::abs(X(r, c)) < 1e-300) continue;
                const Cplx den = d[c] - d[r];
                if (std::abs(den) < guard) {
                    if (std::abs(X(r, c)) > 1e-10 * (1.0 + X.norm()))
                        throw ResonantPoint("fusion denominator collapsed at the chosen point");
                    continue;
                }
                Jn(r, c) += X(r, c) / den;
            }
        const double delta = (Jn - J).norm();
        J = Jn;
        if (delta < 1e-13 * (1.0 + J.norm())) return FusionMatrix{lam0, J};
    }
    throw ResonantPoint("fusion fixed point failed to stabilize");
}

ExchangeMatrix exchange_R(const SlnModule& V, const SlnModule& W, const VectorXcd& lam0,
                          double guard) {
    const MatrixXcd Jvw = fusion_J(V, W, lam0, guard).J;
    const MatrixXcd Jwv = fusion_J(W, V, lam0, guard).J;
    const int dv = V.dim, dw = W.dim;
    MatrixXcd J21(dv * dw, dv * dw);
    for (int i = 0; i < dv; ++i)
        for (int j = 0; j < dw; ++j)
            for (int k = 0; k < dv; ++k)
                for (int l = 0; l < dw; ++l)
                    J21(i * dw + j, k * dw + l) = Jwv(j * dv + i, l * dv + k);
    return ExchangeMatrix{lam0, Jvw.partialPivLu().solve(J21)};
}

MatrixXcd ratR_UU(int N, const VectorXcd& lam) {
    MatrixXcd R = MatrixXcd::Identity(N * N, N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            if (a == b) continue;
            const Cplx lab = lam[a] - lam[b];
            if (a < b) R(a * N + b, a * N + b) -= 1.0 / (lab * lab);
            R(a * N + b, b * N + a) -= 1.0 / lab;
        }
    return R;
}

MatrixXcd ratRtilde_UU(int N, const VectorXcd& lam) {
    MatrixXcd R = MatrixXcd::Identity(N * N, N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            if (a == b) continue;
            const Cplx lab = lam[a] - lam[b] - Cplx(a - b, 0.0);
            if (a < b) R(b * N + a, b * N + a) -= 1.0 / (lab * lab);
            R(a * N + b, b * N + a) -= 1.0 / lab;
        }
    return R;
}

MatrixXcd longest_X(int N) {
    MatrixXcd X = MatrixXcd::Zero(N, N);
    for (int a = 0; a < N; ++a) X(a, N - 1 - a) = (a % 2 == 0) ? 1.0 : -1.0;
    return X;
}

VectorXcd wX_coords(const VectorXcd& lam) {
    VectorXcd out(lam.size());
    for (long a = 0; a < lam.size(); ++a) out[a] = lam[lam.size() - 1 - a];
    return out;
}

VectorXcd rho_coords(int N) {
    VectorXcd out(N);
    for (int a = 0; a < N; ++a) out[a] = Cplx((N + 1) / 2.0 - (a + 1), 0.0);
    return out;
}

MatrixXcd exchange_Rtilde(const SlnModule& V, const SlnModule& W, const MatrixXcd& Xv,
                          const MatrixXcd& Xw, const VectorXcd& lam, double guard) {
    const VectorXcd lamt = wX_coords(lam + rho_coords(V.N));
    const MatrixXcd R = exchange_R(V, W, lamt, guard).R;
    const MatrixXcd XX = kron(Xv, Xw);
    return XX * R * XX.partialPivLu().solve(MatrixXcd::Identity(XX.rows(), XX.cols()));
}

double check_J_cocycle(const SlnModule& U, const SlnModule& V, const SlnModule& W,
                       const VectorXcd& lam0) {
    const SlnModule UV = sln_tensor(U, V);
    const SlnModule VW = sln_tensor(V, W);
    const int du = U.dim, dv = V.dim, dw = W.dim, n = du * dv * dw;

    const MatrixXcd Jl = fusion_J(UV, W, lam0).J;
    const MatrixXcd Jr = fusion_J(U, VW, lam0).J;
    const MatrixXcd Jvw = fusion_J(V, W, lam0).J;

    // J_UV(lam0 - h3) block-diagonal over the third leg
    std::map<Weight, MatrixXcd> shifted;
    MatrixXcd M1 = MatrixXcd::Zero(n, n);
    for (int k = 0; k < dw; ++k) {
        auto it = shifted.find(W.wts[k]);
        if (it == shifted.end())
            it = shifted.emplace(W.wts[k], fusion_J(U, V, minus_weight(lam0, W.wts[k])).J).first;
        const MatrixXcd& Juv = it->second;
        for (int r = 0; r < du * dv; ++r)
            for (int c = 0; c < du * dv; ++c) M1(r * dw + k, c * dw + k) = Juv(r, c);
    }

    const MatrixXcd lhs = Jl * M1;
    const MatrixXcd rhs = Jr * kron(MatrixXcd::Identity(du, du), Jvw);
    return rel_err_mat(lhs, rhs);
}

namespace {

/// Embed a two-leg matrix R(arg) acting on legs (p,q) of V1 (x) V2 (x) V3,
/// with arg = lam shifted by the spectator weight when shift_spectator.
MatrixXcd embed_R(const SlnModule& V1, const SlnModule& V2, const SlnModule& V3, int p, int q,
                  const std::function<MatrixXcd(const VectorXcd&)>& Rf, const VectorXcd& lam,
                  bool shift_spectator) {
    const SlnModule* mods[3] = {&V1, &V2, &V3};
    const int d1 = V1.dim, d2 = V2.dim, d3 = V3.dim, n = d1 * d2 * d3;
    const int r = 6 - p - q;  // spectator leg
    const SlnModule& Vs = *mods[r - 1];

    std::map<Weight, MatrixXcd> cache;
    MatrixXcd out = MatrixXcd::Zero(n, n);
    const int dp = mods[p - 1]->dim, dq = mods[q - 1]->dim;
    for (int k = 0; k < Vs.dim; ++k) {
        auto it = cache.find(Vs.wts[k]);
        if (it == cache.end()) {
            const VectorXcd arg = shift_spectator ? minus_weight(lam, Vs.wts[k]) : lam;
            it = cache.emplace(Vs.wts[k], Rf(arg)).first;
        }
        const MatrixXcd& R = it->second;
        for (int ip = 0; ip < dp; ++ip)
            for (int iq = 0; iq < dq; ++iq)
                for (int jp = 0; jp < dp; ++jp)
                    for (int jq = 0; jq < dq; ++jq) {
                        int row[3], col[3];
                        row[p - 1] = ip; row[q - 1] = iq; row[r - 1] = k;
                        col[p - 1] = jp; col[q - 1] = jq; col[r - 1] = k;
                        const int ri = (row[0] * d2 + row[1]) * d3 + row[2];
                        const int ci = (col[0] * d2 + col[1]) * d3 + col[2];
                        out(ri, ci) += R(ip * dq + iq, jp * dq + jq);
                    }
    }
    return out;
}

}  // namespace

double check_exchange_dyb(const SlnModule& V1, const SlnModule& V2, const SlnModule& V3,
                          const VectorXcd& lam0) {
    auto Rf = [](const SlnModule& A, const SlnModule& B) {
        return [&A, &B](const VectorXcd& l) { return exchange_R(A, B, l).R; };
    };
    const auto R12 = Rf(V1, V2), R13 = Rf(V1, V3), R23 = Rf(V2, V3);
    const MatrixXcd lhs = embed_R(V1, V2, V3, 1, 2, R12, lam0, true) *
                          embed_R(V1, V2, V3, 1, 3, R13, lam0, false) *
                          embed_R(V1, V2, V3, 2, 3, R23, lam0, true);
    const MatrixXcd rhs = embed_R(V1, V2, V3, 2, 3, R23, lam0, false) *
                          embed_R(V1, V2, V3, 1, 3, R13, lam0, true) *
                          embed_R(V1, V2, V3, 1, 2, R12, lam0, false);
    return rel_err_mat(lhs, rhs);
}

// ---------------------------------------------------------------------------
// The functor to rational dynamical modules

MatrixXcd ellhat_matrix(const SlnModule& V, int a, int b, const VectorXcd& lam, double guard) {
    const SlnModule U = sln_vector_rep(V.N);
    const MatrixXcd R = exchange_R(U, V, lam, guard).R;
    const int dv = V.dim;
    MatrixXcd out(dv, dv);
    for (int i = 0; i < dv; ++i)
        for (int j = 0; j < dv; ++j) out(i, j) = R((b - 1) * dv + i, (a - 1) * dv + j);
    return out;
}

SmallModule functor_E(const SlnModule& V, double guard) {
    SmallModule M;
    M.N = V.N;
    M.dim = V.dim;
    for (const Weight& w : V.wts) M.wts.push_back(w.coords);
    auto Vp = std::make_shared<SlnModule>(V);
    auto U = std::make_shared<SlnModule>(sln_vector_rep(V.N));
    auto cache = std::make_shared<std::map<std::vector<double>, MatrixXcd>>();
    M.ell = [Vp, U, cache, guard](int a, int b, const VectorXcd& lam) {
        std::vector<double> key;
        for (long k = 0; k < lam.size(); ++k) {
            key.push_back(lam[k].real());
            key.push_back(lam[k].imag());
        }
        auto it = cache->find(key);
        if (it == cache->end()) it = cache->emplace(key, exchange_R(*U, *Vp, lam, guard).R).first;
        const MatrixXcd& R = it->second;
        const int dv = Vp->dim;
        MatrixXcd out(dv, dv);
        Cplx inv_pref = 1.0;
        for (int c = 1; c < a; ++c) {
            const Cplx lca = lam[c - 1] - lam[a - 1];
            if (std::abs(lca) < guard) throw SingularPoint("ell prefactor pole");
            inv_pref /= lca;
        }
        for (int i = 0; i < dv; ++i) {
            Cplx row_pref = inv_pref;
            for (int c = 1; c < b; ++c)
                row_pref *= lam[c - 1] - lam[b - 1] -
                            to_c(Vp->wts[i].coords[c - 1] - Vp->wts[i].coords[b - 1]);
            for (int j = 0; j < dv; ++j)
                out(i, j) = row_pref * R((b - 1) * dv + i, (a - 1) * dv + j);
        }
        return out;
    };
    return M;
}

SmallModule rational_tensor(const SmallModule& V, const SmallModule& W) {
    SmallModule T;
    T.N = V.N;
    T.dim = V.dim * W.dim;
    for (int i = 0; i < V.dim; ++i)
        for (int j = 0; j < W.dim; ++j) {
            GlWeight w = V.wts[i];
            for (int a = 0; a < T.N; ++a) w[a] += W.wts[j][a];
            T.wts.push_back(w);
        }
    auto Vp = std::make_shared<SmallModule>(V);
    auto Wp = std::make_shared<SmallModule>(W);
    T.ell = [Vp, Wp](int a, int b, const VectorXcd& lam) {
        const int dv = Vp->dim, dw = Wp->dim, N = Vp->N;
        MatrixXcd out = MatrixXcd::Zero(dv * dw, dv * dw);
        for (int c = 1; c <= N; ++c) {
            const MatrixXcd WL = Wp->ell(a, c, lam);
            std::map<GlWeight, MatrixXcd> vcache;
            for (int j = 0; j < dw; ++j) {
                auto it = vcache.find(Wp->wts[j]);
                if (it == vcache.end())
                    it = vcache.emplace(Wp->wts[j],
                                        Vp->ell(c, b, minus_glweight(lam, Wp->wts[j]))).first;
                const MatrixXcd& VL = it->second;
                for (int i = 0; i < dv; ++i)
                    for (int k = 0; k < dv; ++k)
                        for (int l = 0; l < dw; ++l)
                            out(i * dw + j, k * dw + l) += VL(i, k) * WL(j, l);
            }
        }
        return out;
    };
    return T;
}

double check_semistandard(const SmallModule& V, Rng& rng, int n_samples) {
    const int N = V.N, dim = V.dim;
    const auto perms = permutations_with_sign(N);
    double worst = 0.0;
    int done = 0, attempts = 0;
    while (done < n_samples && attempts < n_samples + 40) {
        ++attempts;
        try {
            const VectorXcd lam = random_lam(N, rng);
            VecFun f = random_vecfun(dim, N, rng);
            VectorXcd acc = VectorXcd::Zero(dim);
            for (const auto& [perm, sign] : perms) {
                // t_{N, i_N} ... t_{1, i_1} f with permuted column indices,
                // rightmost factor first
                VecFun g = f;
                for (int a = 1; a <= N; ++a) {
                    const int row = a;
                    const int col = perm[a - 1] + 1;  // i_a
                    VecFun prev = g;
                    SmallModule Vc = V;
                    g = [Vc, row, col, prev](const VectorXcd& l) -> VectorXcd {
                        return Vc.ell(row, col, l) * prev(minus_unit(l, row));
                    };
                }
                acc += static_cast<double>(sign) * g(lam);
            }
            // the determinant acts as the scalar difference operator
            // prod_{a<b} lam2_ab / lam_ab times the total shift by (1,..,1)
            for (int m = 0; m < dim; ++m) {
                Cplx pref = 1.0;
                const VectorXcd lam2 = minus_glweight(lam, V.wts[m]);
                for (int a = 0; a < N; ++a)
                    for (int b = a + 1; b < N; ++b)
                        pref *= (lam[a] - lam[b]) / (lam2[a] - lam2[b]);
                acc[m] *= pref;
            }
            VectorXcd shifted = lam;
            for (int a = 0; a < N; ++a) shifted[a] -= 1.0;
            worst = std::max(worst, rel_err(acc, f(shifted)));
            ++done;
        } catch (const SingularPoint&) {
        } catch (const ResonantPoint&) {
        }
    }
    if (done < n_samples) throw InconclusiveSampling("semistandard check ran out of samples");
    return worst;
}

// ---------------------------------------------------------------------------
// B_X(lambda)

MatrixXcd gab_series(const SlnModule& V, int a, int b, const VectorXcd& lam, double guard) {
    const int d = V.dim;
    MatrixXcd G = MatrixXcd::Identity(d, d);
    MatrixXcd up_k = MatrixXcd::Identity(d, d);    // e_ab^k
    MatrixXcd down_k = MatrixXcd::Identity(d, d);  // e_ba^k
    const Cplx lab = lam[a - 1] - lam[b - 1];
    for (int k = 1; k <= d; ++k) {
        up_k = V.E(a, b) * up_k;
        if (up_k.cwiseAbs().maxCoeff() < 1e-300) break;
        down_k = V.E(b, a) * down_k;
        const MatrixXcd P = down_k * up_k;
        for (int j = 0; j < d; ++j) {
            if (P.col(j).cwiseAbs().maxCoeff() < 1e-300) continue;
            Cplx fac = 1.0;
            for (int m = 1; m <= k; ++m) {
                const Cplx den = static_cast<double>(m) *
                                 (lab - to_c(V.wts[j].coords[a - 1] - V.wts[j].coords[b - 1]) -
                                  static_cast<double>(m));
                if (std::abs(den) < guard)
                    throw ResonantPoint("B_X series denominator collapsed");
                fac /= den;
            }
            G.col(j) += fac * P.col(j);
        }
    }
    return G;
}

MatrixXcd bx_matrix(const SlnModule& V, const VectorXcd& lam, double guard) {
    MatrixXcd B = MatrixXcd::Identity(V.dim, V.dim);
    for (int a = 1; a <= V.N; ++a)
        for (int b = a + 1; b <= V.N; ++b) B = B * gab_series(V, a, b, lam, guard);
    return B;
}

// ---------------------------------------------------------------------------
// Exchange-group L-operators

RationalLRep L_from_small(const SmallModule& V) {
    RationalLRep L;
    L.N = V.N;
    L.dim = V.dim;
    L.wts = V.wts;
    auto Vp = std::make_shared<SmallModule>(V);
    L.L = [Vp](int a, int b, const VectorXcd& lam) {
        const int N = Vp->N, d = Vp->dim;
        const VectorXcd lr = lam + rho_coords(N);
        MatrixXcd out = Vp->ell(b, a, lr);
        Cplx num = 1.0;
        for (int c = 1; c < b; ++c) num *= lr[c - 1] - lr[b - 1] + 1.0;
        for (int i = 0; i < d; ++i) {
            Cplx den = 1.0;
            for (int c = 1; c < a; ++c)
                den *= lr[c - 1] - lr[a - 1] +
                       to_c(Vp->wts[i][a - 1] - Vp->wts[i][c - 1]) + 1.0;
            if (std::abs(den) < 1e-12) throw SingularPoint("L translation pole");
            out.row(i) *= num / den;
        }
        return out;
    };
    return L;
}

SmallModule small_from_L(const RationalLRep& V) {
    SmallModule M;
    M.N = V.N;
    M.dim = V.dim;
    M.wts = V.wts;
    auto Vp = std::make_shared<RationalLRep>(V);
    M.ell = [Vp](int a, int b, const VectorXcd& lam) {
        const int d = Vp->dim;
        const VectorXcd lr = lam - rho_coords(Vp->N);
        MatrixXcd out = Vp->L(b, a, lr);
        Cplx inv = 1.0;
        for (int c = 1; c < a; ++c) {
            const Cplx den = lam[c - 1] - lam[a - 1] + 1.0;
            if (std::abs(den) < 1e-12) throw SingularPoint("t translation pole");
            inv /= den;
        }
        for (int i = 0; i < d; ++i) {
            Cplx row = inv;
            for (int c = 1; c < b; ++c)
                row *= lam[c - 1] - lam[b - 1] +
                       to_c(Vp->wts[i][b - 1] - Vp->wts[i][c - 1]) + 1.0;
            out.row(i) *= row;
        }
        return out;
    };
    return M;
}

RationalLRep L_from_Rtilde(const SlnModule& V, const MatrixXcd& Xv, double guard) {
    RationalLRep L;
    L.N = V.N;
    L.dim = V.dim;
    for (const Weight& w : V.wts) L.wts.push_back(w.coords);
    auto Vp = std::make_shared<SlnModule>(V);
    auto U = std::make_shared<SlnModule>(sln_vector_rep(V.N));
    auto Xu = std::make_shared<MatrixXcd>(longest_X(V.N));
    auto Xvp = std::make_shared<MatrixXcd>(Xv);
    auto cache = std::make_shared<std::map<std::vector<double>, MatrixXcd>>();
    L.L = [Vp, U, Xu, Xvp, cache, guard](int a, int b, const VectorXcd& lam) {
        std::vector<double> key;
        for (long k = 0; k < lam.size(); ++k) {
            key.push_back(lam[k].real());
            key.push_back(lam[k].imag());
        }
        auto it = cache->find(key);
        if (it == cache->end())
            it = cache->emplace(key, exchange_Rtilde(*U, *Vp, *Xu, *Xvp, lam, guard)).first;
        const MatrixXcd& Rt = it->second;
        const int dv = Vp->dim;
        MatrixXcd out(dv, dv);
        for (int i = 0; i < dv; ++i)
            for (int j = 0; j < dv; ++j) out(i, j) = Rt((a - 1) * dv + i, (b - 1) * dv + j);
        return out;
    };
    return L;
}

namespace {

/// Values live in C^N (x) C^N (x) V with index ((a1,a2),m) = (a1*N + a2)*dim + m.
using BigVecFun = VecFun;

BigVecFun Lleg(const RationalLRep& V, int leg, const BigVecFun& f) {
    auto Vp = std::make_shared<RationalLRep>(V);
    return [Vp, leg, f](const VectorXcd& lam) -> VectorXcd {
        const int N = Vp->N, d = Vp->dim;
        std::vector<VectorXcd> fb(N + 1);
        for (int b = 1; b <= N; ++b) fb[b] = f(minus_unit(lam, b));
        VectorXcd out = VectorXcd::Zero(N * N * d);
        for (int a = 1; a <= N; ++a)
            for (int b = 1; b <= N; ++b) {
                const MatrixXcd L = Vp->L(a, b, lam);
                for (int other = 0; other < N; ++other)
                    for (int i = 0; i < d; ++i)
                        for (int j = 0; j < d; ++j) {
                            const int ro = (leg == 1) ? ((a - 1) * N + other) * d + i
                                                      : (other * N + (a - 1)) * d + i;
                            const int ci = (leg == 1) ? ((b - 1) * N + other) * d + j
                                                      : (other * N + (b - 1)) * d + j;
                            out[ro] += L(i, j) * fb[b][ci];
                        }
            }
        return out;
    };
}

BigVecFun Rtilde12(const RationalLRep& V, bool shift_by_module, const BigVecFun& f) {
    auto Vp = std::make_shared<RationalLRep>(V);
    return [Vp, shift_by_module, f](const VectorXcd& lam) -> VectorXcd {
        const int N = Vp->N, d = Vp->dim;
        const VectorXcd v = f(lam);
        VectorXcd out = VectorXcd::Zero(N * N * d);
        std::map<GlWeight, MatrixXcd> cache;
        for (int m = 0; m < d; ++m) {
            auto it = cache.find(Vp->wts[m]);
            if (it == cache.end()) {
                const VectorXcd arg = shift_by_module ? minus_glweight(lam, Vp->wts[m]) : lam;
                it = cache.emplace(Vp->wts[m], ratRtilde_UU(N, arg)).first;
            }
            const MatrixXcd& R = it->second;
            for (int r = 0; r < N * N; ++r)
                for (int c = 0; c < N * N; ++c) out[r * d + m] += R(r, c) * v[c * d + m];
        }
        return out;
    };
}

}  // namespace

double check_rll(const RationalLRep& V, Rng& rng, int n_samples) {
    const int N = V.N, d = V.dim;
    double worst = 0.0;
    int done = 0, attempts = 0;
    while (done < n_samples && attempts < n_samples + 40) {
        ++attempts;
        try {
            const VectorXcd lam = random_lam(N, rng);
            const BigVecFun f = random_vecfun(N * N * d, N, rng);
            const VectorXcd lhs = Rtilde12(V, true, Lleg(V, 1, Lleg(V, 2, f)))(lam);
            const VectorXcd rhs = Lleg(V, 2, Lleg(V, 1, Rtilde12(V, false, f)))(lam);
            worst = std::max(worst, rel_err(lhs, rhs));
            ++done;
        } catch (const SingularPoint&) {
        } catch (const ResonantPoint&) {
        }
    }
    if (done < n_samples) throw InconclusiveSampling("RLL check ran out of samples");
    return worst;
}

namespace {

Cplx capital_lambda(const std::vector<int>& perm, const VectorXcd& lam) {
    const int N = static_cast<int>(perm.size());
    Cplx out = 1.0;
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b)
            if (perm[a] < perm[b]) out *= 1.0 + 1.0 / (lam[a] - lam[b]);
    return out;
}

}  // namespace

double check_detplus(const RationalLRep& V, Rng& rng, int n_samples) {
    const int N = V.N, d = V.dim;
    const auto perms = permutations_with_sign(N);
    std::vector<int> idperm(N);
    for (int a = 0; a < N; ++a) idperm[a] = a;
    double worst = 0.0;
    int done = 0, attempts = 0;
    while (done < n_samples && attempts < n_samples + 40) {
        ++attempts;
        try {
            const VectorXcd lam = random_lam(N, rng);
            const VecFun f = random_vecfun(d, N, rng);
            VectorXcd acc = VectorXcd::Zero(d);
            const VectorXcd lr = lam + rho_coords(N);
            for (const auto& [perm, sign] : perms) {
                // T+_{i_N,N} ... T+_{i_1,1} f, rightmost factor first
                VecFun g = f;
                std::vector<int> inv(N);
                for (int a = 0; a < N; ++a) inv[perm[a]] = a;
                for (int a = 1; a <= N; ++a) {
                    const int row = perm[a - 1] + 1;
                    VecFun prev = g;
                    RationalLRep Vc = V;
                    const int col = a;
                    g = [Vc, row, col, prev](const VectorXcd& l) -> VectorXcd {
                        return Vc.L(row, col, l) * prev(minus_unit(l, col));
                    };
                }
                VectorXcd term = g(lam);
                // Lambda weight of the inverse permutation at the
                // rho-shifted point, per outgoing weight component
                for (int m = 0; m < d; ++m)
                    term[m] *= capital_lambda(inv, minus_glweight(lr, V.wts[m]));
                acc += static_cast<double>(sign) * term;
            }
            acc /= capital_lambda(idperm, lr);
            // Det+ is the scalar 1 times the total shift by (1,..,1)
            VectorXcd shifted = lam;
            for (int a = 0; a < N; ++a) shifted[a] -= 1.0;
            worst = std::max(worst, rel_err(acc, f(shifted)));
            ++done;
        } catch (const SingularPoint&) {
        } catch (const ResonantPoint&) {
        }
    }
    if (done < n_samples) throw InconclusiveSampling("DetT+ check ran out of samples");
    return worst;
}

}  // namespace ew
