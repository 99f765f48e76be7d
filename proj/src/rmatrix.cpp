#include "ew/rmatrix.hpp"

namespace ew {

namespace {

constexpr double kGuard = 1e-8;

Cplx kth(Cplx u, const ModularParams& params) { return kernel_eval(u, params); }

VectorXcd random_lambda(int N, Rng& rng) {
    VectorXcd lam(N);
    Cplx mean(0.0, 0.0);
    for (int i = 0; i < N; ++i) { lam[i] = rng.generic_point(); mean += lam[i]; }
    mean /= static_cast<double>(N);
    for (int i = 0; i < N; ++i) lam[i] -= mean;
    return lam;
}

VectorXcd shift_eps(const VectorXcd& lam, int a /*0-based*/, Cplx gamma) {
    // lambda - gamma*eps_a; R depends only on differences, so the unit vector
    // represents eps_a faithfully here.
    VectorXcd out = lam;
    out[a] -= gamma;
    return out;
}

double cheb(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Cplx alpha_fn(Cplx u, Cplx xi, const ModularParams& params) {
    Cplx den = kth(u - params.gamma, params) * kth(xi, params);
    if (std::abs(den) < kGuard) throw SingularPoint("alpha: denominator at kernel zero");
    return kth(u, params) * kth(xi + params.gamma, params) / den;
}

Cplx beta_fn(Cplx u, Cplx xi, const ModularParams& params) {
    Cplx den = kth(u - params.gamma, params) * kth(xi, params);
    if (std::abs(den) < kGuard) throw SingularPoint("beta: denominator at kernel zero");
    return -kth(u + xi, params) * kth(params.gamma, params) / den;
}

MatrixXcd Rmat(Cplx u, const VectorXcd& lam, const ModularParams& params) {
    int N = params.N;
    MatrixXcd R = MatrixXcd::Zero(N * N, N * N);
    for (int a = 0; a < N; ++a) {
        R(a * N + a, a * N + a) = 1.0;
        for (int b = 0; b < N; ++b) {
            if (a == b) continue;
            Cplx lab = lam[a] - lam[b];
            R(a * N + b, a * N + b) = alpha_fn(u, lab, params);
            R(a * N + b, b * N + a) = beta_fn(u, lab, params);
        }
    }
    return R;
}

MatrixXcd rational_Rbar(const VectorXcd& lam, int N) {
    MatrixXcd R = MatrixXcd::Identity(N * N, N * N);
    for (int a = 0; a < N; ++a) {
        for (int b = 0; b < N; ++b) {
            if (a == b) continue;
            Cplx lab = lam[a] - lam[b];
            R(a * N + b, a * N + b) += 1.0 / lab;
            R(a * N + b, b * N + a) -= 1.0 / lab;
        }
    }
    return R;
}

double check_inversion(const ModularParams& params, Rng& rng, int n_samples) {
    int N = params.N;
    double worst = 0.0;
    int done = 0, tries = 0;
    while (done < n_samples && tries < n_samples + 60) {
        ++tries;
        try {
            VectorXcd lam = random_lambda(N, rng);
            Cplx u = rng.generic_point();
            MatrixXcd R = Rmat(u, lam, params);
            MatrixXcd R21 = Rmat(-u, lam, params);
            // R^{(21)}: conjugate by the flip of the two legs.
            MatrixXcd P = MatrixXcd::Zero(N * N, N * N);
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) P(a * N + b, b * N + a) = 1.0;
            MatrixXcd prod = R * (P * R21 * P);
            worst = std::max(worst, cheb(prod - MatrixXcd::Identity(N * N, N * N)));
            ++done;
        } catch (const SingularPoint&) {
        }
    }
    return worst;
}

MatrixXcd R_on_legs3(Cplx u, const VectorXcd& lam, const ModularParams& params,
                     int leg_i, int leg_j, int shift_leg) {
    int N = params.N;
    int dim = N * N * N;
    int stride[3] = {N * N, N, 1};
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    // Cache the N shifted R-matrices (or the single unshifted one).
    std::vector<MatrixXcd> Rs;
    if (shift_leg < 0) {
        Rs.push_back(Rmat(u, lam, params));
    } else {
        for (int k = 0; k < N; ++k) Rs.push_back(Rmat(u, shift_eps(lam, k, params.gamma), params));
    }
    for (int col = 0; col < dim; ++col) {
        int idx[3] = {col / stride[0], (col / stride[1]) % N, col % N};
        const MatrixXcd& R = (shift_leg < 0) ? Rs[0] : Rs[idx[shift_leg]];
        int cpair = idx[leg_i] * N + idx[leg_j];
        for (int a = 0; a < N; ++a) {
            for (int b = 0; b < N; ++b) {
                Cplx v = R(a * N + b, cpair);
                if (v == Cplx(0.0, 0.0)) continue;
                int row_idx[3] = {idx[0], idx[1], idx[2]};
                row_idx[leg_i] = a;
                row_idx[leg_j] = b;
                out(row_idx[0] * stride[0] + row_idx[1] * stride[1] + row_idx[2], col) += v;
            }
        }
    }
    return out;
}

namespace {

double dyb_residual_at(Cplx u, Cplx v, const VectorXcd& lam, const ModularParams& params) {
    MatrixXcd lhs = R_on_legs3(u - v, lam, params, 0, 1, 2) *
                    R_on_legs3(u, lam, params, 0, 2, -1) *
                    R_on_legs3(v, lam, params, 1, 2, 0);
    MatrixXcd rhs = R_on_legs3(v, lam, params, 1, 2, -1) *
                    R_on_legs3(u, lam, params, 0, 2, 1) *
                    R_on_legs3(u - v, lam, params, 0, 1, -1);
    return cheb(lhs - rhs);
}

}  // namespace

double check_dyb(const ModularParams& params, Rng& rng, int n_samples) {
    double worst = 0.0;
    int done = 0, tries = 0;
    while (done < n_samples && tries < n_samples + 60) {
        ++tries;
        try {
            VectorXcd lam = random_lambda(params.N, rng);
            worst = std::max(worst, dyb_residual_at(rng.generic_point(), rng.generic_point(), lam, params));
            ++done;
        } catch (const SingularPoint&) {
        }
    }
    return worst;
}

double check_rbar_dyb(int N, Rng& rng, int n_samples) {
    // Constant dynamical YBE: same equation with R(u,.) replaced by R-bar.
    double worst = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        VectorXcd lam = random_lambda(N, rng);
        auto on_legs = [&](int li, int lj, int shift_leg) {
            int dim = N * N * N;
            int stride[3] = {N * N, N, 1};
            MatrixXcd out = MatrixXcd::Zero(dim, dim);
            std::vector<MatrixXcd> Rs;
            if (shift_leg < 0) {
                Rs.push_back(rational_Rbar(lam, N));
            } else {
                for (int k = 0; k < N; ++k)
                    Rs.push_back(rational_Rbar(shift_eps(lam, k, Cplx(1.0, 0.0)), N));
            }
            for (int col = 0; col < dim; ++col) {
                int idx[3] = {col / stride[0], (col / stride[1]) % N, col % N};
                const MatrixXcd& R = (shift_leg < 0) ? Rs[0] : Rs[idx[shift_leg]];
                int cpair = idx[li] * N + idx[lj];
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b) {
                        Cplx val = R(a * N + b, cpair);
                        if (val == Cplx(0.0, 0.0)) continue;
                        int ri[3] = {idx[0], idx[1], idx[2]};
                        ri[li] = a; ri[lj] = b;
                        out(ri[0] * stride[0] + ri[1] * stride[1] + ri[2], col) += val;
                    }
            }
            return out;
        };
        MatrixXcd lhs = on_legs(0, 1, 2) * on_legs(0, 2, -1) * on_legs(1, 2, 0);
        MatrixXcd rhs = on_legs(1, 2, -1) * on_legs(0, 2, 1) * on_legs(0, 1, -1);
        worst = std::max(worst, cheb(lhs - rhs));
    }
    return worst;
}

std::pair<double, double> rbar_limit_residuals(int N, Rng& rng, double u1, double u2) {
    ModularParams params;
    params.N = N;
    params.kernel = KernelKind::Rational;
    params.gamma = Cplx(1.0, 0.0);
    VectorXcd lam = random_lambda(N, rng);
    MatrixXcd target = rational_Rbar(lam, N);
    double r1 = cheb(Rmat(Cplx(u1, 0.3), lam, params) - target);
    double r2 = cheb(Rmat(Cplx(u2, 0.3), lam, params) - target);
    return {r1, r2};
}

bool check_entry_support(const ModularParams& params, Rng& rng) {
    int N = params.N;
    VectorXcd lam = random_lambda(N, rng);
    MatrixXcd R = Rmat(rng.generic_point(), lam, params);
    for (int r = 0; r < N * N; ++r) {
        for (int c = 0; c < N * N; ++c) {
            if (R(r, c) == Cplx(0.0, 0.0)) continue;
            int a = r / N, b = r % N, ap = c / N, bp = c % N;
            bool diag = (a == ap && b == bp);
            bool cross = (a == bp && b == ap && a != b);
            if (!diag && !cross) return false;
        }
    }
    return true;
}

double check_shift_invariance(const ModularParams& params, Rng& rng, int n_samples) {
    // On the component e_a (x) e_b the operator shift lambda - gamma(h1+h2)
    // subtracts gamma(eps_a + eps_b); R's entries must not change.
    int N = params.N;
    double worst = 0.0;
    int done = 0, tries = 0;
    while (done < n_samples && tries < n_samples + 40) {
        ++tries;
        try {
            VectorXcd lam = random_lambda(N, rng);
            Cplx u = rng.generic_point();
            MatrixXcd R = Rmat(u, lam, params);
            for (int a = 0; a < N; ++a) {
                for (int b = 0; b < N; ++b) {
                    VectorXcd shifted = shift_eps(shift_eps(lam, a, params.gamma), b, params.gamma);
                    MatrixXcd Rs = Rmat(u, shifted, params);
                    // Compare the full column of the (a,b) component.
                    worst = std::max(worst, (R.col(a * N + b) - Rs.col(a * N + b)).cwiseAbs().maxCoeff());
                }
            }
            ++done;
        } catch (const SingularPoint&) {
        }
    }
    return worst;
}

}  // namespace ew
