/**
 * @file ew_cli.cpp
 * @brief Batch driver: configure parameters, run residual suites, compute
 *        Verma dimension tables and fusion reports, and emit deterministic
 *        JSON documents.
 *
 * Exit codes: 0 all checks pass, 1 at least one check failed, 2 bad
 * configuration, 3 numerical instability (sampling or rank trouble).
 */

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ew/algebra.hpp"
#include "ew/emodules.hpp"
#include "ew/fusion.hpp"

using json = nlohmann::ordered_json;
using namespace ew;

namespace {

// ---------------------------------------------------------------------------
// Config

struct RunConfig {
    int N = 2;
    std::string tau = "0,0.5";
    std::string gamma = "0.317,0.211";
    std::string kernel = "elliptic";
    std::uint64_t seed = 20240601;
    double tol = 1e-9;
    int samples = 8;
    int depth = 6;
    std::string mu;            // comma-separated rational coordinates
    std::string Q = "standard";
    std::string suite = "all";
    std::string out;
};

Cplx parse_cplx(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return Cplx(std::stod(s), 0.0);
        return Cplx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
    } catch (const std::exception&) {
        throw ConfigError("cannot parse complex value '" + s + "' (expected re or re,im)");
    }
}

Rat parse_rat(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(std::stoll(s), 1);
        return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw ConfigError("cannot parse rational value '" + s + "' (expected p or p/q)");
    }
}

std::vector<Rat> parse_rat_list(const std::string& s) {
    std::vector<Rat> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rat(item));
    return out;
}

ModularParams make_params(const RunConfig& cfg) {
    ModularParams p;
    p.N = cfg.N;
    p.tau = parse_cplx(cfg.tau);
    p.gamma = parse_cplx(cfg.gamma);
    if (cfg.kernel == "elliptic") p.kernel = KernelKind::Elliptic;
    else if (cfg.kernel == "rational") p.kernel = KernelKind::Rational;
    else throw ConfigError("kernel must be 'elliptic' or 'rational'");
    p.validate();
    return p;
}

ModularParams rational_params(int N) {
    ModularParams p;
    p.N = N;
    p.gamma = Cplx(1.0, 0.0);
    p.kernel = KernelKind::Rational;
    return p;
}

DynWeightQ make_Q(const RunConfig& cfg, int N) {
    if (cfg.Q == "standard") return DynWeightQ::standard(N);
    if (cfg.Q.rfind("from_f:", 0) == 0) {
        const Rat k = parse_rat(cfg.Q.substr(7));
        return cocycle_from_f(N, [k](const AffineForm& xi) {
            return c_kernel(xi.plus_gamma(k));
        });
    }
    throw ConfigError("Q must be 'standard' or 'from_f:<k>' (f(xi) = theta(xi + k gamma))");
}

json cplx_json(Cplx z) { return json::array({z.real(), z.imag()}); }
json rat_json(const Rat& r) { return json::array({r.numerator(), r.denominator()}); }

json matrix_json(const MatrixXcd& M) {
    json rows = json::array();
    for (long i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (long j = 0; j < M.cols(); ++j) row.push_back(cplx_json(M(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json config_json(const RunConfig& cfg) {
    const ModularParams p = make_params(cfg);
    json j;
    j["N"] = cfg.N;
    j["tau"] = cplx_json(p.tau);
    j["gamma"] = cplx_json(p.gamma);
    j["kernel"] = cfg.kernel;
    j["seed"] = cfg.seed;
    j["tol"] = cfg.tol;
    j["samples"] = cfg.samples;
    j["depth"] = cfg.depth;
    if (!cfg.mu.empty()) j["mu"] = cfg.mu;
    j["Q"] = cfg.Q;
    return j;
}

// ---------------------------------------------------------------------------
// Reporting

struct Reporter {
    json checks = json::array();
    bool any_fail = false;
    bool any_unstable = false;
    double tol;

    explicit Reporter(double tol_) : tol(tol_) {}

    void run(const std::string& name, const std::function<double()>& fn,
             double local_tol = -1.0) {
        const double t = (local_tol > 0) ? local_tol : tol;
        json rec;
        rec["name"] = name;
        rec["tol"] = t;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const double residual = fn();
            rec["residual"] = residual;
            rec["pass"] = residual <= t;
            if (residual > t) any_fail = true;
        } catch (const InconclusiveSampling& e) {
            rec["status"] = std::string("unstable: ") + e.what();
            rec["pass"] = false;
            any_unstable = true;
        } catch (const RankUnstable& e) {
            rec["status"] = std::string("unstable: ") + e.what();
            rec["pass"] = false;
            any_unstable = true;
        } catch (const ResonantPoint& e) {
            rec["status"] = std::string("unstable: ") + e.what();
            rec["pass"] = false;
            any_unstable = true;
        } catch (const std::exception& e) {
            rec["status"] = std::string("error: ") + e.what();
            rec["pass"] = false;
            any_fail = true;
        }
        rec["seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        checks.push_back(rec);
    }

    int exit_code() const {
        if (any_unstable && !any_fail) return 3;
        return any_fail ? 1 : 0;
    }
};

void emit(const RunConfig& cfg, json& report) {
    const std::string text = report.dump(2) + "\n";
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(cfg.out);
        f << text;
    }
}

// ---------------------------------------------------------------------------
// Suites

void suite_theta(Reporter& rep, const ModularParams& params, Rng& rng) {
    rep.run("theta/quasi-periodicity-u+1", [&] {
        Rng r = rng.split(101);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const Cplx u = r.generic_point();
            worst = std::max(worst,
                             std::abs(theta_eval(u + 1.0, params.tau) + theta_eval(u, params.tau)));
        }
        return worst;
    }, 1e-10);
    rep.run("theta/quasi-periodicity-u+tau", [&] {
        Rng r = rng.split(102);
        const Cplx pi_i(0.0, std::acos(-1.0));
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const Cplx u = r.generic_point();
            const Cplx rhs = -std::exp(-2.0 * pi_i * u - pi_i * params.tau) *
                             theta_eval(u, params.tau);
            worst = std::max(worst, std::abs(theta_eval(u + params.tau, params.tau) - rhs));
        }
        return worst;
    }, 1e-10);
    rep.run("theta/oddness", [&] {
        Rng r = rng.split(103);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const Cplx u = r.generic_point();
            worst = std::max(worst,
                             std::abs(theta_eval(u, params.tau) + theta_eval(-u, params.tau)));
        }
        return worst;
    }, 1e-10);
    rep.run("theta/series-vs-product", [&] {
        Rng r = rng.split(104);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const Cplx u = r.generic_point();
            const Cplx s = theta_eval(u, params.tau), p = theta_product(u, params.tau);
            worst = std::max(worst, std::abs(s - p) / (1.0 + std::abs(s)));
        }
        return worst;
    }, 1e-10);
}

void suite_rmatrix(Reporter& rep, const ModularParams& params, const RunConfig& cfg, Rng& rng) {
    rep.run("rmatrix/inversion", [&] {
        Rng r = rng.split(201);
        return check_inversion(params, r, cfg.samples);
    });
    rep.run("rmatrix/dyb", [&] {
        Rng r = rng.split(202);
        return check_dyb(params, r, cfg.samples);
    });
    rep.run("rmatrix/shift-invariance", [&] {
        Rng r = rng.split(203);
        return check_shift_invariance(params, r, cfg.samples);
    });
    rep.run("rmatrix/entry-support", [&] {
        Rng r = rng.split(204);
        return check_entry_support(params, r) ? 0.0 : 1.0;
    });
}

void suite_relations(Reporter& rep, const ModularParams& params, const RunConfig& cfg, Rng& rng) {
    rep.run("relations/swap-rules", [&] {
        Rng r = rng.split(301);
        validate_swap_rules(params, r);  // throws on failure
        return 0.0;
    });
    rep.run("relations/vector-rep-difference-operators", [&] {
        Rng r = rng.split(302);
        return small_relations_residual(vector_rep(params), params, r,
                                        std::min(cfg.samples, 4));
    });
}

void suite_confluence(Reporter& rep, const ModularParams& params, Rng& rng, int count) {
    rep.run("confluence/random-degree-3", [&] {
        Rng r = rng.split(401);
        double worst = 0;
        for (int i = 0; i < count; ++i) {
            Mono m;
            for (int k = 0; k < 3; ++k)
                m.push_back(Gen{1 + int(r.integer() % params.N), 1 + int(r.integer() % params.N)});
            AlgebraElement x = ae_one(params.N);
            for (const Gen& g : m) x = mul(x, ae_gen(params.N, g.a, g.b));
            const AlgebraElement l = normal_order(x, OrderKind::Normal, Strategy::Leftmost);
            const AlgebraElement rr = normal_order(x, OrderKind::Normal, Strategy::Rightmost);
            Rng rs = r.split(1000 + i);
            worst = std::max(worst, elem_residual(l, rr, params, rs, 3));
        }
        return worst;
    });
}

void suite_qdet(Reporter& rep, const ModularParams& params, Rng& rng) {
    rep.run("qdet/centrality", [&] {
        const int N = std::min(params.N, 3);
        ModularParams p = params;
        p.N = N;
        Rng r = rng.split(501);
        const AlgebraElement det = qdet_element(N);
        double worst = 0;
        for (int a = 1; a <= N; ++a)
            for (int b = 1; b <= N; ++b) {
                Rng rs = r.split(a * 10 + b);
                worst = std::max(worst, elem_residual(mul(det, ae_gen(N, a, b)),
                                                      mul(ae_gen(N, a, b), det), p, rs, 3));
            }
        return worst;
    });
}

VectorXcd fusion_lam0(int N, Rng& rng) {
    VectorXcd lam(N);
    for (int a = 0; a < N; ++a)
        lam[a] = Cplx(2.9 * (N - 1 - a) + rng.uniform(0.3, 1.2), rng.uniform(-0.5, 0.5));
    return lam;
}

double with_resample(int N, Rng& rng, const std::function<double(const VectorXcd&)>& fn) {
    for (int attempt = 0; attempt < 5; ++attempt) {
        try {
            return fn(fusion_lam0(N, rng));
        } catch (const ResonantPoint&) {
        }
    }
    throw ResonantPoint("resampling budget exhausted");
}

void suite_fusion(Reporter& rep, int N, Rng& rng) {
    const SlnModule U = sln_vector_rep(N);
    const SlnModule UU = sln_tensor(U, U);
    rep.run("fusion/sln-relations", [&] { return sln_relations_residual(UU); }, 1e-12);
    rep.run("fusion/abrr-equation-UU", [&] {
        Rng r = rng.split(601);
        return with_resample(N, r, [&](const VectorXcd& lam0) {
            const MatrixXcd J = fusion_J(UU, UU, lam0).J;
            const int n = UU.dim * UU.dim;
            MatrixXcd D = MatrixXcd::Zero(n, n), K = MatrixXcd::Zero(n, n);
            for (int i = 0; i < UU.dim; ++i)
                for (int j = 0; j < UU.dim; ++j) {
                    const int x = i * UU.dim + j;
                    D(x, x) = weight_pair(lam0, UU.wts[j]) - to_c(xi_scalar(UU.wts[j]));
                }
            for (int a = 1; a <= N; ++a)
                for (int b = a + 1; b <= N; ++b)
                    for (int i = 0; i < UU.dim; ++i)
                        for (int j = 0; j < UU.dim; ++j)
                            for (int k = 0; k < UU.dim; ++k)
                                for (int l = 0; l < UU.dim; ++l)
                                    K(i * UU.dim + j, k * UU.dim + l) +=
                                        UU.E(a, b)(i, k) * UU.E(b, a)(j, l);
            const MatrixXcd lhs = J * D, rhs = (D + K) * J;
            return (lhs - rhs).cwiseAbs().maxCoeff() /
                   (1.0 + std::max(lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()));
        });
    }, 1e-10);
    rep.run("fusion/R-UU-closed-form", [&] {
        Rng r = rng.split(602);
        return with_resample(N, r, [&](const VectorXcd& lam0) {
            const MatrixXcd R = exchange_R(U, U, lam0).R;
            const MatrixXcd Rc = ratR_UU(N, lam0);
            return (R - Rc).cwiseAbs().maxCoeff();
        });
    }, 1e-10);
    rep.run("fusion/J-cocycle-UUU", [&] {
        Rng r = rng.split(603);
        return with_resample(N, r,
                             [&](const VectorXcd& lam0) { return check_J_cocycle(U, U, U, lam0); });
    });
    rep.run("fusion/exchange-dyb-UUU", [&] {
        Rng r = rng.split(604);
        return with_resample(N, r, [&](const VectorXcd& lam0) {
            return check_exchange_dyb(U, U, U, lam0);
        });
    });
}

void suite_functorE(Reporter& rep, int N, Rng& rng) {
    const ModularParams rp = rational_params(N);
    const SlnModule U = sln_vector_rep(N);
    rep.run("functorE/EU-vs-vector-rep", [&] {
        Rng r = rng.split(701);
        const SmallModule EU = functor_E(U);
        const SmallModule Vr = vector_rep(rp);
        MatFun phi = [N](const VectorXcd& lam) {
            MatrixXcd M = MatrixXcd::Zero(N, N);
            for (int a = 0; a < N; ++a) {
                Cplx p = 1.0;
                for (int b = 0; b < a; ++b) p *= lam[b] - lam[a];
                M(a, a) = p;
            }
            return M;
        };
        return check_small_morphism(EU, Vr, phi, rp, r, 4);
    });
    rep.run("functorE/EUU-relations", [&] {
        Rng r = rng.split(702);
        const SmallModule EUU = functor_E(sln_tensor(U, U));
        return small_relations_residual(EUU, rp, r, 2);
    });
    rep.run("functorE/EU-semistandard", [&] {
        Rng r = rng.split(703);
        return check_semistandard(functor_E(U), r, 3);
    });
}

void suite_appendixB(Reporter& rep, const ModularParams& params, Rng& rng) {
    rep.run("appendixB/top-wedge-closed-form", [&] {
        Rng r = rng.split(801);
        const int N = params.N;
        const BigModule V = eval_module(vector_rep(params), Cplx(0.11, -0.07), params);
        double worst = 0;
        for (int s = 0; s < 3; ++s) {
            SamplePoint sp = SamplePoint::random(N, r);
            VectorXcd lam(N);
            for (int i = 0; i < N; ++i) lam[i] = sp.lam1[i];
            const Cplx u = r.generic_point();
            const MatrixXcd M = wedge_top_matrix(V, u, lam, params);
            // expected: th(u - x + (N-1)g)/th(u - x) * diag_a prod_{b != a}
            //           th(l_ab - g)/th(l_ab), for the vector evaluation module at x
            const Cplx ux = u - Cplx(0.11, -0.07);
            const Cplx pref = kernel_eval(ux + double(N - 1) * params.gamma, params) /
                              kernel_eval(ux, params);
            MatrixXcd E = MatrixXcd::Zero(N, N);
            for (int a = 0; a < N; ++a) {
                Cplx v = pref;
                for (int b = 0; b < N; ++b) {
                    if (b == a) continue;
                    v *= kernel_eval(lam[a] - lam[b] - params.gamma, params) /
                         kernel_eval(lam[a] - lam[b], params);
                }
                E(a, a) = v;
            }
            worst = std::max(worst, (M - E).cwiseAbs().maxCoeff());
        }
        return worst;
    });
    rep.run("appendixB/complementary-minors-N2", [&] {
        ModularParams p = rational_params(2);
        Rng r = rng.split(802);
        double worst = 0;
        const AlgebraElement tN = twedge_element(2);
        for (int a = 1; a <= 2; ++a)
            for (int b = 1; b <= 2; ++b) {
                AlgebraElement acc = ae_zero(2);
                for (int c = 1; c <= 2; ++c)
                    acc = ae_add(acc, mul(tbar_element(2, a, c), ae_gen(2, b, c)));
                const AlgebraElement want = (a == b) ? tN : ae_zero(2);
                Rng rs = r.split(a * 10 + b);
                worst = std::max(worst, elem_residual(acc, want, p, rs, 3));
            }
        return worst;
    });
}

// ---------------------------------------------------------------------------
// Commands

int cmd_check(const RunConfig& cfg) {
    const ModularParams params = make_params(cfg);
    Rng rng(cfg.seed);
    Reporter rep(cfg.tol);
    const std::string& s = cfg.suite;
    const bool all = (s == "all");
    if (all || s == "theta") suite_theta(rep, params, rng);
    if (all || s == "rmatrix") suite_rmatrix(rep, params, cfg, rng);
    if (all || s == "relations") suite_relations(rep, params, cfg, rng);
    if (all || s == "confluence") suite_confluence(rep, params, rng, all ? 20 : 200);
    if (all || s == "qdet") suite_qdet(rep, params, rng);
    if (all || s == "fusion") suite_fusion(rep, cfg.N, rng);
    if (all || s == "functorE") suite_functorE(rep, cfg.N, rng);
    if (all || s == "appendixB") suite_appendixB(rep, params, rng);
    if (rep.checks.empty()) throw ConfigError("unknown suite '" + s + "'");

    json report;
    report["schema"] = "ew-report/1";
    report["command"] = "check";
    report["suite"] = s;
    report["config"] = config_json(cfg);
    report["checks"] = rep.checks;
    report["pass"] = !rep.any_fail && !rep.any_unstable;
    emit(cfg, report);
    return rep.exit_code();
}

int cmd_verma(const RunConfig& cfg) {
    if (cfg.mu.empty()) throw ConfigError("--mu is required for the verma command");
    const ModularParams params = make_params(cfg);
    const std::vector<Rat> mu_rat = parse_rat_list(cfg.mu);
    if (static_cast<int>(mu_rat.size()) != cfg.N)
        throw ConfigError("--mu needs exactly N coordinates");
    Rat tr(0);
    for (const Rat& c : mu_rat) tr += c;
    Weight mu_w{std::vector<Rat>()};
    std::vector<Cplx> mu_c;
    for (const Rat& c : mu_rat) {
        mu_w.coords.push_back(c - tr / Rat(cfg.N));
        mu_c.push_back(to_c(c - tr / Rat(cfg.N)));
    }

    Rng rng(cfg.seed);
    VermaModule M(params, mu_c, make_Q(cfg, cfg.N), cfg.depth);
    const bool oracle_ok = dominant_integral(mu_w);

    json report;
    report["schema"] = "ew-report/1";
    report["command"] = "verma";
    report["config"] = config_json(cfg);
    json table = json::array();
    bool any_fail = false, any_unstable = false;
    long total = 0;

    std::map<Weight, long> irr;
    try {
        irr = irr_dims(M, cfg.depth, rng);
    } catch (const RankUnstable& e) {
        report["status"] = std::string("unstable: ") + e.what();
        any_unstable = true;
    }
    FreudenthalOracle* oracle = nullptr;
    FreudenthalOracle oracle_store = oracle_ok ? FreudenthalOracle(mu_w)
                                               : FreudenthalOracle(Weight::zero(cfg.N));
    if (oracle_ok) oracle = &oracle_store;

    for (const auto& [drop, dim_irr] : irr) {
        json row;
        json dj = json::array();
        for (const Rat& c : drop.coords) dj.push_back(rat_json(c));
        row["drop"] = dj;
        row["dim_verma"] = static_cast<long>(lowering_monomials(cfg.N, drop).size());
        row["dim_irreducible"] = dim_irr;
        if (oracle) {
            const long d = oracle->multiplicity(mu_w - drop);
            row["dim_oracle"] = d;
            row["match"] = (d == dim_irr);
            if (d != dim_irr) any_fail = true;
        }
        total += dim_irr;
        table.push_back(row);
    }
    report["table"] = table;
    report["total_dim"] = total;
    if (oracle) report["total_oracle"] = oracle->total_dim();
    report["pass"] = !any_fail && !any_unstable;
    emit(cfg, report);
    if (any_unstable && !any_fail) return 3;
    return any_fail ? 1 : 0;
}

int cmd_fusion(const RunConfig& cfg) {
    Rng rng(cfg.seed);
    Reporter rep(cfg.tol);
    const int N = cfg.N;
    const SlnModule U = sln_vector_rep(N);
    const ModularParams rp = rational_params(N);

    suite_fusion(rep, N, rng);
    suite_functorE(rep, N, rng);

    // B_X and the exchange-group translation on the vector representation.
    rep.run("bx/vector-rep-closed-form", [&] {
        Rng r = rng.split(901);
        const VectorXcd lam = fusion_lam0(N, r);
        const MatrixXcd B = bx_matrix(U, lam);
        MatrixXcd E = MatrixXcd::Zero(N, N);
        for (int a = 0; a < N; ++a) {
            Cplx v = 1.0;
            for (int b = 0; b < a; ++b) v *= 1.0 + 1.0 / (lam[b] - lam[a]);
            E(a, a) = v;
        }
        return (B - E).cwiseAbs().maxCoeff();
    });
    rep.run("translation/round-trip-EU", [&] {
        Rng r = rng.split(902);
        const SmallModule EU = functor_E(U);
        const SmallModule back = small_from_L(L_from_small(EU));
        double worst = 0;
        for (int s = 0; s < 3; ++s) {
            const VectorXcd lam = fusion_lam0(N, r);
            for (int a = 1; a <= N; ++a)
                for (int b = 1; b <= N; ++b)
                    worst = std::max(worst, (EU.ell(a, b, lam) - back.ell(a, b, lam))
                                                .cwiseAbs()
                                                .maxCoeff());
        }
        return worst;
    }, 1e-10);
    rep.run("translation/rll-EU", [&] {
        Rng r = rng.split(903);
        return check_rll(L_from_small(functor_E(U)), r, 2);
    });
    rep.run("translation/det-plus-EU", [&] {
        Rng r = rng.split(904);
        return check_detplus(L_from_small(functor_E(U)), r, 2);
    });

    // Report blocks for J and R on U (x) U at a recorded point.
    Rng rb = rng.split(905);
    const VectorXcd lam0 = fusion_lam0(N, rb);
    json blocks;
    blocks["lam0"] = matrix_json(lam0);
    try {
        blocks["J_UU"] = matrix_json(fusion_J(U, U, lam0).J);
        blocks["R_UU"] = matrix_json(exchange_R(U, U, lam0).R);
    } catch (const ResonantPoint& e) {
        blocks["status"] = std::string("unstable: ") + e.what();
    }

    json report;
    report["schema"] = "ew-report/1";
    report["command"] = "fusion";
    report["config"] = config_json(cfg);
    report["checks"] = rep.checks;
    report["matrices"] = blocks;
    report["pass"] = !rep.any_fail && !rep.any_unstable;
    emit(cfg, report);
    return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for the small elliptic quantum group"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--N", cfg.N, "rank parameter N of sl_N");
        sub->add_option("--tau", cfg.tau, "modular parameter as re,im");
        sub->add_option("--gamma", cfg.gamma, "step gamma as re,im");
        sub->add_option("--kernel", cfg.kernel, "elliptic | rational");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--tol", cfg.tol, "residual tolerance");
        sub->add_option("--samples", cfg.samples, "sample count per check");
        sub->add_option("--depth", cfg.depth, "Verma truncation depth");
        sub->add_option("--mu", cfg.mu, "highest weight, comma-separated rationals");
        sub->add_option("--Q", cfg.Q, "dynamical weight: standard | from_f:<k>");
        sub->add_option("--out", cfg.out, "report output path (default stdout)");
    };

    CLI::App* check = app.add_subcommand("check", "run a residual suite");
    check->add_option("--suite", cfg.suite,
                      "theta|rmatrix|relations|qdet|confluence|fusion|functorE|appendixB|all");
    add_common(check);
    CLI::App* verma = app.add_subcommand("verma", "Verma dimension table and Gram data");
    add_common(verma);
    CLI::App* fusion = app.add_subcommand("fusion", "fusion/exchange report (rational kernel)");
    add_common(fusion);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(cfg);
        if (verma->parsed()) return cmd_verma(cfg);
        if (fusion->parsed()) return cmd_fusion(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InconclusiveSampling& e) {
        std::cerr << "numerical instability: " << e.what() << "\n";
        return 3;
    } catch (const RankUnstable& e) {
        std::cerr << "numerical instability: " << e.what() << "\n";
        return 3;
    } catch (const ResonantPoint& e) {
        std::cerr << "numerical instability: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
