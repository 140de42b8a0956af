// End-to-end acceptance run: eight independent criteria, one verdict line
// each, exit status is the number of failures.  Every check is exact; the
// only tolerances here are wall-clock budgets, pinned next to each timed
// criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "pmm/audit.hpp"
#include "pmm/cluster.hpp"
#include "pmm/costs.hpp"

using namespace pmm;

namespace {

int failures = 0;

void verdict(int idx, const char* what, bool ok, const std::string& note) {
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", idx, what,
                note.empty() ? "" : " ", note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

struct Check {
    bool ok = true;
    std::string why;
    void expect(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            why = msg;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_secs(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "(%.2f s)", s);
    return buf;
}

// Executes the one-sided protocol on 1x1 blocks with N = P servers and
// reports (decoded == A * B^theta, forged-last-response decode differs).
// The second value is the information-theoretic teeth of the threshold:
// P - 1 honest evaluations plus one forged one are a perfectly plausible
// degree-delta polynomial, so a decoder fed P - 1 points cannot know the
// product.
std::pair<bool, bool> psmm_threshold_probe(const Field& f, PsmmDims d, u64 seed) {
    StrategyPlan plan = make_psmm_plan(psmm_threshold(d).P, d);
    const std::size_t V = 2, N = plan.N;
    Library lb = random_library(f, V, d.K, d.M, seed);
    ShardStore st = encode_store(f, Library{}, lb, default_alpha(f, N), d.K, d.L, d.M);
    PsmmRequest req;
    req.theta = 1 + seed % V;
    req.a = random_matrix(f, d.L, d.K, derive_seed(seed, 1));
    req.plan = plan;
    req.noise_seed = derive_seed(seed, 2);
    auto shares = psmm_share_matrix(f, req, st.alpha);
    auto queries = psmm_make_queries(f, req, V, st.alpha);
    std::vector<Response> resp;
    for (std::size_t i = 0; i < N; ++i)
        resp.push_back({i, psmm_respond(f, st.shards_b[i], shares[i], queries[i])});
    Matrix expect = mat_mul(f, req.a, lb.mats[req.theta - 1]);
    bool exact = psmm_decode(f, plan, st.alpha, resp) == expect;

    bool guard = false;
    std::vector<Response> short_list(resp.begin(), resp.end() - 1);
    try {
        psmm_decode(f, plan, st.alpha, short_list);
    } catch (const InsufficientResponses&) {
        guard = true;
    }
    auto forged = resp;
    forged.back().y = random_matrix(f, 1, 1, derive_seed(seed, 3));
    bool fails_short = guard && psmm_decode(f, plan, st.alpha, forged) != expect;
    return {exact, fails_short};
}

std::pair<bool, bool> fpmm_threshold_probe(const Field& f, FpmmDims d, u64 seed) {
    StrategyPlan plan = make_fpmm_plan(fpmm_threshold(d).P, d);
    const std::size_t R = 2, V = 2, N = plan.N;
    Library la = random_library(f, R, d.L, d.K, seed);
    Library lb = random_library(f, V, d.K, d.M, derive_seed(seed, 1));
    ShardStore st = encode_store(f, la, lb, default_alpha(f, N), d.K, d.L, d.M);
    FpmmRequest req;
    req.theta_a = 1 + seed % R;
    req.theta_b = 1 + (seed / 2) % V;
    req.plan = plan;
    req.noise_seed = derive_seed(seed, 2);
    auto queries = fpmm_make_queries(f, req, R, V, st.alpha);
    std::vector<Response> resp;
    for (std::size_t i = 0; i < N; ++i)
        resp.push_back({i, fpmm_respond(f, st.shards_a[i], st.shards_b[i], queries[i])});
    Matrix expect = mat_mul(f, la.mats[req.theta_a - 1], lb.mats[req.theta_b - 1]);
    bool exact = fpmm_decode(f, plan, st.alpha, resp) == expect;

    bool guard = false;
    std::vector<Response> short_list(resp.begin(), resp.end() - 1);
    try {
        fpmm_decode(f, plan, st.alpha, short_list);
    } catch (const InsufficientResponses&) {
        guard = true;
    }
    auto forged = resp;
    forged.back().y = random_matrix(f, 1, 1, derive_seed(seed, 3));
    bool fails_short = guard && fpmm_decode(f, plan, st.alpha, forged) != expect;
    return {exact, fails_short};
}

// ---- criterion 1 ----

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
        PsmmDims dims{2, 2, 2, 2, 2};
        DegreeParams dp = psmm_family(Family::Delta1, dims);
        c.expect(dp.b == std::vector<u64>{0, 7, 11}, "b degrees off");
        c.expect(dp.d == std::vector<u64>{0, 2, 4}, "d degrees off");
        c.expect(psmm_delta(dp, dims) == 18, "delta not 18");
        StrategyPlan plan = make_psmm_plan(25, dims, Family::Delta1);
        c.expect(plan.P == 19, "P not 19");
        c.expect(plan.exponent(1, 1) == 1 && plan.exponent(1, 2) == 3 &&
                     plan.exponent(2, 1) == 8 && plan.exponent(2, 2) == 10,
                 "exponent map off");

        Field f(kMersenne61);
        const std::size_t V = 2, N = 25, dim = 40;
        Library lb = random_library(f, V, dim, dim, 1001);
        ShardStore st = encode_store(f, Library{}, lb, default_alpha(f, N), 2, 2, 2);
        PsmmRequest req;
        req.theta = 1;
        req.a = random_matrix(f, dim, dim, 1002);
        req.plan = plan;
        req.noise_seed = 1003;
        auto shares = psmm_share_matrix(f, req, st.alpha);
        auto queries = psmm_make_queries(f, req, V, st.alpha);
        std::vector<Response> resp;
        for (std::size_t i = 0; i < N; ++i)
            resp.push_back({i, psmm_respond(f, st.shards_b[i], shares[i], queries[i])});
        Matrix got = psmm_decode(f, plan, st.alpha, resp);
        c.expect(got == mat_mul(f, req.a, lb.mats[0]), "decode != naive product");
    } catch (const std::exception& e) {
        c.expect(false, e.what());
    }
    double dt = seconds_since(t0);
    c.expect(dt < 10.0, "over the 10 s budget");
    verdict(1, "worked example: degrees, threshold, exponent map, 40x40 run over GF(2^61-1)",
            c.ok, c.ok ? fmt_secs(dt) : c.why);
}

// ---- criterion 2 ----

void criterion_2() {
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
        Field f(kMersenne61);
        u64 seed = 1;
        for (std::size_t L = 1; L <= 4 && c.ok; ++L)
            for (std::size_t M = 1; M <= 4 && c.ok; ++M)
                for (std::size_t K = 1; K <= 4 && c.ok; ++K)
                    for (std::size_t S = 1; S <= 4 && c.ok; ++S)
                        for (std::size_t T = 1; T <= 4 && c.ok; ++T) {
                            auto [exact, fails_short] =
                                psmm_threshold_probe(f, {L, M, K, S, T}, seed++);
                            std::string at = "(" + std::to_string(L) + "," + std::to_string(M) +
                                             "," + std::to_string(K) + "," + std::to_string(S) +
                                             "," + std::to_string(T) + ")";
                            c.expect(exact, "one-sided decode wrong at " + at);
                            c.expect(fails_short, "one-sided P-1 not refused at " + at);
                        }
        for (std::size_t L = 1; L <= 3 && c.ok; ++L)
            for (std::size_t M = 1; M <= 3 && c.ok; ++M)
                for (std::size_t K = 1; K <= 3 && c.ok; ++K)
                    for (std::size_t TA = 1; TA <= 3 && c.ok; ++TA)
                        for (std::size_t TB = 1; TB <= 3 && c.ok; ++TB) {
                            auto [exact, fails_short] =
                                fpmm_threshold_probe(f, {L, M, K, TA, TB}, seed++);
                            std::string at = "(" + std::to_string(L) + "," + std::to_string(M) +
                                             "," + std::to_string(K) + "," + std::to_string(TA) +
                                             "," + std::to_string(TB) + ")";
                            c.expect(exact, "two-sided decode wrong at " + at);
                            c.expect(fails_short, "two-sided P-1 not refused at " + at);
                        }
    } catch (const std::exception& e) {
        c.expect(false, e.what());
    }
    verdict(2, "exact thresholds: decode at P, refuse and misdecode below, both protocols", c.ok,
            c.ok ? fmt_secs(seconds_since(t0)) : c.why);
}

// ---- criterion 3 ----

void criterion_3() {
    Check c;
    try {
        Field f(kMersenne61);
        const std::size_t N = 12;

        PsmmDims dims{2, 1, 2, 1, 1};
        StrategyPlan plan = make_psmm_plan(N, dims);
        Library lb = random_library(f, 2, 4, 3, 301);
        ShardStore st = encode_store(f, Library{}, lb, default_alpha(f, N), 2, 2, 1);
        PsmmRequest req;
        req.theta = 2;
        req.a = random_matrix(f, 4, 4, 302);
        req.plan = plan;
        req.noise_seed = 303;
        auto shares = psmm_share_matrix(f, req, st.alpha);
        auto queries = psmm_make_queries(f, req, 2, st.alpha);
        std::vector<Response> resp;
        for (std::size_t i = 0; i < N; ++i)
            resp.push_back({i, psmm_respond(f, st.shards_b[i], shares[i], queries[i])});
        Matrix expect = mat_mul(f, req.a, lb.mats[1]);

        std::mt19937_64 g(304);
        std::vector<std::size_t> ids(N);
        std::iota(ids.begin(), ids.end(), 0);
        for (int trial = 0; trial < 30 && c.ok; ++trial) {
            std::shuffle(ids.begin(), ids.end(), g);
            std::vector<std::size_t> pick(ids.begin(), ids.begin() + plan.P);
            std::sort(pick.begin(), pick.end());
            std::vector<Response> sub;
            for (std::size_t id : pick) sub.push_back(resp[id]);
            c.expect(psmm_decode(f, plan, st.alpha, sub) == expect,
                     "subset decode differs at trial " + std::to_string(trial));
        }

        for (std::size_t K : {std::size_t{2}, std::size_t{3}}) {
            Library la = random_library(f, 2, 3, 2 * K, 310 + K);
            Library lbk = random_library(f, 3, 2 * K, 4, 320 + K);
            ShardStore stk = encode_store(f, la, lbk, default_alpha(f, N), K, 1, 1);
            std::vector<std::size_t> subset(K);
            // walk every K-subset of the 12 servers in lexicographic order
            for (std::size_t i = 0; i < K; ++i) subset[i] = i;
            std::size_t checked = 0;
            while (true) {
                Library rb = reconstruct_library_b(f, stk, subset);
                Library ra = reconstruct_library_a(f, stk, subset);
                bool same = rb.mats == lbk.mats && ra.mats == la.mats;
                if (!same) {
                    c.expect(false, "reconstruction differs for a K=" + std::to_string(K) +
                                        " subset");
                    break;
                }
                ++checked;
                std::size_t i = K;
                while (i > 0 && subset[i - 1] == N - K + i - 1) --i;
                if (i == 0) break;
                ++subset[i - 1];
                for (std::size_t j = i; j < K; ++j) subset[j] = subset[j - 1] + 1;
            }
            std::size_t want = K == 2 ? 66 : 220;
            c.expect(!c.ok || checked == want,
                     "subset walk covered " + std::to_string(checked) + " sets");
        }
    } catch (const std::exception& e) {
        c.expect(false, e.what());
    }
    verdict(3, "any P responses decode alike; every K-subset rebuilds the library", c.ok, c.why);
}

// ---- criterion 4 ----

void criterion_4() {
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
        // generalized Vandermonde minors over every subset at N = 12
        Field big(kMersenne61);
        auto alpha = default_alpha(big, 12);
        for (std::size_t width : {std::size_t{1}, std::size_t{2}, std::size_t{3}})
            for (u64 base : {u64{0}, u64{2}, u64{5}, u64{11}}) {
                AuditReport r = check_mask_nonsingular(big, alpha, base, width);
                c.expect(r.pass, "singular minor at width " + std::to_string(width));
            }

        // exact view distributions on GF(5)
        Field f(5);
        PsmmDims pd{1, 1, 1, 1, 1};
        StrategyPlan plan = make_psmm_plan(psmm_threshold(pd).P, pd);
        auto a5 = default_alpha(f, plan.N);
        ExhaustiveSpec at_t, above_t;
        at_t.collusion = {0};
        above_t.collusion = {0, 1};

        AuditReport q_ok = exhaustive_privacy_psmm(f, plan, 2, a5, at_t);
        AuditReport q_bad = exhaustive_privacy_psmm(f, plan, 2, a5, above_t);
        c.expect(q_ok.pass, "one-sided query view leaks at T");
        c.expect(!q_bad.pass, "one-sided audit blind at T+1");

        Matrix a1(1, 1), a2(1, 1);
        a1.at(0, 0) = Fe{1};
        a2.at(0, 0) = Fe{3};
        AuditReport s_ok = exhaustive_secrecy_psmm(f, plan, a1, a2, a5, at_t);
        AuditReport s_bad = exhaustive_secrecy_psmm(f, plan, a1, a2, a5, above_t);
        c.expect(s_ok.pass, "share view leaks at S");
        c.expect(!s_bad.pass, "secrecy audit blind at S+1");

        FpmmDims fd{1, 1, 1, 1, 1};
        StrategyPlan fplan = make_fpmm_plan(fpmm_threshold(fd).P, fd);
        auto af = default_alpha(f, fplan.N);
        AuditReport f_ok = exhaustive_privacy_fpmm(f, fplan, 2, 2, af, at_t);
        AuditReport f_bad = exhaustive_privacy_fpmm(f, fplan, 2, 2, af, above_t);
        c.expect(f_ok.pass, "two-sided query view leaks at T");
        c.expect(!f_bad.pass, "two-sided audit blind at T+1");

        auto ab = default_alpha(f, baseline_threshold(1, 1) + 1);
        AuditReport b_ok = exhaustive_privacy_baseline(f, 1, 2, 2, 1, ab, at_t);
        AuditReport b_bad = exhaustive_privacy_baseline(f, 1, 2, 2, 1, ab, above_t);
        c.expect(b_ok.pass, "baseline query view leaks at T'");
        c.expect(!b_bad.pass, "baseline audit blind at T'+1");

        for (const AuditReport* r : {&q_ok, &s_ok, &f_ok, &b_ok})
            for (const TvResult& tv : r->tv)
                c.expect(tv.diff_count == 0, "nonzero TV in a passing report");
    } catch (const std::exception& e) {
        c.expect(false, e.what());
    }
    double dt = seconds_since(t0);
    c.expect(dt < 60.0, "over the 60 s budget");
    verdict(4, "privacy audits: all minors nonsingular, TV exactly 0 at the level, > 0 above",
            c.ok, c.ok ? fmt_secs(dt) : c.why);
}

// ---- criterion 5 ----

void criterion_5() {
    Check c;
    try {
        Field f(kMersenne61);
        PsmmDims dims{1, 1, 2, 1, 1};
        int good = 0, total = 0;
        for (std::size_t errs : {std::size_t{1}, std::size_t{2}}) {
            StrategyPlan plan =
                make_psmm_plan(psmm_threshold(dims).P + 2 * errs, dims);
            std::mt19937_64 g(500 + errs);
            for (int trial = 0; trial < 200; ++trial, ++total) {
                u64 seed = g();
                Library lb = random_library(f, 2, 2, 1, seed);
                ShardStore st =
                    encode_store(f, Library{}, lb, default_alpha(f, plan.N), 2, 1, 1);
                PsmmRequest req;
                req.theta = 1 + seed % 2;
                req.a = random_matrix(f, 1, 2, derive_seed(seed, 1));
                req.plan = plan;
                req.noise_seed = derive_seed(seed, 2);
                auto shares = psmm_share_matrix(f, req, st.alpha);
                auto queries = psmm_make_queries(f, req, 2, st.alpha);
                std::vector<Response> resp;
                for (std::size_t i = 0; i < plan.N; ++i)
                    resp.push_back(
                        {i, psmm_respond(f, st.shards_b[i], shares[i], queries[i])});
                // corrupt errs distinct responses
                std::vector<std::size_t> ids(plan.N);
                std::iota(ids.begin(), ids.end(), 0);
                std::shuffle(ids.begin(), ids.end(), g);
                for (std::size_t e = 0; e < errs; ++e)
                    resp[ids[e]].y = random_matrix(f, 1, 1, derive_seed(seed, 10 + e));
                Matrix got = psmm_decode_with_errors(f, plan, st.alpha, resp, errs);
                if (got == mat_mul(f, req.a, lb.mats[req.theta - 1])) ++good;
            }
        }
        c.expect(good == total, std::to_string(good) + "/" + std::to_string(total));
    } catch (const std::exception& e) {
        c.expect(false, e.what());
    }
    verdict(5, "error correction: 400/400 exact decodes with E in {1,2} corrupted answers",
            c.ok, c.why);
}

// ---- criterion 6 ----

void criterion_6() {
    Check c;
    try {
        Field f(kMersenne61);
        const std::size_t R = 2, V = 3, lam = 6, om = 12, ga = 6;
        for (std::size_t K = 1; K <= 4 && c.ok; ++K)
            for (std::size_t tp = 1; tp <= 3 && c.ok; ++tp) {
                const std::size_t P = baseline_threshold(K, tp);
                c.expect(P == 3 * K + tp - 2, "threshold formula off");
                const std::size_t N = P + 1;
                u64 seed = 600 + K * 10 + tp;
                Library la = random_library(f, R, lam, om, seed);
                Library lb = random_library(f, V, om, ga, derive_seed(seed, 1));
                ShardStore st = encode_store(f, la, lb, default_alpha(f, N), K, 1, 1);
                c.expect(st.elements_per_server() == (R * lam * om + V * om * ga) / K,
                         "coded storage counter off");
                BaselineStore bs = baseline_setup(f, st);
                c.expect(bs.elements_per_server() == R * V * lam * ga,
                         "baseline storage counter off");

                BaselineRequest req;
                req.theta_a = 1 + K % R;
                req.theta_b = 1 + tp % V;
                req.t_prime = tp;
                req.noise_seed = derive_seed(seed, 2);
                auto queries = baseline_make_queries(f, req, K, R, V, st.alpha);
                std::vector<Response> resp;
                for (std::size_t i = 0; i < N; ++i)
                    resp.push_back({i, baseline_respond(f, bs.products[i], queries[i])});
                Matrix expect = mat_mul(f, la.mats[req.theta_a - 1], lb.mats[req.theta_b - 1]);

                std::vector<Response> exact(resp.begin(), resp.begin() + P);
                c.expect(baseline_decode(f, K, tp, st.alpha, exact) == expect,
                         "baseline decode wrong at P'");
                bool guard = false;
                std::vector<Response> short_list(resp.begin(), resp.begin() + P - 1);
                try {
                    baseline_decode(f, K, tp, st.alpha, short_list);
                } catch (const InsufficientResponses&) {
                    guard = true;
                }
                auto forged = exact;
                forged.back().y = random_matrix(f, lam, ga, derive_seed(seed, 3));
                c.expect(guard && baseline_decode(f, K, tp, st.alpha, forged) != expect,
                         "baseline P'-1 not refused");
            }
    } catch (const std::exception& e) {
        c.expect(false, e.what());
    }
    verdict(6, "baseline: P' = 3K+T'-2 exactly, storage counters match both layouts", c.ok,
            c.why);
}

// ---- criterion 7 ----

void criterion_7() {
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
        CostScenario s;
        s.N = 50;
        s.K = 6;
        s.V = 50;
        s.lambda = 1e4;
        s.omega = 1e4;
        s.gamma = 1e4;

        // upload ratio against the prior scheme, every L and factorization
        for (std::size_t L = 1; L <= 6; ++L)
            for (std::size_t p = 1; p <= 6; ++p) {
                if (6 % p) continue;
                std::size_t n = 6 / p;
                double ours = psmm_costs(s, L, 1).upload;
                double prior = prior_psmm_costs(s, L, p, n).upload;
                double want = double(s.V * n);
                c.expect(std::abs(prior / ours - want) <= 1e-12 * want,
                         "upload ratio not V*n at L=" + std::to_string(L));
            }

        // communication hull comparison on the shared threshold grid
        auto ours = pareto_sweep(s, Strategy::OursPsmm, Objective::TotalComm);
        auto prior = pareto_sweep(s, Strategy::PriorPsmm, Objective::TotalComm);
        c.expect(!ours.empty() && !prior.empty(), "empty sweep");
        u64 lo = std::max(ours.front().cv.P, prior.front().cv.P);
        for (u64 th = lo; th <= s.N; ++th) {
            double a = frontier_value_at(ours, Objective::TotalComm, th);
            double b = frontier_value_at(prior, Objective::TotalComm, th);
            c.expect(a <= b, "prior hull beats ours at threshold " + std::to_string(th));
        }

        // threshold equivalence of the two-sided scheme under substitution
        for (std::size_t L = 1; L <= 3; ++L)
            for (std::size_t M = 1; M <= 3; ++M)
                for (std::size_t K = 1; K <= 3; ++K)
                    for (std::size_t TA = 1; TA <= 3; ++TA)
                        for (std::size_t TB = 1; TB <= 3; ++TB) {
                            u64 a = fpmm_threshold({L, M, K, TA, TB}).P;
                            u64 b = psmm_threshold({L, M, K, K + TA - 1, TB}).P;
                            c.expect(a == b, "substitution equivalence broken");
                        }
    } catch (const std::exception& e) {
        c.expect(false, e.what());
    }
    double dt = seconds_since(t0);
    c.expect(dt < 30.0, "over the 30 s budget");
    verdict(7, "cost model: V*n upload ratio, dominating communication hull, substitution law",
            c.ok, c.ok ? fmt_secs(dt) : c.why);
}

// ---- criterion 8 ----

void criterion_8() {
    Check c;
    try {
        Field f(kMersenne61);
        PsmmDims dims{2, 2, 2, 2, 2};
        StrategyPlan plan = make_psmm_plan(25, dims, Family::Delta1);
        Library lb = random_library(f, 2, 40, 40, 801);
        ShardStore st = encode_store(f, Library{}, lb, default_alpha(f, 25), 2, 2, 2);
        SessionSpec spec;
        spec.mode = SessionMode::Psmm;
        spec.psmm.theta = 1;
        spec.psmm.a = random_matrix(f, 40, 40, 802);
        spec.psmm.plan = plan;
        spec.psmm.noise_seed = 803;

        SessionTranscript local = run_session(f, st, spec);
        Server srv(f, st, 0);
        std::thread worker([&] { srv.serve_connections(1); });
        TransportSpec t;
        t.kind = Transport::Tcp;
        t.port = srv.port();
        SessionTranscript remote = run_session(f, st, spec, t);
        worker.join();

        c.expect(local.ok && remote.ok, "a session failed to decode");
        c.expect(local.canonical.dump() == remote.canonical.dump(),
                 "transcripts differ across transports");
        c.expect(local.decoded == remote.decoded, "decoded outputs differ");
        c.expect(local.decoded == mat_mul(f, spec.psmm.a, lb.mats[0]),
                 "decode != naive product");
    } catch (const std::exception& e) {
        c.expect(false, e.what());
    }
    verdict(8, "transport equivalence: byte-identical transcripts in process and over TCP",
            c.ok, c.why);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures == 0)
        std::printf("all 8 criteria passed\n");
    else
        std::printf("%d criteria failed\n", failures);
    return failures;
}
