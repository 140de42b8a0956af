#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "pmm/psmm.hpp"

using namespace pmm;

namespace {

struct Instance {
    Field f{kMersenne61};
    StrategyPlan plan;
    ShardStore store;
    PsmmRequest req;
    Matrix expect;
    std::vector<Response> responses;  // all N servers, in id order

    Instance(PsmmDims dims, std::size_t V, std::size_t theta, std::size_t lam, std::size_t om,
             std::size_t ga, u64 seed, bool noiseless = false, std::size_t spare = 2) {
        plan = make_psmm_plan(psmm_threshold(dims).P + spare, dims);
        Library lb = random_library(f, V, om, ga, seed);
        store = encode_store(f, Library{}, lb, default_alpha(f, plan.N), dims.K, dims.L, dims.M);
        req.theta = theta;
        req.a = random_matrix(f, lam, om, derive_seed(seed, 1));
        req.plan = plan;
        req.noise_seed = derive_seed(seed, 2);
        req.noiseless = noiseless;
        expect = mat_mul(f, req.a, lb.mats[theta - 1]);
        auto shares = psmm_share_matrix(f, req, store.alpha);
        auto queries = psmm_make_queries(f, req, V, store.alpha);
        for (std::size_t i = 0; i < plan.N; ++i)
            responses.push_back({i, psmm_respond(f, store.shards_b[i], shares[i], queries[i])});
    }
};

}  // namespace

TEST_CASE("decoded output equals the plain product across shapes") {
    struct Case {
        PsmmDims d;
        std::size_t V, theta, lam, om, ga;
    };
    const Case cases[] = {
        {{1, 1, 1, 1, 1}, 2, 1, 1, 1, 1},   {{2, 2, 2, 2, 2}, 3, 2, 2, 2, 2},
        {{1, 2, 3, 1, 2}, 2, 2, 1, 3, 2},   {{3, 1, 2, 2, 1}, 3, 3, 3, 2, 1},
        {{2, 2, 2, 1, 1}, 2, 1, 4, 6, 4},  // blocks wider than one element
    };
    u64 seed = 11;
    for (const Case& c : cases) {
        CAPTURE(c.d.L);
        CAPTURE(c.d.M);
        CAPTURE(c.d.K);
        Instance in(c.d, c.V, c.theta, c.lam, c.om, c.ga, seed++);
        Matrix got = psmm_decode(in.f, in.plan, in.store.alpha, in.responses);
        CHECK(got == in.expect);
    }
}

TEST_CASE("noiseless debug mode decodes to the same product") {
    PsmmDims d{2, 1, 2, 1, 2};
    Instance noisy(d, 2, 2, 2, 2, 1, 77, false);
    Instance quiet(d, 2, 2, 2, 2, 1, 77, true);
    Matrix a = psmm_decode(noisy.f, noisy.plan, noisy.store.alpha, noisy.responses);
    Matrix b = psmm_decode(quiet.f, quiet.plan, quiet.store.alpha, quiet.responses);
    CHECK(a == b);
    CHECK(a == noisy.expect);
}

TEST_CASE("share polynomial carries each strip at its assigned exponent") {
    PsmmDims d{2, 2, 2, 2, 2};
    Field f(kMersenne61);
    StrategyPlan plan = make_psmm_plan(20, d, Family::Delta1);  // b = (0, 7, 11)
    PsmmRequest req;
    req.theta = 1;
    req.a = random_matrix(f, 4, 6, 5);
    req.plan = plan;
    req.noiseless = true;
    MatrixPoly fp = psmm_share_poly(f, req);
    BlockMatrix blocks = partition(req.a, d.L, d.K);
    Matrix zero(2, 3);
    for (std::size_t l = 1; l <= d.L; ++l)
        for (std::size_t k = 1; k <= d.K; ++k)
            CHECK(fp.coeff[plan.degrees.b[l - 1] + k - 1] == blocks.block(l - 1, k - 1));
    for (std::size_t e : {2, 5, 6, 9, 10}) CHECK(fp.coeff[e] == zero);
    // with masking on, the S coefficients above the data band fill in
    req.noiseless = false;
    req.noise_seed = 9;
    MatrixPoly fn = psmm_share_poly(f, req);
    CHECK(fn.coeff.size() == 13);
    CHECK_FALSE(fn.coeff[11] == zero);
    CHECK_FALSE(fn.coeff[12] == zero);
    // and the shares are exactly this polynomial at the alphas
    auto shares = psmm_share_matrix(f, req, default_alpha(f, 20));
    for (std::size_t i = 0; i < 20; ++i)
        CHECK(shares[i] == fn.eval(f, default_alpha(f, 20)[i]));
}

TEST_CASE("queries reduce to the bare selector when masking is off") {
    PsmmDims d{1, 2, 2, 1, 1};
    Field f(kMersenne61);
    StrategyPlan plan = make_psmm_plan(psmm_threshold(d).P, d);
    PsmmRequest req;
    req.theta = 2;
    req.a = random_matrix(f, 1, 2, 3);
    req.plan = plan;
    req.noiseless = true;
    const std::size_t V = 3;
    auto alpha = default_alpha(f, plan.N);
    auto queries = psmm_make_queries(f, req, V, alpha);
    REQUIRE(queries.size() == plan.N);
    for (std::size_t i = 0; i < plan.N; ++i) {
        REQUIRE(queries[i].size() == V * d.M);
        for (std::size_t v = 1; v <= V; ++v)
            for (std::size_t m = 1; m <= d.M; ++m) {
                Fe want = v == req.theta ? f.pow(alpha[i], plan.degrees.d[m - 1]) : Fe{0};
                CHECK(queries[i][(v - 1) * d.M + (m - 1)] == want);
            }
    }
    // same seed, same masked queries; different seed, different ones
    req.noiseless = false;
    req.noise_seed = 100;
    auto q1 = psmm_make_queries(f, req, V, alpha);
    auto q2 = psmm_make_queries(f, req, V, alpha);
    CHECK(q1 == q2);
    req.noise_seed = 101;
    CHECK(psmm_make_queries(f, req, V, alpha) != q1);
}

TEST_CASE("any threshold-sized subset of responses decodes") {
    PsmmDims d{2, 2, 2, 1, 1};
    Instance in(d, 2, 1, 2, 2, 2, 21, false, 4);
    const std::size_t P = in.plan.P;
    std::mt19937_64 g(7);
    std::vector<std::size_t> ids(in.plan.N);
    std::iota(ids.begin(), ids.end(), 0);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(ids.begin(), ids.end(), g);
        std::vector<std::size_t> pick(ids.begin(), ids.begin() + P);
        std::sort(pick.begin(), pick.end());
        std::vector<Response> sub;
        for (std::size_t id : pick) sub.push_back(in.responses[id]);
        CHECK(psmm_decode(in.f, in.plan, in.store.alpha, sub) == in.expect);
    }
    // the highest-id window works too, not just the default prefix
    std::vector<Response> tail(in.responses.end() - P, in.responses.end());
    CHECK(psmm_decode(in.f, in.plan, in.store.alpha, tail) == in.expect);
}

TEST_CASE("short or duplicated response lists are rejected") {
    PsmmDims d{1, 1, 2, 1, 1};
    Instance in(d, 2, 1, 1, 2, 1, 31);
    std::vector<Response> few(in.responses.begin(), in.responses.begin() + in.plan.P - 1);
    CHECK_THROWS_AS(psmm_decode(in.f, in.plan, in.store.alpha, few), InsufficientResponses);
    std::vector<Response> dup(in.responses.begin(), in.responses.begin() + in.plan.P);
    dup[1] = dup[0];
    CHECK_THROWS_AS(psmm_decode(in.f, in.plan, in.store.alpha, dup), Error);
}

TEST_CASE("a corrupted response among extras fails the consistency check") {
    PsmmDims d{1, 1, 2, 1, 1};
    Instance in(d, 2, 1, 1, 2, 1, 41, false, 2);
    auto bad = in.responses;
    bad.back().y = random_matrix(in.f, bad.back().y.rows, bad.back().y.cols, 999);
    CHECK_THROWS_AS(psmm_decode(in.f, in.plan, in.store.alpha, bad), UncorrectableErrors);
}

TEST_CASE("corrupted responses within budget are located and discarded") {
    PsmmDims d{2, 1, 2, 1, 1};
    for (std::size_t errs : {std::size_t{1}, std::size_t{2}}) {
        Instance in(d, 2, 2, 2, 2, 1, 50 + errs, false, 2 * errs);
        auto bad = in.responses;
        REQUIRE(bad.size() >= in.plan.P + 2 * errs);
        // one wildly wrong block, and when allowed a second off by a single unit
        bad[2].y = random_matrix(in.f, bad[2].y.rows, bad[2].y.cols, 1234);
        if (errs == 2) bad[5].y.at(0, 0) = in.f.add(bad[5].y.at(0, 0), in.f.one());
        Matrix got = psmm_decode_with_errors(in.f, in.plan, in.store.alpha, bad, errs);
        CHECK(got == in.expect);
    }
}

TEST_CASE("more corruption than the declared budget is detected, not absorbed") {
    PsmmDims d{1, 1, 2, 1, 1};
    Instance in(d, 2, 1, 1, 2, 1, 61, false, 2);
    auto bad = in.responses;
    bad[0].y = random_matrix(in.f, bad[0].y.rows, bad[0].y.cols, 71);
    bad[3].y = random_matrix(in.f, bad[3].y.rows, bad[3].y.cols, 72);
    CHECK_THROWS_AS(psmm_decode_with_errors(in.f, in.plan, in.store.alpha, bad, 1),
                    UncorrectableErrors);
}
