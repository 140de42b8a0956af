#pragma once
// Two-sided private multiplication: both operands are rows of coded
// libraries, and the master reveals neither index.  A^(theta_A) is hidden
// from any T_A colluding servers, B^(theta_B) from any T_B.
//
// Per server i the master sends two query vectors:
//   qa_l^(r)(alpha_i) = sum_{t<=TA} za_{l,t}^(r) alpha_i^(b_{L+1}+t-1)
//                     + [r == theta_A] alpha_i^(b_l)
//   qb_m^(v)(alpha_i) = sum_{t<=TB} zb_{m,t}^(v) alpha_i^(d_{M+1}+t-1)
//                     + [v == theta_B] alpha_i^(d_m)
// The server contracts its stored evaluations with both vectors and
// multiplies:  Y_i = (sum qa * et) (sum qb * e).  Decoding is identical to
// the one-sided protocol, block (l, m) at exponent K-1+b_l+d_m.
//
// The comparison baseline is the classical one-shot scheme: every server
// pre-multiplies its A and B evaluations for all (r, v) pairs and answers a
// single R*V query vector built on powers 1/x^K, 1, x, ..., x^(T'-1) with
// T' = max(TA, TB).  Scaling the response by alpha_i^K turns the Laurent
// series into an ordinary polynomial of degree 3K+T'-3, so the threshold is
// P' = 3K+T'-2 and the product appears at exponent K-1.  It needs L = M = 1
// storage and pays R*V*lambda*gamma elements of storage per server.

#include <span>
#include <vector>

#include "pmm/protocol.hpp"
#include "pmm/storage.hpp"

namespace pmm {

struct FpmmRequest {
    std::size_t theta_a = 1, theta_b = 1;  // 1-based
    StrategyPlan plan;
    u64 noise_seed = 0;
    bool noiseless = false;
};

struct FpmmQueries {
    std::vector<Fe> qa;  // R*L scalars, (r-1)*L + (l-1)
    std::vector<Fe> qb;  // V*M scalars, (v-1)*M + (m-1)
};

std::vector<FpmmQueries> fpmm_make_queries(const Field& f, const FpmmRequest& req,
                                           std::size_t R, std::size_t V,
                                           std::span<const Fe> alpha);

Matrix fpmm_respond(const Field& f, std::span<const Matrix> shard_a_blocks,
                    std::span<const Matrix> shard_b_blocks, const FpmmQueries& q);

Matrix fpmm_decode(const Field& f, const StrategyPlan& plan, std::span<const Fe> alpha,
                   std::span<const Response> responses);
Matrix fpmm_decode_with_errors(const Field& f, const StrategyPlan& plan,
                               std::span<const Fe> alpha, std::span<const Response> responses,
                               std::size_t max_errors);

// ---- baseline ----

struct BaselineStore {
    std::size_t R = 0, V = 0;
    // products[i][(r-1)*V + (v-1)] = et^(r)(alpha_i) * e^(v)(alpha_i), lambda x gamma
    std::vector<std::vector<Matrix>> products;

    u64 elements_per_server() const;
};

struct BaselineRequest {
    std::size_t theta_a = 1, theta_b = 1;
    std::size_t t_prime = 1;  // max of the two privacy levels
    u64 noise_seed = 0;
    bool noiseless = false;
};

std::size_t baseline_threshold(std::size_t K, std::size_t t_prime);  // 3K + T' - 2

// requires an L = M = 1 store with both libraries present
BaselineStore baseline_setup(const Field& f, const ShardStore& st);

// R*V scalars per server, (r-1)*V + (v-1); K fixes the selector pole 1/x^K
std::vector<std::vector<Fe>> baseline_make_queries(const Field& f, const BaselineRequest& req,
                                                   std::size_t K, std::size_t R, std::size_t V,
                                                   std::span<const Fe> alpha);

Matrix baseline_respond(const Field& f, std::span<const Matrix> products,
                        std::span<const Fe> query);

Matrix baseline_decode(const Field& f, std::size_t K, std::size_t t_prime,
                       std::span<const Fe> alpha, std::span<const Response> responses);

// whole flow against a store, returns the decoded product (test convenience)
Matrix baseline_query_respond_decode(const Field& f, const ShardStore& st,
                                     const BaselineRequest& req);

}  // namespace pmm
