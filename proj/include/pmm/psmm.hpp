#pragma once
// One-sided private multiplication: the master owns a confidential matrix A
// and wants A * B^(theta) against a coded library, hiding A from any S
// colluding servers and theta from any T colluding servers.
//
// Master side per server i:
//   share    At_i = f(alpha_i),  f(x) = sum_l sum_k A_{l,k} x^(k-1+b_l)
//                                     + sum_{t<=S} Z_t x^(b_{L+1}+t-1)
//   queries  q_m^(v)(alpha_i) = sum_{t<=T} z_{m,t}^(v) alpha_i^(d_{M+1}+t-1)
//                             + [v == theta] alpha_i^(d_m)
// Server side:
//   Bt_i = sum_v sum_m e_m^(v)(alpha_i) * q_m^(v)(alpha_i)   (equals h(alpha_i))
//   Y_i  = At_i * Bt_i                                        (equals (f*h)(alpha_i))
// The decoder recovers f*h from P evaluations and reads block (l, m) at
// exponent K-1+b_l+d_m.
//
// Z and z are uniform; with noiseless set they are all zero, a debug mode
// that voids both privacy guarantees (audits must never run on it).

#include <span>
#include <vector>

#include "pmm/protocol.hpp"
#include "pmm/storage.hpp"

namespace pmm {

struct PsmmRequest {
    std::size_t theta = 1;  // 1-based library index
    Matrix a;               // lambda x omega
    StrategyPlan plan;
    u64 noise_seed = 0;
    bool noiseless = false;  // debug only, shares and queries carry no noise
};

// f(x) with matrix coefficients; exposed so tests can inspect the exponent
// layout directly
MatrixPoly psmm_share_poly(const Field& f, const PsmmRequest& req);

// shares At_i = f(alpha_i) for every server
std::vector<Matrix> psmm_share_matrix(const Field& f, const PsmmRequest& req,
                                      std::span<const Fe> alpha);

// per-server query scalars, V*M each, laid out (v-1)*M + (m-1)
std::vector<std::vector<Fe>> psmm_make_queries(const Field& f, const PsmmRequest& req,
                                               std::size_t V, std::span<const Fe> alpha);

// one server's work: contract the stored blocks with the query, multiply by
// the share.  shard_blocks is that server's e_m^(v) list, (v-1)*M + (m-1).
Matrix psmm_respond(const Field& f, std::span<const Matrix> shard_blocks, const Matrix& share,
                    std::span<const Fe> query);

Matrix psmm_decode(const Field& f, const StrategyPlan& plan, std::span<const Fe> alpha,
                   std::span<const Response> responses);
Matrix psmm_decode_with_errors(const Field& f, const StrategyPlan& plan,
                               std::span<const Fe> alpha, std::span<const Response> responses,
                               std::size_t max_errors);

}  // namespace pmm
