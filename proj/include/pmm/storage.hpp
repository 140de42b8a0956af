#pragma once
// (N, K) MDS-coded storage for two matrix libraries.
//
// Library B holds V matrices of shape omega x gamma.  Each B^(v) is cut
// into a K x M grid; column strip m is committed to the polynomial
//     e_m^(v)(x) = sum_k B_{k,m}^(v) x^(K-k)        (descending powers)
// and server i stores e_m^(v)(alpha_i).  Any K servers therefore hold a
// Reed-Solomon codeword of the strip and can rebuild it.
//
// Library A holds R matrices of shape lambda x omega, cut L x K, with row
// strip ell committed to
//     et_ell^(r)(x) = sum_k A_{ell,k}^(r) x^(k-1)   (ascending powers)
//
// The two power orders are deliberate: they make the product of an A-side
// and B-side evaluation place the aligned diagonal at exponent K-1.
//
// On disk a store is a directory: manifest.json plus one PMM1 file per
// shard block.  Loading checks structure and modulus agreement, not the
// polynomial identity (that needs the plaintext library).

#include <filesystem>
#include <span>
#include <vector>

#include "pmm/matrix.hpp"

namespace pmm {

// plain list of equally shaped matrices
struct Library {
    std::size_t rows = 0, cols = 0;
    std::vector<Matrix> mats;

    std::size_t count() const { return mats.size(); }
};

Library make_library(std::size_t rows, std::size_t cols, std::vector<Matrix> mats);
Library random_library(const Field& f, std::size_t count, std::size_t rows, std::size_t cols,
                       u64 seed);

struct StoreParams {
    u64 modulus = 0;
    std::size_t N = 0, K = 0, L = 1, M = 1;
    std::size_t V = 0, R = 0;                    // library sizes (B side, A side)
    std::size_t lambda = 0, omega = 0, gamma = 0;  // plaintext dims; lambda only when R > 0
    u64 library_seed = 0;                        // provenance note carried in the manifest
};

struct ShardStore {
    StoreParams params;
    std::vector<Fe> alpha;  // N pairwise distinct nonzero evaluation points
    // shards_b[i][v*M + m] : (omega/K) x (gamma/M) block, e_m^(v)(alpha_i)
    std::vector<std::vector<Matrix>> shards_b;
    // shards_a[i][r*L + l] : (lambda/L) x (omega/K) block, et_l^(r)(alpha_i); empty when R == 0
    std::vector<std::vector<Matrix>> shards_a;

    // stored elements per server, matches the cost model's storage counter
    u64 elements_per_server() const;
};

// default points 1..N; any override must stay distinct and nonzero
std::vector<Fe> default_alpha(const Field& f, std::size_t n);

// per-server blocks for one library; outer index is the server
std::vector<std::vector<Matrix>> encode_library_b(const Field& f, const Library& lib,
                                                  std::span<const Fe> alpha, std::size_t K,
                                                  std::size_t M);
std::vector<std::vector<Matrix>> encode_library_a(const Field& f, const Library& lib,
                                                  std::span<const Fe> alpha, std::size_t K,
                                                  std::size_t L);

ShardStore encode_store(const Field& f, const Library& lib_a, const Library& lib_b,
                        std::span<const Fe> alpha, std::size_t K, std::size_t L, std::size_t M,
                        u64 library_seed = 0);

// Rebuilds a library from the shards of exactly K servers (0-based ids).
// InsufficientShards when fewer than K distinct ids are given; more than K
// is also rejected, callers choose the subset.
Library reconstruct_library_b(const Field& f, const ShardStore& st,
                              std::span<const std::size_t> servers);
Library reconstruct_library_a(const Field& f, const ShardStore& st,
                              std::span<const std::size_t> servers);

void save_shards(const ShardStore& st, const std::filesystem::path& dir);
ShardStore load_shards(const std::filesystem::path& dir);

}  // namespace pmm
