#include "pmm/psmm.hpp"

#include <string>

namespace pmm {

namespace {

// sub-seed tags keep share noise and query noise on independent streams
constexpr u64 kShareTag = 0x414d4153ull;  // share noise
constexpr u64 kQueryTag = 0x51505341ull;  // query noise

void check_psmm_request(const PsmmRequest& req) {
    const auto& p = req.plan;
    if (p.kind != Kind::Psmm) throw Error("plan kind is not the one-sided protocol");
    if (req.theta < 1) throw Error("theta is 1-based");
    if (p.L == 0 || p.K == 0 || req.a.rows % p.L != 0 || req.a.cols % p.K != 0)
        throw IndivisibleDimensions("A is " + std::to_string(req.a.rows) + "x" +
                                    std::to_string(req.a.cols) + ", not divisible by L=" +
                                    std::to_string(p.L) + ", K=" + std::to_string(p.K));
}

}  // namespace

MatrixPoly psmm_share_poly(const Field& f, const PsmmRequest& req) {
    check_psmm_request(req);
    const auto& plan = req.plan;
    BlockMatrix ab = partition(req.a, plan.L, plan.K);
    MatrixPoly poly;
    for (std::size_t l = 1; l <= plan.L; ++l)
        for (std::size_t k = 1; k <= plan.K; ++k)
            poly.add_term(f, std::size_t(plan.degrees.b[l - 1]) + k - 1, ab.block(l - 1, k - 1));
    FieldRng rng(derive_seed(req.noise_seed, kShareTag));
    for (std::size_t t = 1; t <= plan.S; ++t) {
        Matrix z(ab.block_rows(), ab.block_cols());
        if (!req.noiseless)
            for (Fe& e : z.a) e = rng.uniform(f);
        poly.add_term(f, std::size_t(plan.degrees.b[plan.L]) + t - 1, z);
    }
    return poly;
}

std::vector<Matrix> psmm_share_matrix(const Field& f, const PsmmRequest& req,
                                      std::span<const Fe> alpha) {
    MatrixPoly poly = psmm_share_poly(f, req);
    std::vector<Matrix> shares;
    shares.reserve(alpha.size());
    for (Fe x : alpha) shares.push_back(poly.eval(f, x));
    return shares;
}

std::vector<std::vector<Fe>> psmm_make_queries(const Field& f, const PsmmRequest& req,
                                               std::size_t V, std::span<const Fe> alpha) {
    check_psmm_request(req);
    const auto& plan = req.plan;
    if (req.theta > V)
        throw Error("theta=" + std::to_string(req.theta) + " exceeds library size " +
                    std::to_string(V));
    // noise is drawn once per (v, m, t), shared by all servers; the per-server
    // values are evaluations of one scalar polynomial per (v, m)
    FieldRng rng(derive_seed(req.noise_seed, kQueryTag));
    std::vector<std::vector<Fe>> z(V * plan.M, std::vector<Fe>(plan.T, f.zero()));
    if (!req.noiseless)
        for (auto& zv : z)
            for (Fe& e : zv) e = rng.uniform(f);

    std::vector<std::vector<Fe>> queries(alpha.size(), std::vector<Fe>(V * plan.M));
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        for (std::size_t v = 1; v <= V; ++v) {
            for (std::size_t m = 1; m <= plan.M; ++m) {
                Fe q = f.zero();
                for (std::size_t t = 1; t <= plan.T; ++t) {
                    Fe pw = f.pow(alpha[i], plan.degrees.d[plan.M] + t - 1);
                    q = f.add(q, f.mul(z[(v - 1) * plan.M + (m - 1)][t - 1], pw));
                }
                if (v == req.theta) q = f.add(q, f.pow(alpha[i], plan.degrees.d[m - 1]));
                queries[i][(v - 1) * plan.M + (m - 1)] = q;
            }
        }
    }
    return queries;
}

Matrix psmm_respond(const Field& f, std::span<const Matrix> shard_blocks, const Matrix& share,
                    std::span<const Fe> query) {
    if (shard_blocks.empty()) throw ShapeMismatch("server holds no stored blocks");
    if (shard_blocks.size() != query.size())
        throw ShapeMismatch("query has " + std::to_string(query.size()) +
                            " scalars for " + std::to_string(shard_blocks.size()) +
                            " stored blocks");
    Matrix bt(shard_blocks[0].rows, shard_blocks[0].cols);
    for (std::size_t j = 0; j < query.size(); ++j) {
        if (shard_blocks[j].rows != bt.rows || shard_blocks[j].cols != bt.cols)
            throw ShapeMismatch("stored blocks differ in shape");
        scale_add_into(f, bt, query[j], shard_blocks[j]);
    }
    if (share.cols != bt.rows)
        throw ShapeMismatch("share is *x" + std::to_string(share.cols) +
                            " but the contracted block is " + std::to_string(bt.rows) + "x*");
    return mat_mul(f, share, bt);
}

Matrix psmm_decode(const Field& f, const StrategyPlan& plan, std::span<const Fe> alpha,
                   std::span<const Response> responses) {
    return decode_product(f, plan, alpha, responses);
}

Matrix psmm_decode_with_errors(const Field& f, const StrategyPlan& plan,
                               std::span<const Fe> alpha, std::span<const Response> responses,
                               std::size_t max_errors) {
    return decode_product_with_errors(f, plan, alpha, responses, max_errors);
}

}  // namespace pmm
