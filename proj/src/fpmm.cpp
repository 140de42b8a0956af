#include "pmm/fpmm.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "pmm/poly.hpp"

namespace pmm {

namespace {

constexpr u64 kQueryATag = 0x46504d4d41ull;
constexpr u64 kQueryBTag = 0x46504d4d42ull;
constexpr u64 kBaselineTag = 0x42415345ull;

}  // namespace

std::vector<FpmmQueries> fpmm_make_queries(const Field& f, const FpmmRequest& req,
                                           std::size_t R, std::size_t V,
                                           std::span<const Fe> alpha) {
    const auto& plan = req.plan;
    if (plan.kind != Kind::Fpmm) throw Error("plan kind is not the two-sided protocol");
    if (req.theta_a < 1 || req.theta_a > R)
        throw Error("theta_a=" + std::to_string(req.theta_a) + " out of range for R=" +
                    std::to_string(R));
    if (req.theta_b < 1 || req.theta_b > V)
        throw Error("theta_b=" + std::to_string(req.theta_b) + " out of range for V=" +
                    std::to_string(V));

    FieldRng rng_a(derive_seed(req.noise_seed, kQueryATag));
    FieldRng rng_b(derive_seed(req.noise_seed, kQueryBTag));
    std::vector<std::vector<Fe>> za(R * plan.L, std::vector<Fe>(plan.TA, f.zero()));
    std::vector<std::vector<Fe>> zb(V * plan.M, std::vector<Fe>(plan.TB, f.zero()));
    if (!req.noiseless) {
        for (auto& zv : za)
            for (Fe& e : zv) e = rng_a.uniform(f);
        for (auto& zv : zb)
            for (Fe& e : zv) e = rng_b.uniform(f);
    }

    std::vector<FpmmQueries> out(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i].qa.resize(R * plan.L);
        for (std::size_t r = 1; r <= R; ++r) {
            for (std::size_t l = 1; l <= plan.L; ++l) {
                Fe q = f.zero();
                for (std::size_t t = 1; t <= plan.TA; ++t) {
                    Fe pw = f.pow(alpha[i], plan.degrees.b[plan.L] + t - 1);
                    q = f.add(q, f.mul(za[(r - 1) * plan.L + (l - 1)][t - 1], pw));
                }
                if (r == req.theta_a) q = f.add(q, f.pow(alpha[i], plan.degrees.b[l - 1]));
                out[i].qa[(r - 1) * plan.L + (l - 1)] = q;
            }
        }
        out[i].qb.resize(V * plan.M);
        for (std::size_t v = 1; v <= V; ++v) {
            for (std::size_t m = 1; m <= plan.M; ++m) {
                Fe q = f.zero();
                for (std::size_t t = 1; t <= plan.TB; ++t) {
                    Fe pw = f.pow(alpha[i], plan.degrees.d[plan.M] + t - 1);
                    q = f.add(q, f.mul(zb[(v - 1) * plan.M + (m - 1)][t - 1], pw));
                }
                if (v == req.theta_b) q = f.add(q, f.pow(alpha[i], plan.degrees.d[m - 1]));
                out[i].qb[(v - 1) * plan.M + (m - 1)] = q;
            }
        }
    }
    return out;
}

Matrix fpmm_respond(const Field& f, std::span<const Matrix> shard_a_blocks,
                    std::span<const Matrix> shard_b_blocks, const FpmmQueries& q) {
    if (shard_a_blocks.empty() || shard_b_blocks.empty())
        throw ShapeMismatch("server is missing one of the two block lists");
    if (shard_a_blocks.size() != q.qa.size() || shard_b_blocks.size() != q.qb.size())
        throw ShapeMismatch("query lengths do not match the stored block counts");
    Matrix at(shard_a_blocks[0].rows, shard_a_blocks[0].cols);
    for (std::size_t j = 0; j < q.qa.size(); ++j) {
        if (shard_a_blocks[j].rows != at.rows || shard_a_blocks[j].cols != at.cols)
            throw ShapeMismatch("A-side blocks differ in shape");
        scale_add_into(f, at, q.qa[j], shard_a_blocks[j]);
    }
    Matrix bt(shard_b_blocks[0].rows, shard_b_blocks[0].cols);
    for (std::size_t j = 0; j < q.qb.size(); ++j) {
        if (shard_b_blocks[j].rows != bt.rows || shard_b_blocks[j].cols != bt.cols)
            throw ShapeMismatch("B-side blocks differ in shape");
        scale_add_into(f, bt, q.qb[j], shard_b_blocks[j]);
    }
    if (at.cols != bt.rows) throw ShapeMismatch("contracted blocks do not chain");
    return mat_mul(f, at, bt);
}

Matrix fpmm_decode(const Field& f, const StrategyPlan& plan, std::span<const Fe> alpha,
                   std::span<const Response> responses) {
    return decode_product(f, plan, alpha, responses);
}

Matrix fpmm_decode_with_errors(const Field& f, const StrategyPlan& plan,
                               std::span<const Fe> alpha, std::span<const Response> responses,
                               std::size_t max_errors) {
    return decode_product_with_errors(f, plan, alpha, responses, max_errors);
}

// ---- baseline ----

u64 BaselineStore::elements_per_server() const {
    if (products.empty() || products[0].empty()) return 0;
    return u64(products[0].size()) * products[0][0].rows * products[0][0].cols;
}

std::size_t baseline_threshold(std::size_t K, std::size_t t_prime) {
    return 3 * K + t_prime - 2;
}

BaselineStore baseline_setup(const Field& f, const ShardStore& st) {
    const auto& p = st.params;
    if (p.L != 1 || p.M != 1)
        throw Error("baseline needs unsplit storage (L = M = 1), store has L=" +
                    std::to_string(p.L) + " M=" + std::to_string(p.M));
    if (p.R == 0 || p.V == 0) throw Error("baseline needs both libraries present");
    BaselineStore bs;
    bs.R = p.R;
    bs.V = p.V;
    bs.products.resize(p.N);
    for (std::size_t i = 0; i < p.N; ++i) {
        bs.products[i].reserve(p.R * p.V);
        for (std::size_t r = 0; r < p.R; ++r)
            for (std::size_t v = 0; v < p.V; ++v)
                bs.products[i].push_back(mat_mul(f, st.shards_a[i][r], st.shards_b[i][v]));
    }
    return bs;
}

std::vector<std::vector<Fe>> baseline_make_queries(const Field& f, const BaselineRequest& req,
                                                   std::size_t K, std::size_t R, std::size_t V,
                                                   std::span<const Fe> alpha) {
    if (req.theta_a < 1 || req.theta_a > R || req.theta_b < 1 || req.theta_b > V)
        throw Error("baseline indices out of range");
    if (req.t_prime < 1) throw Error("privacy level must be at least 1");
    FieldRng rng(derive_seed(req.noise_seed, kBaselineTag));
    std::vector<std::vector<Fe>> z(R * V, std::vector<Fe>(req.t_prime, f.zero()));
    if (!req.noiseless)
        for (auto& zv : z)
            for (Fe& e : zv) e = rng.uniform(f);

    std::vector<std::vector<Fe>> out(alpha.size(), std::vector<Fe>(R * V));
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        for (std::size_t r = 1; r <= R; ++r) {
            for (std::size_t v = 1; v <= V; ++v) {
                Fe q = f.zero();
                Fe pw = f.one();  // powers 1, x, ..., x^(T'-1)
                for (std::size_t t = 1; t <= req.t_prime; ++t) {
                    q = f.add(q, f.mul(z[(r - 1) * V + (v - 1)][t - 1], pw));
                    pw = f.mul(pw, alpha[i]);
                }
                if (r == req.theta_a && v == req.theta_b) {
                    // selector sits at 1/x^K; the decoder clears the pole by
                    // scaling responses with alpha^K
                    q = f.add(q, f.inv(f.pow(alpha[i], u64(K))));
                }
                out[i][(r - 1) * V + (v - 1)] = q;
            }
        }
    }
    return out;
}

Matrix baseline_respond(const Field& f, std::span<const Matrix> products,
                        std::span<const Fe> query) {
    if (products.empty() || products.size() != query.size())
        throw ShapeMismatch("baseline query length does not match the stored products");
    Matrix y(products[0].rows, products[0].cols);
    for (std::size_t j = 0; j < query.size(); ++j) scale_add_into(f, y, query[j], products[j]);
    return y;
}

Matrix baseline_decode(const Field& f, std::size_t K, std::size_t t_prime,
                       std::span<const Fe> alpha, std::span<const Response> responses) {
    const std::size_t P = baseline_threshold(K, t_prime);
    if (responses.size() < P)
        throw InsufficientResponses("baseline decode needs P'=" + std::to_string(P) +
                                    " responses, got " + std::to_string(responses.size()));
    std::vector<Response> rs(responses.begin(), responses.end());
    std::sort(rs.begin(), rs.end(),
              [](const Response& a, const Response& b) { return a.server < b.server; });
    std::set<std::size_t> ids;
    for (const Response& r : rs)
        if (!ids.insert(r.server).second)
            throw Error("two responses from server " + std::to_string(r.server));

    // clear the 1/x^K pole, then the series is an ordinary polynomial of
    // degree 3K + T' - 3 with the product at exponent K - 1
    std::vector<Fe> xs;
    std::vector<Matrix> ys;
    for (std::size_t i = 0; i < P; ++i) {
        Fe x = alpha[rs[i].server];
        xs.push_back(x);
        ys.push_back(mat_scale(f, f.pow(x, K), rs[i].y));
    }
    auto basis = lagrange_basis(f, xs);
    std::vector<Matrix> coeffs(P, Matrix(ys[0].rows, ys[0].cols));
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < basis[i].c.size(); ++j) {
            if (basis[i].c[j].v == 0) continue;
            scale_add_into(f, coeffs[j], basis[i].c[j], ys[i]);
        }
    if (rs.size() > P) {
        MatrixPoly g;
        g.rows = ys[0].rows;
        g.cols = ys[0].cols;
        g.coeff = coeffs;
        for (std::size_t i = P; i < rs.size(); ++i) {
            Fe x = alpha[rs[i].server];
            if (g.eval(f, x) != mat_scale(f, f.pow(x, K), rs[i].y))
                throw UncorrectableErrors("extra baseline response from server " +
                                          std::to_string(rs[i].server) + " is inconsistent");
        }
    }
    return coeffs[K - 1];
}

Matrix baseline_query_respond_decode(const Field& f, const ShardStore& st,
                                     const BaselineRequest& req) {
    BaselineStore bs = baseline_setup(f, st);
    auto queries = baseline_make_queries(f, req, st.params.K, bs.R, bs.V, st.alpha);
    std::vector<Response> rs;
    rs.reserve(st.params.N);
    for (std::size_t i = 0; i < st.params.N; ++i)
        rs.push_back({i, baseline_respond(f, bs.products[i], queries[i])});
    return baseline_decode(f, st.params.K, req.t_prime, st.alpha, rs);
}

}  // namespace pmm
