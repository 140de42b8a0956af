#include "pmm/storage.hpp"

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "pmm/matrix_io.hpp"
#include "pmm/poly.hpp"

namespace pmm {

using json = nlohmann::ordered_json;

namespace {

void check_alpha(const Field& f, std::span<const Fe> alpha) {
    std::set<u64> seen;
    for (Fe a : alpha) {
        if (a.v == 0 || a.v >= f.modulus())
            throw Error("evaluation points must be nonzero field elements");
        if (!seen.insert(a.v).second)
            throw DuplicateEvaluationPoint("evaluation point " + std::to_string(a.v) +
                                           " assigned to two servers");
    }
}

std::string shard_name(char side, std::size_t server, std::size_t outer, std::size_t inner) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%c_s%03zu_%zu_%zu.pmm1", side, server, outer, inner);
    return buf;
}

// entrywise interpolation of a matrix polynomial from exactly k points,
// sharing one scalar Lagrange basis across all entries
std::vector<Matrix> interpolate_matrix_coeffs(const Field& f, std::span<const Fe> xs,
                                              const std::vector<const Matrix*>& ys) {
    auto basis = lagrange_basis(f, xs);
    const std::size_t k = xs.size();
    const Matrix& first = *ys[0];
    std::vector<Matrix> coeffs(k, Matrix(first.rows, first.cols));
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t j = 0; j < basis[s].c.size(); ++j) {
            if (basis[s].c[j].v == 0) continue;
            scale_add_into(f, coeffs[j], basis[s].c[j], *ys[s]);
        }
    }
    return coeffs;
}

}  // namespace

Library make_library(std::size_t rows, std::size_t cols, std::vector<Matrix> mats) {
    for (const Matrix& m : mats)
        if (m.rows != rows || m.cols != cols)
            throw DimensionMismatch("library entries must share one shape");
    return Library{rows, cols, std::move(mats)};
}

Library random_library(const Field& f, std::size_t count, std::size_t rows, std::size_t cols,
                       u64 seed) {
    FieldRng rng(seed);
    std::vector<Matrix> mats;
    mats.reserve(count);
    for (std::size_t i = 0; i < count; ++i) mats.push_back(random_matrix(f, rows, cols, rng));
    return Library{rows, cols, std::move(mats)};
}

std::vector<Fe> default_alpha(const Field& f, std::size_t n) {
    if (n >= f.modulus())
        throw Error("modulus " + std::to_string(f.modulus()) + " cannot supply " +
                    std::to_string(n) + " distinct nonzero evaluation points");
    std::vector<Fe> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = Fe{u64(i) + 1};
    return a;
}

u64 ShardStore::elements_per_server() const {
    const auto& p = params;
    u64 b = u64(p.V) * p.M * (p.omega / p.K) * (p.gamma / p.M);
    u64 a = u64(p.R) * p.L * (p.lambda / p.L) * (p.omega / p.K);
    return a + b;
}

std::vector<std::vector<Matrix>> encode_library_b(const Field& f, const Library& lib,
                                                  std::span<const Fe> alpha, std::size_t K,
                                                  std::size_t M) {
    check_alpha(f, alpha);
    std::vector<BlockMatrix> parts;
    parts.reserve(lib.count());
    for (const Matrix& m : lib.mats) parts.push_back(partition(m, K, M));
    std::vector<std::vector<Matrix>> out(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i].reserve(lib.count() * M);
        for (std::size_t v = 0; v < lib.count(); ++v) {
            for (std::size_t m = 0; m < M; ++m) {
                // Horner over descending powers: sum_k B_k x^(K-k)
                Matrix acc = parts[v].block(0, m);
                for (std::size_t k = 1; k < K; ++k) {
                    acc = mat_scale(f, alpha[i], acc);
                    Matrix nxt = parts[v].block(k, m);
                    acc = mat_add(f, acc, nxt);
                }
                out[i].push_back(std::move(acc));
            }
        }
    }
    return out;
}

std::vector<std::vector<Matrix>> encode_library_a(const Field& f, const Library& lib,
                                                  std::span<const Fe> alpha, std::size_t K,
                                                  std::size_t L) {
    check_alpha(f, alpha);
    std::vector<BlockMatrix> parts;
    parts.reserve(lib.count());
    for (const Matrix& m : lib.mats) parts.push_back(partition(m, L, K));
    std::vector<std::vector<Matrix>> out(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i].reserve(lib.count() * L);
        for (std::size_t r = 0; r < lib.count(); ++r) {
            for (std::size_t l = 0; l < L; ++l) {
                // Horner over ascending powers: sum_k A_k x^(k-1)
                Matrix acc = parts[r].block(l, K - 1);
                for (std::size_t k = K - 1; k > 0; --k) {
                    acc = mat_scale(f, alpha[i], acc);
                    Matrix nxt = parts[r].block(l, k - 1);
                    acc = mat_add(f, acc, nxt);
                }
                out[i].push_back(std::move(acc));
            }
        }
    }
    return out;
}

ShardStore encode_store(const Field& f, const Library& lib_a, const Library& lib_b,
                        std::span<const Fe> alpha, std::size_t K, std::size_t L, std::size_t M,
                        u64 library_seed) {
    if (K == 0 || alpha.size() < K)
        throw Error("store needs N >= K servers, got N=" + std::to_string(alpha.size()) +
                    " K=" + std::to_string(K));
    if (f.modulus() <= alpha.size())
        throw Error("modulus must exceed the server count");
    ShardStore st;
    st.params.modulus = f.modulus();
    st.params.N = alpha.size();
    st.params.K = K;
    st.params.L = L;
    st.params.M = M;
    st.params.V = lib_b.count();
    st.params.R = lib_a.count();
    st.params.omega = lib_b.rows;
    st.params.gamma = lib_b.cols;
    st.params.lambda = lib_a.count() ? lib_a.rows : 0;
    st.params.library_seed = library_seed;
    st.alpha.assign(alpha.begin(), alpha.end());
    if (lib_a.count() && lib_b.count() && lib_a.cols != lib_b.rows)
        throw DimensionMismatch("library shapes do not chain: A is *x" +
                                std::to_string(lib_a.cols) + ", B is " +
                                std::to_string(lib_b.rows) + "x*");
    if (lib_a.count()) st.params.omega = lib_a.cols;
    st.shards_b = encode_library_b(f, lib_b, alpha, K, M);
    if (lib_a.count())
        st.shards_a = encode_library_a(f, lib_a, alpha, K, L);
    else
        st.shards_a.assign(alpha.size(), {});
    return st;
}

namespace {

std::vector<std::size_t> checked_subset(const ShardStore& st,
                                        std::span<const std::size_t> servers) {
    const std::size_t K = st.params.K;
    std::set<std::size_t> uniq(servers.begin(), servers.end());
    if (uniq.size() < K)
        throw InsufficientShards("library reconstruction needs K=" + std::to_string(K) +
                                 " distinct servers, got " + std::to_string(uniq.size()));
    if (servers.size() != K || uniq.size() != K)
        throw Error("pass exactly K distinct server ids");
    for (std::size_t s : servers)
        if (s >= st.params.N) throw Error("server id " + std::to_string(s) + " out of range");
    return {servers.begin(), servers.end()};
}

}  // namespace

Library reconstruct_library_b(const Field& f, const ShardStore& st,
                              std::span<const std::size_t> servers) {
    auto ids = checked_subset(st, servers);
    const auto& p = st.params;
    std::vector<Fe> xs;
    for (std::size_t s : ids) xs.push_back(st.alpha[s]);
    std::vector<Matrix> mats;
    mats.reserve(p.V);
    for (std::size_t v = 0; v < p.V; ++v) {
        std::vector<std::vector<Matrix>> grid(p.K, std::vector<Matrix>(p.M));
        for (std::size_t m = 0; m < p.M; ++m) {
            std::vector<const Matrix*> ys;
            for (std::size_t s : ids) ys.push_back(&st.shards_b[s][v * p.M + m]);
            auto coeffs = interpolate_matrix_coeffs(f, xs, ys);
            // coefficient of x^(K-k) is B_k, so row block k-1 sits at K-k
            for (std::size_t k = 0; k < p.K; ++k) grid[k][m] = coeffs[p.K - 1 - k];
        }
        mats.push_back(assemble_blocks(grid));
    }
    return make_library(p.omega, p.gamma, std::move(mats));
}

Library reconstruct_library_a(const Field& f, const ShardStore& st,
                              std::span<const std::size_t> servers) {
    auto ids = checked_subset(st, servers);
    const auto& p = st.params;
    if (p.R == 0) return Library{0, 0, {}};
    std::vector<Fe> xs;
    for (std::size_t s : ids) xs.push_back(st.alpha[s]);
    std::vector<Matrix> mats;
    mats.reserve(p.R);
    for (std::size_t r = 0; r < p.R; ++r) {
        std::vector<std::vector<Matrix>> grid(p.L, std::vector<Matrix>(p.K));
        for (std::size_t l = 0; l < p.L; ++l) {
            std::vector<const Matrix*> ys;
            for (std::size_t s : ids) ys.push_back(&st.shards_a[s][r * p.L + l]);
            auto coeffs = interpolate_matrix_coeffs(f, xs, ys);
            // coefficient of x^(k-1) is A_k
            for (std::size_t k = 0; k < p.K; ++k) grid[l][k] = coeffs[k];
        }
        mats.push_back(assemble_blocks(grid));
    }
    return make_library(p.lambda, p.omega, std::move(mats));
}

void save_shards(const ShardStore& st, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto& p = st.params;
    json files_b = json::array(), files_a = json::array();
    for (std::size_t i = 0; i < p.N; ++i) {
        json row = json::array();
        for (std::size_t v = 0; v < p.V; ++v) {
            for (std::size_t m = 0; m < p.M; ++m) {
                std::string name = shard_name('b', i, v, m);
                write_pmm1(dir / name, p.modulus, st.shards_b[i][v * p.M + m]);
                row.push_back(name);
            }
        }
        files_b.push_back(row);
        json arow = json::array();
        for (std::size_t r = 0; r < p.R; ++r) {
            for (std::size_t l = 0; l < p.L; ++l) {
                std::string name = shard_name('a', i, r, l);
                write_pmm1(dir / name, p.modulus, st.shards_a[i][r * p.L + l]);
                arow.push_back(name);
            }
        }
        files_a.push_back(arow);
    }
    json man;
    man["format"] = "pmm-shard-store";
    man["version"] = 1;
    man["modulus"] = p.modulus;
    man["N"] = p.N;
    man["K"] = p.K;
    man["L"] = p.L;
    man["M"] = p.M;
    man["V"] = p.V;
    man["R"] = p.R;
    man["lambda"] = p.lambda;
    man["omega"] = p.omega;
    man["gamma"] = p.gamma;
    man["library_seed"] = p.library_seed;
    json al = json::array();
    for (Fe a : st.alpha) al.push_back(a.v);
    man["alpha"] = al;
    man["files_b"] = files_b;
    man["files_a"] = files_a;
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
    out << man.dump(2) << "\n";
}

ShardStore load_shards(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw CorruptManifest("missing " + (dir / "manifest.json").string());
    json man;
    try {
        in >> man;
    } catch (const std::exception& e) {
        throw CorruptManifest("unparseable manifest: " + std::string(e.what()));
    }
    ShardStore st;
    try {
        if (man.at("format") != "pmm-shard-store") throw Error("wrong format tag");
        auto& p = st.params;
        p.modulus = man.at("modulus").get<u64>();
        p.N = man.at("N").get<std::size_t>();
        p.K = man.at("K").get<std::size_t>();
        p.L = man.at("L").get<std::size_t>();
        p.M = man.at("M").get<std::size_t>();
        p.V = man.at("V").get<std::size_t>();
        p.R = man.at("R").get<std::size_t>();
        p.lambda = man.at("lambda").get<std::size_t>();
        p.omega = man.at("omega").get<std::size_t>();
        p.gamma = man.at("gamma").get<std::size_t>();
        p.library_seed = man.value("library_seed", u64{0});
        for (u64 a : man.at("alpha")) st.alpha.push_back(Fe{a});
        if (p.K == 0 || p.L == 0 || p.M == 0 || p.N < p.K)
            throw Error("grid parameters out of range");
        if (st.alpha.size() != p.N || man.at("files_b").size() != p.N ||
            man.at("files_a").size() != p.N)
            throw Error("per-server array lengths disagree with N");
    } catch (const CorruptManifest&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptManifest("manifest missing or mistyped fields: " + std::string(e.what()));
    }

    const auto& p = st.params;
    Field f(p.modulus);
    check_alpha(f, st.alpha);
    auto load_block = [&](const std::string& name, std::size_t rows, std::size_t cols) {
        StoredMatrix sm = read_pmm1(dir / name);
        if (sm.modulus != p.modulus)
            throw ModulusMismatch(name + " carries modulus " + std::to_string(sm.modulus) +
                                  ", store expects " + std::to_string(p.modulus));
        if (sm.m.rows != rows || sm.m.cols != cols)
            throw CorruptManifest(name + " has shape " + std::to_string(sm.m.rows) + "x" +
                                  std::to_string(sm.m.cols) + ", expected " +
                                  std::to_string(rows) + "x" + std::to_string(cols));
        return sm.m;
    };
    st.shards_b.resize(p.N);
    st.shards_a.resize(p.N);
    for (std::size_t i = 0; i < p.N; ++i) {
        const auto& row_b = man["files_b"][i];
        if (row_b.size() != p.V * p.M)
            throw CorruptManifest("server " + std::to_string(i) + " lists " +
                                  std::to_string(row_b.size()) + " B shards, expected V*M");
        for (const auto& name : row_b)
            st.shards_b[i].push_back(
                load_block(name.get<std::string>(), p.omega / p.K, p.gamma / p.M));
        const auto& row_a = man["files_a"][i];
        if (row_a.size() != p.R * p.L)
            throw CorruptManifest("server " + std::to_string(i) + " lists " +
                                  std::to_string(row_a.size()) + " A shards, expected R*L");
        for (const auto& name : row_a)
            st.shards_a[i].push_back(
                load_block(name.get<std::string>(), p.lambda / p.L, p.omega / p.K));
    }
    return st;
}

}  // namespace pmm
