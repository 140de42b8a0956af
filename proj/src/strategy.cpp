#include "pmm/strategy.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pmm {

namespace {

void check_dims(std::size_t L, std::size_t M, std::size_t K, std::size_t x, std::size_t y,
                const char* xn, const char* yn) {
    if (L < 1 || M < 1 || K < 1 || x < 1 || y < 1)
        throw Error(std::string("strategy dimensions must be at least 1 (L, M, K, ") + xn +
                    ", " + yn + ")");
}

PsmmDims substitute(const FpmmDims& d) {
    // two-sided noise band on the A side has K + TA - 1 terms
    return PsmmDims{d.L, d.M, d.K, d.K + d.TA - 1, d.TB};
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::Delta1: return "delta1";
        case Family::Delta2: return "delta2";
        case Family::Delta3: return "delta3";
    }
    return "?";
}

const char* kind_name(Kind k) { return k == Kind::Psmm ? "psmm" : "fpmm"; }

std::optional<Family> family_from_name(const std::string& s) {
    if (s == "delta1") return Family::Delta1;
    if (s == "delta2") return Family::Delta2;
    if (s == "delta3") return Family::Delta3;
    return std::nullopt;
}

DegreeParams psmm_family(Family fam, const PsmmDims& d) {
    check_dims(d.L, d.M, d.K, d.S, d.T, "S", "T");
    const u64 L = d.L, M = d.M, K = d.K, S = d.S, T = d.T;
    DegreeParams dp;
    dp.b.resize(L + 1);
    dp.d.resize(M + 1);
    switch (fam) {
        case Family::Delta1: {
            // B side compact, A side strides over the whole B span
            const u64 g = K * M + K + T - 1;
            for (u64 l = 1; l <= L; ++l) dp.b[l - 1] = (l - 1) * g;
            dp.b[L] = (L - 1) * g + K * M;
            for (u64 m = 1; m <= M; ++m) dp.d[m - 1] = (m - 1) * K;
            dp.d[M] = K * M;
            break;
        }
        case Family::Delta2: {
            // mirror image: A side compact, B side strides over the A span
            const u64 g = L * K + S;
            for (u64 l = 1; l <= L; ++l) dp.b[l - 1] = (l - 1) * K;
            dp.b[L] = L * K;
            for (u64 m = 1; m <= M; ++m) dp.d[m - 1] = (m - 1) * g;
            dp.d[M] = (M - 1) * g + L * K;
            break;
        }
        case Family::Delta3: {
            // both data bands below LKM, both noise bands above
            for (u64 l = 1; l <= L; ++l) dp.b[l - 1] = (l - 1) * M * K;
            dp.b[L] = L * K * M;
            for (u64 m = 1; m <= M; ++m) dp.d[m - 1] = (m - 1) * K;
            dp.d[M] = L * K * M;
            break;
        }
    }
    return dp;
}

DegreeParams fpmm_family(Family fam, const FpmmDims& d) {
    check_dims(d.L, d.M, d.K, d.TA, d.TB, "TA", "TB");
    return psmm_family(fam, substitute(d));
}

u64 psmm_delta(const DegreeParams& dp, const PsmmDims& d) {
    const std::size_t L = d.L, M = d.M;
    u64 a = dp.b[L] + d.S - 1;
    for (std::size_t l = 0; l < L; ++l) a = std::max(a, dp.b[l] + d.K - 1);
    u64 b = dp.d[M] + d.K + d.T - 2;
    for (std::size_t m = 0; m < M; ++m) b = std::max(b, dp.d[m] + d.K - 1);
    return a + b;
}

u64 fpmm_delta(const DegreeParams& dp, const FpmmDims& d) {
    return psmm_delta(dp, substitute(d));
}

Achievability check_achievable_psmm(const DegreeParams& dp, const PsmmDims& d) {
    const std::size_t L = d.L, M = d.M, K = d.K, S = d.S, T = d.T;
    if (dp.b.size() != L + 1 || dp.d.size() != M + 1)
        throw Error("degree parameter lengths must be L+1 and M+1");

    // desired exponents must be pairwise distinct
    std::map<u64, std::pair<std::size_t, std::size_t>> desired;
    for (std::size_t l = 1; l <= L; ++l) {
        for (std::size_t m = 1; m <= M; ++m) {
            u64 e = u64(K) - 1 + dp.b[l - 1] + dp.d[m - 1];
            auto [it, fresh] = desired.emplace(e, std::make_pair(l, m));
            if (!fresh)
                return {false, "blocks (" + std::to_string(it->second.first) + "," +
                                   std::to_string(it->second.second) + ") and (" +
                                   std::to_string(l) + "," + std::to_string(m) +
                                   ") collide at exponent " + std::to_string(e)};
        }
    }

    auto hit = [&](u64 e, const char* what) -> std::optional<Achievability> {
        auto it = desired.find(e);
        if (it == desired.end()) return std::nullopt;
        return Achievability{false, std::string(what) + " lands on desired block (" +
                                        std::to_string(it->second.first) + "," +
                                        std::to_string(it->second.second) + ") at exponent " +
                                        std::to_string(e)};
    };

    // off-diagonal data cross terms, below and above the aligned diagonal
    for (std::size_t l = 1; l <= L; ++l) {
        for (std::size_t m = 1; m <= M; ++m) {
            u64 base = dp.b[l - 1] + dp.d[m - 1];
            for (std::size_t i = 0; i + 2 <= K; ++i) {
                if (auto v = hit(base + i, "data cross term")) return *v;
                if (auto v = hit(base + 2 * u64(K) - 2 - i, "data cross term")) return *v;
            }
        }
    }
    // A data times B noise
    for (std::size_t l = 1; l <= L; ++l)
        for (std::size_t k = 1; k <= K; ++k)
            for (std::size_t t = 1; t <= K + T - 1; ++t)
                if (auto v = hit(u64(k) + dp.b[l - 1] + dp.d[M] + t - 2, "B-noise cross term"))
                    return *v;
    // A noise times B data
    for (std::size_t m = 1; m <= M; ++m)
        for (std::size_t k = 1; k <= K; ++k)
            for (std::size_t t = 1; t <= S; ++t)
                if (auto v =
                        hit(u64(K) - k + dp.d[m - 1] + dp.b[L] + t - 1, "A-noise cross term"))
                    return *v;
    // noise times noise
    for (std::size_t t = 1; t <= S; ++t)
        for (std::size_t t2 = 1; t2 <= K + T - 1; ++t2)
            if (auto v = hit(dp.b[L] + dp.d[M] + t + t2 - 2, "noise product term")) return *v;

    return {};
}

Achievability check_achievable_fpmm(const DegreeParams& dp, const FpmmDims& d) {
    return check_achievable_psmm(dp, substitute(d));
}

namespace {

template <typename Dims>
ThresholdChoice best_family(const Dims& d, DegreeParams (*mk)(Family, const Dims&),
                            u64 (*delta_of)(const DegreeParams&, const Dims&)) {
    ThresholdChoice best;
    bool have = false;
    for (Family fam : {Family::Delta3, Family::Delta1, Family::Delta2}) {
        u64 delta = delta_of(mk(fam, d), d);
        if (!have || delta < best.delta) {
            best = {delta + 1, delta, fam};
            have = true;
        }
    }
    return best;
}

}  // namespace

ThresholdChoice psmm_threshold(const PsmmDims& d) {
    return best_family<PsmmDims>(d, &psmm_family, &psmm_delta);
}

ThresholdChoice fpmm_threshold(const FpmmDims& d) {
    return best_family<FpmmDims>(d, &fpmm_family, &fpmm_delta);
}

namespace {

std::vector<u64> exponent_map_checked(const DegreeParams& dp, std::size_t L, std::size_t M,
                                      std::size_t K, const Achievability& ach) {
    if (!ach.ok) throw NotAchievable(ach.violation);
    std::vector<u64> out(L * M);
    for (std::size_t l = 1; l <= L; ++l)
        for (std::size_t m = 1; m <= M; ++m)
            out[(l - 1) * M + (m - 1)] = u64(K) - 1 + dp.b[l - 1] + dp.d[m - 1];
    return out;
}

}  // namespace

std::vector<u64> exponent_map_psmm(const DegreeParams& dp, const PsmmDims& d) {
    return exponent_map_checked(dp, d.L, d.M, d.K, check_achievable_psmm(dp, d));
}

std::vector<u64> exponent_map_fpmm(const DegreeParams& dp, const FpmmDims& d) {
    return exponent_map_checked(dp, d.L, d.M, d.K, check_achievable_fpmm(dp, d));
}

StrategyPlan make_psmm_plan(std::size_t N, const PsmmDims& d, std::optional<Family> family) {
    Family fam = family ? *family : psmm_threshold(d).family;
    StrategyPlan plan;
    plan.kind = Kind::Psmm;
    plan.N = N;
    plan.K = d.K;
    plan.L = d.L;
    plan.M = d.M;
    plan.S = d.S;
    plan.T = d.T;
    plan.family = fam;
    plan.degrees = psmm_family(fam, d);
    plan.delta = psmm_delta(plan.degrees, d);
    plan.P = plan.delta + 1;
    plan.exp_of_block = exponent_map_psmm(plan.degrees, d);
    if (plan.P > N)
        throw NoFeasiblePlan("recovery threshold " + std::to_string(plan.P) + " exceeds N=" +
                             std::to_string(N) + " (family " + family_name(fam) + ")");
    return plan;
}

StrategyPlan make_fpmm_plan(std::size_t N, const FpmmDims& d, std::optional<Family> family) {
    Family fam = family ? *family : fpmm_threshold(d).family;
    StrategyPlan plan;
    plan.kind = Kind::Fpmm;
    plan.N = N;
    plan.K = d.K;
    plan.L = d.L;
    plan.M = d.M;
    plan.TA = d.TA;
    plan.TB = d.TB;
    plan.family = fam;
    plan.degrees = fpmm_family(fam, d);
    plan.delta = fpmm_delta(plan.degrees, d);
    plan.P = plan.delta + 1;
    plan.exp_of_block = exponent_map_fpmm(plan.degrees, d);
    if (plan.P > N)
        throw NoFeasiblePlan("recovery threshold " + std::to_string(plan.P) + " exceeds N=" +
                             std::to_string(N) + " (family " + family_name(fam) + ")");
    return plan;
}

void validate_plan_for_field(const Field& f, const StrategyPlan& plan) {
    if (f.modulus() <= plan.N)
        throw Error("modulus " + std::to_string(f.modulus()) +
                    " too small for N=" + std::to_string(plan.N) + " servers");
    if (f.modulus() <= plan.P)
        throw Error("modulus " + std::to_string(f.modulus()) +
                    " too small for recovery threshold " + std::to_string(plan.P));
}

}  // namespace pmm
