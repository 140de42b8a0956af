#pragma once
// Degree bookkeeping for the aligned product polynomial.
//
// A query strategy assigns exponents b_1..b_{L+1} to the A side (L data
// strips plus the noise band) and d_1..d_{M+1} to the B side.  The product
// of the two masked polynomials then has degree
//     delta = max(b_l + K - 1, b_{L+1} + S - 1)
//           + max(d_m + K - 1, d_{M+1} + K + T - 2)
// and is recoverable from any P = delta + 1 evaluations.  The strategy is
// usable when every desired block C_{l,m} sits alone at exponent
// K - 1 + b_l + d_m: distinct from the other desired blocks and from all
// interference (off-diagonal data cross terms and every noise cross term).
// check_achievable_* tests exactly that by enumerating the exponent sets.
//
// Three closed-form families cover the useful regimes; the recovery
// threshold of a parameter tuple is the best of the three plus one.
//
// The two-sided variant (both operands privately indexed) reuses all of
// this with S -> K + T_A - 1 and T -> T_B: its A-side noise band has
// K + T_A - 1 terms where the one-sided protocol has S, and the exponent
// algebra is otherwise identical.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pmm/field.hpp"

namespace pmm {

enum class Family { Delta1, Delta2, Delta3 };
enum class Kind { Psmm, Fpmm };

const char* family_name(Family f);
const char* kind_name(Kind k);
std::optional<Family> family_from_name(const std::string& s);

struct DegreeParams {
    std::vector<u64> b;  // L + 1 entries, non-negative
    std::vector<u64> d;  // M + 1 entries
};

struct PsmmDims {
    std::size_t L, M, K, S, T;
};
struct FpmmDims {
    std::size_t L, M, K, TA, TB;
};

DegreeParams psmm_family(Family fam, const PsmmDims& d);
DegreeParams fpmm_family(Family fam, const FpmmDims& d);

// delta from the defining max expression, not the closed forms
u64 psmm_delta(const DegreeParams& dp, const PsmmDims& d);
u64 fpmm_delta(const DegreeParams& dp, const FpmmDims& d);

struct Achievability {
    bool ok = true;
    std::string violation;  // human-readable description of the first clash
};

Achievability check_achievable_psmm(const DegreeParams& dp, const PsmmDims& d);
Achievability check_achievable_fpmm(const DegreeParams& dp, const FpmmDims& d);

struct ThresholdChoice {
    u64 P = 0;
    u64 delta = 0;
    Family family = Family::Delta3;
};

// min over the three families; ties prefer Delta3, then Delta1, then Delta2
ThresholdChoice psmm_threshold(const PsmmDims& d);
ThresholdChoice fpmm_threshold(const FpmmDims& d);

// (l, m) -> K - 1 + b_l + d_m for 1-based l, m, flattened (l-1)*M + (m-1).
// Throws NotAchievable when the params fail the corresponding checker.
std::vector<u64> exponent_map_psmm(const DegreeParams& dp, const PsmmDims& d);
std::vector<u64> exponent_map_fpmm(const DegreeParams& dp, const FpmmDims& d);

struct StrategyPlan {
    Kind kind = Kind::Psmm;
    std::size_t N = 0, K = 0, L = 1, M = 1;
    std::size_t S = 0, T = 0;    // one-sided protocol
    std::size_t TA = 0, TB = 0;  // two-sided protocol
    Family family = Family::Delta3;
    DegreeParams degrees;
    u64 delta = 0;
    u64 P = 0;
    std::vector<u64> exp_of_block;  // (l-1)*M + (m-1) -> product exponent

    u64 exponent(std::size_t l, std::size_t m) const {  // 1-based
        return exp_of_block[(l - 1) * M + (m - 1)];
    }
};

// family = nullopt picks the threshold winner.  Throws NoFeasiblePlan when
// P > N, NotAchievable when an explicitly requested family fails its check.
StrategyPlan make_psmm_plan(std::size_t N, const PsmmDims& d,
                            std::optional<Family> family = std::nullopt);
StrategyPlan make_fpmm_plan(std::size_t N, const FpmmDims& d,
                            std::optional<Family> family = std::nullopt);

// modulus must exceed both the server count and the recovery threshold
void validate_plan_for_field(const Field& f, const StrategyPlan& plan);

}  // namespace pmm
