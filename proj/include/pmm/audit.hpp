#pragma once
// Privacy and secrecy verification harness.
//
// Three instruments, in decreasing order of rigor:
//   algebraic   masks are sound iff every width-sized generalized
//               Vandermonde minor [alpha_i^(base+t-1)] over the chosen
//               servers is nonsingular; checked subset by subset
//   exhaustive  enumerate every noise assignment on a tiny field and
//               compare the exact view distributions of two index
//               hypotheses; the total-variation distance is reported as an
//               integer pair (sum of count differences, 2 * total), no
//               floating point involved
//   sampled     chi-square two-sample smoke test on hashed views at
//               production-sized fields
//
// A collusion set of size T (resp. S) must come out at TV exactly 0; size
// T+1 is expected to show TV > 0, which is the tightness witness that the
// audit can actually see leakage.

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmm/fpmm.hpp"
#include "pmm/psmm.hpp"

namespace pmm {

struct TvResult {
    std::string hyp_a, hyp_b;
    u64 diff_count = 0;  // sum over views of |count_a - count_b|
    u64 total = 0;       // enumeration size per hypothesis
    bool zero() const { return diff_count == 0; }
    double tv() const { return total ? double(diff_count) / (2.0 * double(total)) : 0.0; }
};

struct AuditReport {
    std::string mode;  // algebraic | exhaustive | sampled
    bool pass = true;
    std::string note;
    // algebraic
    u64 subsets_checked = 0;
    std::vector<std::vector<std::size_t>> violations;
    // exhaustive
    std::vector<TvResult> tv;
    // sampled
    double p_value = 1.0;
};

nlohmann::ordered_json audit_report_json(const AuditReport& r);

// Checks det [alpha_{i_s}^(base_exponent + t - 1)] != 0 for server subsets
// of the given width.  sample_limit 0 enumerates all subsets (capped by
// EnumerationTooLarge at 10^7), otherwise that many seeded random subsets.
AuditReport check_mask_nonsingular(const Field& f, std::span<const Fe> alpha, u64 base_exponent,
                                   std::size_t width, std::size_t sample_limit = 0,
                                   u64 seed = 0);

struct ExhaustiveSpec {
    std::vector<std::size_t> collusion;  // 0-based server ids
    // widen the view with the share and the server response; needs the
    // store and the fixed A, and blocks of a single entry each
    bool include_responses = false;
    u64 enumeration_limit = 10'000'000;
};

// index privacy of the one-sided protocol: views are the colluders' query
// tuples for every candidate theta in [1..V], all hypothesis pairs compared
AuditReport exhaustive_privacy_psmm(const Field& f, const StrategyPlan& plan, std::size_t V,
                                    std::span<const Fe> alpha, const ExhaustiveSpec& spec,
                                    const ShardStore* store = nullptr,
                                    const Matrix* a = nullptr);

// confidentiality of A: views are the colluders' shares under two fixed
// operand hypotheses
AuditReport exhaustive_secrecy_psmm(const Field& f, const StrategyPlan& plan, const Matrix& a1,
                                    const Matrix& a2, std::span<const Fe> alpha,
                                    const ExhaustiveSpec& spec);

// two-sided analogue over hypotheses (theta_a, theta_b) in [R] x [V]
AuditReport exhaustive_privacy_fpmm(const Field& f, const StrategyPlan& plan, std::size_t R,
                                    std::size_t V, std::span<const Fe> alpha,
                                    const ExhaustiveSpec& spec);

// baseline analogue over the R*V selector hypotheses
AuditReport exhaustive_privacy_baseline(const Field& f, std::size_t K, std::size_t R,
                                        std::size_t V, std::size_t t_prime,
                                        std::span<const Fe> alpha, const ExhaustiveSpec& spec);

struct SampledSpec {
    std::vector<std::size_t> collusion;
    std::size_t samples = 100'000;
    std::size_t bins = 64;
    u64 seed = 1;
    bool noiseless = false;  // exercised by tests to confirm the instrument can fail
};

// chi-square two-sample comparison of hashed query views under theta_a
// versus theta_b; pass means p > 0.001
AuditReport sampled_privacy_psmm(const Field& f, const StrategyPlan& plan, std::size_t V,
                                 std::size_t theta_a, std::size_t theta_b,
                                 std::span<const Fe> alpha, const SampledSpec& spec);

}  // namespace pmm
