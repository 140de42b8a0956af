#pragma once
// Analytic cost model for the protocols and the two comparison schemes.
// Everything is model-level arithmetic on doubles with unit constants:
// communication in field elements, computation in field operations,
// storage in elements per server.  Quasi-linear transform costs carry a
// (log x)^2 log log x factor; logs are natural and each log factor is
// clamped below at 1 so small arguments cannot push a cost negative (the
// clamp is inactive for x >= 16, and every regime of interest is far
// above that).
//
// The prior one-sided scheme being compared against needs K split as p*n
// (operand cut into p column groups and n row groups); its threshold is
// (L+1)K.  The two-sided baseline stores all R*V cross products and has
// threshold 3K + max(TA, TB) - 2.

#include <filesystem>
#include <string>
#include <vector>

#include "pmm/strategy.hpp"

namespace pmm {

struct CostScenario {
    std::size_t N = 0, K = 1;
    std::size_t V = 1, R = 1;
    std::size_t S = 1, T = 1, TA = 1, TB = 1;
    double lambda = 1, omega = 1, gamma = 1;
    double s1 = 1, s2 = 1;  // link and compute speeds for runtime optimization
};

struct CostVector {
    u64 P = 0;
    double upload = 0, download = 0;  // elements
    double query_bytes = 0;           // bytes, reported separately
    double enc = 0, server = 0, dec = 0;  // operations
    double storage = 0;               // elements per server
    double total_comm() const { return upload + download; }
    double total_comp() const { return enc + server + dec; }
};

double log_factor(double x);  // max(ln x,1)^2 * max(ln max(ln x,1),1)

CostVector psmm_costs(const CostScenario& s, std::size_t L, std::size_t M);
CostVector fpmm_costs(const CostScenario& s, std::size_t L, std::size_t M);
// requires p*n == K, else FactorizationInvalid
CostVector prior_psmm_costs(const CostScenario& s, std::size_t L, std::size_t p, std::size_t n);
CostVector baseline_fpmm_costs(const CostScenario& s);

enum class Strategy { OursPsmm, PriorPsmm, OursFpmm, BaselineFpmm };
enum class Objective { TotalComm, TotalComp, Upload, Download };

const char* strategy_name(Strategy s);
double objective_of(const CostVector& cv, Objective o);

struct SweepRow {
    Strategy strategy;
    std::size_t L = 0, M = 0, p = 0, n = 0;  // p, n only for the prior scheme
    CostVector cv;
};

// Non-dominated (P, objective) configurations for one strategy, sorted by
// threshold: the staircase lower envelope of the full parameter sweep
// (L, M in [1..N], or L with every ordered factorization K = p*n).
std::vector<SweepRow> pareto_sweep(const CostScenario& s, Strategy strat, Objective obj);

// step-function value of a frontier at a given threshold: best objective
// among rows with P <= threshold; +inf when none qualifies yet
double frontier_value_at(const std::vector<SweepRow>& rows, Objective obj, u64 threshold);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

// privacy/secrecy pairs achievable at threshold budget P for fixed L, M, K
struct TradeoffPoint {
    std::size_t x = 0, y = 0;  // (S, T) or (TA, TB)
    u64 P = 0;
};
std::vector<TradeoffPoint> tradeoff_frontier(Kind kind, std::size_t K, std::size_t L,
                                             std::size_t M, u64 p_budget);
void write_frontier_csv(const std::filesystem::path& path, Kind kind,
                        const std::vector<TradeoffPoint>& pts);

struct RuntimeChoice {
    std::size_t L = 0, M = 0;
    double seconds = 0;
    CostVector cv;
};
// exhaustive argmin over L, M in [1..N] of comm/s1 + comp/s2 subject to
// P <= N; ties prefer smaller L, then smaller M.  NoFeasiblePlan when the
// whole grid is infeasible.
RuntimeChoice optimize_runtime(const CostScenario& s, Kind kind);

}  // namespace pmm
