#include "pmm/costs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "pmm/fpmm.hpp"

namespace pmm {

double log_factor(double x) {
    double l1 = std::max(std::log(std::max(x, 1.0)), 1.0);
    double l2 = std::max(std::log(l1), 1.0);
    return l1 * l1 * l2;
}

CostVector psmm_costs(const CostScenario& s, std::size_t L, std::size_t M) {
    CostVector cv;
    auto th = psmm_threshold({L, M, s.K, s.S, s.T});
    cv.P = th.P;
    const double lam = s.lambda, om = s.omega, ga = s.gamma;
    const double N = double(s.N), K = double(s.K), P = double(th.P);
    cv.upload = lam * om * N / (double(L) * K);
    cv.download = lam * ga * P / (double(L) * M);
    cv.query_bytes = 8.0 * N * double(s.V) * double(M);
    cv.enc = lam * om * N * log_factor(N) / (double(L) * K);
    cv.server = double(s.V) * om * ga / K + lam * om * ga / (double(L) * K * double(M));
    cv.dec = lam * ga * P * log_factor(P) / (double(L) * M);
    cv.storage = double(s.V) * om * ga / K;
    return cv;
}

CostVector fpmm_costs(const CostScenario& s, std::size_t L, std::size_t M) {
    CostVector cv;
    auto th = fpmm_threshold({L, M, s.K, s.TA, s.TB});
    cv.P = th.P;
    const double lam = s.lambda, om = s.omega, ga = s.gamma;
    const double N = double(s.N), K = double(s.K), P = double(th.P);
    const double stored = (double(s.R) * lam * om + double(s.V) * om * ga) / K;
    cv.upload = 0;
    cv.download = lam * ga * P / (double(L) * M);
    cv.query_bytes = 8.0 * N * (double(s.R) * L + double(s.V) * M);
    cv.enc = 0;
    cv.server = stored + lam * om * ga / (double(L) * K * double(M));
    cv.dec = lam * ga * P * log_factor(P) / (double(L) * M);
    cv.storage = stored;
    return cv;
}

CostVector prior_psmm_costs(const CostScenario& s, std::size_t L, std::size_t p, std::size_t n) {
    if (p == 0 || n == 0 || p * n != s.K)
        throw FactorizationInvalid("K=" + std::to_string(s.K) + " is not " + std::to_string(p) +
                                   "*" + std::to_string(n));
    CostVector cv;
    cv.P = u64(L + 1) * s.K;
    const double lam = s.lambda, om = s.omega, ga = s.gamma;
    const double N = double(s.N), P = double(cv.P);
    cv.upload = lam * om * double(s.V) * N / (double(L) * p);
    cv.download = lam * ga * P / (double(L) * n);
    cv.query_bytes = 0;  // not modeled for the prior scheme
    cv.enc = lam * om * N * log_factor(N) / (double(L) * p);
    cv.server = double(s.V) * lam * om * ga / (double(L) * p * double(n));
    cv.dec = lam * ga * P * log_factor(P) / (double(L) * n);
    cv.storage = double(s.V) * om * ga / (double(p) * n);
    return cv;
}

CostVector baseline_fpmm_costs(const CostScenario& s) {
    CostVector cv;
    cv.P = u64(baseline_threshold(s.K, std::max(s.TA, s.TB)));
    const double lam = s.lambda, ga = s.gamma, P = double(cv.P);
    cv.upload = 0;
    cv.download = lam * ga * P;
    cv.query_bytes = 8.0 * double(s.N) * double(s.R) * double(s.V);
    cv.enc = 0;
    cv.server = double(s.R) * double(s.V) * lam * ga;
    cv.dec = lam * ga * P * log_factor(P);
    cv.storage = double(s.R) * double(s.V) * lam * ga;
    return cv;
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::OursPsmm: return "ours_psmm";
        case Strategy::PriorPsmm: return "prior_psmm";
        case Strategy::OursFpmm: return "ours_fpmm";
        case Strategy::BaselineFpmm: return "baseline_fpmm";
    }
    return "?";
}

double objective_of(const CostVector& cv, Objective o) {
    switch (o) {
        case Objective::TotalComm: return cv.total_comm();
        case Objective::TotalComp: return cv.total_comp();
        case Objective::Upload: return cv.upload;
        case Objective::Download: return cv.download;
    }
    return 0;
}

std::vector<SweepRow> pareto_sweep(const CostScenario& s, Strategy strat, Objective obj) {
    std::vector<SweepRow> all;
    auto add = [&](SweepRow r) {
        if (r.cv.P <= s.N) all.push_back(std::move(r));
    };
    switch (strat) {
        case Strategy::OursPsmm:
            for (std::size_t L = 1; L <= s.N; ++L)
                for (std::size_t M = 1; M <= s.N; ++M)
                    add({strat, L, M, 0, 0, psmm_costs(s, L, M)});
            break;
        case Strategy::OursFpmm:
            for (std::size_t L = 1; L <= s.N; ++L)
                for (std::size_t M = 1; M <= s.N; ++M)
                    add({strat, L, M, 0, 0, fpmm_costs(s, L, M)});
            break;
        case Strategy::PriorPsmm:
            for (std::size_t L = 1; L <= s.N; ++L)
                for (std::size_t p = 1; p <= s.K; ++p) {
                    if (s.K % p != 0) continue;
                    add({strat, L, 1, p, s.K / p, prior_psmm_costs(s, L, p, s.K / p)});
                }
            break;
        case Strategy::BaselineFpmm:
            add({strat, 1, 1, 0, 0, baseline_fpmm_costs(s)});
            break;
    }
    // per-threshold best first, deterministic tie-break on (L, M, p)
    std::sort(all.begin(), all.end(), [&](const SweepRow& a, const SweepRow& b) {
        if (a.cv.P != b.cv.P) return a.cv.P < b.cv.P;
        double oa = objective_of(a.cv, obj), ob = objective_of(b.cv, obj);
        if (oa != ob) return oa < ob;
        if (a.L != b.L) return a.L < b.L;
        if (a.M != b.M) return a.M < b.M;
        return a.p < b.p;
    });
    std::vector<SweepRow> frontier;
    double best = std::numeric_limits<double>::infinity();
    u64 last_p = 0;
    for (const SweepRow& r : all) {
        if (!frontier.empty() && r.cv.P == last_p) continue;  // keep only the best per P
        double o = objective_of(r.cv, obj);
        if (o < best) {
            frontier.push_back(r);
            best = o;
            last_p = r.cv.P;
        }
    }
    return frontier;
}

double frontier_value_at(const std::vector<SweepRow>& rows, Objective obj, u64 threshold) {
    double best = std::numeric_limits<double>::infinity();
    for (const SweepRow& r : rows)
        if (r.cv.P <= threshold) best = std::min(best, objective_of(r.cv, obj));
    return best;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "strategy,L,M,p,n,P,upload,download,query_bytes,enc,server,dec,storage,"
           "total_comm,total_comp\n";
    for (const SweepRow& r : rows) {
        out << strategy_name(r.strategy) << ',' << r.L << ',' << r.M << ',' << r.p << ',' << r.n
            << ',' << r.cv.P << ',' << fmt(r.cv.upload) << ',' << fmt(r.cv.download) << ','
            << fmt(r.cv.query_bytes) << ',' << fmt(r.cv.enc) << ',' << fmt(r.cv.server) << ','
            << fmt(r.cv.dec) << ',' << fmt(r.cv.storage) << ',' << fmt(r.cv.total_comm()) << ','
            << fmt(r.cv.total_comp()) << '\n';
    }
}

std::vector<TradeoffPoint> tradeoff_frontier(Kind kind, std::size_t K, std::size_t L,
                                             std::size_t M, u64 p_budget) {
    std::vector<TradeoffPoint> pts;
    // thresholds increase in each privacy level, so both loops can stop at
    // the first infeasible value
    for (std::size_t x = 1;; ++x) {
        u64 p_first = kind == Kind::Psmm ? psmm_threshold({L, M, K, x, 1}).P
                                         : fpmm_threshold({L, M, K, x, 1}).P;
        if (p_first > p_budget) break;
        for (std::size_t y = 1;; ++y) {
            u64 p = kind == Kind::Psmm ? psmm_threshold({L, M, K, x, y}).P
                                       : fpmm_threshold({L, M, K, x, y}).P;
            if (p > p_budget) break;
            pts.push_back({x, y, p});
        }
    }
    return pts;
}

void write_frontier_csv(const std::filesystem::path& path, Kind kind,
                        const std::vector<TradeoffPoint>& pts) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << (kind == Kind::Psmm ? "S,T,P\n" : "T_A,T_B,P\n");
    for (const TradeoffPoint& p : pts) out << p.x << ',' << p.y << ',' << p.P << '\n';
}

RuntimeChoice optimize_runtime(const CostScenario& s, Kind kind) {
    RuntimeChoice best;
    bool have = false;
    for (std::size_t L = 1; L <= s.N; ++L) {
        for (std::size_t M = 1; M <= s.N; ++M) {
            CostVector cv = kind == Kind::Psmm ? psmm_costs(s, L, M) : fpmm_costs(s, L, M);
            if (cv.P > s.N) continue;
            double t = cv.total_comm() / s.s1 + cv.total_comp() / s.s2;
            if (!have || t < best.seconds) {
                best = {L, M, t, cv};
                have = true;
            }
        }
    }
    if (!have)
        throw NoFeasiblePlan("no (L, M) grid choice fits N=" + std::to_string(s.N) + " servers");
    return best;
}

}  // namespace pmm
