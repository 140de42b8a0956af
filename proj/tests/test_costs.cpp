#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "pmm/costs.hpp"

using namespace pmm;
namespace fs = std::filesystem;

TEST_CASE("log factor is clamped at one and quasi-linear above") {
    CHECK(log_factor(1.0) == 1.0);
    CHECK(log_factor(0.5) == 1.0);
    double l1 = std::log(100.0);
    CHECK(log_factor(100.0) == doctest::Approx(l1 * l1 * std::log(l1)));
    CHECK(log_factor(std::exp(2.0)) == doctest::Approx(4.0));
}

TEST_CASE("one-sided cost entries match the per-element accounting") {
    CostScenario s;
    s.N = 20;
    s.K = 2;
    s.V = 3;
    s.lambda = 12;
    s.omega = 8;
    s.gamma = 6;
    CostVector cv = psmm_costs(s, 2, 3);
    u64 P = psmm_threshold({2, 3, 2, 1, 1}).P;
    CHECK(cv.P == P);
    CHECK(cv.upload == 12.0 * 8 * 20 / (2 * 2));
    CHECK(cv.download == 12.0 * 6 * double(P) / (2 * 3));
    CHECK(cv.query_bytes == 8.0 * 20 * 3 * 3);
    CHECK(cv.storage == 3.0 * 8 * 6 / 2);
    CHECK(cv.server == 3.0 * 8 * 6 / 2 + 12.0 * 8 * 6 / (2 * 2 * 3));
    CHECK(cv.enc == doctest::Approx(cv.upload * log_factor(20)));
    CHECK(cv.dec == doctest::Approx(cv.download * log_factor(double(P))));
    CHECK(cv.total_comm() == cv.upload + cv.download);
    CHECK(cv.total_comp() == cv.enc + cv.server + cv.dec);
}

TEST_CASE("two-sided requests upload nothing and store both libraries") {
    CostScenario s;
    s.N = 12;
    s.K = 2;
    s.V = 4;
    s.R = 3;
    s.lambda = 10;
    s.omega = 6;
    s.gamma = 8;
    CostVector cv = fpmm_costs(s, 1, 2);
    CHECK(cv.upload == 0.0);
    CHECK(cv.enc == 0.0);
    CHECK(cv.storage == (3.0 * 10 * 6 + 4.0 * 6 * 8) / 2);
    CHECK(cv.query_bytes == 8.0 * 12 * (3.0 * 1 + 4.0 * 2));
    CHECK(cv.P == fpmm_threshold({1, 2, 2, 1, 1}).P);
}

TEST_CASE("upload shrinks linearly in the row cut") {
    CostScenario s;
    s.N = 30;
    s.K = 3;
    s.V = 2;
    s.lambda = 100;
    s.omega = 100;
    s.gamma = 100;
    CHECK(psmm_costs(s, 1, 1).upload == 2.0 * psmm_costs(s, 2, 1).upload);
    CHECK(psmm_costs(s, 1, 1).upload == 5.0 * psmm_costs(s, 5, 1).upload);
}

TEST_CASE("the prior scheme uploads the whole library, V times n more") {
    for (std::size_t V : {std::size_t{2}, std::size_t{7}})
        for (std::size_t K : {std::size_t{2}, std::size_t{6}})
            for (std::size_t p = 1; p <= K; ++p) {
                if (K % p) continue;
                std::size_t n = K / p;
                CostScenario s;
                s.N = 40;
                s.K = K;
                s.V = V;
                s.lambda = 24;
                s.omega = 24;
                s.gamma = 24;
                for (std::size_t L : {std::size_t{1}, std::size_t{2}}) {
                    double ours = psmm_costs(s, L, 1).upload;
                    double prior = prior_psmm_costs(s, L, p, n).upload;
                    CHECK(prior == double(V * n) * ours);
                }
            }
}

TEST_CASE("a non-factorization of K is rejected") {
    CostScenario s;
    s.N = 10;
    s.K = 2;
    CHECK_THROWS_AS(prior_psmm_costs(s, 1, 3, 1), FactorizationInvalid);
    CHECK_THROWS_AS(prior_psmm_costs(s, 1, 0, 2), FactorizationInvalid);
}

TEST_CASE("baseline numbers follow its fixed layout") {
    CostScenario s;
    s.N = 16;
    s.K = 3;
    s.R = 4;
    s.V = 5;
    s.TA = 2;
    s.TB = 1;
    s.lambda = 7;
    s.gamma = 9;
    CostVector cv = baseline_fpmm_costs(s);
    CHECK(cv.P == 3 * 3 + 2 - 2);
    CHECK(cv.storage == 4.0 * 5 * 7 * 9);
    CHECK(cv.download == 7.0 * 9 * double(cv.P));
    CHECK(cv.query_bytes == 8.0 * 16 * 4 * 5);
    CHECK(cv.upload == 0.0);
}

TEST_CASE("sweep frontier is a strict staircase that dominates the grid") {
    CostScenario s;
    s.N = 30;
    s.K = 2;
    s.V = 2;
    s.lambda = 60;
    s.omega = 60;
    s.gamma = 60;
    auto rows = pareto_sweep(s, Strategy::OursPsmm, Objective::Download);
    REQUIRE_FALSE(rows.empty());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].cv.P > rows[i - 1].cv.P);
        CHECK(objective_of(rows[i].cv, Objective::Download) <
              objective_of(rows[i - 1].cv, Objective::Download));
    }
    for (std::size_t L = 1; L <= s.N; ++L)
        for (std::size_t M = 1; M <= s.N; ++M) {
            CostVector cv = psmm_costs(s, L, M);
            if (cv.P > s.N) continue;
            CHECK(frontier_value_at(rows, Objective::Download, cv.P) <=
                  objective_of(cv, Objective::Download));
        }
    CHECK(frontier_value_at(rows, Objective::Download, rows.front().cv.P - 1) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("privacy pairs appear exactly when their threshold fits the budget") {
    const std::size_t K = 2, L = 1, M = 1;
    u64 t0 = psmm_threshold({L, M, K, 1, 1}).P;
    CHECK(tradeoff_frontier(Kind::Psmm, K, L, M, t0 - 1).empty());
    auto base = tradeoff_frontier(Kind::Psmm, K, L, M, t0);
    REQUIRE(base.size() == 1);
    CHECK(base[0].x == 1);
    CHECK(base[0].y == 1);
    CHECK(base[0].P == t0);

    u64 budget = psmm_threshold({L, M, K, 3, 3}).P;
    auto pts = tradeoff_frontier(Kind::Psmm, K, L, M, budget);
    for (std::size_t x = 1; x <= 5; ++x)
        for (std::size_t y = 1; y <= 5; ++y) {
            u64 p = psmm_threshold({L, M, K, x, y}).P;
            bool found = false;
            for (const auto& pt : pts)
                if (pt.x == x && pt.y == y) {
                    found = true;
                    CHECK(pt.P == p);
                }
            CHECK(found == (p <= budget));
        }
}

TEST_CASE("runtime pick agrees with a direct scan of the grid") {
    CostScenario s;
    s.N = 24;
    s.K = 2;
    s.V = 2;
    s.lambda = 100;
    s.omega = 100;
    s.gamma = 100;
    s.s1 = 1e6;
    s.s2 = 1e9;
    RuntimeChoice rc = optimize_runtime(s, Kind::Psmm);
    double best = std::numeric_limits<double>::infinity();
    std::size_t bl = 0, bm = 0;
    for (std::size_t L = 1; L <= s.N; ++L)
        for (std::size_t M = 1; M <= s.N; ++M) {
            CostVector cv = psmm_costs(s, L, M);
            if (cv.P > s.N) continue;
            double t = cv.total_comm() / s.s1 + cv.total_comp() / s.s2;
            if (t < best) best = t, bl = L, bm = M;
        }
    CHECK(rc.L == bl);
    CHECK(rc.M == bm);
    CHECK(rc.seconds == doctest::Approx(best));

    CostScenario cramped = s;
    cramped.N = 3;  // below the smallest achievable threshold for K = 2
    CHECK_THROWS_AS(optimize_runtime(cramped, Kind::Psmm), NoFeasiblePlan);
}

TEST_CASE("CSV writers emit the documented headers and one line per row") {
    CostScenario s;
    s.N = 10;
    s.K = 2;
    s.V = 2;
    s.lambda = 8;
    s.omega = 8;
    s.gamma = 8;
    fs::path dir = fs::temp_directory_path() / "pmm_costs_csv";
    fs::create_directories(dir);
    auto rows = pareto_sweep(s, Strategy::OursPsmm, Objective::TotalComm);
    write_sweep_csv(dir / "sweep.csv", rows);
    std::ifstream in(dir / "sweep.csv");
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line ==
          "strategy,L,M,p,n,P,upload,download,query_bytes,enc,server,dec,storage,total_comm,"
          "total_comp");
    std::size_t data_lines = 0;
    while (std::getline(in, line)) {
        ++data_lines;
        CHECK(line.rfind("ours_psmm,", 0) == 0);
    }
    CHECK(data_lines == rows.size());

    auto pts = tradeoff_frontier(Kind::Fpmm, 2, 1, 1, 12);
    write_frontier_csv(dir / "front.csv", Kind::Fpmm, pts);
    std::ifstream fin(dir / "front.csv");
    REQUIRE(std::getline(fin, line));
    CHECK(line == "T_A,T_B,P");
    std::size_t n = 0;
    while (std::getline(fin, line)) ++n;
    CHECK(n == pts.size());
    fs::remove_all(dir);
}

TEST_CASE("strategy names are stable identifiers") {
    CHECK(std::string(strategy_name(Strategy::OursPsmm)) == "ours_psmm");
    CHECK(std::string(strategy_name(Strategy::PriorPsmm)) == "prior_psmm");
    CHECK(std::string(strategy_name(Strategy::OursFpmm)) == "ours_fpmm");
    CHECK(std::string(strategy_name(Strategy::BaselineFpmm)) == "baseline_fpmm");
}
