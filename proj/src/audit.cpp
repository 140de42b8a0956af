#include "pmm/audit.hpp"

#include <map>
#include <random>
#include <string>

#include "pmm/linalg.hpp"
#include "pmm/matrix_io.hpp"
#include "pmm/stats.hpp"

namespace pmm {

using json = nlohmann::ordered_json;

namespace {

u64 pow_clamped(u64 base, std::size_t exp, u64 clamp) {
    u128 r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        r *= base;
        if (r > clamp) return clamp + 1;
    }
    return u64(r);
}

// odometer over `digits` base-p counters, lexicographic sweep of every
// noise assignment
struct Enumeration {
    std::vector<u64> digit;
    u64 p;
    bool first = true;

    Enumeration(std::size_t n, u64 modulus) : digit(n, 0), p(modulus) {}

    bool next() {
        if (first) {
            first = false;
            return true;
        }
        for (std::size_t i = 0; i < digit.size(); ++i) {
            if (++digit[i] < p) return true;
            digit[i] = 0;
        }
        return false;
    }
};

using ViewCounts = std::map<std::vector<u64>, u64>;

TvResult tv_between(const std::string& ha, const std::string& hb, const ViewCounts& ca,
                    const ViewCounts& cb, u64 total) {
    TvResult r{ha, hb, 0, total};
    auto ia = ca.begin();
    auto ib = cb.begin();
    while (ia != ca.end() || ib != cb.end()) {
        if (ib == cb.end() || (ia != ca.end() && ia->first < ib->first)) {
            r.diff_count += ia->second;
            ++ia;
        } else if (ia == ca.end() || ib->first < ia->first) {
            r.diff_count += ib->second;
            ++ib;
        } else {
            r.diff_count += ia->second > ib->second ? ia->second - ib->second
                                                    : ib->second - ia->second;
            ++ia;
            ++ib;
        }
    }
    return r;
}

void finish_exhaustive(AuditReport& r) {
    for (const TvResult& t : r.tv)
        if (!t.zero()) r.pass = false;
}

}  // namespace

json audit_report_json(const AuditReport& r) {
    json j;
    j["mode"] = r.mode;
    j["pass"] = r.pass;
    if (!r.note.empty()) j["note"] = r.note;
    if (r.mode == "algebraic") {
        j["subsets_checked"] = r.subsets_checked;
        json v = json::array();
        for (const auto& s : r.violations) v.push_back(s);
        j["violations"] = v;
    }
    if (r.mode == "exhaustive") {
        json tv = json::array();
        for (const TvResult& t : r.tv) {
            json e;
            e["hypothesis_a"] = t.hyp_a;
            e["hypothesis_b"] = t.hyp_b;
            e["diff_count"] = t.diff_count;
            e["total"] = t.total;
            e["tv"] = t.tv();
            tv.push_back(e);
        }
        j["tv"] = tv;
    }
    if (r.mode == "sampled") j["p_value"] = r.p_value;
    return j;
}

AuditReport check_mask_nonsingular(const Field& f, std::span<const Fe> alpha, u64 base_exponent,
                                   std::size_t width, std::size_t sample_limit, u64 seed) {
    AuditReport rep;
    rep.mode = "algebraic";
    const std::size_t n = alpha.size();
    if (width == 0 || width > n) throw Error("mask width out of range");

    auto check_subset = [&](const std::vector<std::size_t>& idx) {
        FeMat m(width, std::vector<Fe>(width));
        for (std::size_t s = 0; s < width; ++s) {
            Fe row = f.pow(alpha[idx[s]], base_exponent);
            for (std::size_t t = 0; t < width; ++t) {
                m[s][t] = row;
                row = f.mul(row, alpha[idx[s]]);
            }
        }
        ++rep.subsets_checked;
        if (determinant(f, m).v == 0) {
            rep.violations.push_back(idx);
            rep.pass = false;
        }
    };

    if (sample_limit == 0) {
        u64 count = 1;
        {  // C(n, width) with clamp
            u128 c = 1;
            for (std::size_t i = 1; i <= width; ++i) c = c * (n - width + i) / i;
            count = c > 20'000'000 ? u64(20'000'001) : u64(c);
        }
        if (count > 10'000'000)
            throw EnumerationTooLarge("C(" + std::to_string(n) + "," + std::to_string(width) +
                                      ") subsets exceed the enumeration cap");
        std::vector<std::size_t> idx(width);
        for (std::size_t i = 0; i < width; ++i) idx[i] = i;
        for (;;) {
            check_subset(idx);
            std::size_t i = width;
            while (i > 0 && idx[i - 1] == n - width + (i - 1)) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < width; ++j) idx[j] = idx[j - 1] + 1;
        }
    } else {
        std::mt19937_64 g(seed);
        for (std::size_t s = 0; s < sample_limit; ++s) {
            // Floyd's subset sampling
            std::vector<std::size_t> idx;
            for (std::size_t j = n - width; j < n; ++j) {
                std::size_t t = std::size_t(g() % (j + 1));
                bool dup = false;
                for (std::size_t v : idx) dup |= (v == t);
                idx.push_back(dup ? j : t);
            }
            std::sort(idx.begin(), idx.end());
            check_subset(idx);
        }
    }
    return rep;
}

AuditReport exhaustive_privacy_psmm(const Field& f, const StrategyPlan& plan, std::size_t V,
                                    std::span<const Fe> alpha, const ExhaustiveSpec& spec,
                                    const ShardStore* store, const Matrix* a) {
    AuditReport rep;
    rep.mode = "exhaustive";
    const std::size_t M = plan.M, T = plan.T;
    std::size_t nvars = V * M * T;
    std::size_t block_entries = 0;
    if (spec.include_responses) {
        if (!store || !a) throw Error("response views need the store and the fixed operand");
        if (a->rows != plan.L || a->cols != plan.K)
            throw Error("response views require single-entry blocks (A of shape L x K)");
        block_entries = 1;
        nvars += plan.S * block_entries;
    }
    u64 total = pow_clamped(f.modulus(), nvars, spec.enumeration_limit);
    if (total > spec.enumeration_limit)
        throw EnumerationTooLarge("noise space " + std::to_string(f.modulus()) + "^" +
                                  std::to_string(nvars) + " exceeds the enumeration cap");

    std::vector<ViewCounts> counts(V);
    for (std::size_t theta = 1; theta <= V; ++theta) {
        Enumeration en(nvars, f.modulus());
        while (en.next()) {
            std::vector<u64> view;
            for (std::size_t ci : spec.collusion) {
                Fe x = alpha[ci];
                for (std::size_t v = 1; v <= V; ++v) {
                    for (std::size_t m = 1; m <= M; ++m) {
                        Fe q = f.zero();
                        for (std::size_t t = 1; t <= T; ++t) {
                            Fe z{en.digit[((v - 1) * M + (m - 1)) * T + (t - 1)]};
                            q = f.add(q, f.mul(z, f.pow(x, plan.degrees.d[M] + t - 1)));
                        }
                        if (v == theta) q = f.add(q, f.pow(x, plan.degrees.d[m - 1]));
                        view.push_back(q.v);
                    }
                }
                if (spec.include_responses) {
                    // share, then response, each a single field element here
                    Fe share = f.zero();
                    for (std::size_t l = 1; l <= plan.L; ++l)
                        for (std::size_t k = 1; k <= plan.K; ++k)
                            share = f.add(share, f.mul(a->at(l - 1, k - 1),
                                                       f.pow(x, plan.degrees.b[l - 1] + k - 1)));
                    for (std::size_t t = 1; t <= plan.S; ++t) {
                        Fe z{en.digit[V * M * T + (t - 1)]};
                        share = f.add(share, f.mul(z, f.pow(x, plan.degrees.b[plan.L] + t - 1)));
                    }
                    view.push_back(share.v);
                    Fe bt = f.zero();
                    for (std::size_t v = 1; v <= V; ++v) {
                        for (std::size_t m = 1; m <= M; ++m) {
                            Fe q = f.zero();
                            for (std::size_t t = 1; t <= T; ++t) {
                                Fe z{en.digit[((v - 1) * M + (m - 1)) * T + (t - 1)]};
                                q = f.add(q, f.mul(z, f.pow(x, plan.degrees.d[M] + t - 1)));
                            }
                            if (v == theta) q = f.add(q, f.pow(x, plan.degrees.d[m - 1]));
                            bt = f.add(bt,
                                       f.mul(store->shards_b[ci][(v - 1) * M + (m - 1)].a[0], q));
                        }
                    }
                    view.push_back(f.mul(share, bt).v);
                }
            }
            ++counts[theta - 1][view];
        }
    }
    for (std::size_t i = 0; i < V; ++i)
        for (std::size_t j = i + 1; j < V; ++j)
            rep.tv.push_back(tv_between("theta=" + std::to_string(i + 1),
                                        "theta=" + std::to_string(j + 1), counts[i], counts[j],
                                        total));
    finish_exhaustive(rep);
    return rep;
}

AuditReport exhaustive_secrecy_psmm(const Field& f, const StrategyPlan& plan, const Matrix& a1,
                                    const Matrix& a2, std::span<const Fe> alpha,
                                    const ExhaustiveSpec& spec) {
    AuditReport rep;
    rep.mode = "exhaustive";
    if (a1.rows != a2.rows || a1.cols != a2.cols)
        throw DimensionMismatch("operand hypotheses must share a shape");
    const std::size_t br = a1.rows / plan.L, bc = a1.cols / plan.K;
    const std::size_t entries = br * bc;
    const std::size_t nvars = plan.S * entries;
    u64 total = pow_clamped(f.modulus(), nvars, spec.enumeration_limit);
    if (total > spec.enumeration_limit)
        throw EnumerationTooLarge("noise space exceeds the enumeration cap");

    ViewCounts counts[2];
    for (int hyp = 0; hyp < 2; ++hyp) {
        const Matrix& a = hyp == 0 ? a1 : a2;
        BlockMatrix ab = partition(a, plan.L, plan.K);
        Enumeration en(nvars, f.modulus());
        while (en.next()) {
            std::vector<u64> view;
            for (std::size_t ci : spec.collusion) {
                Fe x = alpha[ci];
                // share block = sum_{l,k} A_{l,k} x^(k-1+b_l) + sum_t Z_t x^(b_{L+1}+t-1)
                Matrix share(br, bc);
                for (std::size_t l = 1; l <= plan.L; ++l)
                    for (std::size_t k = 1; k <= plan.K; ++k)
                        scale_add_into(f, share, f.pow(x, plan.degrees.b[l - 1] + k - 1),
                                       ab.block(l - 1, k - 1));
                for (std::size_t t = 1; t <= plan.S; ++t) {
                    Fe pw = f.pow(x, plan.degrees.b[plan.L] + t - 1);
                    for (std::size_t e = 0; e < entries; ++e) {
                        Fe z{en.digit[(t - 1) * entries + e]};
                        share.a[e] = f.add(share.a[e], f.mul(z, pw));
                    }
                }
                for (Fe e : share.a) view.push_back(e.v);
            }
            ++counts[hyp][view];
        }
    }
    rep.tv.push_back(tv_between("A=first", "A=second", counts[0], counts[1], total));
    finish_exhaustive(rep);
    return rep;
}

AuditReport exhaustive_privacy_fpmm(const Field& f, const StrategyPlan& plan, std::size_t R,
                                    std::size_t V, std::span<const Fe> alpha,
                                    const ExhaustiveSpec& spec) {
    AuditReport rep;
    rep.mode = "exhaustive";
    const std::size_t L = plan.L, M = plan.M, TA = plan.TA, TB = plan.TB;
    const std::size_t na = R * L * TA;
    const std::size_t nvars = na + V * M * TB;
    u64 total = pow_clamped(f.modulus(), nvars, spec.enumeration_limit);
    if (total > spec.enumeration_limit)
        throw EnumerationTooLarge("noise space exceeds the enumeration cap");

    std::vector<ViewCounts> counts(R * V);
    for (std::size_t ta = 1; ta <= R; ++ta) {
        for (std::size_t tb = 1; tb <= V; ++tb) {
            ViewCounts& c = counts[(ta - 1) * V + (tb - 1)];
            Enumeration en(nvars, f.modulus());
            while (en.next()) {
                std::vector<u64> view;
                for (std::size_t ci : spec.collusion) {
                    Fe x = alpha[ci];
                    for (std::size_t r = 1; r <= R; ++r) {
                        for (std::size_t l = 1; l <= L; ++l) {
                            Fe q = f.zero();
                            for (std::size_t t = 1; t <= TA; ++t) {
                                Fe z{en.digit[((r - 1) * L + (l - 1)) * TA + (t - 1)]};
                                q = f.add(q, f.mul(z, f.pow(x, plan.degrees.b[L] + t - 1)));
                            }
                            if (r == ta) q = f.add(q, f.pow(x, plan.degrees.b[l - 1]));
                            view.push_back(q.v);
                        }
                    }
                    for (std::size_t v = 1; v <= V; ++v) {
                        for (std::size_t m = 1; m <= M; ++m) {
                            Fe q = f.zero();
                            for (std::size_t t = 1; t <= TB; ++t) {
                                Fe z{en.digit[na + ((v - 1) * M + (m - 1)) * TB + (t - 1)]};
                                q = f.add(q, f.mul(z, f.pow(x, plan.degrees.d[M] + t - 1)));
                            }
                            if (v == tb) q = f.add(q, f.pow(x, plan.degrees.d[m - 1]));
                            view.push_back(q.v);
                        }
                    }
                }
                ++c[view];
            }
        }
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = i + 1; j < counts.size(); ++j) {
            auto name = [&](std::size_t k) {
                return "thetaA=" + std::to_string(k / V + 1) +
                       ",thetaB=" + std::to_string(k % V + 1);
            };
            rep.tv.push_back(tv_between(name(i), name(j), counts[i], counts[j], total));
        }
    }
    finish_exhaustive(rep);
    return rep;
}

AuditReport exhaustive_privacy_baseline(const Field& f, std::size_t K, std::size_t R,
                                        std::size_t V, std::size_t t_prime,
                                        std::span<const Fe> alpha, const ExhaustiveSpec& spec) {
    AuditReport rep;
    rep.mode = "exhaustive";
    const std::size_t nvars = R * V * t_prime;
    u64 total = pow_clamped(f.modulus(), nvars, spec.enumeration_limit);
    if (total > spec.enumeration_limit)
        throw EnumerationTooLarge("noise space exceeds the enumeration cap");

    std::vector<ViewCounts> counts(R * V);
    for (std::size_t ta = 1; ta <= R; ++ta) {
        for (std::size_t tb = 1; tb <= V; ++tb) {
            ViewCounts& c = counts[(ta - 1) * V + (tb - 1)];
            Enumeration en(nvars, f.modulus());
            while (en.next()) {
                std::vector<u64> view;
                for (std::size_t ci : spec.collusion) {
                    Fe x = alpha[ci];
                    Fe pole = f.inv(f.pow(x, u64(K)));
                    for (std::size_t r = 1; r <= R; ++r) {
                        for (std::size_t v = 1; v <= V; ++v) {
                            Fe q = f.zero();
                            Fe pw = f.one();
                            for (std::size_t t = 1; t <= t_prime; ++t) {
                                Fe z{en.digit[((r - 1) * V + (v - 1)) * t_prime + (t - 1)]};
                                q = f.add(q, f.mul(z, pw));
                                pw = f.mul(pw, x);
                            }
                            if (r == ta && v == tb) q = f.add(q, pole);
                            view.push_back(q.v);
                        }
                    }
                }
                ++c[view];
            }
        }
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = i + 1; j < counts.size(); ++j) {
            auto name = [&](std::size_t k) {
                return "thetaA=" + std::to_string(k / V + 1) +
                       ",thetaB=" + std::to_string(k % V + 1);
            };
            rep.tv.push_back(tv_between(name(i), name(j), counts[i], counts[j], total));
        }
    }
    finish_exhaustive(rep);
    return rep;
}

AuditReport sampled_privacy_psmm(const Field& f, const StrategyPlan& plan, std::size_t V,
                                 std::size_t theta_a, std::size_t theta_b,
                                 std::span<const Fe> alpha, const SampledSpec& spec) {
    AuditReport rep;
    rep.mode = "sampled";
    const std::size_t M = plan.M, T = plan.T;
    std::vector<std::size_t> counts_a(spec.bins, 0), counts_b(spec.bins, 0);
    FieldRng rng(derive_seed(spec.seed, 0x73616d70ull));

    auto draw_view_bin = [&](std::size_t theta) {
        std::vector<u8> bytes;
        for (std::size_t ci : spec.collusion) {
            Fe x = alpha[ci];
            for (std::size_t v = 1; v <= V; ++v) {
                for (std::size_t m = 1; m <= M; ++m) {
                    Fe q = f.zero();
                    for (std::size_t t = 1; t <= T; ++t) {
                        Fe z = spec.noiseless ? f.zero() : rng.uniform(f);
                        q = f.add(q, f.mul(z, f.pow(x, plan.degrees.d[M] + t - 1)));
                    }
                    if (v == theta) q = f.add(q, f.pow(x, plan.degrees.d[m - 1]));
                    put_u64(bytes, q.v);
                }
            }
        }
        u64 h = 0xcbf29ce484222325ull;
        for (u8 b : bytes) {
            h ^= b;
            h *= 0x100000001b3ull;
        }
        return std::size_t(h % spec.bins);
    };

    for (std::size_t s = 0; s < spec.samples; ++s) ++counts_a[draw_view_bin(theta_a)];
    for (std::size_t s = 0; s < spec.samples; ++s) ++counts_b[draw_view_bin(theta_b)];
    rep.p_value = chi_square_two_sample_pvalue(counts_a, counts_b);
    rep.pass = rep.p_value > 0.001;
    return rep;
}

}  // namespace pmm
