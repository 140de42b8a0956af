#include "pmm/config.hpp"

#include <fstream>
#include <random>
#include <set>

#include "pmm/errors.hpp"

namespace pmm {
namespace {

using json = nlohmann::json;

// one object scope: typed getters mark keys as consumed, finish() flags the rest
class Section {
  public:
    Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + " must be a JSON object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    u64 uint(const char* key, u64 defv, u64 minv = 0, u64 maxv = UINT64_MAX) {
        const json* v = take(key);
        if (v == nullptr) return defv;
        // text parses to unsigned, in-memory literals to signed; both are fine
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
            throw ConfigError(label(key) + " must be an unsigned integer");
        u64 x = v->get<u64>();
        if (x < minv || x > maxv)
            throw ConfigError(label(key) + " must be in [" + std::to_string(minv) + ", " +
                              std::to_string(maxv) + "]");
        return x;
    }

    double num(const char* key, double defv) {
        const json* v = take(key);
        if (v == nullptr) return defv;
        if (!v->is_number()) throw ConfigError(label(key) + " must be a number");
        double x = v->get<double>();
        if (!(x > 0)) throw ConfigError(label(key) + " must be positive");
        return x;
    }

    bool boolean(const char* key, bool defv) {
        const json* v = take(key);
        if (v == nullptr) return defv;
        if (!v->is_boolean()) throw ConfigError(label(key) + " must be a boolean");
        return v->get<bool>();
    }

    std::string str(const char* key, std::string defv,
                    std::initializer_list<const char*> allowed = {}) {
        const json* v = take(key);
        std::string x = v == nullptr ? std::move(defv) : std::string();
        if (v != nullptr) {
            if (!v->is_string()) throw ConfigError(label(key) + " must be a string");
            x = v->get<std::string>();
        }
        if (allowed.size() > 0) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || x == a;
            if (!ok) {
                std::string opts;
                for (const char* a : allowed) opts += std::string(opts.empty() ? "" : " | ") + a;
                throw ConfigError(label(key) + " must be one of: " + opts);
            }
        }
        return x;
    }

    std::vector<std::size_t> id_list(const char* key) {
        const json* v = take(key);
        std::vector<std::size_t> out;
        if (v == nullptr) return out;
        if (!v->is_array()) throw ConfigError(label(key) + " must be an array");
        for (const auto& e : *v) {
            if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long long>() >= 0))
                throw ConfigError(label(key) + " entries must be unsigned integers");
            out.push_back(e.get<std::size_t>());
        }
        return out;
    }

    const json* object(const char* key) {
        const json* v = take(key);
        if (v != nullptr && !v->is_object())
            throw ConfigError(label(key) + " must be an object");
        return v;
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.contains(item.key()))
                throw ConfigError("unknown key \"" + item.key() + "\" in " + where_);
    }

  private:
    std::string label(const char* key) const { return "\"" + std::string(key) + "\""; }

    const json* take(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

u64 os_seed() {
    std::random_device rd;
    return (u64(rd()) << 32) | u64(rd());
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc) {
    RunConfig c;
    Section top(doc, "config");

    c.modulus = top.uint("modulus", c.modulus, 3);
    c.n = top.uint("n", c.n, 1);
    c.k = top.uint("k", c.k, 1);
    c.l = top.uint("l", c.l, 1);
    c.m = top.uint("m", c.m, 1);
    c.v = top.uint("v", c.v, 1);
    c.r = top.uint("r", c.r, 0);
    c.lambda = top.uint("lambda", c.lambda, 1);
    c.omega = top.uint("omega", c.omega, 1);
    c.gamma = top.uint("gamma", c.gamma, 1);

    c.s = top.uint("s", c.s, 1);
    c.t = top.uint("t", c.t, 1);
    c.ta = top.uint("t_a", c.ta, 1);
    c.tb = top.uint("t_b", c.tb, 1);
    c.t_prime = top.uint("t_prime", 0);
    std::string fam = top.str("family", "auto", {"auto", "delta1", "delta2", "delta3"});
    if (fam != "auto") c.family = family_from_name(fam);

    c.mode = top.str("mode", c.mode, {"psmm", "fpmm", "baseline"});
    c.theta = top.uint("theta", c.theta, 1);
    c.theta_a = top.uint("theta_a", c.theta_a, 1);
    c.theta_b = top.uint("theta_b", c.theta_b, 1);
    c.max_errors = top.uint("max_errors", 0);
    c.stragglers = top.id_list("stragglers");
    c.malicious = top.id_list("malicious");
    c.noiseless = top.boolean("noiseless", false);

    c.entropy = top.str("entropy", c.entropy, {"seed", "os"});
    c.library_seed = top.uint("library_seed", c.library_seed);
    c.operand_seed = top.uint("operand_seed", c.operand_seed);
    c.noise_seed = top.uint("noise_seed", c.noise_seed);
    c.fault_seed = top.uint("fault_seed", c.fault_seed);
    if (c.entropy == "os") {
        c.library_seed = os_seed();
        c.operand_seed = os_seed();
        c.noise_seed = os_seed();
        c.fault_seed = os_seed();
        c.audit_seed = os_seed();
    }

    c.shards = top.str("shards", c.shards);
    c.transport = top.str("transport", c.transport, {"in_process", "tcp"});
    c.host = top.str("host", c.host);
    c.port = static_cast<std::uint16_t>(top.uint("port", c.port, 0, 65535));

    if (const json* a = top.object("audit")) {
        Section sec(*a, "config.audit");
        c.audit_mode = sec.str("mode", c.audit_mode, {"exhaustive", "algebraic", "sampled"});
        c.collusion = sec.uint("collusion", 0);
        c.include_responses = sec.boolean("include_responses", false);
        c.samples = sec.uint("samples", c.samples, 1);
        c.bins = sec.uint("bins", c.bins, 2);
        u64 aseed = sec.uint("seed", c.audit_seed);  // consume even under entropy "os"
        if (c.entropy != "os") c.audit_seed = aseed;
        sec.finish();
    }

    if (const json* co = top.object("costs")) {
        Section sec(*co, "config.costs");
        c.objective =
            sec.str("objective", c.objective, {"total_comm", "total_comp", "upload", "download"});
        c.s1 = sec.num("s1", c.s1);
        c.s2 = sec.num("s2", c.s2);
        c.p_budget = sec.uint("p_budget", 0);
        sec.finish();
    }

    top.finish();

    if (!is_prime_u64(c.modulus)) throw ConfigError("\"modulus\" must be prime");
    if (c.k > c.n) throw ConfigError("\"k\" cannot exceed \"n\"");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

CostScenario config_scenario(const RunConfig& c) {
    CostScenario s;
    s.N = c.n;
    s.K = c.k;
    s.V = c.v;
    s.R = c.r == 0 ? 1 : c.r;
    s.S = c.s;
    s.T = c.t;
    s.TA = c.ta;
    s.TB = c.tb;
    s.lambda = double(c.lambda);
    s.omega = double(c.omega);
    s.gamma = double(c.gamma);
    s.s1 = c.s1;
    s.s2 = c.s2;
    return s;
}

}  // namespace pmm
