#pragma once
// JSON run configuration for the command-line tools.  One document drives
// every subcommand; each reads the slice it cares about.  Parsing is
// strict: a key the schema does not know is an error that names the key,
// so a typo cannot silently fall back to a default.
//
// All randomness flows through the four seeds.  entropy "os" replaces them
// with fresh OS draws at load time, after which the run is as reproducible
// as a hand-seeded one (the effective seeds appear in the transcript).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmm/costs.hpp"

namespace pmm {

struct RunConfig {
    // field and storage geometry
    u64 modulus = kMersenne61;
    std::size_t n = 5, k = 2, l = 1, m = 1;
    std::size_t v = 2, r = 0;
    std::size_t lambda = 4, omega = 4, gamma = 4;

    // privacy levels; t_prime 0 means max(ta, tb)
    std::size_t s = 1, t = 1, ta = 1, tb = 1, t_prime = 0;
    std::optional<Family> family;  // nullopt picks the threshold winner

    // session
    std::string mode = "psmm";  // psmm | fpmm | baseline
    std::size_t theta = 1, theta_a = 1, theta_b = 1;
    std::size_t max_errors = 0;
    std::vector<std::size_t> stragglers, malicious;
    bool noiseless = false;

    // seeds
    std::string entropy = "seed";  // seed | os
    u64 library_seed = 1, operand_seed = 2, noise_seed = 3, fault_seed = 4;

    // paths and transport
    std::string shards;
    std::string transport = "in_process";  // in_process | tcp
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    // audit section
    std::string audit_mode = "exhaustive";  // exhaustive | algebraic | sampled
    std::size_t collusion = 0;  // 0 means the declared privacy level
    bool include_responses = false;
    std::size_t samples = 100'000, bins = 64;
    u64 audit_seed = 5;

    // costs section
    std::string objective = "download";  // total_comm | total_comp | upload | download
    double s1 = 1.0, s2 = 1.0;
    u64 p_budget = 0;  // 0 means the server count

    std::size_t effective_t_prime() const { return t_prime ? t_prime : std::max(ta, tb); }
};

// strict parse; ConfigError on type errors, out-of-range values, or any
// unknown key (named in the message)
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

CostScenario config_scenario(const RunConfig& c);

}  // namespace pmm
