#pragma once
// Session driver: runs one retrieval end to end against a shard store,
// either in process or over TCP, and produces a replayable transcript.
//
// The master contacts every server (shares and queries are one-way frames),
// then asks the first P + 2E non-straggling servers, in id order, for their
// answers.  Fault injection happens on the master side so both transports
// see exactly the same corrupted bytes: a straggler is simply never asked,
// a malicious server's answer is replaced by a uniformly random block drawn
// from derive_seed(fault_seed, id).
//
// transcript.json is canonical: it captures everything needed to replay the
// session and is byte-identical across transports.  Wall-clock numbers and
// the transport name go to the timing.json sidecar instead.  Byte counters
// count field elements at eight bytes each, not frame overhead, so they
// match the analytic cost model.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmm/fpmm.hpp"
#include "pmm/psmm.hpp"

namespace pmm {

enum class SessionMode { Psmm, Fpmm, Baseline };
enum class Transport { InProcess, Tcp };

const char* session_mode_name(SessionMode m);

struct FaultPlan {
    std::vector<std::size_t> stragglers;  // never asked for an answer
    std::vector<std::size_t> malicious;   // answers replaced with random blocks
    u64 fault_seed = 0;
};

struct SessionSpec {
    SessionMode mode = SessionMode::Psmm;
    PsmmRequest psmm;          // read when mode == Psmm
    FpmmRequest fpmm;          // read when mode == Fpmm
    BaselineRequest baseline;  // read when mode == Baseline
    std::size_t max_errors = 0;  // E; the decoder tolerates up to E bad answers
    FaultPlan faults;
};

struct TransportSpec {
    Transport kind = Transport::InProcess;
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

struct SessionCounters {
    u64 upload_bytes = 0;    // share elements sent, 8 bytes each
    u64 query_bytes = 0;     // query scalars sent, 8 bytes each
    u64 download_bytes = 0;  // answer elements consumed, 8 bytes each
};

struct SessionTranscript {
    nlohmann::ordered_json canonical;  // transport-independent record
    nlohmann::ordered_json timing;     // sidecar, not part of the canonical bytes
    Matrix decoded;                    // empty when decoding failed
    bool ok = true;
    std::string decode_error;  // error class name when !ok, also in the canonical record
    u64 modulus = 0;
    SessionCounters counters;
    std::vector<Response> used;  // answers fed to the decoder, post-injection

    // writes transcript.json, timing.json, decoded.pmm1 (on success) and one
    // PMM1 file per consumed answer under dir/responses/
    void save(const std::filesystem::path& dir) const;
};

// The store supplies dimensions and alpha; shard data is only touched when
// running in process (over TCP the remote end owns it).  A fault plan that
// exceeds what the decoder can absorb is not rejected up front: the session
// runs, decoding fails, and the transcript records the failure with ok set
// to false.  Genuine configuration mistakes still throw.
SessionTranscript run_session(const Field& f, const ShardStore& st, const SessionSpec& spec,
                              const TransportSpec& transport = {});

// Hosts all N logical servers of a store behind one port, one connection at
// a time.  port 0 binds an ephemeral port, readable via port() once open.
class Server {
  public:
    Server(const Field& f, ShardStore store, std::uint16_t port);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const { return port_; }
    void serve_forever();
    void serve_connections(std::size_t count);  // handle count connections, then return

  private:
    void handle_connection(int fd);

    const Field& field_;
    ShardStore store_;
    BaselineStore baseline_;  // built on first baseline query
    bool baseline_ready_ = false;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
};

}  // namespace pmm
