#include "pmm/cluster.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "pmm/errors.hpp"
#include "pmm/matrix_io.hpp"
#include "pmm/wire.hpp"

namespace pmm {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using clock_t_ = std::chrono::steady_clock;

double ms_since(clock_t_::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_t_::now() - t0).count();
}

struct FdGuard {
    int fd = -1;
    ~FdGuard() {
        if (fd >= 0) ::close(fd);
    }
};

std::vector<u64> to_u64(std::span<const Fe> xs) {
    std::vector<u64> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i].v;
    return out;
}

std::vector<Fe> from_u64(const Field& f, const std::vector<u64>& xs) {
    std::vector<Fe> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f.from_u64(xs[i]);
    return out;
}

// sorted, deduplicated, and bounds-checked fault id list
std::vector<std::size_t> clean_ids(std::vector<std::size_t> ids, std::size_t n,
                                   const char* what) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (!ids.empty() && ids.back() >= n)
        throw ConfigError(std::string(what) + " id " + std::to_string(ids.back()) +
                          " out of range for " + std::to_string(n) + " servers");
    return ids;
}

[[noreturn]] void rethrow_remote(const ErrorMsg& e) {
    if (e.code == kErrModulusMismatch) throw ModulusMismatch("remote: " + e.text);
    throw TransportError("remote error: " + e.text);
}

int connect_to(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
    if (rc != 0) throw TransportError("resolve " + host + ": " + ::gai_strerror(rc));
    int fd = -1;
    for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
        fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0)
        throw TransportError("connect " + host + ":" + std::to_string(port) + " failed");
    return fd;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

const char* session_mode_name(SessionMode m) {
    switch (m) {
        case SessionMode::Psmm: return "psmm";
        case SessionMode::Fpmm: return "fpmm";
        default: return "baseline";
    }
}

SessionTranscript run_session(const Field& f, const ShardStore& st, const SessionSpec& spec,
                              const TransportSpec& transport) {
    const auto t_start = clock_t_::now();
    const StoreParams& pr = st.params;
    const std::size_t N = pr.N;
    const std::size_t E = spec.max_errors;

    // per-mode validation and recovery threshold
    std::size_t P = 0;
    switch (spec.mode) {
        case SessionMode::Psmm: {
            const StrategyPlan& plan = spec.psmm.plan;
            if (plan.kind != Kind::Psmm) throw ConfigError("plan kind is not psmm");
            if (plan.N != N || plan.K != pr.K || plan.L != pr.L || plan.M != pr.M)
                throw ConfigError("plan geometry does not match the store");
            if (pr.V == 0) throw ConfigError("store has no indexed library");
            if (spec.psmm.theta < 1 || spec.psmm.theta > pr.V)
                throw ConfigError("theta out of range");
            if (spec.psmm.a.cols != pr.omega)
                throw ConfigError("operand width does not match the stored library");
            validate_plan_for_field(f, plan);
            P = plan.P;
            break;
        }
        case SessionMode::Fpmm: {
            const StrategyPlan& plan = spec.fpmm.plan;
            if (plan.kind != Kind::Fpmm) throw ConfigError("plan kind is not fpmm");
            if (plan.N != N || plan.K != pr.K || plan.L != pr.L || plan.M != pr.M)
                throw ConfigError("plan geometry does not match the store");
            if (pr.R == 0 || pr.V == 0) throw ConfigError("store is missing a library");
            if (spec.fpmm.theta_a < 1 || spec.fpmm.theta_a > pr.R)
                throw ConfigError("theta_a out of range");
            if (spec.fpmm.theta_b < 1 || spec.fpmm.theta_b > pr.V)
                throw ConfigError("theta_b out of range");
            validate_plan_for_field(f, plan);
            P = plan.P;
            break;
        }
        case SessionMode::Baseline: {
            if (pr.L != 1 || pr.M != 1)
                throw ConfigError("baseline needs an unpartitioned (L = M = 1) store");
            if (pr.R == 0 || pr.V == 0) throw ConfigError("store is missing a library");
            if (spec.baseline.theta_a < 1 || spec.baseline.theta_a > pr.R)
                throw ConfigError("theta_a out of range");
            if (spec.baseline.theta_b < 1 || spec.baseline.theta_b > pr.V)
                throw ConfigError("theta_b out of range");
            if (spec.baseline.t_prime < 1) throw ConfigError("t_prime must be positive");
            if (E > 0) throw ConfigError("baseline decoding does not tolerate errors");
            P = baseline_threshold(pr.K, spec.baseline.t_prime);
            break;
        }
    }

    auto stragglers = clean_ids(spec.faults.stragglers, N, "straggler");
    auto malicious = clean_ids(spec.faults.malicious, N, "malicious");
    for (std::size_t id : malicious)
        if (std::binary_search(stragglers.begin(), stragglers.end(), id))
            throw ConfigError("server " + std::to_string(id) +
                              " cannot be both straggler and malicious");
    // a fault plan beyond the budget (too few responsive servers, more
    // corrupted ones than E) is allowed through; the decoder reports it
    const std::size_t needed = P + 2 * E;

    // master-side shares and queries
    std::vector<Matrix> shares;               // psmm only
    std::vector<std::vector<Fe>> queries;     // psmm / baseline scalars
    std::vector<FpmmQueries> fqueries;        // fpmm
    SessionCounters counters;
    switch (spec.mode) {
        case SessionMode::Psmm:
            shares = psmm_share_matrix(f, spec.psmm, st.alpha);
            queries = psmm_make_queries(f, spec.psmm, pr.V, st.alpha);
            for (const auto& s : shares) counters.upload_bytes += 8 * u64(s.a.size());
            for (const auto& q : queries) counters.query_bytes += 8 * u64(q.size());
            break;
        case SessionMode::Fpmm:
            fqueries = fpmm_make_queries(f, spec.fpmm, pr.R, pr.V, st.alpha);
            for (const auto& q : fqueries)
                counters.query_bytes += 8 * u64(q.qa.size() + q.qb.size());
            break;
        case SessionMode::Baseline:
            queries = baseline_make_queries(f, spec.baseline, pr.K, pr.R, pr.V, st.alpha);
            for (const auto& q : queries) counters.query_bytes += 8 * u64(q.size());
            break;
    }

    // ask the lowest-id responsive servers, exactly P + 2E of them
    std::vector<std::size_t> asked;
    for (std::size_t id = 0; id < N && asked.size() < needed; ++id)
        if (!std::binary_search(stragglers.begin(), stragglers.end(), id)) asked.push_back(id);

    const double prepare_ms = ms_since(t_start);
    const auto t_collect = clock_t_::now();

    std::vector<Response> responses;
    responses.reserve(asked.size());
    if (transport.kind == Transport::InProcess) {
        BaselineStore bl;
        if (spec.mode == SessionMode::Baseline) bl = baseline_setup(f, st);
        for (std::size_t id : asked) {
            Matrix y;
            switch (spec.mode) {
                case SessionMode::Psmm:
                    y = psmm_respond(f, st.shards_b[id], shares[id], queries[id]);
                    break;
                case SessionMode::Fpmm:
                    y = fpmm_respond(f, st.shards_a[id], st.shards_b[id], fqueries[id]);
                    break;
                case SessionMode::Baseline:
                    y = baseline_respond(f, bl.products[id], queries[id]);
                    break;
            }
            responses.push_back({id, std::move(y)});
        }
    } else {
        FdGuard sock{connect_to(transport.host, transport.port)};
        send_frame(sock.fd, HelloMsg{pr.modulus});
        Message hello = recv_message(sock.fd);
        if (auto* e = std::get_if<ErrorMsg>(&hello)) rethrow_remote(*e);
        auto* h = std::get_if<HelloMsg>(&hello);
        if (h == nullptr) throw TransportError("expected hello reply");
        if (!h->modulus || *h->modulus != pr.modulus)
            throw ModulusMismatch("remote store uses a different modulus");

        for (std::size_t id = 0; id < N; ++id) {
            if (spec.mode == SessionMode::Psmm)
                send_frame(sock.fd, ShareMsg{id, pr.modulus, shares[id]});
            QueryMsg qm;
            qm.server = id;
            switch (spec.mode) {
                case SessionMode::Psmm:
                    qm.payload = PsmmQueryPayload{to_u64(queries[id])};
                    break;
                case SessionMode::Fpmm:
                    qm.payload =
                        FpmmQueryPayload{to_u64(fqueries[id].qa), to_u64(fqueries[id].qb)};
                    break;
                case SessionMode::Baseline:
                    qm.payload = BaselineQueryPayload{to_u64(queries[id])};
                    break;
            }
            send_frame(sock.fd, qm);
        }
        for (std::size_t id : asked) {
            send_frame(sock.fd, ComputeMsg{id});
            Message m = recv_message(sock.fd);
            if (auto* e = std::get_if<ErrorMsg>(&m)) rethrow_remote(*e);
            auto* resp = std::get_if<ResponseMsg>(&m);
            if (resp == nullptr) throw TransportError("expected answer frame");
            if (resp->modulus != pr.modulus)
                throw ModulusMismatch("answer uses a different modulus");
            responses.push_back({id, std::move(resp->block)});
        }
    }

    // corrupted servers answer with a uniformly random block of the right shape
    for (auto& r : responses) {
        if (std::binary_search(malicious.begin(), malicious.end(), r.server))
            r.y = random_matrix(f, r.y.rows, r.y.cols,
                                derive_seed(spec.faults.fault_seed, u64(r.server)));
        counters.download_bytes += 8 * u64(r.y.a.size());
    }

    const double collect_ms = ms_since(t_collect);
    const auto t_decode = clock_t_::now();

    SessionTranscript tr;
    Matrix decoded;
    try {
        switch (spec.mode) {
            case SessionMode::Psmm:
                decoded = E > 0
                              ? psmm_decode_with_errors(f, spec.psmm.plan, st.alpha, responses, E)
                              : psmm_decode(f, spec.psmm.plan, st.alpha, responses);
                break;
            case SessionMode::Fpmm:
                decoded = E > 0
                              ? fpmm_decode_with_errors(f, spec.fpmm.plan, st.alpha, responses, E)
                              : fpmm_decode(f, spec.fpmm.plan, st.alpha, responses);
                break;
            case SessionMode::Baseline:
                decoded = baseline_decode(f, pr.K, spec.baseline.t_prime, st.alpha, responses);
                break;
        }
    } catch (const UncorrectableErrors&) {
        tr.ok = false;
        tr.decode_error = "UncorrectableErrors";
    } catch (const InsufficientResponses&) {
        tr.ok = false;
        tr.decode_error = "InsufficientResponses";
    }
    const double decode_ms = ms_since(t_decode);

    tr.decoded = decoded;
    tr.modulus = pr.modulus;
    tr.counters = counters;
    tr.used = responses;

    json c;
    c["mode"] = session_mode_name(spec.mode);
    c["modulus"] = pr.modulus;
    c["n"] = N;
    c["k"] = pr.K;
    c["l"] = pr.L;
    c["m"] = pr.M;
    c["v"] = pr.V;
    c["r"] = pr.R;
    c["threshold"] = P;
    c["max_errors"] = E;
    switch (spec.mode) {
        case SessionMode::Psmm:
            c["theta"] = spec.psmm.theta;
            c["noise_seed"] = spec.psmm.noise_seed;
            c["noiseless"] = spec.psmm.noiseless;
            break;
        case SessionMode::Fpmm:
            c["theta_a"] = spec.fpmm.theta_a;
            c["theta_b"] = spec.fpmm.theta_b;
            c["noise_seed"] = spec.fpmm.noise_seed;
            c["noiseless"] = spec.fpmm.noiseless;
            break;
        case SessionMode::Baseline:
            c["theta_a"] = spec.baseline.theta_a;
            c["theta_b"] = spec.baseline.theta_b;
            c["t_prime"] = spec.baseline.t_prime;
            c["noise_seed"] = spec.baseline.noise_seed;
            c["noiseless"] = spec.baseline.noiseless;
            break;
    }
    c["fault_seed"] = spec.faults.fault_seed;
    c["stragglers"] = stragglers;
    c["malicious"] = malicious;
    c["asked"] = asked;
    c["upload_bytes"] = counters.upload_bytes;
    c["query_bytes"] = counters.query_bytes;
    c["download_bytes"] = counters.download_bytes;
    json resp_list = json::array();
    for (const auto& r : responses) {
        json e;
        e["server"] = r.server;
        e["rows"] = r.y.rows;
        e["cols"] = r.y.cols;
        e["fingerprint"] = fnv1a_hex(pmm1_bytes(pr.modulus, r.y));
        resp_list.push_back(std::move(e));
    }
    c["responses"] = std::move(resp_list);
    if (tr.ok) {
        json dec;
        dec["rows"] = decoded.rows;
        dec["cols"] = decoded.cols;
        dec["fingerprint"] = fnv1a_hex(pmm1_bytes(pr.modulus, decoded));
        c["decoded"] = std::move(dec);
    } else {
        c["decode_error"] = tr.decode_error;
    }
    tr.canonical = std::move(c);

    json t;
    t["transport"] = transport.kind == Transport::Tcp ? "tcp" : "in_process";
    json phases;
    phases["prepare_ms"] = prepare_ms;
    phases["collect_ms"] = collect_ms;
    phases["decode_ms"] = decode_ms;
    phases["total_ms"] = ms_since(t_start);
    t["phases"] = std::move(phases);
    tr.timing = std::move(t);
    return tr;
}

void SessionTranscript::save(const std::filesystem::path& dir) const {
    fs::create_directories(dir / "responses");
    write_text(dir / "transcript.json", canonical.dump(2) + "\n");
    write_text(dir / "timing.json", timing.dump(2) + "\n");
    if (ok) write_pmm1(dir / "decoded.pmm1", modulus, decoded);
    for (const auto& r : used) {
        char name[32];
        std::snprintf(name, sizeof(name), "r_%03zu.pmm1", r.server);
        write_pmm1(dir / "responses" / name, modulus, r.y);
    }
}

Server::Server(const Field& f, ShardStore store, std::uint16_t port)
    : field_(f), store_(std::move(store)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        int err = errno;
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw TransportError(std::string("bind: ") + std::strerror(err));
    }
    if (::listen(listen_fd_, 8) < 0) {
        int err = errno;
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw TransportError(std::string("listen: ") + std::strerror(err));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Server::~Server() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::serve_connections(std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        int fd = -1;
        do {
            fd = ::accept(listen_fd_, nullptr, nullptr);
        } while (fd < 0 && errno == EINTR);
        if (fd < 0) throw TransportError(std::string("accept: ") + std::strerror(errno));
        handle_connection(fd);
        ::close(fd);
    }
}

void Server::serve_forever() {
    for (;;) serve_connections(1);
}

void Server::handle_connection(int fd) {
    const u64 modulus = store_.params.modulus;
    const std::size_t N = store_.params.N;
    std::map<u64, Matrix> shares;
    std::map<u64, QueryPayload> queries;

    auto fail = [&](u16 code, const std::string& text) {
        try {
            send_frame(fd, ErrorMsg{code, text});
        } catch (const TransportError&) {
        }
    };

    for (;;) {
        Message m;
        try {
            m = recv_message(fd);
        } catch (const TransportError&) {
            return;  // client went away
        } catch (const Error& e) {
            fail(kErrMalformed, e.what());
            return;
        }

        try {
            if (auto* h = std::get_if<HelloMsg>(&m)) {
                if (h->modulus && *h->modulus != modulus) {
                    fail(kErrModulusMismatch,
                         "store modulus is " + std::to_string(modulus));
                    return;
                }
                send_frame(fd, HelloMsg{modulus});
            } else if (auto* s = std::get_if<ShareMsg>(&m)) {
                if (s->server >= N) throw MalformedFrame("share for unknown server");
                if (s->modulus != modulus) {
                    fail(kErrModulusMismatch,
                         "store modulus is " + std::to_string(modulus));
                    return;
                }
                shares[s->server] = std::move(s->share);
            } else if (auto* q = std::get_if<QueryMsg>(&m)) {
                if (q->server >= N) throw MalformedFrame("query for unknown server");
                queries[q->server] = std::move(q->payload);
            } else if (auto* cm = std::get_if<ComputeMsg>(&m)) {
                auto qit = queries.find(cm->server);
                if (cm->server >= N || qit == queries.end())
                    throw MalformedFrame("compute without a query");
                Matrix y;
                const std::size_t id = static_cast<std::size_t>(cm->server);
                if (auto* pq = std::get_if<PsmmQueryPayload>(&qit->second)) {
                    auto sit = shares.find(cm->server);
                    if (sit == shares.end())
                        throw MalformedFrame("compute without a share");
                    y = psmm_respond(field_, store_.shards_b[id], sit->second,
                                     from_u64(field_, pq->q));
                } else if (auto* fq = std::get_if<FpmmQueryPayload>(&qit->second)) {
                    FpmmQueries qq{from_u64(field_, fq->qa), from_u64(field_, fq->qb)};
                    y = fpmm_respond(field_, store_.shards_a[id], store_.shards_b[id], qq);
                } else {
                    auto& bq = std::get<BaselineQueryPayload>(qit->second);
                    if (!baseline_ready_) {
                        baseline_ = baseline_setup(field_, store_);
                        baseline_ready_ = true;
                    }
                    y = baseline_respond(field_, baseline_.products[id],
                                         from_u64(field_, bq.q));
                }
                send_frame(fd, ResponseMsg{modulus, std::move(y)});
            } else {
                throw MalformedFrame("unexpected frame from client");
            }
        } catch (const TransportError&) {
            return;
        } catch (const MalformedFrame& e) {
            fail(kErrMalformed, e.what());
            return;
        } catch (const Error& e) {
            fail(kErrServer, e.what());
            return;
        }
    }
}

}  // namespace pmm
