#include "pmm/wire.hpp"

#include <cerrno>
#include <cstring>

#include <sys/socket.h>
#include <unistd.h>

#include "pmm/errors.hpp"

namespace pmm {
namespace {

constexpr char kMagic[4] = {'P', 'M', 'M', '1'};

// QUERY payload mode bytes
constexpr u8 kModePsmm = 1;
constexpr u8 kModeFpmm = 2;
constexpr u8 kModeBaseline = 3;

void put_bytes(std::vector<u8>& out, const void* p, std::size_t n) {
    const u8* b = static_cast<const u8*>(p);
    out.insert(out.end(), b, b + n);
}

void put_scalars(std::vector<u8>& out, const std::vector<u64>& xs) {
    put_u64(out, xs.size());
    for (u64 x : xs) put_u64(out, x);
}

// cursor over a received payload; every read is bounds-checked
struct Reader {
    std::span<const u8> buf;
    std::size_t pos = 0;

    std::size_t left() const { return buf.size() - pos; }
    void need(std::size_t n) const {
        if (left() < n) throw MalformedFrame("truncated frame payload");
    }
    u8 byte() {
        need(1);
        return buf[pos++];
    }
    u64 u64le() {
        need(8);
        u64 v = get_u64(buf, pos);
        pos += 8;
        return v;
    }
    std::span<const u8> take(std::size_t n) {
        need(n);
        auto s = buf.subspan(pos, n);
        pos += n;
        return s;
    }
    std::vector<u64> scalars() {
        u64 n = u64le();
        if (n > left() / 8) throw MalformedFrame("scalar count exceeds payload");
        std::vector<u64> xs(static_cast<std::size_t>(n));
        for (auto& x : xs) x = u64le();
        return xs;
    }
    void done() const {
        if (pos != buf.size()) throw MalformedFrame("trailing bytes in frame");
    }
};

void put_matrix(std::vector<u8>& out, const Matrix& m, u64 modulus) {
    auto bytes = pmm1_bytes(modulus, m);
    put_u64(out, bytes.size());
    put_bytes(out, bytes.data(), bytes.size());
}

StoredMatrix take_matrix(Reader& r) {
    u64 n = r.u64le();
    if (n > r.left()) throw MalformedFrame("matrix length exceeds payload");
    return pmm1_parse(r.take(static_cast<std::size_t>(n)), true);
}

}  // namespace

Tag message_tag(const Message& m) {
    switch (m.index()) {
        case 0: return Tag::Hello;
        case 1: return Tag::Share;
        case 2: return Tag::Query;
        case 3: return Tag::Compute;
        case 4: return Tag::Response;
        default: return Tag::Error;
    }
}

std::vector<u8> wire_encode(const Message& m) {
    std::vector<u8> payload;
    switch (message_tag(m)) {
        case Tag::Hello: {
            const auto& h = std::get<HelloMsg>(m);
            put_bytes(payload, kMagic, 4);
            if (h.modulus) put_u64(payload, *h.modulus);
            break;
        }
        case Tag::Share: {
            const auto& s = std::get<ShareMsg>(m);
            put_u64(payload, s.server);
            put_matrix(payload, s.share, s.modulus);
            break;
        }
        case Tag::Query: {
            const auto& q = std::get<QueryMsg>(m);
            put_u64(payload, q.server);
            if (auto* p = std::get_if<PsmmQueryPayload>(&q.payload)) {
                payload.push_back(kModePsmm);
                put_scalars(payload, p->q);
            } else if (auto* fp = std::get_if<FpmmQueryPayload>(&q.payload)) {
                payload.push_back(kModeFpmm);
                put_scalars(payload, fp->qa);
                put_scalars(payload, fp->qb);
            } else {
                payload.push_back(kModeBaseline);
                put_scalars(payload, std::get<BaselineQueryPayload>(q.payload).q);
            }
            break;
        }
        case Tag::Compute:
            put_u64(payload, std::get<ComputeMsg>(m).server);
            break;
        case Tag::Response: {
            const auto& r = std::get<ResponseMsg>(m);
            put_matrix(payload, r.block, r.modulus);
            break;
        }
        case Tag::Error: {
            const auto& e = std::get<ErrorMsg>(m);
            payload.push_back(static_cast<u8>(e.code & 0xff));
            payload.push_back(static_cast<u8>(e.code >> 8));
            put_u64(payload, e.text.size());
            put_bytes(payload, e.text.data(), e.text.size());
            break;
        }
    }

    std::vector<u8> frame;
    frame.reserve(9 + payload.size());
    frame.push_back(static_cast<u8>(message_tag(m)));
    put_u64(frame, payload.size());
    put_bytes(frame, payload.data(), payload.size());
    return frame;
}

Message wire_decode(std::span<const u8> frame) {
    if (frame.size() < 9) throw MalformedFrame("frame shorter than header");
    u8 tag = frame[0];
    u64 len = get_u64(frame, 1);
    if (len != frame.size() - 9) throw MalformedFrame("frame length mismatch");
    Reader r{frame.subspan(9), 0};

    switch (tag) {
        case static_cast<u8>(Tag::Hello): {
            HelloMsg h;
            auto magic = r.take(4);
            if (std::memcmp(magic.data(), kMagic, 4) != 0)
                throw MalformedFrame("bad hello magic");
            if (r.left() != 0) h.modulus = r.u64le();
            r.done();
            return h;
        }
        case static_cast<u8>(Tag::Share): {
            ShareMsg s;
            s.server = r.u64le();
            StoredMatrix sm = take_matrix(r);
            s.share = std::move(sm.m);
            s.modulus = sm.modulus;
            r.done();
            return s;
        }
        case static_cast<u8>(Tag::Query): {
            QueryMsg q;
            q.server = r.u64le();
            u8 mode = r.byte();
            if (mode == kModePsmm) {
                q.payload = PsmmQueryPayload{r.scalars()};
            } else if (mode == kModeFpmm) {
                FpmmQueryPayload fp;
                fp.qa = r.scalars();
                fp.qb = r.scalars();
                q.payload = std::move(fp);
            } else if (mode == kModeBaseline) {
                q.payload = BaselineQueryPayload{r.scalars()};
            } else {
                throw MalformedFrame("unknown query mode");
            }
            r.done();
            return q;
        }
        case static_cast<u8>(Tag::Compute): {
            ComputeMsg c;
            c.server = r.u64le();
            r.done();
            return c;
        }
        case static_cast<u8>(Tag::Response): {
            ResponseMsg resp;
            StoredMatrix sm = take_matrix(r);
            resp.block = std::move(sm.m);
            resp.modulus = sm.modulus;
            r.done();
            return resp;
        }
        case static_cast<u8>(Tag::Error): {
            ErrorMsg e;
            u16 lo = r.byte(), hi = r.byte();
            e.code = static_cast<u16>(lo | (hi << 8));
            u64 n = r.u64le();
            if (n > r.left()) throw MalformedFrame("error text exceeds payload");
            auto s = r.take(static_cast<std::size_t>(n));
            e.text.assign(reinterpret_cast<const char*>(s.data()), s.size());
            r.done();
            return e;
        }
        default:
            throw UnknownTag("unknown frame tag " + std::to_string(int(tag)));
    }
}

namespace {

void write_all(int fd, const u8* p, std::size_t n) {
    while (n > 0) {
        // MSG_NOSIGNAL: a peer that hung up must surface as an error, not SIGPIPE
        ssize_t k = ::send(fd, p, n, MSG_NOSIGNAL);
        if (k < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("send: ") + std::strerror(errno));
        }
        p += k;
        n -= static_cast<std::size_t>(k);
    }
}

// false only on clean EOF at a frame boundary
bool read_all(int fd, u8* p, std::size_t n, bool eof_ok) {
    std::size_t got = 0;
    while (got < n) {
        ssize_t k = ::read(fd, p + got, n - got);
        if (k < 0) {
            if (errno == EINTR) continue;
            throw TransportError(std::string("read: ") + std::strerror(errno));
        }
        if (k == 0) {
            if (got == 0 && eof_ok) return false;
            throw TransportError("connection closed mid-frame");
        }
        got += static_cast<std::size_t>(k);
    }
    return true;
}

// frames larger than this are treated as protocol corruption
constexpr u64 kMaxPayload = u64(1) << 32;

}  // namespace

void send_frame(int fd, const Message& m) {
    auto frame = wire_encode(m);
    write_all(fd, frame.data(), frame.size());
}

Message recv_message(int fd) {
    u8 head[9];
    if (!read_all(fd, head, 9, true)) throw TransportError("connection closed");
    u64 len = get_u64(std::span<const u8>(head, 9), 1);
    if (len > kMaxPayload) throw MalformedFrame("oversized frame");
    std::vector<u8> frame(9 + static_cast<std::size_t>(len));
    std::memcpy(frame.data(), head, 9);
    if (len > 0) read_all(fd, frame.data() + 9, static_cast<std::size_t>(len), false);
    return wire_decode(frame);
}

}  // namespace pmm
