#pragma once
// Binary framing for the session transport.  Every frame is
//
//   1 byte   tag
//   8 bytes  payload length, little-endian
//   n bytes  payload
//
// tags: 0x01 HELLO, 0x02 SHARE, 0x03 QUERY, 0x04 COMPUTE, 0x05 RESPONSE,
// 0x06 ERROR.  A HELLO payload is the 4-byte PMM1 magic optionally followed
// by the sender's modulus (so a bare HELLO is a 13-byte frame).  SHARE,
// QUERY and COMPUTE address a logical server by id; matrices travel in the
// PMM1 encoding.  HELLO and COMPUTE are the only frames that elicit a reply
// (HELLO, and RESPONSE or ERROR respectively), which keeps exactly one
// request-response in flight per connection.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pmm/matrix_io.hpp"

namespace pmm {

enum class Tag : u8 {
    Hello = 0x01,
    Share = 0x02,
    Query = 0x03,
    Compute = 0x04,
    Response = 0x05,
    Error = 0x06,
};

struct HelloMsg {
    std::optional<u64> modulus;
};

struct ShareMsg {
    u64 server = 0;
    u64 modulus = 0;
    Matrix share;
};

// payload variants of a QUERY frame, discriminated by a mode byte
struct PsmmQueryPayload {
    std::vector<u64> q;  // V*M scalars
};
struct FpmmQueryPayload {
    std::vector<u64> qa;  // R*L scalars
    std::vector<u64> qb;  // V*M scalars
};
struct BaselineQueryPayload {
    std::vector<u64> q;  // R*V scalars
};
using QueryPayload = std::variant<PsmmQueryPayload, FpmmQueryPayload, BaselineQueryPayload>;

struct QueryMsg {
    u64 server = 0;
    QueryPayload payload;
};

struct ComputeMsg {
    u64 server = 0;
};

struct ResponseMsg {
    u64 modulus = 0;
    Matrix block;
};

struct ErrorMsg {
    u16 code = 0;
    std::string text;
};

// error codes carried in ERROR frames
inline constexpr u16 kErrModulusMismatch = 1;
inline constexpr u16 kErrMalformed = 2;
inline constexpr u16 kErrServer = 3;

using Message =
    std::variant<HelloMsg, ShareMsg, QueryMsg, ComputeMsg, ResponseMsg, ErrorMsg>;

std::vector<u8> wire_encode(const Message& m);
// whole frame in, message out; MalformedFrame / UnknownTag on bad input
Message wire_decode(std::span<const u8> frame);

Tag message_tag(const Message& m);

// blocking socket I/O with the same error taxonomy
void send_frame(int fd, const Message& m);      // TransportError
Message recv_message(int fd);                   // TransportError on EOF/timeouts

}  // namespace pmm
