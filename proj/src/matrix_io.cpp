#include "pmm/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <string>

namespace pmm {

namespace {
constexpr u8 kMagic[4] = {'P', 'M', 'M', '1'};
}

void put_u64(std::vector<u8>& out, u64 v) {
    for (int i = 0; i < 8; ++i) out.push_back(u8(v >> (8 * i)));
}

u64 get_u64(std::span<const u8> in, std::size_t off) {
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= u64(in[off + i]) << (8 * i);
    return v;
}

std::vector<u8> pmm1_bytes(u64 modulus, const Matrix& m) {
    std::vector<u8> out;
    out.reserve(28 + 8 * m.a.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u64(out, modulus);
    put_u64(out, m.rows);
    put_u64(out, m.cols);
    for (Fe e : m.a) put_u64(out, e.v);
    return out;
}

StoredMatrix pmm1_parse(std::span<const u8> bytes, bool whole_buffer) {
    if (bytes.size() < 28) throw MalformedFrame("matrix encoding shorter than its header");
    if (!std::equal(kMagic, kMagic + 4, bytes.begin()))
        throw MalformedFrame("matrix encoding lacks the PMM1 magic");
    StoredMatrix r;
    r.modulus = get_u64(bytes, 4);
    u64 rows = get_u64(bytes, 12);
    u64 cols = get_u64(bytes, 20);
    u128 count = u128(rows) * cols;
    if (count > (bytes.size() - 28) / 8)
        throw MalformedFrame("matrix encoding truncated: " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " needs more bytes than provided");
    if (whole_buffer && 28 + 8 * u64(count) != bytes.size())
        throw MalformedFrame("matrix encoding has trailing bytes");
    r.m = Matrix(std::size_t(rows), std::size_t(cols));
    for (std::size_t i = 0; i < std::size_t(count); ++i) {
        u64 v = get_u64(bytes, 28 + 8 * i);
        if (r.modulus != 0 && v >= r.modulus)
            throw MalformedFrame("matrix entry " + std::to_string(v) +
                                 " is out of range for modulus " + std::to_string(r.modulus));
        r.m.a[i] = Fe{v};
    }
    return r;
}

void write_pmm1(const std::filesystem::path& p, u64 modulus, const Matrix& m) {
    auto bytes = pmm1_bytes(modulus, m);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw Error("short write to " + p.string());
}

StoredMatrix read_pmm1(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::vector<u8> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return pmm1_parse(bytes);
}

std::string fnv1a_hex(std::span<const u8> bytes) {
    u64 h = 0xcbf29ce484222325ull;
    for (u8 b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace pmm
