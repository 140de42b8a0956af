#pragma once
// PMM1 on-disk and on-wire matrix encoding.  Byte layout, all integers
// little-endian:
//
//   offset 0   4 bytes   magic "PMM1"
//   offset 4   8 bytes   modulus
//   offset 12  8 bytes   rows
//   offset 20  8 bytes   cols
//   offset 28  ...       rows*cols elements, 8 bytes each, row-major
//
// The encoding is bit-exact: equal (modulus, matrix) pairs produce equal
// bytes, so files and frames can be compared or hashed directly.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pmm/matrix.hpp"

namespace pmm {

struct StoredMatrix {
    u64 modulus = 0;
    Matrix m;
};

std::vector<u8> pmm1_bytes(u64 modulus, const Matrix& m);
// Parses one matrix; throws MalformedFrame on bad magic, short buffer, or
// trailing bytes (when whole_buffer), and rejects entries >= modulus.
StoredMatrix pmm1_parse(std::span<const u8> bytes, bool whole_buffer = true);

void write_pmm1(const std::filesystem::path& p, u64 modulus, const Matrix& m);
StoredMatrix read_pmm1(const std::filesystem::path& p);

// little-endian integer helpers shared with the wire format
void put_u64(std::vector<u8>& out, u64 v);
u64 get_u64(std::span<const u8> in, std::size_t off);

// FNV-1a over a byte buffer, hex string; used to fingerprint artifacts in
// manifests without dragging in a crypto hash
std::string fnv1a_hex(std::span<const u8> bytes);

}  // namespace pmm
