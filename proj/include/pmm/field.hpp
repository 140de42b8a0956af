#pragma once
// Prime field arithmetic on word-sized moduli.
//
// The production modulus is the Mersenne prime 2^61 - 1, where reduction
// after a widening multiply is two shifts and an add.  Any other prime
// below 2^64 works through the generic __int128 path; the tiny audit
// fields (5, 97, 257) use the same code.
//
// Elements are bare u64 values in [0, p).  The Field object carries the
// modulus and is passed by reference everywhere, so element storage stays
// one word and moduli can differ between live objects.

#include <cstdint>
#include <random>

#include "pmm/errors.hpp"

namespace pmm {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr u64 kMersenne61 = (u64{1} << 61) - 1;

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime_u64(u64 n);

struct Fe {
    u64 v = 0;
    friend bool operator==(Fe a, Fe b) { return a.v == b.v; }
    friend bool operator!=(Fe a, Fe b) { return a.v != b.v; }
    friend bool operator<(Fe a, Fe b) { return a.v < b.v; }  // storage order only
};

class Field {
  public:
    // Throws NonPrimeModulus unless modulus is prime.  2 is rejected as well:
    // nothing downstream works with fewer than 3 evaluation points available.
    explicit Field(u64 modulus);

    u64 modulus() const { return p_; }

    Fe zero() const { return {0}; }
    Fe one() const { return {1}; }
    Fe from_u64(u64 x) const { return {x % p_}; }
    Fe from_i64(long long x) const;

    Fe add(Fe a, Fe b) const {
        u128 s = u128(a.v) + b.v;  // moduli up to 2^64 - 1, sum may not fit a word
        if (s >= p_) s -= p_;
        return {u64(s)};
    }
    Fe sub(Fe a, Fe b) const { return {a.v >= b.v ? a.v - b.v : a.v + p_ - b.v}; }
    Fe neg(Fe a) const { return {a.v == 0 ? 0 : p_ - a.v}; }

    Fe mul(Fe a, Fe b) const {
        u128 z = u128(a.v) * b.v;
        if (mersenne_) {
            // fold the 122-bit product at bit 61, one conditional subtract
            u64 lo = u64(z) & kMersenne61;
            u64 hi = u64(z >> 61);
            u64 s = lo + hi;
            if (s >= kMersenne61) s -= kMersenne61;
            return {s};
        }
        return {u64(z % p_)};
    }

    Fe pow(Fe a, u64 e) const;
    Fe inv(Fe a) const;  // Fermat; a must be nonzero

  private:
    u64 p_;
    bool mersenne_;
};

// Seeded uniform sampling with rejection, so draws carry no modulo bias and
// identical seeds reproduce identical streams on every platform.
class FieldRng {
  public:
    explicit FieldRng(u64 seed) : g_(seed) {}

    Fe uniform(const Field& f);
    u64 raw() { return g_(); }

  private:
    std::mt19937_64 g_;
};

// splitmix64 step, used to derive independent sub-seeds from one base seed.
u64 derive_seed(u64 base, u64 tag);

}  // namespace pmm
