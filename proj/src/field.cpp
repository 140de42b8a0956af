#include "pmm/field.hpp"

#include <string>

namespace pmm {

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    // this witness set decides primality for every n < 3.3e24, hence all u64
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

Field::Field(u64 modulus) : p_(modulus), mersenne_(modulus == kMersenne61) {
    if (modulus < 3 || !is_prime_u64(modulus))
        throw NonPrimeModulus("field modulus " + std::to_string(modulus) + " is not an odd prime");
}

Fe Field::from_i64(long long x) const {
    long long r = x % (long long)p_;
    if (r < 0) r += (long long)p_;
    return {u64(r)};
}

Fe Field::pow(Fe a, u64 e) const {
    Fe r = one();
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Fe Field::inv(Fe a) const {
    if (a.v == 0) throw Error("inverse of zero");
    return pow(a, p_ - 2);
}

Fe FieldRng::uniform(const Field& f) {
    const u64 p = f.modulus();
    // largest multiple of p that fits: accept below it, reduce, no bias
    const u64 rem = u64((u128(1) << 64) % p);
    if (rem == 0) return {g_() % p};
    const u64 limit = u64(0) - rem;
    for (;;) {
        u64 r = g_();
        if (r < limit) return {r % p};
    }
}

u64 derive_seed(u64 base, u64 tag) {
    u64 z = base + tag * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace pmm
