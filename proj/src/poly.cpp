#include "pmm/poly.hpp"

#include <algorithm>
#include <string>

#include "pmm/linalg.hpp"

namespace pmm {

namespace {

void require_distinct(std::span<const Fe> xs) {
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (xs[i] == xs[j])
                throw DuplicateEvaluationPoint("evaluation point " + std::to_string(xs[i].v) +
                                               " appears twice");
}

// C(n, k) clamped at 2^63 so the dispatcher's comparison cannot overflow.
u64 binomial_clamped(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > (u128(1) << 63)) return u64(1) << 63;
    }
    return u64(r);
}

// mismatches between p and the point set, stopping early once > limit
std::size_t count_disagreements(const Field& f, const Poly& p, std::span<const Fe> xs,
                                std::span<const Fe> ys, std::size_t limit) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (eval_poly(f, p, xs[i]) != ys[i] && ++bad > limit) break;
    }
    return bad;
}

}  // namespace

Fe eval_poly(const Field& f, const Poly& p, Fe x) {
    Fe acc = f.zero();
    for (std::size_t i = p.c.size(); i > 0; --i) acc = f.add(f.mul(acc, x), p.c[i - 1]);
    return acc;
}

std::vector<Fe> batch_eval(const Field& f, const Poly& p, std::span<const Fe> xs) {
    std::vector<Fe> out;
    out.reserve(xs.size());
    for (Fe x : xs) out.push_back(eval_poly(f, p, x));
    return out;
}

Poly poly_add(const Field& f, const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), f.zero());
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = f.add(a.coeff(i), b.coeff(i));
    r.normalize();
    return r;
}

Poly poly_mul(const Field& f, const Poly& a, const Poly& b) {
    if (a.degree() < 0 || b.degree() < 0) return {};
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, f.zero());
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].v == 0) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = f.add(r.c[i + j], f.mul(a.c[i], b.c[j]));
    }
    r.normalize();
    return r;
}

Poly poly_div_exact(const Field& f, const Poly& a, const Poly& b) {
    Poly rem = a, q;
    rem.normalize();
    int db = b.degree();
    if (db < 0) throw Error("polynomial division by zero");
    if (rem.degree() < db) {
        if (rem.degree() >= 0) throw Error("polynomial division leaves a remainder");
        return {};
    }
    q.c.assign(rem.degree() - db + 1, f.zero());
    Fe lead_inv = f.inv(b.c[db]);
    for (int d = rem.degree(); d >= db; d = rem.degree()) {
        Fe s = f.mul(rem.c[d], lead_inv);
        q.c[d - db] = s;
        for (int j = 0; j <= db; ++j)
            rem.c[d - db + j] = f.sub(rem.c[d - db + j], f.mul(s, b.c[j]));
        rem.normalize();
    }
    if (rem.degree() >= 0) throw Error("polynomial division leaves a remainder");
    return q;
}

std::vector<Poly> lagrange_basis(const Field& f, std::span<const Fe> xs) {
    require_distinct(xs);
    const std::size_t n = xs.size();
    // master = prod (x - x_j)
    Poly master;
    master.c = {f.one()};
    for (Fe x : xs) {
        Poly lin;
        lin.c = {f.neg(x), f.one()};
        master = poly_mul(f, master, lin);
    }
    std::vector<Poly> basis(n);
    for (std::size_t i = 0; i < n; ++i) {
        // synthetic division of master by (x - x_i)
        Poly q;
        q.c.assign(n, f.zero());
        Fe carry = f.zero();
        for (std::size_t j = n + 1; j > 1; --j) {
            carry = f.add(master.c[j - 1], f.mul(carry, xs[i]));
            q.c[j - 2] = carry;
        }
        Fe denom = f.one();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) denom = f.mul(denom, f.sub(xs[i], xs[j]));
        Fe s = f.inv(denom);
        for (Fe& cj : q.c) cj = f.mul(cj, s);
        basis[i] = std::move(q);
    }
    return basis;
}

Poly interpolate(const Field& f, std::span<const Fe> xs, std::span<const Fe> ys) {
    if (xs.size() != ys.size()) throw Error("interpolate: point count mismatch");
    if (xs.empty()) return {};
    auto basis = lagrange_basis(f, xs);
    Poly r;
    r.c.assign(xs.size(), f.zero());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i].v == 0) continue;
        for (std::size_t j = 0; j < basis[i].c.size(); ++j)
            r.c[j] = f.add(r.c[j], f.mul(ys[i], basis[i].c[j]));
    }
    r.normalize();
    return r;
}

Poly interpolate_with_errors_subsets(const Field& f, std::span<const Fe> xs,
                                     std::span<const Fe> ys, std::size_t degree_bound,
                                     std::size_t max_errors) {
    require_distinct(xs);
    const std::size_t n = xs.size();
    const std::size_t e = max_errors;
    // iterate over which e points to exclude, lexicographic
    std::vector<std::size_t> drop(e);
    for (std::size_t i = 0; i < e; ++i) drop[i] = i;
    std::vector<Fe> kx, ky;
    for (;;) {
        kx.clear();
        ky.clear();
        std::size_t di = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (di < e && drop[di] == i) {
                ++di;
                continue;
            }
            kx.push_back(xs[i]);
            ky.push_back(ys[i]);
        }
        Poly cand = interpolate(f, kx, ky);
        if (cand.degree() < int(degree_bound) &&
            count_disagreements(f, cand, xs, ys, e) <= e)
            return cand;

        // next combination
        if (e == 0) break;
        std::size_t i = e;
        while (i > 0 && drop[i - 1] == n - e + (i - 1)) --i;
        if (i == 0) break;
        ++drop[i - 1];
        for (std::size_t j = i; j < e; ++j) drop[j] = drop[j - 1] + 1;
    }
    throw UncorrectableErrors("no polynomial of degree < " + std::to_string(degree_bound) +
                              " fits all but " + std::to_string(e) + " of the " +
                              std::to_string(n) + " points");
}

Poly interpolate_with_errors_locator(const Field& f, std::span<const Fe> xs,
                                     std::span<const Fe> ys, std::size_t degree_bound,
                                     std::size_t max_errors) {
    require_distinct(xs);
    const std::size_t n = xs.size();
    const std::size_t e = max_errors;
    if (e == 0) {
        Poly p = interpolate(f, xs, ys);
        if (p.degree() >= int(degree_bound))
            throw UncorrectableErrors("points are not on a polynomial of degree < " +
                                      std::to_string(degree_bound));
        return p;
    }
    // unknowns: q_0..q_{b+e-1}, then locator tail l_0..l_{e-1} with the
    // locator forced monic, L(x) = x^e + sum l_j x^j.  row i encodes
    // Q(x_i) - y_i * L(x_i) = 0, rhs carries the monic term.
    const std::size_t qn = degree_bound + e;
    FeMat a(n, std::vector<Fe>(qn + e, f.zero()));
    std::vector<Fe> rhs(n, f.zero());
    for (std::size_t i = 0; i < n; ++i) {
        Fe xp = f.one();
        for (std::size_t j = 0; j < qn; ++j) {
            a[i][j] = xp;
            xp = f.mul(xp, xs[i]);
        }
        xp = f.one();
        for (std::size_t j = 0; j < e; ++j) {
            a[i][qn + j] = f.neg(f.mul(ys[i], xp));
            xp = f.mul(xp, xs[i]);
        }
        rhs[i] = f.mul(ys[i], f.pow(xs[i], e));
    }
    auto sol = solve_linear(f, std::move(a), std::move(rhs));
    if (!sol) throw UncorrectableErrors("error-locator system is inconsistent");

    Poly q, loc;
    q.c.assign(sol->begin(), sol->begin() + qn);
    q.normalize();
    loc.c.assign(sol->begin() + qn, sol->end());
    loc.c.push_back(f.one());
    Poly p;
    try {
        p = poly_div_exact(f, q, loc);
    } catch (const Error&) {
        throw UncorrectableErrors("locator does not divide the masked interpolant");
    }
    if (p.degree() >= int(degree_bound) || count_disagreements(f, p, xs, ys, e) > e)
        throw UncorrectableErrors("corrected polynomial fails verification");
    return p;
}

Poly interpolate_with_errors(const Field& f, std::span<const Fe> xs, std::span<const Fe> ys,
                             std::size_t degree_bound, std::size_t max_errors) {
    if (xs.size() != ys.size()) throw Error("interpolate_with_errors: point count mismatch");
    if (xs.size() < degree_bound + 2 * max_errors)
        throw Error("interpolate_with_errors: need at least degree_bound + 2E points");
    if (binomial_clamped(xs.size(), max_errors) <= 1000000ull)
        return interpolate_with_errors_subsets(f, xs, ys, degree_bound, max_errors);
    return interpolate_with_errors_locator(f, xs, ys, degree_bound, max_errors);
}

}  // namespace pmm
