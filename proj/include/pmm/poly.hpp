#pragma once
// Univariate polynomials over a prime field, coefficients stored in
// ascending order.  Interpolation is plain O(k^2) Lagrange, which is the
// right tradeoff for the recovery thresholds this code ever sees (a few
// hundred points); a quasi-linear path can slot in behind the same
// signatures if that changes.
//
// interpolate_with_errors tolerates up to max_errors corrupted points, the
// Reed-Solomon decoding situation.  Two interchangeable strategies:
//   - subset search: drop every combination of max_errors points, keep the
//     first interpolant of admissible degree that disagrees with at most
//     max_errors of the inputs (unique, see the agreement bound below)
//   - locator: Berlekamp-Welch style linear system E(x)*p(x) = Q(x)
// The dispatcher picks subset search while C(n, E) stays small.  With
// n >= degree_bound + 2E any two admissible answers agree on at least
// n - 2E >= degree_bound points and are therefore the same polynomial, so
// the strategies cannot disagree.

#include <cstddef>
#include <span>
#include <vector>

#include "pmm/field.hpp"

namespace pmm {

struct Poly {
    std::vector<Fe> c;  // c[i] multiplies x^i; normalized form has no trailing zeros

    // -1 for the zero polynomial
    int degree() const {
        for (std::size_t i = c.size(); i > 0; --i)
            if (c[i - 1].v != 0) return int(i) - 1;
        return -1;
    }

    void normalize() {
        while (!c.empty() && c.back().v == 0) c.pop_back();
    }

    Fe coeff(std::size_t i) const { return i < c.size() ? c[i] : Fe{0}; }

    friend bool operator==(const Poly& a, const Poly& b) {
        Poly x = a, y = b;
        x.normalize();
        y.normalize();
        return x.c == y.c;
    }
};

Fe eval_poly(const Field& f, const Poly& p, Fe x);
std::vector<Fe> batch_eval(const Field& f, const Poly& p, std::span<const Fe> xs);

Poly poly_add(const Field& f, const Poly& a, const Poly& b);
Poly poly_mul(const Field& f, const Poly& a, const Poly& b);
// quotient of a by b; throws Error when the division leaves a remainder
// and exact is true, otherwise returns the floor quotient
Poly poly_div_exact(const Field& f, const Poly& a, const Poly& b);

// Unique polynomial of degree < xs.size() through the points.
// Throws DuplicateEvaluationPoint on repeated abscissae.
Poly interpolate(const Field& f, std::span<const Fe> xs, std::span<const Fe> ys);

// Lagrange basis in coefficient form for the given abscissae: basis[i] is 1
// at xs[i] and 0 at the others.  Shared by the matrix decoders, which reuse
// one basis across every entry of a block.
std::vector<Poly> lagrange_basis(const Field& f, std::span<const Fe> xs);

// Recovers p with deg p < degree_bound from n >= degree_bound + 2*max_errors
// points of which at most max_errors are wrong.  Throws UncorrectableErrors
// when no admissible polynomial exists.
Poly interpolate_with_errors(const Field& f, std::span<const Fe> xs, std::span<const Fe> ys,
                             std::size_t degree_bound, std::size_t max_errors);

// The two underlying strategies, exposed so tests can cross-check them.
Poly interpolate_with_errors_subsets(const Field& f, std::span<const Fe> xs,
                                     std::span<const Fe> ys, std::size_t degree_bound,
                                     std::size_t max_errors);
Poly interpolate_with_errors_locator(const Field& f, std::span<const Fe> xs,
                                     std::span<const Fe> ys, std::size_t degree_bound,
                                     std::size_t max_errors);

}  // namespace pmm
