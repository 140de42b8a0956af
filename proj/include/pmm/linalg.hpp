#pragma once
// Dense Gaussian elimination over a prime field.  Matrices here are tiny
// (error-locator systems, mask-audit minors), so O(n^3) with full pivot
// search per column is fine.

#include <optional>
#include <vector>

#include "pmm/field.hpp"

namespace pmm {

using FeMat = std::vector<std::vector<Fe>>;

// Solves A x = b, A of shape rows x cols (rows >= or < cols both allowed).
// Underdetermined systems get free variables fixed to zero; inconsistent
// systems yield nullopt.
std::optional<std::vector<Fe>> solve_linear(const Field& f, FeMat a, std::vector<Fe> b);

// Determinant of a square matrix.
Fe determinant(const Field& f, FeMat a);

}  // namespace pmm
