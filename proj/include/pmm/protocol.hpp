#pragma once
// Pieces shared by both private-multiplication protocols: polynomials whose
// coefficients are matrix blocks, and the master-side decoder that turns
// server evaluations back into the product blocks.
//
// The decoder is one Lagrange interpolation per point set, shared across
// every entry of the response blocks, followed by coefficient extraction at
// the plan's per-block exponents.

#include <cstddef>
#include <span>
#include <vector>

#include "pmm/matrix.hpp"
#include "pmm/strategy.hpp"

namespace pmm {

// dense exponent -> coefficient block; absent exponents are zero blocks
struct MatrixPoly {
    std::size_t rows = 0, cols = 0;
    std::vector<Matrix> coeff;  // index is the exponent

    void add_term(const Field& f, std::size_t exponent, const Matrix& block);
    Matrix eval(const Field& f, Fe x) const;  // Horner
};

struct Response {
    std::size_t server = 0;  // 0-based id, also the index into alpha
    Matrix y;
};

// Interpolates the degree-delta product polynomial from the lowest-id P
// responses and returns the assembled product matrix (L x M grid of blocks
// read off at plan.exp_of_block).  Additional responses beyond P must agree
// with the interpolated polynomial; disagreement throws UncorrectableErrors
// (a corrupted response is present, decode_with_errors can locate it).
// Fewer than P responses throw InsufficientResponses.
Matrix decode_product(const Field& f, const StrategyPlan& plan, std::span<const Fe> alpha,
                      std::span<const Response> responses);

// Same recovery with up to max_errors corrupted responses among at least
// P + 2*max_errors.  Corruption is located once on a random linear
// combination of block entries (a wrong block survives a combination only
// with probability delta/|field|; the combination is redrawn on failure),
// then the culprits are discarded and the clean subset decoded.
Matrix decode_product_with_errors(const Field& f, const StrategyPlan& plan,
                                  std::span<const Fe> alpha, std::span<const Response> responses,
                                  std::size_t max_errors);

}  // namespace pmm
