#include "pmm/protocol.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "pmm/poly.hpp"

namespace pmm {

void MatrixPoly::add_term(const Field& f, std::size_t exponent, const Matrix& block) {
    if (rows == 0 && cols == 0) {
        rows = block.rows;
        cols = block.cols;
    }
    if (block.rows != rows || block.cols != cols)
        throw ShapeMismatch("matrix polynomial terms must share one block shape");
    if (exponent >= coeff.size()) coeff.resize(exponent + 1, Matrix(rows, cols));
    coeff[exponent] = mat_add(f, coeff[exponent], block);
}

Matrix MatrixPoly::eval(const Field& f, Fe x) const {
    Matrix acc(rows, cols);
    for (std::size_t i = coeff.size(); i > 0; --i) {
        acc = mat_scale(f, x, acc);
        acc = mat_add(f, acc, coeff[i - 1]);
    }
    return acc;
}

namespace {

std::vector<Response> sorted_by_server(std::span<const Response> responses) {
    std::vector<Response> rs(responses.begin(), responses.end());
    std::sort(rs.begin(), rs.end(),
              [](const Response& a, const Response& b) { return a.server < b.server; });
    std::set<std::size_t> ids;
    for (const Response& r : rs)
        if (!ids.insert(r.server).second)
            throw Error("two responses from server " + std::to_string(r.server));
    return rs;
}

void check_response_shapes(const StrategyPlan& plan, std::span<const Response> rs,
                           std::span<const Fe> alpha) {
    if (rs.empty()) return;
    const Matrix& first = rs.front().y;
    for (const Response& r : rs) {
        if (r.server >= alpha.size())
            throw Error("response from unknown server " + std::to_string(r.server));
        if (r.y.rows != first.rows || r.y.cols != first.cols)
            throw ShapeMismatch("responses differ in block shape");
    }
    (void)plan;
}

Matrix extract_blocks(const Field& f, const StrategyPlan& plan,
                      const std::vector<Matrix>& coeffs) {
    std::vector<std::vector<Matrix>> grid(plan.L, std::vector<Matrix>(plan.M));
    for (std::size_t l = 0; l < plan.L; ++l) {
        for (std::size_t m = 0; m < plan.M; ++m) {
            u64 e = plan.exp_of_block[l * plan.M + m];
            if (e < coeffs.size())
                grid[l][m] = coeffs[e];
            else
                grid[l][m] = Matrix(coeffs[0].rows, coeffs[0].cols);
        }
    }
    (void)f;
    return assemble_blocks(grid);
}

// interpolate coefficients 0..P-1 from the first P sorted responses and
// verify the remainder lies on the same polynomial
Matrix decode_sorted(const Field& f, const StrategyPlan& plan, std::span<const Fe> alpha,
                     const std::vector<Response>& rs) {
    const std::size_t P = plan.P;
    std::vector<Fe> xs;
    xs.reserve(P);
    for (std::size_t i = 0; i < P; ++i) xs.push_back(alpha[rs[i].server]);
    auto basis = lagrange_basis(f, xs);

    const Matrix& shape = rs.front().y;
    std::vector<Matrix> coeffs(P, Matrix(shape.rows, shape.cols));
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < basis[i].c.size(); ++j) {
            if (basis[i].c[j].v == 0) continue;
            scale_add_into(f, coeffs[j], basis[i].c[j], rs[i].y);
        }

    if (rs.size() > P) {
        MatrixPoly g;
        g.rows = shape.rows;
        g.cols = shape.cols;
        g.coeff = coeffs;
        for (std::size_t i = P; i < rs.size(); ++i) {
            if (g.eval(f, alpha[rs[i].server]) != rs[i].y)
                throw UncorrectableErrors(
                    "response from server " + std::to_string(rs[i].server) +
                    " disagrees with the polynomial through the first " + std::to_string(P) +
                    " responses");
        }
    }
    return extract_blocks(f, plan, coeffs);
}

}  // namespace

Matrix decode_product(const Field& f, const StrategyPlan& plan, std::span<const Fe> alpha,
                      std::span<const Response> responses) {
    if (responses.size() < plan.P)
        throw InsufficientResponses("decode needs P=" + std::to_string(plan.P) +
                                    " responses, got " + std::to_string(responses.size()));
    check_response_shapes(plan, responses, alpha);
    return decode_sorted(f, plan, alpha, sorted_by_server(responses));
}

Matrix decode_product_with_errors(const Field& f, const StrategyPlan& plan,
                                  std::span<const Fe> alpha, std::span<const Response> responses,
                                  std::size_t max_errors) {
    const std::size_t P = plan.P, E = max_errors;
    if (responses.size() < P + 2 * E)
        throw InsufficientResponses("error-tolerant decode needs P+2E=" +
                                    std::to_string(P + 2 * E) + " responses, got " +
                                    std::to_string(responses.size()));
    check_response_shapes(plan, responses, alpha);
    auto rs = sorted_by_server(responses);

    const std::size_t entries = rs.front().y.a.size();
    std::vector<Fe> xs;
    xs.reserve(rs.size());
    for (const Response& r : rs) xs.push_back(alpha[r.server]);

    // fixed seed: location must replay identically across transports and reruns
    FieldRng comb(derive_seed(0x70726f64756374ull, plan.P));
    const int attempts = 4;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        std::vector<Fe> u(entries);
        for (Fe& e : u) e = comb.uniform(f);

        std::vector<Fe> s(rs.size(), f.zero());
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = 0; j < entries; ++j)
                s[i] = f.add(s[i], f.mul(u[j], rs[i].y.a[j]));

        Poly located;
        try {
            located = interpolate_with_errors(f, xs, s, P, E);
        } catch (const UncorrectableErrors&) {
            continue;  // fresh combination
        }
        std::vector<Response> good;
        good.reserve(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i)
            if (eval_poly(f, located, xs[i]) == s[i]) good.push_back(rs[i]);
        if (good.size() < P) continue;
        try {
            return decode_sorted(f, plan, alpha, good);
        } catch (const UncorrectableErrors&) {
            continue;  // a corrupted block slipped through this combination
        }
    }
    throw UncorrectableErrors("could not isolate at most " + std::to_string(E) +
                              " corrupted responses");
}

}  // namespace pmm
