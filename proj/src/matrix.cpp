#include "pmm/matrix.hpp"

#include <string>

namespace pmm {

Matrix mat_mul(const Field& f, const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows)
        throw DimensionMismatch("mat_mul: " + std::to_string(x.rows) + "x" +
                                std::to_string(x.cols) + " times " + std::to_string(y.rows) +
                                "x" + std::to_string(y.cols));
    Matrix r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t k = 0; k < x.cols; ++k) {
            Fe s = x.at(i, k);
            if (s.v == 0) continue;
            const Fe* yrow = &y.a[k * y.cols];
            Fe* rrow = &r.a[i * r.cols];
            for (std::size_t j = 0; j < y.cols; ++j) rrow[j] = f.add(rrow[j], f.mul(s, yrow[j]));
        }
    }
    return r;
}

Matrix mat_add(const Field& f, const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("mat_add: shape mismatch");
    Matrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = f.add(x.a[i], y.a[i]);
    return r;
}

Matrix mat_sub(const Field& f, const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("mat_sub: shape mismatch");
    Matrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = f.sub(x.a[i], y.a[i]);
    return r;
}

Matrix mat_scale(const Field& f, Fe s, const Matrix& x) {
    Matrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = f.mul(s, x.a[i]);
    return r;
}

void scale_add_into(const Field& f, Matrix& acc, Fe s, const Matrix& x) {
    if (acc.rows != x.rows || acc.cols != x.cols)
        throw DimensionMismatch("scale_add_into: shape mismatch");
    for (std::size_t i = 0; i < acc.a.size(); ++i) acc.a[i] = f.add(acc.a[i], f.mul(s, x.a[i]));
}

Matrix random_matrix(const Field& f, std::size_t rows, std::size_t cols, FieldRng& rng) {
    Matrix r(rows, cols);
    for (Fe& e : r.a) e = rng.uniform(f);
    return r;
}

Matrix random_matrix(const Field& f, std::size_t rows, std::size_t cols, u64 seed) {
    FieldRng rng(seed);
    return random_matrix(f, rows, cols, rng);
}

Matrix BlockMatrix::block(std::size_t i, std::size_t j) const {
    Matrix r(block_rows(), block_cols());
    for (std::size_t bi = 0; bi < r.rows; ++bi)
        for (std::size_t bj = 0; bj < r.cols; ++bj)
            r.at(bi, bj) = m.at(i * r.rows + bi, j * r.cols + bj);
    return r;
}

BlockMatrix partition(Matrix m, std::size_t grid_rows, std::size_t grid_cols) {
    if (grid_rows == 0 || grid_cols == 0 || m.rows % grid_rows != 0 || m.cols % grid_cols != 0)
        throw IndivisibleDimensions(std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                                    " matrix cannot be cut into a " + std::to_string(grid_rows) +
                                    "x" + std::to_string(grid_cols) + " grid");
    return BlockMatrix{std::move(m), grid_rows, grid_cols};
}

Matrix assemble_blocks(const std::vector<std::vector<Matrix>>& grid) {
    if (grid.empty() || grid[0].empty()) return {};
    const std::size_t br = grid[0][0].rows, bc = grid[0][0].cols;
    for (const auto& row : grid) {
        if (row.size() != grid[0].size()) throw DimensionMismatch("assemble_blocks: ragged grid");
        for (const auto& b : row)
            if (b.rows != br || b.cols != bc)
                throw DimensionMismatch("assemble_blocks: blocks differ in shape");
    }
    Matrix r(grid.size() * br, grid[0].size() * bc);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid[i].size(); ++j)
            for (std::size_t bi = 0; bi < br; ++bi)
                for (std::size_t bj = 0; bj < bc; ++bj)
                    r.at(i * br + bi, j * bc + bj) = grid[i][j].at(bi, bj);
    return r;
}

}  // namespace pmm
