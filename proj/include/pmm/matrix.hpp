#pragma once
// Row-major dense matrices over a prime field, plus the block partitioning
// the coded protocols are built on.  A BlockMatrix is just a matrix with an
// attached grid shape; block (i, j) is the contiguous submatrix you get by
// cutting rows into grid_rows strips and columns into grid_cols strips.
// Dimensions that do not divide evenly are a hard error, nothing here pads.

#include <cstddef>
#include <vector>

#include "pmm/field.hpp"

namespace pmm {

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Fe> a;  // rows * cols entries, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    Fe& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    Fe at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
    friend bool operator!=(const Matrix& x, const Matrix& y) { return !(x == y); }
};

Matrix mat_mul(const Field& f, const Matrix& x, const Matrix& y);  // DimensionMismatch
Matrix mat_add(const Field& f, const Matrix& x, const Matrix& y);
Matrix mat_sub(const Field& f, const Matrix& x, const Matrix& y);
Matrix mat_scale(const Field& f, Fe s, const Matrix& x);
// acc += s * x, the inner step of every polynomial-of-matrices evaluation
void scale_add_into(const Field& f, Matrix& acc, Fe s, const Matrix& x);

Matrix random_matrix(const Field& f, std::size_t rows, std::size_t cols, u64 seed);
Matrix random_matrix(const Field& f, std::size_t rows, std::size_t cols, FieldRng& rng);

struct BlockMatrix {
    Matrix m;
    std::size_t grid_rows = 1, grid_cols = 1;

    std::size_t block_rows() const { return m.rows / grid_rows; }
    std::size_t block_cols() const { return m.cols / grid_cols; }
    // copies block (i, j), 0-based
    Matrix block(std::size_t i, std::size_t j) const;
};

// IndivisibleDimensions unless grid_rows | rows and grid_cols | cols
BlockMatrix partition(Matrix m, std::size_t grid_rows, std::size_t grid_cols);

// inverse of partition: stitch an r x c grid of equally shaped blocks
Matrix assemble_blocks(const std::vector<std::vector<Matrix>>& grid);

}  // namespace pmm
