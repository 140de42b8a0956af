#include "pmm/linalg.hpp"

#include <cstddef>

namespace pmm {

std::optional<std::vector<Fe>> solve_linear(const Field& f, FeMat a, std::vector<Fe> b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;

    std::vector<std::size_t> pivot_col_of_row;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t piv = row;
        while (piv < rows && a[piv][col].v == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[row]);
        std::swap(b[piv], b[row]);

        Fe s = f.inv(a[row][col]);
        for (std::size_t j = col; j < cols; ++j) a[row][j] = f.mul(a[row][j], s);
        b[row] = f.mul(b[row], s);

        for (std::size_t i = 0; i < rows; ++i) {
            if (i == row || a[i][col].v == 0) continue;
            Fe m = a[i][col];
            for (std::size_t j = col; j < cols; ++j)
                a[i][j] = f.sub(a[i][j], f.mul(m, a[row][j]));
            b[i] = f.sub(b[i], f.mul(m, b[row]));
        }
        pivot_col_of_row.push_back(col);
        ++row;
    }

    // zero rows with nonzero rhs mean no solution
    for (std::size_t i = row; i < rows; ++i)
        if (b[i].v != 0) return std::nullopt;

    std::vector<Fe> x(cols, f.zero());
    for (std::size_t i = 0; i < pivot_col_of_row.size(); ++i) x[pivot_col_of_row[i]] = b[i];
    return x;
}

Fe determinant(const Field& f, FeMat a) {
    const std::size_t n = a.size();
    Fe det = f.one();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col].v == 0) ++piv;
        if (piv == n) return f.zero();
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = f.neg(det);
        }
        det = f.mul(det, a[col][col]);
        Fe s = f.inv(a[col][col]);
        for (std::size_t i = col + 1; i < n; ++i) {
            if (a[i][col].v == 0) continue;
            Fe m = f.mul(a[i][col], s);
            for (std::size_t j = col; j < n; ++j)
                a[i][j] = f.sub(a[i][j], f.mul(m, a[col][j]));
        }
    }
    return det;
}

}  // namespace pmm
