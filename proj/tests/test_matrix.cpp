#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pmm/matrix.hpp"
#include "pmm/matrix_io.hpp"
#include "pmm/stats.hpp"

using namespace pmm;
namespace fs = std::filesystem;

namespace {

// product entry computed with wide integers and per-term reduction
Matrix mul_ref(const Field& f, const Matrix& x, const Matrix& y) {
    Matrix out(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < y.cols; ++j) {
            u128 acc = 0;
            for (std::size_t k = 0; k < x.cols; ++k) {
                acc += u128(x.at(i, k).v) * y.at(k, j).v % f.modulus();
                acc %= f.modulus();
            }
            out.at(i, j) = Fe{u64(acc)};
        }
    return out;
}

fs::path temp_dir() {
    auto d = fs::temp_directory_path() / "pmm_matrix_test";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("product matches the wide-integer reference") {
    Field f(kMersenne61);
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t n = 1 + trial % 5, m = 1 + (trial * 2) % 7, k = 1 + (trial * 3) % 6;
        Matrix x = random_matrix(f, n, k, 100 + trial);
        Matrix y = random_matrix(f, k, m, 200 + trial);
        CHECK(mat_mul(f, x, y) == mul_ref(f, x, y));
    }
    Field g(97);
    Matrix x = random_matrix(g, 4, 6, 1);
    Matrix y = random_matrix(g, 6, 3, 2);
    CHECK(mat_mul(g, x, y) == mul_ref(g, x, y));
}

TEST_CASE("product rejects mismatched inner dimensions") {
    Field f(97);
    Matrix x(2, 3), y(4, 2);
    CHECK_THROWS_AS(mat_mul(f, x, y), DimensionMismatch);
}

TEST_CASE("additive operations satisfy the usual identities") {
    Field f(kMersenne61);
    Matrix x = random_matrix(f, 5, 4, 11);
    Matrix y = random_matrix(f, 5, 4, 12);
    CHECK(mat_sub(f, mat_add(f, x, y), y) == x);
    CHECK(mat_scale(f, f.zero(), x) == Matrix(5, 4));
    CHECK(mat_scale(f, f.one(), x) == x);
    Matrix acc = x;
    scale_add_into(f, acc, f.from_u64(3), y);
    CHECK(acc == mat_add(f, x, mat_scale(f, f.from_u64(3), y)));
    CHECK_THROWS_AS(mat_add(f, x, Matrix(4, 5)), DimensionMismatch);
}

TEST_CASE("partition and assemble are inverse") {
    Field f(257);
    Matrix m = random_matrix(f, 6, 8, 21);
    BlockMatrix bm = partition(m, 3, 2);
    CHECK(bm.block_rows() == 2);
    CHECK(bm.block_cols() == 4);
    std::vector<std::vector<Matrix>> grid(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) grid[i].push_back(bm.block(i, j));
    CHECK(assemble_blocks(grid) == m);
    CHECK(bm.block(0, 0).at(1, 3) == m.at(1, 3));
    CHECK(bm.block(2, 1).at(0, 0) == m.at(4, 4));
}

TEST_CASE("partition rejects grids that do not divide the shape") {
    Field f(97);
    CHECK_THROWS_AS(partition(Matrix(6, 8), 4, 2), IndivisibleDimensions);
    CHECK_THROWS_AS(partition(Matrix(6, 8), 3, 3), IndivisibleDimensions);
}

TEST_CASE("random matrices are uniform over a tiny field") {
    Field f(5);
    Matrix m = random_matrix(f, 250, 400, 777);  // 1e5 draws
    std::vector<std::size_t> counts(5, 0);
    for (Fe e : m.a) counts[e.v]++;
    double p = chi_square_uniform_pvalue(counts);
    CHECK(p > 0.001);
}

TEST_CASE("seeded generation is reproducible and seed-sensitive") {
    Field f(kMersenne61);
    CHECK(random_matrix(f, 3, 3, 5) == random_matrix(f, 3, 3, 5));
    CHECK(random_matrix(f, 3, 3, 5) != random_matrix(f, 3, 3, 6));
}

TEST_CASE("encoding round-trips and is bit-exact") {
    Field f(kMersenne61);
    Matrix m = random_matrix(f, 7, 3, 99);
    auto bytes = pmm1_bytes(f.modulus(), m);
    CHECK(bytes.size() == 28 + 8 * 21);
    CHECK(bytes == pmm1_bytes(f.modulus(), m));  // same input, same bytes
    StoredMatrix sm = pmm1_parse(bytes);
    CHECK(sm.modulus == f.modulus());
    CHECK(sm.m == m);
}

TEST_CASE("parser rejects structural corruption") {
    Field f(97);
    Matrix m = random_matrix(f, 2, 2, 1);
    auto good = pmm1_bytes(97, m);

    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(pmm1_parse(bad_magic), MalformedFrame);

    auto truncated = good;
    truncated.pop_back();
    CHECK_THROWS_AS(pmm1_parse(truncated), MalformedFrame);

    auto trailing = good;
    trailing.push_back(0);
    CHECK_THROWS_AS(pmm1_parse(trailing), MalformedFrame);

    auto oversize = good;
    oversize[28] = 200;  // first element >= modulus 97
    CHECK_THROWS_AS(pmm1_parse(oversize), MalformedFrame);

    CHECK_THROWS_AS(pmm1_parse(std::vector<u8>{}), MalformedFrame);
}

TEST_CASE("file io preserves the exact bytes") {
    Field f(kMersenne61);
    Matrix m = random_matrix(f, 4, 5, 31);
    auto path = temp_dir() / "roundtrip.pmm1";
    write_pmm1(path, f.modulus(), m);
    StoredMatrix sm = read_pmm1(path);
    CHECK(sm.m == m);
    CHECK(sm.modulus == f.modulus());
    std::ifstream in(path, std::ios::binary);
    std::vector<u8> disk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(disk == pmm1_bytes(f.modulus(), m));
    fs::remove(path);
}

TEST_CASE("fingerprint is stable and input-sensitive") {
    std::vector<u8> empty;
    CHECK(fnv1a_hex(empty) == "cbf29ce484222325");  // FNV-1a offset basis
    std::vector<u8> a{1, 2, 3}, b{1, 2, 4};
    CHECK(fnv1a_hex(a) != fnv1a_hex(b));
    CHECK(fnv1a_hex(a) == fnv1a_hex(a));
}
