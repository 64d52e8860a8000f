#include "topsim/modular_rank.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "topsim/errors.hpp"

namespace topsim {

namespace {
constexpr std::uint64_t kP = 2147483647ULL;  // 2^31 - 1

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) { return a * b % kP; }

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a);
        a = mulmod(a, a);
        e >>= 1;
    }
    return r;
}
}  // namespace

int rank_mod_p(const Eigen::SparseMatrix<double>& m) {
    const std::int64_t rows = m.rows(), cols = m.cols();
    if (rows == 0 || cols == 0) return 0;
    if (rows * cols > 50'000'000)
        throw ConfigError("rank_mod_p: matrix too large for desk-scale exact rank");

    std::vector<std::vector<std::uint32_t>> a(
        rows, std::vector<std::uint32_t>(cols, 0));
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            auto v = static_cast<std::int64_t>(std::llround(it.value()));
            if (std::fabs(it.value() - static_cast<double>(v)) > 0)
                throw ConsistencyError("rank_mod_p: non-integer entry");
            std::int64_t r = v % static_cast<std::int64_t>(kP);
            if (r < 0) r += kP;
            a[it.row()][it.col()] = static_cast<std::uint32_t>(r);
        }
    }

    int rank = 0;
    for (std::int64_t col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (std::int64_t r = rank; r < rows; ++r) {
            if (a[r][col] != 0) {
                pivot = static_cast<int>(r);
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(a[rank], a[pivot]);
        std::uint64_t inv = powmod(a[rank][col], kP - 2);
        for (std::int64_t c = col; c < cols; ++c)
            a[rank][c] = static_cast<std::uint32_t>(mulmod(a[rank][c], inv));
        for (std::int64_t r = rank + 1; r < rows; ++r) {
            std::uint64_t f = a[r][col];
            if (f == 0) continue;
            for (std::int64_t c = col; c < cols; ++c) {
                std::uint64_t x = a[r][c] + kP - mulmod(f, a[rank][c]);
                a[r][c] = static_cast<std::uint32_t>(x >= kP ? x - kP : x);
            }
        }
        ++rank;
    }
    return rank;
}

}  // namespace topsim
