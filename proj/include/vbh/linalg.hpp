#pragma once

#include <optional>
#include <vector>

#include "vbh/rational.hpp"

namespace vbh {

using QVec = std::vector<Rat>;
using QMat = std::vector<QVec>;

// Dense exact Gaussian elimination over the rationals. The matrices that
// reach this code are small (desk-scale cohomology probes), so no pivoting
// heuristics beyond "first nonzero in the column" are needed.

// Reduce m to reduced row echelon form in place; returns the rank. If
// pivot_cols is given it receives the pivot column of each nonzero row.
inline int rref(QMat& m, std::vector<int>* pivot_cols = nullptr) {
    if (pivot_cols) pivot_cols->clear();
    if (m.empty()) return 0;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        Rat inv = Rat(1) / m[rank][col];
        for (int c = col; c < cols; ++c) m[rank][c] *= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][col] == 0) continue;
            Rat factor = m[r][col];
            for (int c = col; c < cols; ++c) m[r][c] -= factor * m[rank][c];
        }
        if (pivot_cols) pivot_cols->push_back(col);
        ++rank;
    }
    return rank;
}

// Scale a vector so the entries are coprime integers with a positive leading
// nonzero entry; keeps solver output deterministic and readable.
inline void make_primitive(QVec& v) {
    mpz_class lcm_den(1), gcd_num(0);
    for (const Rat& x : v) {
        if (x == 0) continue;
        mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den().get_mpz_t());
    }
    for (Rat& x : v) x *= Rat(lcm_den);
    for (const Rat& x : v) {
        if (x == 0) continue;
        mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), x.get_num().get_mpz_t());
    }
    if (gcd_num == 0) return;
    for (Rat& x : v) x /= Rat(gcd_num);
    for (const Rat& x : v) {
        if (x == 0) continue;
        if (x < 0)
            for (Rat& y : v) y = -y;
        break;
    }
}

// Basis of {x : m x = 0} for an rows x cols matrix (m is consumed).
inline std::vector<QVec> nullspace(QMat m, int cols) {
    std::vector<int> pivots;
    if (!m.empty()) rref(m, &pivots);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<QVec> basis;
    for (int fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        QVec v(cols, Rat(0));
        v[fc] = Rat(1);
        for (size_t r = 0; r < pivots.size(); ++r) {
            if (pivots[r] < cols) v[pivots[r]] = -m[r][fc];
        }
        make_primitive(v);
        basis.push_back(std::move(v));
    }
    return basis;
}

// One solution of a x = b, or nullopt when the system is inconsistent
// (a is consumed; free variables are set to zero).
inline std::optional<QVec> solve(QMat a, const QVec& b) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
    for (int r = 0; r < rows; ++r) a[r].push_back(b[r]);
    std::vector<int> pivots;
    if (rows > 0) rref(a, &pivots);
    QVec x(cols, Rat(0));
    for (size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] == cols) return std::nullopt; // pivot in the augmented column
        x[pivots[r]] = a[r][cols];
    }
    return x;
}

} // namespace vbh
