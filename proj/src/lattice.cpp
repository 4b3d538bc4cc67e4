#include "polymax/lattice.hpp"

#include <numeric>
#include <stdexcept>

namespace polymax::lattice {

std::int64_t dot(const IntVec& a, const IntVec& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::int64_t dot(const IntVec& a, const Exponent& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::int64_t gcd_all(const IntVec& v) {
    std::int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
    return g;
}

IntVec primitive(const IntVec& v) {
    std::int64_t g = gcd_all(v);
    if (g == 0) return v;
    IntVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / g;
    return out;
}

std::int64_t det(const Matrix& rows) {
    const std::size_t n = rows.size();
    if (n == 0) return 1;
    std::vector<std::vector<__int128>> a(n, std::vector<__int128>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw std::invalid_argument("det: matrix not square");
        for (std::size_t j = 0; j < n; ++j) a[i][j] = rows[i][j];
    }
    __int128 sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && a[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return static_cast<std::int64_t>(sign * a[n - 1][n - 1]);
}

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

int rank(const Matrix& rows) {
    if (rows.empty()) return 0;
    const std::size_t m = rows.size(), n = rows[0].size();
    std::vector<std::vector<__int128>> a(m, std::vector<__int128>(n));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = rows[i][j];
    int r = 0;
    for (std::size_t c = 0; c < n && r < static_cast<int>(m); ++c) {
        std::size_t p = r;
        while (p < m && a[p][c] == 0) ++p;
        if (p == m) continue;
        std::swap(a[r], a[p]);
        for (std::size_t i = r + 1; i < m; ++i) {
            if (a[i][c] == 0) continue;
            __int128 f = a[i][c], g = a[r][c];
            __int128 h = 0;
            for (std::size_t j = c; j < n; ++j) {
                a[i][j] = a[i][j] * g - a[r][j] * f;
                h = gcd128(h, a[i][j] < 0 ? -a[i][j] : a[i][j]);
            }
            if (h > 1)
                for (std::size_t j = c; j < n; ++j) a[i][j] /= h;
        }
        ++r;
    }
    return r;
}

IntVec cross(const Matrix& rows) {
    const std::size_t n = rows.size() + 1;
    IntVec w(n);
    for (std::size_t i = 0; i < n; ++i) {
        Matrix minor;
        for (const auto& r : rows) {
            IntVec row;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) row.push_back(r[j]);
            minor.push_back(row);
        }
        std::int64_t c = det(minor);
        w[i] = (i % 2 == 0) ? c : -c;
    }
    return w;
}

IntVec cramer_numerators(const Matrix& cols, const IntVec& q, std::int64_t& determinant) {
    const std::size_t n = cols.size();
    Matrix m(n, IntVec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = cols[j][i];
    determinant = det(m);
    IntVec out(n);
    for (std::size_t c = 0; c < n; ++c) {
        Matrix mc = m;
        for (std::size_t i = 0; i < n; ++i) mc[i][c] = q[i];
        out[c] = det(mc);
    }
    return out;
}

IntVec unit(int n, int i) {
    IntVec e(n, 0);
    e[i] = 1;
    return e;
}

IntVec to_int(const Exponent& e) { return IntVec(e.begin(), e.end()); }

}  // namespace polymax::lattice
