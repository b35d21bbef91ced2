#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace rsqd::testing {

std::uint64_t catalan(int n) {
    std::uint64_t c = 1;
    for (int k = 1; k <= n; ++k) c = c * static_cast<std::uint64_t>(n + k) / static_cast<std::uint64_t>(k);
    return c / static_cast<std::uint64_t>(n + 1);
}

std::uint64_t motzkin(int n) {
    std::vector<std::uint64_t> m(static_cast<std::size_t>(std::max(n, 1) + 1), 1);
    for (int k = 2; k <= n; ++k) {
        std::uint64_t s = m[static_cast<std::size_t>(k - 1)];
        for (int j = 0; j <= k - 2; ++j) s += m[static_cast<std::size_t>(j)] * m[static_cast<std::size_t>(k - 2 - j)];
        m[static_cast<std::size_t>(k)] = s;
    }
    return m[static_cast<std::size_t>(n)];
}

std::vector<std::vector<int>> brute_force_bloch(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == n) {
            int s = 0;
            for (int m = 0; m < n; ++m) {
                s += cur[static_cast<std::size_t>(m)];
                if (m + 1 < n && s < m + 1) return;
            }
            if (s == n) out.push_back(cur);
            return;
        }
        for (int k = 0; k <= n; ++k) {
            cur[static_cast<std::size_t>(pos)] = k;
            rec(pos + 1);
        }
    };
    rec(0);
    return out;
}

std::vector<std::string> brute_force_dyck(int n) {
    std::vector<std::string> out;
    const int len = 2 * n;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << len); ++mask) {
        std::string w;
        int h = 0;
        bool ok = true;
        for (int i = len - 1; i >= 0 && ok; --i) {
            const bool up = (mask >> i) & 1u;
            w += up ? 'U' : 'D';
            h += up ? 1 : -1;
            ok = h >= 0;
        }
        if (ok && h == 0) out.push_back(w);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t brute_force_noncrossing_count(int n) {
    std::uint64_t count = 0;
    std::vector<int> block(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int pos, int used) {
        if (pos == n) {
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b)
                    for (int c = b + 1; c < n; ++c)
                        for (int d = c + 1; d < n; ++d) {
                            const auto A = block[static_cast<std::size_t>(a)], B = block[static_cast<std::size_t>(b)];
                            if (A == block[static_cast<std::size_t>(c)] && B == block[static_cast<std::size_t>(d)] && A != B)
                                return;
                        }
            ++count;
            return;
        }
        for (int k = 0; k <= used; ++k) {
            block[static_cast<std::size_t>(pos)] = k;
            rec(pos + 1, std::max(used, k + 1));
        }
    };
    if (n == 0) return 1;
    rec(0, 0);
    return count;
}

std::pair<double, double> eigenvalues_2x2(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double r = std::hypot(0.5 * (a - c), b);
    return {mean - r, mean + r};
}

namespace {

Matrix projector(const ProblemInstance& inst) {
    Matrix p = Matrix::Zero(inst.dim(), inst.dim());
    for (int j : inst.model()) p(j, j) = 1.0;
    return p;
}

} // namespace

std::vector<Matrix> riccati_orders(const ProblemInstance& inst, int nmax) {
    const int n = inst.dim();
    const Matrix p = projector(inst);
    const Matrix q = Matrix::Identity(n, n) - p;
    const Matrix v = inst.lambda() * inst.v();
    std::vector<Matrix> chi(static_cast<std::size_t>(nmax + 1), Matrix::Zero(n, n));
    for (int k = 1; k <= nmax; ++k) {
        Matrix rhs = Matrix::Zero(n, n);
        if (k == 1) rhs += q * v * p;
        rhs += q * v * chi[static_cast<std::size_t>(k - 1)] - chi[static_cast<std::size_t>(k - 1)] * v * p;
        for (int j = 1; j <= k - 2; ++j) rhs -= chi[static_cast<std::size_t>(j)] * v * chi[static_cast<std::size_t>(k - 1 - j)];
        Matrix x = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (q(i, i) == 1.0 && p(j, j) == 1.0) x(i, j) = rhs(i, j) / (inst.h0()[j] - inst.h0()[i]);
        chi[static_cast<std::size_t>(k)] = x;
    }
    return chi;
}

double riccati_residual(const ProblemInstance& inst, const Matrix& chi) {
    const int n = inst.dim();
    const Matrix p = projector(inst);
    const Matrix q = Matrix::Identity(n, n) - p;
    const Matrix h0 = inst.h0().cast<Complex>().asDiagonal();
    const Matrix v = inst.lambda() * inst.v();
    return (chi * h0 - h0 * chi - (q * v * p + q * v * chi - chi * v * p - chi * v * chi)).norm();
}

} // namespace rsqd::testing
