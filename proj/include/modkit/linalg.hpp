#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "modkit/errors.hpp"

namespace modkit {

// Row-major dense matrix just big enough for small regression problems.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Gaussian elimination with partial pivoting; throws on singular systems.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows;
    if (a.cols != n || b.size() != n) throw ParamError("solve: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        }
        if (std::fabs(a(pivot, col)) < 1e-12) throw NumericError("solve: singular system");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return x;
}

inline Matrix invert(const Matrix& a) {
    const std::size_t n = a.rows;
    if (a.cols != n) throw ParamError("invert: square matrix required");
    Matrix result(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        const auto x = solve(a, std::move(e));
        for (std::size_t row = 0; row < n; ++row) result(row, col) = x[row];
    }
    return result;
}

struct OlsFit {
    std::vector<double> coef;
    std::vector<double> std_err;
    double sse = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares via the normal equations. X is n x k (k small).
inline OlsFit ols(const Matrix& x, const std::vector<double>& y) {
    const std::size_t n = x.rows, k = x.cols;
    if (y.size() != n || n <= k) throw ParamError("ols: need more rows than columns");
    Matrix xtx(k, k);
    std::vector<double> xty(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            xty[a] += x(i, a) * y[i];
            for (std::size_t b = a; b < k; ++b) xtx(a, b) += x(i, a) * x(i, b);
        }
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);
    }
    OlsFit fit;
    fit.n = n;
    fit.coef = solve(xtx, xty);
    for (std::size_t i = 0; i < n; ++i) {
        double pred = 0.0;
        for (std::size_t a = 0; a < k; ++a) pred += x(i, a) * fit.coef[a];
        fit.sse += (y[i] - pred) * (y[i] - pred);
    }
    const double sigma2 = fit.sse / static_cast<double>(n - k);
    const Matrix cov = invert(xtx);
    fit.std_err.resize(k);
    for (std::size_t a = 0; a < k; ++a) fit.std_err[a] = std::sqrt(sigma2 * cov(a, a));
    return fit;
}

}  // namespace modkit
