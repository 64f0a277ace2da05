#include "core/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace mdne {
namespace {

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + dims(a) + " vs " + dims(b));
    }
}

// Below this fill ratio the left operand goes through the zero-skipping path.
// Adjacency and attribute rows are far below it.
constexpr double kSparseFill = 0.3;
constexpr std::size_t kColBlock = 512;
constexpr std::size_t kDepthBlock = 128;

double fill_ratio(const Matrix& a) {
    if (a.empty()) return 0.0;
    const auto nnz = std::count_if(a.values().begin(), a.values().end(),
                                   [](double v) { return v != 0.0; });
    return static_cast<double>(nnz) / static_cast<double>(a.size());
}

// c[rows begin..end) = a · b. Each c(i, j) accumulates over k in ascending
// order in both paths, so the two agree bit for bit.
void gemm_rows_sparse(const Matrix& a, const Matrix& b, Matrix& c, std::size_t begin,
                      std::size_t end) {
    const std::size_t depth = a.cols();
    const std::size_t width = b.cols();
    for (std::size_t i = begin; i < end; ++i) {
        double* out = c.data() + i * width;
        const double* arow = a.data() + i * depth;
        for (std::size_t k = 0; k < depth; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = b.data() + k * width;
            for (std::size_t j = 0; j < width; ++j) out[j] += av * brow[j];
        }
    }
}

void gemm_rows_dense(const Matrix& a, const Matrix& b, Matrix& c, std::size_t begin,
                     std::size_t end) {
    const std::size_t depth = a.cols();
    const std::size_t width = b.cols();
    const double* A = a.data();
    const double* B = b.data();
    double* C = c.data();
    for (std::size_t j0 = 0; j0 < width; j0 += kColBlock) {
        const std::size_t j1 = std::min(width, j0 + kColBlock);
        for (std::size_t k0 = 0; k0 < depth; k0 += kDepthBlock) {
            const std::size_t k1 = std::min(depth, k0 + kDepthBlock);
            std::size_t i = begin;
            for (; i + 4 <= end; i += 4) {
                double* c0 = C + i * width;
                double* c1 = c0 + width;
                double* c2 = c1 + width;
                double* c3 = c2 + width;
                for (std::size_t k = k0; k < k1; ++k) {
                    const double a0 = A[i * depth + k];
                    const double a1 = A[(i + 1) * depth + k];
                    const double a2 = A[(i + 2) * depth + k];
                    const double a3 = A[(i + 3) * depth + k];
                    const double* brow = B + k * width;
                    for (std::size_t j = j0; j < j1; ++j) {
                        const double bv = brow[j];
                        c0[j] += a0 * bv;
                        c1[j] += a1 * bv;
                        c2[j] += a2 * bv;
                        c3[j] += a3 * bv;
                    }
                }
            }
            for (; i < end; ++i) {
                double* ci = C + i * width;
                for (std::size_t k = k0; k < k1; ++k) {
                    const double av = A[i * depth + k];
                    const double* brow = B + k * width;
                    for (std::size_t j = j0; j < j1; ++j) ci[j] += av * brow[j];
                }
            }
        }
    }
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("from_rows: ragged rows");
        std::copy(row.begin(), row.end(), m.row(i++).begin());
    }
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b, int threads) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ " + dims(a) + " x " + dims(b));
    }
    Matrix c(a.rows(), b.cols());
    if (c.empty() || a.cols() == 0) return c;
    const bool sparse = fill_ratio(a) < kSparseFill;
    parallel_for_chunks(a.rows(), threads, [&](std::size_t begin, std::size_t end) {
        if (sparse) {
            gemm_rows_sparse(a, b, c, begin, end);
        } else {
            gemm_rows_dense(a, b, c, begin, end);
        }
    }, 8);
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b, int threads) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn: row counts differ " + dims(a) + " vs " + dims(b));
    }
    return matmul(transpose(a), b, threads);
}

Matrix matmul_nt(const Matrix& a, const Matrix& b, int threads) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt: column counts differ " + dims(a) + " vs " + dims(b));
    }
    return matmul(a, transpose(b), threads);
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    constexpr std::size_t kTile = 32;
    for (std::size_t i0 = 0; i0 < a.rows(); i0 += kTile) {
        const std::size_t i1 = std::min(a.rows(), i0 + kTile);
        for (std::size_t j0 = 0; j0 < a.cols(); j0 += kTile) {
            const std::size_t j1 = std::min(a.cols(), j0 + kTile);
            for (std::size_t i = i0; i < i1; ++i) {
                for (std::size_t j = j0; j < j1; ++j) t(j, i) = a(i, j);
            }
        }
    }
    return t;
}

double sigmoid(double x) noexcept {
    // Split by sign so exp() never overflows.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& x) {
    Matrix y(x.rows(), x.cols());
    auto out = y.values();
    auto in = x.values();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = sigmoid(in[i]);
    return y;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix c(a.rows(), a.cols());
    auto out = c.values();
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
    return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix c(a.rows(), a.cols());
    auto out = c.values();
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
    return c;
}

double frobenius_sq(const Matrix& a) noexcept {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return s;
}

double sum(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

void add_row_vector(Matrix& m, std::span<const double> bias) {
    if (bias.size() != m.cols()) {
        throw ShapeError("add_row_vector: bias length " + std::to_string(bias.size()) +
                         " vs " + std::to_string(m.cols()) + " columns");
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += bias[j];
    }
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) s[j] += row[j];
    }
    return s;
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("hconcat: row counts differ " + dims(a) + " vs " + dims(b));
    }
    Matrix c(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto out = c.row(r);
        std::copy(a.row(r).begin(), a.row(r).end(), out.begin());
        std::copy(b.row(r).begin(), b.row(r).end(), out.begin() + static_cast<long>(a.cols()));
    }
    return c;
}

Matrix column_slice(const Matrix& a, std::size_t first, std::size_t count) {
    if (first + count > a.cols()) throw ShapeError("column_slice: range exceeds " + dims(a));
    Matrix c(a.rows(), count);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto src = a.row(r).subspan(first, count);
        std::copy(src.begin(), src.end(), c.row(r).begin());
    }
    return c;
}

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> rows) {
    Matrix c(rows.size(), a.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= a.rows()) throw ShapeError("gather_rows: row index out of range");
        std::copy(a.row(rows[i]).begin(), a.row(rows[i]).end(), c.row(i).begin());
    }
    return c;
}

bool all_finite(std::span<const double> v) noexcept {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace mdne
