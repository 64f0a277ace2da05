#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mdne {

/// Dense row-major matrix of 64-bit floats.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    /// Builds a matrix from nested row literals; all rows must have equal length.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// All kernels take a thread count. Work is split by output rows and every
// output element is reduced in a fixed order, so results are bit-identical
// for any thread count.

Matrix matmul(const Matrix& a, const Matrix& b, int threads = 1);
/// aᵀ · b without the caller materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b, int threads = 1);
/// a · bᵀ
Matrix matmul_nt(const Matrix& a, const Matrix& b, int threads = 1);

Matrix transpose(const Matrix& a);
Matrix sigmoid(const Matrix& x);
double sigmoid(double x) noexcept;
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
double frobenius_sq(const Matrix& a) noexcept;
double sum(std::span<const double> v) noexcept;

/// Adds `bias` to every row in place.
void add_row_vector(Matrix& m, std::span<const double> bias);
/// Column sums, i.e. 1ᵀ·m.
std::vector<double> column_sums(const Matrix& m);
/// [a | b] column-wise concatenation.
Matrix hconcat(const Matrix& a, const Matrix& b);
/// Columns [first, first + count).
Matrix column_slice(const Matrix& a, std::size_t first, std::size_t count);
/// Rows picked by index, in the given order.
Matrix gather_rows(const Matrix& a, std::span<const std::size_t> rows);

bool all_finite(std::span<const double> v) noexcept;

}  // namespace mdne
