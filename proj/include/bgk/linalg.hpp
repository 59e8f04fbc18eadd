#ifndef BGK_LINALG_HPP
#define BGK_LINALG_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace bgk {

/// Row-major dense matrix sized for species-by-species coupling (N is small).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // Keeps the allocation when the element count does not grow.
  void resize(std::size_t rows, std::size_t cols, double fill = 0.0);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);
Matrix transpose(const Matrix& a);

double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);
double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LU factorization with partial (row) pivoting, PA = LU.
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix a);

  std::vector<double> solve(std::span<const double> b) const;
  /// Solves for every column of `b` at once.
  Matrix solve(const Matrix& b) const;
  void solve_in_place(std::span<double> b) const;

  double determinant() const;
  std::size_t size() const { return lu_.rows(); }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int parity_ = 1;
};

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// Cyclic Jacobi rotations, iterated until the off-diagonal Frobenius norm
/// drops below 1e-14 of the matrix norm. 1x1 and 2x2 inputs use closed forms.
/// Throws std::invalid_argument if the input is not symmetric to 1e-12
/// relative.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

}  // namespace bgk

#endif  // BGK_LINALG_HPP
