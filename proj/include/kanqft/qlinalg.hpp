#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kanqft {

using Rational = mpq_class;
using Vector = std::vector<Rational>;

std::string to_string(const Rational& q);
// Accepts "p" or "p/q" with optional sign; throws on malformed input or q = 0.
Rational parse_rational(const std::string& text);

Vector zero_vector(std::size_t n);
bool is_zero(const Vector& v);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(const Rational& s, const Vector& v);

struct Entry {
  std::size_t col;
  Rational value;
};

// Sorted by column, no stored zeros.
using SparseRow = std::vector<Entry>;

// r += a * p
void axpy(SparseRow& r, const Rational& a, const SparseRow& p);

// Row-major matrix over Q. Rows are stored sparsely; all operations have
// ordinary dense semantics.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols);

  static QMatrix identity(std::size_t n);
  static QMatrix from_dense(const std::vector<Vector>& rows, std::size_t cols);
  static QMatrix from_dense(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, const Rational& v);
  void add(std::size_t i, std::size_t j, const Rational& v);
  // this[row_off + i][col_off + j] += scale * m[i][j]
  void add_block(std::size_t row_off, std::size_t col_off, const QMatrix& m,
                 const Rational& scale = 1);

  const SparseRow& row(std::size_t i) const { return data_[i]; }
  void set_row(std::size_t i, SparseRow r);
  Vector dense_row(std::size_t i) const;
  Vector column(std::size_t j) const;
  std::vector<Vector> to_dense() const;

  Vector apply(const Vector& x) const;
  QMatrix transpose() const;
  QMatrix rows_range(std::size_t begin, std::size_t end) const;
  bool is_zero() const;
  std::size_t nonzeros() const;

  QMatrix& operator+=(const QMatrix& o);
  QMatrix& operator-=(const QMatrix& o);
  friend QMatrix operator+(QMatrix a, const QMatrix& b) { return a += b; }
  friend QMatrix operator-(QMatrix a, const QMatrix& b) { return a -= b; }
  friend QMatrix operator*(const Rational& s, const QMatrix& m);
  friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
  friend bool operator==(const QMatrix& a, const QMatrix& b);
  friend bool operator!=(const QMatrix& a, const QMatrix& b) { return !(a == b); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<SparseRow> data_;
};

QMatrix vstack(const QMatrix& top, const QMatrix& bottom);

struct Echelon {
  QMatrix rows;  // nonzero rows of the reduced row-echelon form
  std::vector<std::size_t> pivots;
};

Echelon rref(const QMatrix& m);

// Incremental Gauss-Jordan elimination; pivot rows stay fully reduced.
class RowReducer {
 public:
  explicit RowReducer(std::size_t cols) : cols_(cols) {}

  // Returns true iff r was independent of the rows inserted so far.
  bool insert(SparseRow r);
  void reduce(SparseRow& r) const;
  std::size_t rank() const { return pivots_.size(); }
  Echelon result() const;

 private:
  std::size_t cols_;
  std::map<std::size_t, SparseRow> pivots_;
};

class Subspace {
 public:
  explicit Subspace(std::size_t ambient_dim = 0);

  static Subspace full(std::size_t n);
  static Subspace span(std::size_t ambient_dim, const std::vector<Vector>& vectors);
  static Subspace row_space(const QMatrix& m);

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.rows(); }
  const QMatrix& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  Vector vector(std::size_t i) const { return basis_.dense_row(i); }

  bool contains(const Vector& v) const;
  // Coordinates in the echelon basis, or nothing when v is outside.
  std::optional<Vector> coordinates(const Vector& v) const;
  // ambient_dim x dim, columns are the basis vectors
  QMatrix embedding() const;

  friend bool operator==(const Subspace& a, const Subspace& b);

 private:
  std::size_t ambient_;
  QMatrix basis_;
  std::vector<std::size_t> pivots_;
};

std::size_t rank(const QMatrix& m);
Subspace kernel_basis(const QMatrix& m);
std::optional<Vector> solve(const QMatrix& m, const Vector& b);
Subspace intersect(const Subspace& a, const Subspace& b);

}  // namespace kanqft
