#include "kanqft/qlinalg.hpp"

#include <algorithm>
#include <map>

#include "kanqft/error.hpp"

namespace kanqft {

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(const std::string& text) {
  auto digits = [](const std::string& s, std::size_t b, std::size_t e) {
    if (b >= e) return false;
    for (std::size_t i = b; i < e; ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  std::size_t start = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
  auto slash = text.find('/');
  bool ok = slash == std::string::npos
                ? digits(text, start, text.size())
                : digits(text, start, slash) && digits(text, slash + 1, text.size());
  if (!ok) throw Error("qlinalg", "malformed rational '" + text + "'");
  std::string body = text[0] == '+' ? text.substr(1) : text;
  if (slash != std::string::npos && mpz_class(text.substr(slash + 1)) == 0)
    throw Error("qlinalg", "zero denominator in '" + text + "'");
  Rational q(body, 10);
  q.canonicalize();
  return q;
}

Vector zero_vector(std::size_t n) { return Vector(n, Rational(0)); }

bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

Vector operator+(const Vector& a, const Vector& b) {
  Vector r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Vector operator-(const Vector& a, const Vector& b) {
  Vector r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Vector operator*(const Rational& s, const Vector& v) {
  Vector r(v);
  for (auto& x : r) x *= s;
  return r;
}

void axpy(SparseRow& r, const Rational& a, const SparseRow& p) {
  if (a == 0 || p.empty()) return;
  SparseRow out;
  out.reserve(r.size() + p.size());
  std::size_t i = 0, j = 0;
  while (i < r.size() || j < p.size()) {
    if (j == p.size() || (i < r.size() && r[i].col < p[j].col)) {
      out.push_back(std::move(r[i++]));
    } else if (i == r.size() || p[j].col < r[i].col) {
      out.push_back({p[j].col, a * p[j].value});
      ++j;
    } else {
      Rational v = r[i].value + a * p[j].value;
      if (v != 0) out.push_back({r[i].col, std::move(v)});
      ++i;
      ++j;
    }
  }
  r = std::move(out);
}

QMatrix::QMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows) {}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i].push_back({i, Rational(1)});
  return m;
}

QMatrix QMatrix::from_dense(const std::vector<Vector>& rows, std::size_t cols) {
  QMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error("qlinalg", "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j)
      if (rows[i][j] != 0) m.data_[i].push_back({j, rows[i][j]});
  }
  return m;
}

QMatrix QMatrix::from_dense(const std::vector<Vector>& rows) {
  return from_dense(rows, rows.empty() ? 0 : rows[0].size());
}

Rational QMatrix::at(std::size_t i, std::size_t j) const {
  const auto& r = data_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const Entry& e, std::size_t c) { return e.col < c; });
  if (it != r.end() && it->col == j) return it->value;
  return 0;
}

void QMatrix::set(std::size_t i, std::size_t j, const Rational& v) {
  auto& r = data_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const Entry& e, std::size_t c) { return e.col < c; });
  bool present = it != r.end() && it->col == j;
  if (v == 0) {
    if (present) r.erase(it);
  } else if (present) {
    it->value = v;
  } else {
    r.insert(it, {j, v});
  }
}

void QMatrix::add(std::size_t i, std::size_t j, const Rational& v) {
  if (v == 0) return;
  auto& r = data_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const Entry& e, std::size_t c) { return e.col < c; });
  if (it != r.end() && it->col == j) {
    it->value += v;
    if (it->value == 0) r.erase(it);
  } else {
    r.insert(it, {j, v});
  }
}

void QMatrix::add_block(std::size_t row_off, std::size_t col_off, const QMatrix& m,
                        const Rational& scale) {
  if (scale == 0) return;
  for (std::size_t i = 0; i < m.rows_; ++i)
    for (const auto& e : m.data_[i]) add(row_off + i, col_off + e.col, scale * e.value);
}

void QMatrix::set_row(std::size_t i, SparseRow r) { data_[i] = std::move(r); }

Vector QMatrix::dense_row(std::size_t i) const {
  Vector v = zero_vector(cols_);
  for (const auto& e : data_[i]) v[e.col] = e.value;
  return v;
}

Vector QMatrix::column(std::size_t j) const {
  Vector v = zero_vector(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, j);
  return v;
}

std::vector<Vector> QMatrix::to_dense() const {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < rows_; ++i) out.push_back(dense_row(i));
  return out;
}

Vector QMatrix::apply(const Vector& x) const {
  if (x.size() != cols_) throw Error("qlinalg", "vector length does not match matrix");
  Vector y = zero_vector(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (const auto& e : data_[i]) y[i] += e.value * x[e.col];
  return y;
}

QMatrix QMatrix::transpose() const {
  QMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (const auto& e : data_[i]) t.data_[e.col].push_back({i, e.value});
  return t;
}

QMatrix QMatrix::rows_range(std::size_t begin, std::size_t end) const {
  QMatrix m(end - begin, cols_);
  for (std::size_t i = begin; i < end; ++i) m.data_[i - begin] = data_[i];
  return m;
}

bool QMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const SparseRow& r) { return r.empty(); });
}

std::size_t QMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : data_) n += r.size();
  return n;
}

QMatrix& QMatrix::operator+=(const QMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("qlinalg", "shape mismatch in sum");
  for (std::size_t i = 0; i < rows_; ++i) axpy(data_[i], 1, o.data_[i]);
  return *this;
}

QMatrix& QMatrix::operator-=(const QMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw Error("qlinalg", "shape mismatch in difference");
  for (std::size_t i = 0; i < rows_; ++i) axpy(data_[i], -1, o.data_[i]);
  return *this;
}

QMatrix operator*(const Rational& s, const QMatrix& m) {
  if (s == 0) return QMatrix(m.rows_, m.cols_);
  QMatrix r(m);
  for (auto& row : r.data_)
    for (auto& e : row) e.value *= s;
  return r;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  if (a.cols_ != b.rows_) throw Error("qlinalg", "shape mismatch in product");
  QMatrix c(a.rows_, b.cols_);
  Vector acc = zero_vector(b.cols_);
  std::vector<char> seen(b.cols_, 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < a.rows_; ++i) {
    touched.clear();
    for (const auto& ea : a.data_[i]) {
      for (const auto& eb : b.data_[ea.col]) {
        if (!seen[eb.col]) {
          seen[eb.col] = 1;
          touched.push_back(eb.col);
        }
        acc[eb.col] += ea.value * eb.value;
      }
    }
    std::sort(touched.begin(), touched.end());
    auto& out = c.data_[i];
    for (auto j : touched) {
      if (acc[j] != 0) out.push_back({j, acc[j]});
      acc[j] = 0;
      seen[j] = 0;
    }
  }
  return c;
}

bool operator==(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t i = 0; i < a.rows_; ++i) {
    const auto& x = a.data_[i];
    const auto& y = b.data_[i];
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k].col != y[k].col || x[k].value != y[k].value) return false;
  }
  return true;
}

QMatrix vstack(const QMatrix& top, const QMatrix& bottom) {
  if (top.cols() != bottom.cols()) throw Error("qlinalg", "vstack column mismatch");
  QMatrix m(top.rows() + bottom.rows(), top.cols());
  for (std::size_t i = 0; i < top.rows(); ++i) m.set_row(i, top.row(i));
  for (std::size_t i = 0; i < bottom.rows(); ++i) m.set_row(top.rows() + i, bottom.row(i));
  return m;
}

bool RowReducer::insert(SparseRow r) {
  reduce(r);
  if (r.empty()) return false;
  std::size_t c = r.front().col;
  Rational inv = 1 / r.front().value;
  for (auto& e : r) e.value *= inv;
  for (auto& [pc, p] : pivots_) {
    auto it = std::lower_bound(p.begin(), p.end(), c,
                               [](const Entry& e, std::size_t x) { return e.col < x; });
    if (it != p.end() && it->col == c) {
      Rational coef = -it->value;
      axpy(p, coef, r);
    }
  }
  pivots_.emplace(c, std::move(r));
  return true;
}

void RowReducer::reduce(SparseRow& r) const {
  // Pivot rows vanish on the other pivot columns, so one pass suffices.
  std::vector<std::pair<std::size_t, Rational>> hits;
  for (const auto& e : r)
    if (pivots_.count(e.col)) hits.emplace_back(e.col, e.value);
  for (const auto& [c, v] : hits) axpy(r, -v, pivots_.at(c));
}

Echelon RowReducer::result() const {
  Echelon e{QMatrix(pivots_.size(), cols_), {}};
  std::size_t i = 0;
  for (const auto& [c, p] : pivots_) {
    e.rows.set_row(i++, p);
    e.pivots.push_back(c);
  }
  return e;
}

Echelon rref(const QMatrix& m) {
  RowReducer red(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) red.insert(m.row(i));
  return red.result();
}

Subspace::Subspace(std::size_t ambient_dim) : ambient_(ambient_dim), basis_(0, ambient_dim) {}

Subspace Subspace::full(std::size_t n) { return row_space(QMatrix::identity(n)); }

Subspace Subspace::span(std::size_t ambient_dim, const std::vector<Vector>& vectors) {
  return row_space(QMatrix::from_dense(vectors, ambient_dim));
}

Subspace Subspace::row_space(const QMatrix& m) {
  Subspace s(m.cols());
  Echelon e = rref(m);
  s.basis_ = std::move(e.rows);
  s.pivots_ = std::move(e.pivots);
  return s;
}

bool Subspace::contains(const Vector& v) const { return coordinates(v).has_value(); }

std::optional<Vector> Subspace::coordinates(const Vector& v) const {
  if (v.size() != ambient_) throw Error("qlinalg", "vector outside ambient dimension");
  Vector coords(pivots_.size());
  Vector rest(v);
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    coords[i] = v[pivots_[i]];
    for (const auto& e : basis_.row(i)) rest[e.col] -= coords[i] * e.value;
  }
  if (!is_zero(rest)) return std::nullopt;
  return coords;
}

QMatrix Subspace::embedding() const { return basis_.transpose(); }

bool operator==(const Subspace& a, const Subspace& b) {
  return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
}

std::size_t rank(const QMatrix& m) {
  // Fraction-free elimination on primitive integer rows.
  using IntRow = std::vector<std::pair<std::size_t, mpz_class>>;
  auto primitive = [](IntRow& r) {
    mpz_class g = 0;
    for (const auto& [c, v] : r) g = gcd(g, v);
    if (g > 1)
      for (auto& [c, v] : r) v /= g;
  };
  std::map<std::size_t, IntRow> pivots;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.row(i).empty()) continue;
    mpz_class l = 1;
    for (const auto& e : m.row(i)) l = lcm(l, e.value.get_den());
    IntRow r;
    for (const auto& e : m.row(i)) r.emplace_back(e.col, e.value.get_num() * (l / e.value.get_den()));
    primitive(r);
    while (!r.empty()) {
      auto it = pivots.find(r.front().first);
      if (it == pivots.end()) {
        pivots.emplace(r.front().first, std::move(r));
        break;
      }
      const IntRow& p = it->second;
      mpz_class g = gcd(p.front().second, r.front().second);
      mpz_class a = p.front().second / g, b = r.front().second / g;
      IntRow out;
      std::size_t x = 0, y = 0;
      while (x < r.size() || y < p.size()) {
        if (y == p.size() || (x < r.size() && r[x].first < p[y].first)) {
          out.emplace_back(r[x].first, a * r[x].second);
          ++x;
        } else if (x == r.size() || p[y].first < r[x].first) {
          out.emplace_back(p[y].first, -b * p[y].second);
          ++y;
        } else {
          mpz_class v = a * r[x].second - b * p[y].second;
          if (v != 0) out.emplace_back(r[x].first, std::move(v));
          ++x;
          ++y;
        }
      }
      r = std::move(out);
      primitive(r);
    }
  }
  return pivots.size();
}

Subspace kernel_basis(const QMatrix& m) {
  Echelon e = rref(m);
  std::vector<char> is_pivot(m.cols(), 0);
  for (auto p : e.pivots) is_pivot[p] = 1;
  QMatrix gens(m.cols() - e.pivots.size(), m.cols());
  std::size_t k = 0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (is_pivot[j]) continue;
    gens.set(k, j, 1);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
      Rational v = e.rows.at(r, j);
      if (v != 0) gens.set(k, e.pivots[r], -v);
    }
    ++k;
  }
  return Subspace::row_space(gens);
}

std::optional<Vector> solve(const QMatrix& m, const Vector& b) {
  if (b.size() != m.rows()) throw Error("qlinalg", "right-hand side length mismatch");
  QMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    SparseRow r = m.row(i);
    if (b[i] != 0) r.push_back({m.cols(), b[i]});
    aug.set_row(i, std::move(r));
  }
  Echelon e = rref(aug);
  Vector x = zero_vector(m.cols());
  for (std::size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] == m.cols()) return std::nullopt;
    x[e.pivots[r]] = e.rows.at(r, m.cols());
  }
  return x;
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw Error("qlinalg", "intersect: ambient dimensions differ (" +
                               std::to_string(a.ambient_dim()) + " vs " +
                               std::to_string(b.ambient_dim()) + ")");
  // x lies in a subspace iff it is orthogonal to the kernel of its basis.
  Subspace ann_a = kernel_basis(a.basis());
  Subspace ann_b = kernel_basis(b.basis());
  return kernel_basis(vstack(ann_a.basis(), ann_b.basis()));
}

}  // namespace kanqft
