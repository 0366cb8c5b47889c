#include "kanqft/dg.hpp"

#include <algorithm>
#include <map>

#include "kanqft/error.hpp"

namespace kanqft {

namespace {

Rational sign(long e) { return (e % 2 == 0) ? Rational(1) : Rational(-1); }

SparseRow to_sparse(const Vector& v) {
  SparseRow r;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) r.push_back({i, v[i]});
  return r;
}

Vector to_dense(const SparseRow& r, std::size_t n) {
  Vector v = zero_vector(n);
  for (const auto& e : r) v[e.col] = e.value;
  return v;
}

bool same(const SparseRow& a, const SparseRow& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].col != b[i].col || a[i].value != b[i].value) return false;
  return true;
}

// Product tables T[i][j][p * dim(j) + q] = e_p e_q for i + j ≤ N.
using Tables = std::vector<std::vector<std::vector<SparseRow>>>;

Tables product_tables(const TruncatedDga& A) {
  const int N = A.max_degree();
  Tables T(N + 1, std::vector<std::vector<SparseRow>>(N + 1));
  for (int i = 0; i <= N; ++i)
    for (int j = 0; i + j <= N; ++j) {
      auto& t = T[i][j];
      t.resize(A.dim(i) * A.dim(j));
      for (std::size_t p = 0; p < A.dim(i); ++p)
        for (std::size_t q = 0; q < A.dim(j); ++q) t[p * A.dim(j) + q] = A.product(i, p, j, q);
    }
  return T;
}

// Σ_s v_s · e_s e_r  (v in degree i, e_r in degree j)
SparseRow right_mul(const Tables& T, int i, const SparseRow& v, int j, std::size_t r,
                    std::size_t dj) {
  SparseRow out;
  for (const auto& e : v) axpy(out, e.value, T[i][j][e.col * dj + r]);
  return out;
}

// Σ_s v_s · e_p e_s  (e_p in degree i, v in degree j)
SparseRow left_mul(const Tables& T, int i, std::size_t p, int j, const SparseRow& v,
                   std::size_t dj) {
  SparseRow out;
  for (const auto& e : v) axpy(out, e.value, T[i][j][p * dj + e.col]);
  return out;
}

std::string row_text(const SparseRow& r) {
  std::string s = "{";
  for (const auto& e : r) {
    if (s.size() > 1) s += ", ";
    s += std::to_string(e.col) + ": " + to_string(e.value);
  }
  return s + "}";
}

}  // namespace

QMatrix TruncatedDgVec::differential(int n) const {
  if (n == -1) return QMatrix(dim(0), 0);
  if (n < 0 || n >= max_degree)
    throw Error("dg", "d^" + std::to_string(n) + " is outside the truncation N = " +
                          std::to_string(max_degree));
  return d[static_cast<std::size_t>(n)];
}

std::string TruncatedDgVec::label(int n, std::size_t i) const {
  if (n >= 0 && static_cast<std::size_t>(n) < labels.size() && i < labels[n].size())
    return labels[n][i];
  return "e" + std::to_string(i);
}

Vector TruncatedDga::multiply(int i, const Vector& x, int j, const Vector& y) const {
  SparseRow acc;
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (x[p] == 0) continue;
    for (std::size_t q = 0; q < y.size(); ++q) {
      if (y[q] == 0) continue;
      axpy(acc, x[p] * y[q], product(i, p, j, q));
    }
  }
  return to_dense(acc, dim(i + j));
}

QMatrix TruncatedDga::product_matrix(int i, int j) const {
  QMatrix t(dim(i) * dim(j), dim(i + j));
  for (std::size_t p = 0; p < dim(i); ++p)
    for (std::size_t q = 0; q < dim(j); ++q) t.set_row(p * dim(j) + q, product(i, p, j, q));
  return t.transpose();
}

std::size_t GradedLinearMap::source_dim(int n) const {
  return n < 0 || static_cast<std::size_t>(n) >= source_dims.size() ? 0 : source_dims[n];
}

std::size_t GradedLinearMap::target_dim(int n) const {
  return n < 0 || static_cast<std::size_t>(n) >= target_dims.size() ? 0 : target_dims[n];
}

QMatrix GradedLinearMap::at(int n) const {
  if (n >= 0 && static_cast<std::size_t>(n) < blocks.size()) return blocks[n];
  return QMatrix(target_dim(n + shift), source_dim(n));
}

TruncatedDga degree0_dga(const FinAlgebra& a, int N) {
  TruncatedDga X;
  X.complex.max_degree = N;
  X.complex.dims.assign(N + 1, 0);
  X.complex.dims[0] = a.dim();
  X.complex.labels.resize(N + 1);
  for (int n = 0; n < N; ++n) X.complex.d.emplace_back(X.complex.dims[n + 1], X.complex.dims[n]);
  X.product = [a](int i, std::size_t p, int j, std::size_t q) {
    if (i != 0 || j != 0) return SparseRow{};
    SparseRow r;
    Vector v = a.basis_product(p, q);
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] != 0) r.push_back({k, v[k]});
    return r;
  };
  X.unit = a.unit();
  return X;
}


GradedLinearMap zero_map(const std::vector<std::size_t>& source,
                         const std::vector<std::size_t>& target, int shift) {
  GradedLinearMap m{shift, source, target, {}};
  for (std::size_t n = 0; n < source.size(); ++n)
    m.blocks.emplace_back(m.target_dim(static_cast<int>(n) + shift), source[n]);
  return m;
}

GradedLinearMap identity_map(const TruncatedDgVec& v) {
  GradedLinearMap m{0, v.dims, v.dims, {}};
  for (auto d : v.dims) m.blocks.push_back(QMatrix::identity(d));
  return m;
}

GradedLinearMap differential_map(const TruncatedDgVec& v) {
  GradedLinearMap m{1, v.dims, v.dims, {}};
  for (int n = 0; n <= v.max_degree; ++n)
    m.blocks.push_back(n < v.max_degree ? v.d[n] : QMatrix(0, v.dim(n)));
  return m;
}

GradedLinearMap compose(const GradedLinearMap& b, const GradedLinearMap& a) {
  if (a.target_dims != b.source_dims) throw Error("dg", "compose: intermediate dimensions differ");
  GradedLinearMap m{a.shift + b.shift, a.source_dims, b.target_dims, {}};
  for (std::size_t n = 0; n < a.source_dims.size(); ++n) {
    int k = static_cast<int>(n) + a.shift;
    if (a.target_dim(k) == 0 || b.target_dim(k + b.shift) == 0)
      m.blocks.emplace_back(m.target_dim(static_cast<int>(n) + m.shift), a.source_dims[n]);
    else
      m.blocks.push_back(b.at(k) * a.at(static_cast<int>(n)));
  }
  return m;
}

GradedLinearMap operator+(const GradedLinearMap& a, const GradedLinearMap& b) {
  if (a.shift != b.shift || a.source_dims != b.source_dims || a.target_dims != b.target_dims)
    throw Error("dg", "sum of graded maps with different shapes");
  GradedLinearMap m = a;
  for (std::size_t n = 0; n < m.blocks.size(); ++n) m.blocks[n] += b.blocks[n];
  return m;
}

GradedLinearMap operator-(const GradedLinearMap& a, const GradedLinearMap& b) {
  return a + Rational(-1) * b;
}

GradedLinearMap operator*(const Rational& s, const GradedLinearMap& a) {
  GradedLinearMap m = a;
  for (auto& blk : m.blocks) blk = s * blk;
  return m;
}

IdentityCheck compare_maps(const std::string& name, const GradedLinearMap& lhs,
                           const GradedLinearMap& rhs, int lo, int hi,
                           const TruncatedDgVec* source) {
  IdentityCheck c{name, true, lo, hi, {}};
  if (lhs.shift != rhs.shift) throw Error("dg", name + ": shifts differ");
  for (int n = lo; n <= hi; ++n) {
    QMatrix diff = lhs.at(n) - rhs.at(n);
    if (diff.is_zero()) continue;
    QMatrix t = diff.transpose();
    std::size_t j = 0;
    while (t.row(j).empty()) ++j;
    c.holds = false;
    c.counterexample = "degree " + std::to_string(n) + ", basis vector " + std::to_string(j) +
                       (source ? " " + source->label(n, j) : std::string()) +
                       ": lhs - rhs = " + row_text(t.row(j));
    return c;
  }
  return c;
}

IdentityCheck check_homotopy_identity(const TruncatedDgVec& source, const TruncatedDgVec& target,
                                      const GradedLinearMap& F, const GradedLinearMap& G,
                                      const GradedLinearMap& H, int up_to,
                                      const std::string& name) {
  if (up_to > source.max_degree - 1 || up_to > target.max_degree - 1)
    throw Error("dg", name + ": degree " + std::to_string(up_to) +
                          " needs data beyond the truncation");
  if (F.shift != 0 || G.shift != 0 || H.shift != -1)
    throw Error("dg", name + ": expected shifts 0, 0, -1");
  GradedLinearMap rhs = compose(differential_map(target), H) + compose(H, differential_map(source));
  return compare_maps(name, F - G, rhs, 0, up_to, &source);
}

Cohomology cohomology(const TruncatedDgVec& v, int n) {
  if (n < 0 || n > v.max_degree - 1)
    throw Error("dg", "H^" + std::to_string(n) + " needs d beyond the truncation N = " +
                          std::to_string(v.max_degree));
  Subspace ker = kernel_basis(v.differential(n));
  QMatrix im = v.differential(n - 1).transpose();
  RowReducer red(v.dim(n));
  for (std::size_t i = 0; i < im.rows(); ++i) red.insert(im.row(i));
  Cohomology h;
  for (std::size_t i = 0; i < ker.dim(); ++i)
    if (red.insert(ker.basis().row(i))) h.representatives.push_back(ker.vector(i));
  h.dim = h.representatives.size();
  return h;
}

IdentityCheck check_cochain_map(const TruncatedDgVec& a, const TruncatedDgVec& b,
                                const GradedLinearMap& m, int up_to) {
  IdentityCheck c{"commutes with d", true, 0, up_to, {}};
  for (int n = 0; n <= up_to; ++n) {
    if (b.differential(n) * m.at(n) != m.at(n + 1) * a.differential(n)) {
      c.holds = false;
      c.counterexample = "degree " + std::to_string(n);
      return c;
    }
  }
  return c;
}

QMatrix induced_on_cohomology(const TruncatedDgVec& a, const TruncatedDgVec& b,
                              const GradedLinearMap& m, int n) {
  Cohomology ha = cohomology(a, n), hb = cohomology(b, n);
  Subspace im = Subspace::row_space(b.differential(n - 1).transpose());
  std::vector<Vector> cols = hb.representatives;
  for (std::size_t i = 0; i < im.dim(); ++i) cols.push_back(im.vector(i));
  QMatrix basis = QMatrix::from_dense(cols, b.dim(n)).transpose();
  QMatrix out(hb.dim, ha.dim);
  QMatrix mn = m.at(n);
  for (std::size_t i = 0; i < ha.dim; ++i) {
    auto x = solve(basis, mn.apply(ha.representatives[i]));
    if (!x) throw Error("dg", "induced map: image of a cocycle is not a cocycle");
    for (std::size_t k = 0; k < hb.dim; ++k) out.set(k, i, (*x)[k]);
  }
  return out;
}

bool is_weak_equivalence(const TruncatedDgVec& a, const TruncatedDgVec& b,
                         const GradedLinearMap& m, int up_to) {
  if (!check_cochain_map(a, b, m, up_to).holds) throw Error("dg", "map is not a cochain map");
  for (int n = 0; n <= up_to; ++n)
    {
      QMatrix h = induced_on_cohomology(a, b, m, n);
      if (h.rows() != h.cols() || rank(h) != h.rows()) return false;
    }
  return true;
}

std::vector<IdentityCheck> check_structure(const TruncatedDga& A, const std::string& prefix) {
  const int N = A.max_degree();
  std::vector<IdentityCheck> out;
  const TruncatedDgVec& V = A.complex;

  IdentityCheck dd{prefix + "d^2 = 0", true, 0, N - 2, {}};
  for (int n = 0; n + 2 <= N && dd.holds; ++n)
    if (!(V.d[n + 1] * V.d[n]).is_zero()) {
      dd.holds = false;
      dd.counterexample = "degree " + std::to_string(n);
    }
  out.push_back(dd);

  Tables T = product_tables(A);
  std::vector<QMatrix> dT;
  for (int n = 0; n < N; ++n) dT.push_back(V.d[n].transpose());

  IdentityCheck leib{prefix + "graded Leibniz", true, 0, N - 1, {}};
  for (int i = 0; i <= N - 1 && leib.holds; ++i)
    for (int j = 0; i + j <= N - 1 && leib.holds; ++j)
      for (std::size_t p = 0; p < A.dim(i) && leib.holds; ++p)
        for (std::size_t q = 0; q < A.dim(j) && leib.holds; ++q) {
          SparseRow ab = T[i][j][p * A.dim(j) + q];
          SparseRow lhs;
          for (const auto& e : ab) axpy(lhs, e.value, dT[i + j].row(e.col));
          SparseRow rhs = right_mul(T, i + 1, dT[i].row(p), j, q, A.dim(j));
          axpy(rhs, sign(i), left_mul(T, i, p, j + 1, dT[j].row(q), A.dim(j + 1)));
          if (!same(lhs, rhs)) {
            leib.holds = false;
            leib.counterexample = "degrees (" + std::to_string(i) + ", " + std::to_string(j) +
                                  "), basis pair (" + V.label(i, p) + ", " + V.label(j, q) + ")";
          }
        }
  out.push_back(leib);

  IdentityCheck assoc{prefix + "associativity", true, 0, N, {}};
  for (int i = 0; i <= N && assoc.holds; ++i)
    for (int j = 0; i + j <= N && assoc.holds; ++j)
      for (int k = 0; i + j + k <= N && assoc.holds; ++k) {
        const std::size_t dj = A.dim(j), dk = A.dim(k), djk = A.dim(j + k);
        for (std::size_t p = 0; p < A.dim(i) && assoc.holds; ++p)
          for (std::size_t q = 0; q < dj && assoc.holds; ++q) {
            const SparseRow& ab = T[i][j][p * dj + q];
            for (std::size_t r = 0; r < dk; ++r) {
              const SparseRow& bc = T[j][k][q * dk + r];
              if (ab.empty() && bc.empty()) continue;
              SparseRow lhs = right_mul(T, i + j, ab, k, r, dk);
              SparseRow rhs = left_mul(T, i, p, j + k, bc, djk);
              if (!same(lhs, rhs)) {
                assoc.holds = false;
                assoc.counterexample = "degrees (" + std::to_string(i) + ", " +
                                       std::to_string(j) + ", " + std::to_string(k) +
                                       "), basis triple (" + V.label(i, p) + ", " +
                                       V.label(j, q) + ", " + V.label(k, r) + ")";
                break;
              }
            }
          }
      }
  out.push_back(assoc);

  IdentityCheck unit{prefix + "unit laws", true, 0, N, {}};
  SparseRow u = to_sparse(A.unit);
  for (int n = 0; n <= N && unit.holds; ++n)
    for (std::size_t p = 0; p < A.dim(n) && unit.holds; ++p) {
      SparseRow ep{{p, Rational(1)}};
      SparseRow left = right_mul(T, 0, u, n, p, A.dim(n));
      SparseRow right = left_mul(T, n, p, 0, u, A.dim(0));
      if (!same(left, ep) || !same(right, ep)) {
        unit.holds = false;
        unit.counterexample = "degree " + std::to_string(n) + ", basis vector " + V.label(n, p);
      }
    }
  out.push_back(unit);
  return out;
}

std::vector<IdentityCheck> check_dga_map(const TruncatedDga& a, const TruncatedDga& b,
                                         const GradedLinearMap& m, const std::string& prefix) {
  const int N = std::min(a.max_degree(), b.max_degree());
  std::vector<IdentityCheck> out;
  IdentityCheck chain = check_cochain_map(a.complex, b.complex, m, N - 1);
  chain.name = prefix + chain.name;
  out.push_back(chain);

  IdentityCheck mult{prefix + "multiplicative", true, 0, N, {}};
  std::vector<QMatrix> mt;
  for (int n = 0; n <= N; ++n) mt.push_back(m.at(n).transpose());
  Tables Tb = product_tables(b);
  for (int i = 0; i <= N && mult.holds; ++i)
    for (int j = 0; i + j <= N && mult.holds; ++j) {
      if (static_cast<std::size_t>(i + j) >= m.blocks.size()) continue;
      for (std::size_t p = 0; p < a.dim(i) && mult.holds; ++p)
        for (std::size_t q = 0; q < a.dim(j) && mult.holds; ++q) {
          SparseRow lhs;
          for (const auto& e : a.product(i, p, j, q)) axpy(lhs, e.value, mt[i + j].row(e.col));
          SparseRow rhs;
          for (const auto& x : mt[i].row(p))
            axpy(rhs, x.value, left_mul(Tb, i, x.col, j, mt[j].row(q), b.dim(j)));
          if (!same(lhs, rhs)) {
            mult.holds = false;
            mult.counterexample = "degrees (" + std::to_string(i) + ", " + std::to_string(j) +
                                  "), basis pair (" + a.complex.label(i, p) + ", " +
                                  a.complex.label(j, q) + ")";
          }
        }
    }
  out.push_back(mult);

  IdentityCheck unital{prefix + "unital", m.at(0).apply(a.unit) == b.unit, 0, 0, {}};
  if (!unital.holds) unital.counterexample = "unit is not preserved";
  out.push_back(unital);
  return out;
}

void validate_diagram(const DgDiagram& X) {
  const FinCategory& D = *X.shape;
  std::vector<std::string> issues;
  if (X.values.size() != D.num_objects() || X.arrows.size() != D.num_morphisms())
    throw Error("dg", "diagram does not cover its shape");
  const int N = X.values.empty() ? 0 : X.values[0].max_degree();
  for (const auto& v : X.values)
    if (v.max_degree() != N) issues.push_back("diagram values have different truncations");
  for (MorphismId f = 0; f < D.num_morphisms(); ++f) {
    const auto& s = X.values[D.source(f)].complex;
    const auto& t = X.values[D.target(f)].complex;
    if (X.arrows[f].shift != 0 || X.arrows[f].source_dims != s.dims ||
        X.arrows[f].target_dims != t.dims)
      issues.push_back("X(" + D.morphism_name(f) + ") has the wrong shape");
  }
  if (!issues.empty()) throw ValidationError("dg", issues);
  for (ObjectId x = 0; x < D.num_objects(); ++x)
    if (compare_maps("identity", X.arrows[D.identity(x)], identity_map(X.values[x].complex), 0, N)
            .holds == false)
      issues.push_back("X(" + D.morphism_name(D.identity(x)) + ") is not the identity");
  for (MorphismId g = 0; g < D.num_morphisms(); ++g)
    for (MorphismId f = 0; f < D.num_morphisms(); ++f)
      if (auto r = D.compose(g, f))
        if (!compare_maps("composition", X.arrows[*r], compose(X.arrows[g], X.arrows[f]), 0, N)
                 .holds)
          issues.push_back("X(" + D.morphism_name(*r) + ") != X(" + D.morphism_name(g) + ")X(" +
                           D.morphism_name(f) + ")");
  if (!issues.empty()) throw ValidationError("dg", issues);
}

namespace {

ObjectId anchor(const FinCategory& D, const NerveTuple& t) {
  return t.arrows.empty() ? t.object : D.target(t.arrows.front());
}

struct TupleIndex {
  std::vector<std::map<std::vector<MorphismId>, std::size_t>> index;

  explicit TupleIndex(const std::vector<std::vector<NerveTuple>>& tuples) {
    for (const auto& level : tuples) {
      index.emplace_back();
      for (std::size_t i = 0; i < level.size(); ++i) index.back()[level[i].arrows] = i;
    }
  }
  std::optional<std::size_t> find(const std::vector<MorphismId>& arrows) const {
    const auto& m = index[arrows.size()];
    auto it = m.find(arrows);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }
};

// Offsets of tuple blocks inside X^{n,m}.
std::vector<std::size_t> tuple_offsets(const DgDiagram& X, const std::vector<NerveTuple>& level,
                                       int m) {
  std::vector<std::size_t> off;
  std::size_t acc = 0;
  for (const auto& t : level) {
    off.push_back(acc);
    acc += X.values[anchor(*X.shape, t)].dim(m);
  }
  off.push_back(acc);
  return off;
}

}  // namespace

DoubleComplex double_complex(const DgDiagram& X, int N) {
  const FinCategory& D = *X.shape;
  for (const auto& v : X.values)
    if (v.max_degree() < N)
      throw Error("dg", "double_complex: diagram values are truncated below N = " +
                            std::to_string(N));
  DoubleComplex dc;
  dc.max_degree = N;
  for (int n = 0; n <= N; ++n) dc.tuples.push_back(nerve(D, n, true));
  TupleIndex idx(dc.tuples);
  dc.dims.assign(N + 1, {});
  for (int n = 0; n <= N; ++n)
    for (int m = 0; n + m <= N; ++m) dc.dims[n].push_back(tuple_offsets(X, dc.tuples[n], m).back());
  dc.dv.assign(N + 1, {});
  dc.dh.assign(N + 1, {});
  for (int n = 0; n <= N; ++n)
    for (int m = 0; n + m + 1 <= N; ++m) {
      auto in_off = tuple_offsets(X, dc.tuples[n], m);
      auto out_off = tuple_offsets(X, dc.tuples[n + 1], m);
      QMatrix dv(dc.dims[n + 1][m], dc.dims[n][m]);
      for (std::size_t o = 0; o < dc.tuples[n + 1].size(); ++o) {
        const auto& f = dc.tuples[n + 1][o].arrows;
        auto input = [&](const std::vector<MorphismId>& arrows, ObjectId obj) -> std::optional<std::size_t> {
          if (arrows.empty()) return obj;
          if (!is_normalized(D, arrows)) return std::nullopt;
          return idx.find(arrows);
        };
        // X(f1) pushforward of x(f2,…)
        {
          std::vector<MorphismId> rest(f.begin() + 1, f.end());
          if (auto i = input(rest, D.source(f[0])))
            dv.add_block(out_off[o], in_off[*i], X.arrows[f[0]].at(m));
        }
        for (int i = 1; i <= n; ++i) {
          std::vector<MorphismId> g(f.begin(), f.end());
          g[i - 1] = D.comp(f[i - 1], f[i]);
          g.erase(g.begin() + i);
          if (auto k = input(g, 0)) {
            std::size_t dimv = X.values[D.target(f[0])].dim(m);
            dv.add_block(out_off[o], in_off[*k], QMatrix::identity(dimv), sign(i));
          }
        }
        {
          std::vector<MorphismId> head(f.begin(), f.end() - 1);
          if (auto k = input(head, D.target(f[0]))) {
            std::size_t dimv = X.values[D.target(f[0])].dim(m);
            dv.add_block(out_off[o], in_off[*k], QMatrix::identity(dimv), sign(n + 1));
          }
        }
      }
      dc.dv[n].push_back(std::move(dv));
      auto h_out = tuple_offsets(X, dc.tuples[n], m + 1);
      QMatrix dh(dc.dims[n][m + 1], dc.dims[n][m]);
      for (std::size_t t = 0; t < dc.tuples[n].size(); ++t)
        dh.add_block(h_out[t], in_off[t],
                     X.values[anchor(D, dc.tuples[n][t])].complex.differential(m));
      dc.dh[n].push_back(std::move(dh));
    }
  return dc;
}

TruncatedDgVec total_complex(const DoubleComplex& D) {
  const int N = D.max_degree;
  TruncatedDgVec v;
  v.max_degree = N;
  std::vector<std::vector<std::size_t>> off(N + 1);
  for (int k = 0; k <= N; ++k) {
    std::size_t acc = 0;
    for (int n = 0; n <= k; ++n) {
      off[k].push_back(acc);
      acc += D.dims[n][k - n];
    }
    v.dims.push_back(acc);
  }
  for (int k = 0; k < N; ++k) {
    QMatrix d(v.dims[k + 1], v.dims[k]);
    for (int n = 0; n <= k; ++n) {
      int m = k - n;
      d.add_block(off[k + 1][n + 1], off[k][n], D.dv[n][m]);
      d.add_block(off[k + 1][n], off[k][n], D.dh[n][m], sign(n));
    }
    v.d.push_back(std::move(d));
  }
  return v;
}

TruncatedDga holim_dgalg(const DgDiagram& X, int N) {
  struct Basis {
    int n;
    std::size_t tuple;
    std::size_t coef;
  };
  struct Layout {
    DoubleComplex dc;
    std::vector<std::vector<Basis>> basis;                      // per total degree
    std::vector<std::vector<std::vector<std::size_t>>> offset;  // [k][n][tuple]
    std::unique_ptr<TupleIndex> idx;
  };
  auto L = std::make_shared<Layout>();
  L->dc = double_complex(X, N);
  L->idx = std::make_unique<TupleIndex>(L->dc.tuples);
  const FinCategory& D = *X.shape;
  TruncatedDga A;
  A.complex = total_complex(L->dc);
  L->basis.resize(N + 1);
  L->offset.resize(N + 1);
  A.complex.labels.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    std::size_t acc = 0;
    for (int n = 0; n <= k; ++n) {
      L->offset[k].emplace_back();
      for (std::size_t t = 0; t < L->dc.tuples[n].size(); ++t) {
        L->offset[k][n].push_back(acc);
        const auto& tup = L->dc.tuples[n][t];
        std::size_t dimv = X.values[anchor(D, tup)].dim(k - n);
        for (std::size_t a = 0; a < dimv; ++a) {
          L->basis[k].push_back({n, t, a});
          std::string lab = "(";
          if (tup.arrows.empty()) lab += D.object_name(tup.object);
          for (std::size_t i = 0; i < tup.arrows.size(); ++i)
            lab += (i ? "," : "") + D.morphism_name(tup.arrows[i]);
          A.complex.labels[k].push_back(lab + ")^" + std::to_string(k - n) + "[" +
                                        std::to_string(a) + "]");
        }
        acc += dimv;
      }
    }
  }
  auto Xp = std::make_shared<DgDiagram>(X);
  A.product = [L, Xp](int i, std::size_t p, int j, std::size_t q) -> SparseRow {
    const FinCategory& D = *Xp->shape;
    const Basis& x = L->basis[i][p];
    const Basis& y = L->basis[j][q];
    const NerveTuple& t = L->dc.tuples[x.n][x.tuple];
    const NerveTuple& u = L->dc.tuples[y.n][y.tuple];
    ObjectId t_source = t.arrows.empty() ? t.object : D.source(t.arrows.back());
    ObjectId u_target = anchor(D, u);
    if (t_source != u_target) return {};
    std::vector<MorphismId> cat(t.arrows);
    cat.insert(cat.end(), u.arrows.begin(), u.arrows.end());
    std::size_t tuple = cat.empty() ? t.object : *L->idx->find(cat);
    const int m = i - x.n, mp = j - y.n;
    ObjectId a = anchor(D, t);
    const TruncatedDga& Xa = Xp->values[a];
    SparseRow moved;
    if (t.arrows.empty()) {
      moved = {{y.coef, Rational(1)}};
    } else {
      QMatrix push = Xp->arrows[D.comp_all(t.arrows)].at(mp);
      for (std::size_t r = 0; r < push.rows(); ++r) {
        Rational v = push.at(r, y.coef);
        if (v != 0) moved.push_back({r, v});
      }
    }
    SparseRow prod;
    for (const auto& e : moved) axpy(prod, e.value, Xa.product(m, x.coef, mp, e.col));
    Rational s = sign(static_cast<long>(m) * y.n);
    std::size_t off = L->offset[i + j][x.n + y.n][tuple];
    SparseRow out;
    for (const auto& e : prod) out.push_back({off + e.col, s * e.value});
    return out;
  };
  A.unit = zero_vector(A.dim(0));
  for (std::size_t t = 0; t < L->dc.tuples[0].size(); ++t) {
    const Vector& u = X.values[L->dc.tuples[0][t].object].unit;
    for (std::size_t a = 0; a < u.size(); ++a) A.unit[L->offset[0][0][t] + a] = u[a];
  }
  return A;
}

LimDga lim_dgalg(const DgDiagram& X) {
  const FinCategory& D = *X.shape;
  const int N = X.values.empty() ? 0 : X.values[0].max_degree();
  auto offsets = [&](int k) {
    std::vector<std::size_t> off;
    std::size_t acc = 0;
    for (const auto& v : X.values) {
      off.push_back(acc);
      acc += v.dim(k);
    }
    off.push_back(acc);
    return off;
  };
  struct Data {
    std::vector<Subspace> sub;
    std::vector<std::vector<std::size_t>> off;
    std::vector<std::vector<Vector>> vecs;
  };
  auto data = std::make_shared<Data>();
  LimDga out;
  out.dga.complex.max_degree = N;
  for (int k = 0; k <= N; ++k) {
    auto off = offsets(k);
    std::size_t amb = off.back();
    QMatrix cons(0, amb);
    for (MorphismId f = 0; f < D.num_morphisms(); ++f) {
      QMatrix blk(X.values[D.target(f)].dim(k), amb);
      blk.add_block(0, off[D.source(f)], X.arrows[f].at(k));
      blk.add_block(0, off[D.target(f)], QMatrix::identity(X.values[D.target(f)].dim(k)), -1);
      cons = vstack(cons, blk);
    }
    Subspace s = kernel_basis(cons);
    data->off.push_back(off);
    data->vecs.emplace_back();
    for (std::size_t i = 0; i < s.dim(); ++i) data->vecs.back().push_back(s.vector(i));
    data->sub.push_back(s);
    out.dga.complex.dims.push_back(s.dim());
  }
  for (int k = 0; k < N; ++k) {
    QMatrix d(data->sub[k + 1].dim(), data->sub[k].dim());
    for (std::size_t i = 0; i < data->sub[k].dim(); ++i) {
      Vector img = zero_vector(data->off[k + 1].back());
      for (ObjectId x = 0; x < D.num_objects(); ++x) {
        Vector comp(data->vecs[k][i].begin() + data->off[k][x],
                    data->vecs[k][i].begin() + data->off[k][x + 1]);
        Vector dc = X.values[x].complex.d[k].apply(comp);
        for (std::size_t a = 0; a < dc.size(); ++a) img[data->off[k + 1][x] + a] = dc[a];
      }
      auto c = data->sub[k + 1].coordinates(img);
      if (!c) throw Error("dg", "lim_dgalg: differential leaves the equalizer");
      for (std::size_t r = 0; r < c->size(); ++r) d.set(r, i, (*c)[r]);
    }
    out.dga.complex.d.push_back(std::move(d));
  }
  auto Xp = std::make_shared<DgDiagram>(X);
  out.dga.product = [data, Xp](int i, std::size_t p, int j, std::size_t q) -> SparseRow {
    Vector amb = zero_vector(data->off[i + j].back());
    for (ObjectId x = 0; x < Xp->values.size(); ++x) {
      Vector a(data->vecs[i][p].begin() + data->off[i][x],
               data->vecs[i][p].begin() + data->off[i][x + 1]);
      Vector b(data->vecs[j][q].begin() + data->off[j][x],
               data->vecs[j][q].begin() + data->off[j][x + 1]);
      Vector ab = Xp->values[x].multiply(i, a, j, b);
      for (std::size_t k = 0; k < ab.size(); ++k) amb[data->off[i + j][x] + k] = ab[k];
    }
    auto c = data->sub[i + j].coordinates(amb);
    if (!c) throw Error("dg", "lim_dgalg: product leaves the equalizer");
    return to_sparse(*c);
  };
  Vector u;
  for (const auto& v : X.values) u.insert(u.end(), v.unit.begin(), v.unit.end());
  auto c = data->sub[0].coordinates(u);
  if (!c) throw Error("dg", "lim_dgalg: unit is not in the equalizer");
  out.dga.unit = *c;
  out.subspaces = data->sub;
  return out;
}

GradedLinearMap canonical_e(const DgDiagram& X, const LimDga& lim, int N) {
  TruncatedDga H = holim_dgalg(X, N);
  GradedLinearMap e{0, lim.dga.complex.dims, H.complex.dims, {}};
  e.source_dims.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    QMatrix blk(H.dim(k), lim.subspaces[k].dim());
    blk.add_block(0, 0, lim.subspaces[k].embedding());
    e.blocks.push_back(std::move(blk));
  }
  return e;
}

TensorIndex::TensorIndex(std::vector<std::size_t> a, std::vector<std::size_t> b, int N)
    : a_dims(std::move(a)), b_dims(std::move(b)), max_degree(N) {
  for (int k = 0; k <= N; ++k) {
    offsets.emplace_back();
    std::size_t acc = 0;
    for (int i = 0; i <= k; ++i) {
      offsets.back().push_back(acc);
      acc += a_dim(i) * b_dim(k - i);
    }
    dims.push_back(acc);
  }
}

std::size_t TensorIndex::a_dim(int i) const {
  return i < 0 || static_cast<std::size_t>(i) >= a_dims.size() ? 0 : a_dims[i];
}

std::size_t TensorIndex::b_dim(int j) const {
  return j < 0 || static_cast<std::size_t>(j) >= b_dims.size() ? 0 : b_dims[j];
}

std::size_t TensorIndex::index(int i, std::size_t p, int j, std::size_t q) const {
  return offsets[i + j][i] + p * b_dim(j) + q;
}

TruncatedDgVec graded_tensor(const TruncatedDgVec& a, const TruncatedDgVec& b, int N) {
  if (N > a.max_degree || N > b.max_degree)
    throw Error("dg", "graded_tensor: total degree " + std::to_string(N) +
                          " exceeds a factor's truncation");
  TensorIndex T(a.dims, b.dims, N);
  TruncatedDgVec v;
  v.max_degree = N;
  v.dims = T.dims;
  v.labels.resize(N + 1);
  for (int k = 0; k <= N; ++k)
    for (int i = 0; i <= k; ++i)
      for (std::size_t p = 0; p < a.dim(i); ++p)
        for (std::size_t q = 0; q < b.dim(k - i); ++q)
          v.labels[k].push_back(a.label(i, p) + "⊗" + b.label(k - i, q));
  for (int k = 0; k < N; ++k) {
    QMatrix d(T.dims[k + 1], T.dims[k]);
    for (int i = 0; i <= k; ++i) {
      int j = k - i;
      QMatrix da = a.differential(i).transpose();
      QMatrix db = b.differential(j).transpose();
      for (std::size_t p = 0; p < a.dim(i); ++p)
        for (std::size_t q = 0; q < b.dim(j); ++q) {
          std::size_t col = T.index(i, p, j, q);
          for (const auto& e : da.row(p)) d.add(T.index(i + 1, e.col, j, q), col, e.value);
          for (const auto& e : db.row(q)) d.add(T.index(i, p, j + 1, e.col), col, sign(i) * e.value);
        }
    }
    v.d.push_back(std::move(d));
  }
  return v;
}

TruncatedDga graded_tensor_dga(const TruncatedDga& a, const TruncatedDga& b, int N) {
  TruncatedDga t;
  t.complex = graded_tensor(a.complex, b.complex, N);
  auto T = std::make_shared<TensorIndex>(a.complex.dims, b.complex.dims, N);
  struct Key {
    int i;
    std::size_t p;
    int j;
    std::size_t q;
  };
  auto decode = std::make_shared<std::vector<std::vector<Key>>>(N + 1);
  for (int k = 0; k <= N; ++k)
    for (int i = 0; i <= k; ++i)
      for (std::size_t p = 0; p < a.dim(i); ++p)
        for (std::size_t q = 0; q < b.dim(k - i); ++q) (*decode)[k].push_back({i, p, k - i, q});
  auto A = std::make_shared<TruncatedDga>(a);
  auto B = std::make_shared<TruncatedDga>(b);
  t.product = [T, decode, A, B](int k, std::size_t x, int l, std::size_t y) -> SparseRow {
    const Key& u = (*decode)[k][x];
    const Key& w = (*decode)[l][y];
    SparseRow left = A->product(u.i, u.p, w.i, w.p);
    SparseRow right = B->product(u.j, u.q, w.j, w.q);
    Rational s = sign(static_cast<long>(u.j) * w.i);
    SparseRow out;
    for (const auto& e : left)
      for (const auto& f : right)
        out.push_back({T->index(u.i + w.i, e.col, u.j + w.j, f.col), s * e.value * f.value});
    std::sort(out.begin(), out.end(), [](const Entry& m, const Entry& n) { return m.col < n.col; });
    return out;
  };
  t.unit = zero_vector(t.dim(0));
  for (std::size_t p = 0; p < a.dim(0); ++p)
    for (std::size_t q = 0; q < b.dim(0); ++q) t.unit[T->index(0, p, 0, q)] = a.unit[p] * b.unit[q];
  return t;
}

GradedLinearMap tensor_maps(const GradedLinearMap& F, const GradedLinearMap& G, int N) {
  TensorIndex S(F.source_dims, G.source_dims, N);
  TensorIndex T(F.target_dims, G.target_dims, N);
  const int shift = F.shift + G.shift;
  GradedLinearMap m{shift, S.dims, T.dims, {}};
  for (int k = 0; k <= N; ++k) {
    QMatrix blk(m.target_dim(k + shift), S.dims[k]);
    if (k + shift >= 0 && k + shift <= N) {
      for (int i = 0; i <= k; ++i) {
        int j = k - i;
        int ti = i + F.shift, tj = j + G.shift;
        if (ti < 0 || tj < 0) continue;
        QMatrix Ft = F.at(i).transpose();
        QMatrix Gt = G.at(j).transpose();
        Rational s = sign(static_cast<long>(G.shift) * i);
        for (std::size_t p = 0; p < S.a_dim(i); ++p)
          for (std::size_t q = 0; q < S.b_dim(j); ++q) {
            std::size_t col = S.index(i, p, j, q);
            for (const auto& e : Ft.row(p))
              for (const auto& f : Gt.row(q))
                blk.add(T.index(ti, e.col, tj, f.col), col, s * e.value * f.value);
          }
      }
    }
    m.blocks.push_back(std::move(blk));
  }
  return m;
}

}  // namespace kanqft
