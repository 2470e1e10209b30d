#ifndef CCR_LAB_TENSOR_ALGEBRA_HPP
#define CCR_LAB_TENSOR_ALGEBRA_HPP

// Degree-truncated tensor algebra over a TestSpace. Level n of a TensorPoly is
// a dense coefficient tensor with d^n entries, flattened with the leftmost slot
// most significant.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "ccr_lab/core.hpp"
#include "ccr_lab/test_space.hpp"

namespace ccr {

inline std::size_t monomial_count(int dim, int max_degree) {
  std::size_t total = 0;
  for (int n = 0; n <= max_degree; ++n) total += ipow(static_cast<std::size_t>(dim), n);
  return total;
}

/// All multi-indices of length 0..max_degree, graded by length and
/// lexicographic within each length.
inline std::vector<MultiIndex> monomial_basis(int dim, int max_degree) {
  if (max_degree < 0) throw std::invalid_argument("monomial_basis: negative degree");
  if (dim <= 0) throw DimensionError("monomial_basis: dimension must be positive");
  std::vector<MultiIndex> out;
  out.reserve(monomial_count(dim, max_degree));
  out.emplace_back();
  for (int n = 1; n <= max_degree; ++n) {
    MultiIndex idx(static_cast<std::size_t>(n), 0);
    const std::size_t total = ipow(static_cast<std::size_t>(dim), n);
    for (std::size_t k = 0; k < total; ++k) {
      out.push_back(idx);
      for (int s = n - 1; s >= 0; --s) {
        if (++idx[static_cast<std::size_t>(s)] < dim) break;
        idx[static_cast<std::size_t>(s)] = 0;
      }
    }
  }
  return out;
}

inline std::size_t flat_index(std::span<const int> idx, int dim) {
  std::size_t f = 0;
  for (int i : idx) f = f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
  return f;
}

namespace detail {

// new[.., a, ..] = sum_x m(a, x) old[.., x, ..] on slot `slot` of an n-slot tensor.
inline void apply_slot(std::vector<cplx>& data, int dim, int n, int slot, const Matrix& m) {
  const std::size_t d = static_cast<std::size_t>(dim);
  const std::size_t stride = ipow(d, n - 1 - slot);
  const std::size_t block = stride * d;
  std::vector<cplx> tmp(d);
  for (std::size_t base = 0; base < data.size(); base += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      for (std::size_t a = 0; a < d; ++a) {
        cplx acc = 0.0;
        for (std::size_t x = 0; x < d; ++x) acc += m(a, x) * data[base + x * stride + inner];
        tmp[a] = acc;
      }
      for (std::size_t a = 0; a < d; ++a) data[base + a * stride + inner] = tmp[a];
    }
  }
}

// Permutation table: position of each flat index after reversing its first
// `count` slots (of n).
inline std::vector<std::size_t> reverse_prefix_table(int dim, int n, int count) {
  const std::size_t d = static_cast<std::size_t>(dim);
  const std::size_t total = ipow(d, n);
  const std::size_t tail = ipow(d, n - count);
  const std::size_t head = ipow(d, count);
  std::vector<std::size_t> rev_head(head);
  for (std::size_t h = 0; h < head; ++h) {
    std::size_t x = h, r = 0;
    for (int s = 0; s < count; ++s) {
      r = r * d + x % d;
      x /= d;
    }
    rev_head[h] = r;
  }
  std::vector<std::size_t> table(total);
  for (std::size_t f = 0; f < total; ++f) table[f] = rev_head[f / tail] * tail + f % tail;
  return table;
}

}  // namespace detail

class TensorPoly {
 public:
  TensorPoly(TestSpace space, int max_degree) : space_(std::move(space)), max_degree_(max_degree) {
    if (max_degree < 0) throw std::invalid_argument("TensorPoly: negative truncation degree");
    levels_.resize(static_cast<std::size_t>(max_degree) + 1);
    for (int n = 0; n <= max_degree; ++n)
      levels_[static_cast<std::size_t>(n)].assign(ipow(static_cast<std::size_t>(dim()), n), cplx{});
  }

  static TensorPoly scalar(const TestSpace& space, int max_degree, cplx value) {
    TensorPoly p(space, max_degree);
    p.levels_[0][0] = value;
    return p;
  }
  /// h placed at level 1.
  static TensorPoly vector(const TestSpace& space, int max_degree, const TestVector& h) {
    space.check(h);
    TensorPoly p(space, max_degree);
    if (max_degree >= 1)
      for (int i = 0; i < h.dim(); ++i) p.levels_[1][static_cast<std::size_t>(i)] = h[i];
    return p;
  }
  static TensorPoly monomial(const TestSpace& space, int max_degree, std::span<const int> idx,
                             cplx coeff = 1.0) {
    TensorPoly p(space, max_degree);
    p.at(idx) = coeff;
    return p;
  }

  const TestSpace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  int max_degree() const { return max_degree_; }

  std::span<const cplx> level(int n) const { return levels_.at(static_cast<std::size_t>(n)); }
  std::span<cplx> level(int n) { return levels_.at(static_cast<std::size_t>(n)); }

  cplx& at(std::span<const int> idx) {
    check_index(idx);
    return levels_[idx.size()][flat_index(idx, dim())];
  }
  cplx at(std::span<const int> idx) const {
    check_index(idx);
    return levels_[idx.size()][flat_index(idx, dim())];
  }
  cplx& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }
  cplx at(std::initializer_list<int> idx) const { return at(std::span<const int>(idx.begin(), idx.size())); }

  bool level_is_zero(int n) const {
    const auto& l = levels_.at(static_cast<std::size_t>(n));
    return std::all_of(l.begin(), l.end(), [](cplx c) { return c == cplx{}; });
  }

  /// Number of nonzero contributions dropped by truncation while producing
  /// this value.
  std::size_t spillover() const { return spillover_; }
  void add_spillover(std::size_t n) { spillover_ += n; }

  TensorPoly truncated(int max_degree) const {
    TensorPoly out(space_, max_degree);
    for (int n = 0; n <= std::min(max_degree, max_degree_); ++n) out.levels_[static_cast<std::size_t>(n)] = levels_[static_cast<std::size_t>(n)];
    for (int n = max_degree + 1; n <= max_degree_; ++n)
      if (!level_is_zero(n)) ++out.spillover_;
    return out;
  }

  TensorPoly& operator+=(const TensorPoly& o) { return axpy(1.0, o); }
  TensorPoly& operator-=(const TensorPoly& o) { return axpy(-1.0, o); }
  TensorPoly& operator*=(cplx s) {
    for (auto& l : levels_)
      for (auto& c : l) c *= s;
    return *this;
  }
  friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) { return a += b; }
  friend TensorPoly operator-(TensorPoly a, const TensorPoly& b) { return a -= b; }
  friend TensorPoly operator*(cplx s, TensorPoly a) { return a *= s; }

  /// Largest coefficient difference over the common levels; levels present in
  /// only one operand are compared against zero.
  friend double max_abs_diff(const TensorPoly& a, const TensorPoly& b) {
    if (!(a.space_ == b.space_)) throw DimensionError("TensorPoly: space mismatch");
    double m = 0.0;
    const int top = std::max(a.max_degree_, b.max_degree_);
    for (int n = 0; n <= top; ++n) {
      const std::size_t size = ipow(static_cast<std::size_t>(a.dim()), n);
      for (std::size_t k = 0; k < size; ++k) {
        const cplx x = n <= a.max_degree_ ? a.levels_[static_cast<std::size_t>(n)][k] : cplx{};
        const cplx y = n <= b.max_degree_ ? b.levels_[static_cast<std::size_t>(n)][k] : cplx{};
        m = std::max(m, std::abs(x - y));
      }
    }
    return m;
  }

 private:
  TensorPoly& axpy(cplx s, const TensorPoly& o) {
    if (!(space_ == o.space_)) throw DimensionError("TensorPoly: space mismatch");
    if (o.max_degree_ > max_degree_) {
      for (int n = max_degree_ + 1; n <= o.max_degree_; ++n)
        levels_.emplace_back(ipow(static_cast<std::size_t>(dim()), n), cplx{});
      max_degree_ = o.max_degree_;
    }
    for (int n = 0; n <= o.max_degree_; ++n) {
      auto& dst = levels_[static_cast<std::size_t>(n)];
      const auto& src = o.levels_[static_cast<std::size_t>(n)];
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += s * src[k];
    }
    spillover_ += o.spillover_;
    return *this;
  }

  void check_index(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) > max_degree_)
      throw std::out_of_range("TensorPoly: multi-index longer than truncation degree");
    for (int i : idx)
      if (i < 0 || i >= dim()) throw std::out_of_range("TensorPoly: index outside test-space basis");
  }

  TestSpace space_;
  int max_degree_;
  std::vector<std::vector<cplx>> levels_;
  std::size_t spillover_ = 0;
};

/// Truncated product: level n is sum_k u_k (x) v_{n-k}, for n <= max_degree.
inline TensorPoly tensor_mul(const TensorPoly& u, const TensorPoly& v, int max_degree) {
  if (!(u.space() == v.space())) throw DimensionError("tensor_mul: space mismatch");
  TensorPoly w(u.space(), max_degree);
  const std::size_t d = static_cast<std::size_t>(u.dim());
  std::size_t dropped = 0;
  for (int k = 0; k <= u.max_degree(); ++k) {
    if (u.level_is_zero(k)) continue;
    const auto uk = u.level(k);
    for (int l = 0; l <= v.max_degree(); ++l) {
      if (v.level_is_zero(l)) continue;
      if (k + l > max_degree) {
        ++dropped;
        continue;
      }
      const auto vl = v.level(l);
      auto wn = w.level(k + l);
      const std::size_t vsize = ipow(d, l);
      for (std::size_t i = 0; i < uk.size(); ++i) {
        if (uk[i] == cplx{}) continue;
        for (std::size_t j = 0; j < vsize; ++j) wn[i * vsize + j] += uk[i] * vl[j];
      }
    }
  }
  w.add_spillover(dropped);
  return w;
}

inline TensorPoly tensor_mul(const TensorPoly& u, const TensorPoly& v) {
  return tensor_mul(u, v, std::min(u.max_degree(), v.max_degree()));
}

/// Conjugation: reverse the slots, conjugate coefficients, apply J's matrix
/// on every slot. An anti-homomorphism for tensor_mul.
inline TensorPoly star(const TensorPoly& u) {
  TensorPoly out(u.space(), u.max_degree());
  const int d = u.dim();
  for (int n = 0; n <= u.max_degree(); ++n) {
    const auto src = u.level(n);
    const auto table = detail::reverse_prefix_table(d, n, n);
    std::vector<cplx> data(src.size());
    for (std::size_t f = 0; f < src.size(); ++f) data[table[f]] = std::conj(src[f]);
    if (!u.space().componentwise())
      for (int s = 0; s < n; ++s) detail::apply_slot(data, d, n, s, u.space().involution());
    std::copy(data.begin(), data.end(), out.level(n).begin());
  }
  return out;
}

/// h (x) u, truncated at u's degree. A nonzero top level of u is dropped and
/// counted in spillover().
inline TensorPoly field_action(const TestVector& h, const TensorPoly& u) {
  u.space().check(h);
  const int top = u.max_degree();
  TensorPoly out(u.space(), top);
  const std::size_t d = static_cast<std::size_t>(u.dim());
  for (int n = 1; n <= top; ++n) {
    const auto src = u.level(n - 1);
    auto dst = out.level(n);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < src.size(); ++j) dst[i * src.size() + j] = h[static_cast<int>(i)] * src[j];
  }
  if (!u.level_is_zero(top)) out.add_spillover(1);
  return out;
}

/// Coefficients a_0..a_M of sum_k a_k x^k.
class FormalSeries {
 public:
  explicit FormalSeries(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("FormalSeries: at least one coefficient required");
  }

  static FormalSeries exp(int order) {
    std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      c[static_cast<std::size_t>(k)] = 1.0 / fact;
    }
    return FormalSeries(std::move(c));
  }
  /// log(1 + x) = sum_{k>=1} (-1)^{k+1} x^k / k
  static FormalSeries log1p(int order) {
    std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
    for (int k = 1; k <= order; ++k) c[static_cast<std::size_t>(k)] = (k % 2 == 1 ? 1.0 : -1.0) / k;
    return FormalSeries(std::move(c));
  }
  static FormalSeries identity() { return FormalSeries({0.0, 1.0}); }

  const std::vector<cplx>& coeffs() const { return coeffs_; }
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }

 private:
  std::vector<cplx> coeffs_;
};

/// sum_k a_k u^{(x)k} truncated at max_degree. With zero scalar part the sum
/// terminates at k = max_degree; otherwise the series must be a polynomial of
/// order <= max_degree.
inline TensorPoly apply_series(const FormalSeries& f, const TensorPoly& u, int max_degree) {
  const bool nilpotent = u.level_is_zero(0);
  if (!nilpotent && f.order() > max_degree)
    throw DomainError("apply_series: nonzero scalar part requires a polynomial of order <= truncation degree");
  const int top = nilpotent ? std::min(f.order(), max_degree) : f.order();
  const TensorPoly base = u.truncated(max_degree);
  // Horner: a_top, then acc (x) u + a_k.
  TensorPoly acc = TensorPoly::scalar(u.space(), max_degree, f.coeffs()[static_cast<std::size_t>(top)]);
  for (int k = top - 1; k >= 0; --k) {
    acc = tensor_mul(acc, base, max_degree);
    acc.level(0)[0] += f.coeffs()[static_cast<std::size_t>(k)];
  }
  return acc;
}

/// sum_{k=0..N} t^k h^{(x)k} / k!
inline TensorPoly exp_field(const TestSpace& space, const TestVector& h, cplx t, int max_degree) {
  space.check(h);
  TensorPoly out(space, max_degree);
  out.level(0)[0] = 1.0;
  std::vector<cplx> prev{1.0};
  const std::size_t d = static_cast<std::size_t>(space.dim());
  for (int n = 1; n <= max_degree; ++n) {
    std::vector<cplx> cur(prev.size() * d);
    const cplx scale = t / static_cast<double>(n);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < prev.size(); ++j) cur[i * prev.size() + j] = scale * h[static_cast<int>(i)] * prev[j];
    std::copy(cur.begin(), cur.end(), out.level(n).begin());
    prev = std::move(cur);
  }
  return out;
}

/// exp of an element with zero scalar part, truncated at its degree.
inline TensorPoly exp_poly(const TensorPoly& w) {
  return apply_series(FormalSeries::exp(w.max_degree()), w, w.max_degree());
}

/// log(1 + x) applied to an element with unit scalar part.
inline TensorPoly log_poly(const TensorPoly& p) {
  TensorPoly x = p;
  x.level(0)[0] -= 1.0;
  if (std::abs(x.level(0)[0]) > 1e-12) throw DomainError("log_poly: scalar part must equal 1");
  x.level(0)[0] = 0.0;
  return apply_series(FormalSeries::log1p(p.max_degree()), x, p.max_degree());
}

/// w = log(e^{t f} (x) e^{t g}), the Baker-Campbell-Hausdorff element,
/// exact at truncation degree max_degree.
inline TensorPoly bch_log(const TestSpace& space, const TestVector& f, const TestVector& g, cplx t,
                          int max_degree) {
  const TensorPoly product =
      tensor_mul(exp_field(space, f, t, max_degree), exp_field(space, g, t, max_degree), max_degree);
  return log_poly(product);
}

}  // namespace ccr

#endif  // CCR_LAB_TENSOR_ALGEBRA_HPP
