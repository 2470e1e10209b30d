#ifndef CCR_LAB_WIGHTMAN_HPP
#define CCR_LAB_WIGHTMAN_HPP

// Quasi-free (generalized free field) Wightman functionals generated from the
// two-point kernel by Wick pairing, and the induced inner product
// <u, v>_W = W(u* (x) v) on truncated tensor-algebra elements.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "ccr_lab/core.hpp"
#include "ccr_lab/tensor_algebra.hpp"
#include "ccr_lab/test_space.hpp"

namespace ccr {

/// (n-1)!!, the number of perfect matchings of n points.
inline std::uint64_t pairing_count(int n) {
  if (n < 0 || n % 2 != 0) throw std::invalid_argument("pairing_count: n must be even and non-negative");
  std::uint64_t r = 1;
  for (int k = n - 1; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
  return r;
}

/// A perfect matching stored as consecutive (earlier, later) position pairs.
using Matching = std::vector<std::uint8_t>;

/// Enumerates all perfect matchings of {0..n-1}: position 0 pairs with each
/// later position, the rest is matched recursively.
inline std::vector<Matching> perfect_matchings(int n) {
  if (n < 0 || n % 2 != 0) throw std::invalid_argument("perfect_matchings: n must be even and non-negative");
  std::vector<Matching> out;
  out.reserve(pairing_count(n));
  Matching current;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  auto rec = [&](auto&& self) -> void {
    int first = 0;
    while (first < n && used[static_cast<std::size_t>(first)]) ++first;
    if (first == n) {
      out.push_back(current);
      return;
    }
    used[static_cast<std::size_t>(first)] = true;
    for (int b = first + 1; b < n; ++b) {
      if (used[static_cast<std::size_t>(b)]) continue;
      used[static_cast<std::size_t>(b)] = true;
      current.push_back(static_cast<std::uint8_t>(first));
      current.push_back(static_cast<std::uint8_t>(b));
      self(self);
      current.resize(current.size() - 2);
      used[static_cast<std::size_t>(b)] = false;
    }
    used[static_cast<std::size_t>(first)] = false;
  };
  rec(rec);
  return out;
}

class WightmanFunctional {
 public:
  static constexpr int max_points = 16;
  /// Largest dense moment tensor kept in memory (entries).
  static constexpr std::size_t max_tensor_entries = std::size_t{1} << 22;

  explicit WightmanFunctional(TestSpace space)
      : space_(std::move(space)), cache_(std::make_shared<Cache>()) {}

  const TestSpace& space() const { return space_; }

  /// W_n(e_{i_1}, ..., e_{i_n}) as an explicit sum over perfect matchings,
  /// each pair contributing K[earlier][later].
  cplx n_point(std::span<const int> indices) const {
    const int n = static_cast<int>(indices.size());
    if (n > max_points) throw CapacityError("n_point: more than 16 points");
    for (int i : indices)
      if (i < 0 || i >= space_.dim()) throw std::out_of_range("n_point: index outside test-space basis");
    if (n % 2 != 0) return 0.0;
    if (n == 0) return 1.0;
    const Matrix& k = space_.two_point();
    cplx total = 0.0;
    for (const Matching& m : matchings(n)) {
      cplx term = 1.0;
      for (std::size_t p = 0; p < m.size(); p += 2) term *= k(indices[m[p]], indices[m[p + 1]]);
      total += term;
    }
    return total;
  }
  cplx n_point(std::initializer_list<int> indices) const {
    return n_point(std::span<const int>(indices.begin(), indices.size()));
  }

  /// Dense tensor of W_n over all basis multi-indices (d^n entries), built by
  /// expanding over the partner of the first slot.
  const std::vector<cplx>& moment_tensor(int n) const {
    if (n < 0 || n > max_points) throw CapacityError("moment_tensor: n outside 0..16");
    const std::size_t d = static_cast<std::size_t>(space_.dim());
    if (ipow(d, n) > max_tensor_entries) throw CapacityError("moment_tensor: tensor exceeds memory cap");
    {
      std::lock_guard lock(cache_->mutex);
      if (auto it = cache_->moments.find(n); it != cache_->moments.end()) return it->second;
    }
    std::vector<cplx> w(ipow(d, n), cplx{});
    if (n == 0) {
      w[0] = 1.0;
    } else if (n % 2 == 0) {
      const std::vector<cplx>& lower = moment_tensor(n - 2);
      const Matrix& k = space_.two_point();
      std::vector<std::size_t> digits(static_cast<std::size_t>(n));
      for (std::size_t f = 0; f < w.size(); ++f) {
        std::size_t x = f;
        for (int s = n - 1; s >= 0; --s) {
          digits[static_cast<std::size_t>(s)] = x % d;
          x /= d;
        }
        cplx acc = 0.0;
        for (int b = 1; b < n; ++b) {
          const cplx kv = k(static_cast<Eigen::Index>(digits[0]), static_cast<Eigen::Index>(digits[static_cast<std::size_t>(b)]));
          if (kv == cplx{}) continue;
          std::size_t sub = 0;
          for (int s = 1; s < n; ++s)
            if (s != b) sub = sub * d + digits[static_cast<std::size_t>(s)];
          acc += kv * lower[sub];
        }
        w[f] = acc;
      }
    }
    std::lock_guard lock(cache_->mutex);
    return cache_->moments.emplace(n, std::move(w)).first->second;
  }

  /// Matrix with entries W_{j+k}(star(e_a) (x) e_b), rows over degree-j and
  /// columns over degree-k multi-indices.
  Matrix pairing_block(int j, int k) const {
    if ((j + k) % 2 != 0) return Matrix::Zero(static_cast<Eigen::Index>(ipow(space_.dim(), j)),
                                              static_cast<Eigen::Index>(ipow(space_.dim(), k)));
    std::vector<cplx> data = moment_tensor(j + k);
    return starred_rows(std::move(data), j, k);
  }

  /// Matrix with entries W_{j+1+k}(star(e_a) (x) h (x) e_b).
  Matrix field_block(int j, int k, const TestVector& h) const {
    space_.check(h);
    const auto rows = static_cast<Eigen::Index>(ipow(space_.dim(), j));
    const auto cols = static_cast<Eigen::Index>(ipow(space_.dim(), k));
    if ((j + k + 1) % 2 != 0) return Matrix::Zero(rows, cols);
    const std::vector<cplx>& w = moment_tensor(j + k + 1);
    const std::size_t d = static_cast<std::size_t>(space_.dim());
    const std::size_t tail = ipow(d, k);
    std::vector<cplx> data(static_cast<std::size_t>(rows) * tail, cplx{});
    for (std::size_t x = 0; x < static_cast<std::size_t>(rows); ++x)
      for (std::size_t z = 0; z < d; ++z) {
        const cplx hz = h[static_cast<int>(z)];
        if (hz == cplx{}) continue;
        const std::size_t base = (x * d + z) * tail;
        for (std::size_t y = 0; y < tail; ++y) data[x * tail + y] += hz * w[base + y];
      }
    return starred_rows(std::move(data), j, k);
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::map<int, std::vector<Matching>> matchings;
    std::map<int, std::vector<cplx>> moments;
  };

  const std::vector<Matching>& matchings(int n) const {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->matchings.find(n);
    if (it == cache_->matchings.end()) it = cache_->matchings.emplace(n, perfect_matchings(n)).first;
    return it->second;
  }

  // Applies star to the first j slots of a (j + k)-slot tensor and reshapes.
  Matrix starred_rows(std::vector<cplx> data, int j, int k) const {
    const int d = space_.dim();
    const int n = j + k;
    if (!space_.componentwise()) {
      const Matrix at = space_.involution().transpose();
      for (int s = 0; s < j; ++s) detail::apply_slot(data, d, n, s, at);
    }
    const auto table = detail::reverse_prefix_table(d, n, j);
    const auto rows = static_cast<Eigen::Index>(ipow(d, j));
    const auto cols = static_cast<Eigen::Index>(ipow(d, k));
    Matrix out(rows, cols);
    for (std::size_t f = 0; f < data.size(); ++f) {
      const std::size_t t = table[f];
      out(static_cast<Eigen::Index>(t / static_cast<std::size_t>(cols)),
          static_cast<Eigen::Index>(t % static_cast<std::size_t>(cols))) = data[f];
    }
    return out;
  }

  TestSpace space_;
  std::shared_ptr<Cache> cache_;
};

/// <u, v>_W = sum_{j,k} W_{j+k}(star(u)_j (x) v_k).
inline cplx inner_w(const WightmanFunctional& fn, const TensorPoly& u, const TensorPoly& v) {
  if (!(u.space() == fn.space()) || !(v.space() == fn.space()))
    throw DimensionError("inner_w: space mismatch");
  const TensorPoly s = star(u);
  cplx total = 0.0;
  for (int j = 0; j <= s.max_degree(); ++j) {
    if (s.level_is_zero(j)) continue;
    for (int k = 0; k <= v.max_degree(); ++k) {
      if ((j + k) % 2 != 0 || v.level_is_zero(k)) continue;
      const std::vector<cplx>& w = fn.moment_tensor(j + k);
      const auto sj = s.level(j);
      const auto vk = v.level(k);
      for (std::size_t x = 0; x < sj.size(); ++x) {
        if (sj[x] == cplx{}) continue;
        cplx row = 0.0;
        for (std::size_t y = 0; y < vk.size(); ++y) row += w[x * vk.size() + y] * vk[y];
        total += sj[x] * row;
      }
    }
  }
  return total;
}

struct GramMatrix {
  int degree = 0;
  std::vector<MultiIndex> basis;
  Matrix g;
};

inline constexpr std::size_t default_monomial_cap = 4096;

inline void check_monomial_capacity(int dim, int max_degree, std::size_t cap) {
  if (max_degree < 0) throw std::invalid_argument("negative truncation degree");
  if (monomial_count(dim, max_degree) > cap)
    throw CapacityError("monomial count " + std::to_string(monomial_count(dim, max_degree)) +
                        " exceeds cap " + std::to_string(cap));
}

/// First position of each degree in the graded monomial basis.
inline std::vector<Eigen::Index> degree_offsets(int dim, int max_degree) {
  std::vector<Eigen::Index> off(static_cast<std::size_t>(max_degree) + 2, 0);
  for (int n = 0; n <= max_degree; ++n)
    off[static_cast<std::size_t>(n) + 1] = off[static_cast<std::size_t>(n)] + static_cast<Eigen::Index>(ipow(dim, n));
  return off;
}

/// Gram matrix of the monomial basis through degree N.
inline GramMatrix gram(const WightmanFunctional& fn, int max_degree, std::size_t cap = default_monomial_cap) {
  const int d = fn.space().dim();
  check_monomial_capacity(d, max_degree, cap);
  GramMatrix out;
  out.degree = max_degree;
  out.basis = monomial_basis(d, max_degree);
  const auto off = degree_offsets(d, max_degree);
  const auto m = off.back();
  out.g = Matrix::Zero(m, m);
  for (int j = 0; j <= max_degree; ++j)
    for (int k = j % 2; k <= max_degree; k += 2)
      out.g.block(off[static_cast<std::size_t>(j)], off[static_cast<std::size_t>(k)],
                  static_cast<Eigen::Index>(ipow(d, j)), static_cast<Eigen::Index>(ipow(d, k))) = fn.pairing_block(j, k);
  return out;
}

}  // namespace ccr

#endif  // CCR_LAB_WIGHTMAN_HPP
