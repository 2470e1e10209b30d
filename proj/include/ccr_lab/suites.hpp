#ifndef CCR_LAB_SUITES_HPP
#define CCR_LAB_SUITES_HPP

// Verification suites run by the ccr-lab front-end, and their reports.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccr_lab/config.hpp"
#include "ccr_lab/fock.hpp"
#include "ccr_lab/gns.hpp"
#include "ccr_lab/tensor_algebra.hpp"
#include "ccr_lab/test_space.hpp"
#include "ccr_lab/wightman.hpp"

namespace ccr {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CheckRecord {
  std::string name;
  std::string config_hash;
  double defect = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double wall_seconds = 0.0;
  std::string detail;
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Report {
 public:
  void add(CheckRecord r) { records_.push_back(std::move(r)); }
  const std::vector<CheckRecord>& records() const { return records_; }
  bool ok() const {
    return std::all_of(records_.begin(), records_.end(), [](const CheckRecord& r) { return r.pass; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [](const CheckRecord& r) { return !r.pass; }));
  }
  void append(const Report& other) { records_.insert(records_.end(), other.records_.begin(), other.records_.end()); }

  /// One JSON object per check plus a summary line. Wall times are left out
  /// so that equal (config, seed) runs produce identical bytes.
  std::string jsonl() const {
    std::ostringstream out;
    for (const CheckRecord& r : records_) {
      out << "{\"check\":" << nlohmann::json(r.name).dump() << ",\"config_hash\":" << nlohmann::json(r.config_hash).dump()
          << ",\"defect\":" << format_number(r.defect) << ",\"threshold\":" << format_number(r.threshold)
          << ",\"pass\":" << (r.pass ? "true" : "false");
      if (!r.detail.empty()) out << ",\"detail\":" << nlohmann::json(r.detail).dump();
      out << "}\n";
    }
    out << "{\"summary\":{\"checks\":" << records_.size() << ",\"failed\":" << failures()
        << ",\"status\":" << (ok() ? "\"pass\"" : "\"fail\"") << "}}\n";
    return out.str();
  }

  std::string table() const {
    std::ostringstream out;
    char line[512];
    std::snprintf(line, sizeof line, "%-44s %12s %12s %6s %9s  %s\n", "check", "defect", "threshold", "result", "time[s]", "detail");
    out << line;
    for (const CheckRecord& r : records_) {
      std::snprintf(line, sizeof line, "%-44s %12.4e %12.4e %6s %9.3f  %s\n", r.name.c_str(), r.defect, r.threshold,
                    r.pass ? "PASS" : "FAIL", r.wall_seconds, r.detail.c_str());
      out << line;
    }
    out << records_.size() << " checks, " << failures() << " failed\n";
    return out.str();
  }

 private:
  std::vector<CheckRecord> records_;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"validate", "gram", "bch", "ccr", "weyl", "radical", "fock-compare", "all"};
  return names;
}

namespace detail {

class SuiteRun {
 public:
  explicit SuiteRun(const RunConfig& cfg) : cfg_(cfg), hash_(cfg.hash()), space_(cfg.space()), rng_(cfg.seed) {}

  const RunConfig& cfg() const { return cfg_; }
  const TestSpace& space() const { return space_; }
  Report& report() { return report_; }

  /// Times `measure`, which returns the defect, and records it against
  /// `threshold` (defect <= threshold passes).
  void check(const std::string& name, double threshold, const std::function<double()>& measure,
             const std::string& detail = {}) {
    const auto start = std::chrono::steady_clock::now();
    const double defect = measure();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report_.add({name, hash_, defect, threshold, defect <= threshold, seconds, detail});
  }
  void record(CheckRecord r) {
    r.config_hash = hash_;
    report_.add(std::move(r));
  }

  TestVector random_hermitian() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TestVector out = TestVector::zero(space_.dim());
    for (const TestVector& b : hermitian_basis(space_)) out = out + u(rng_) * b;
    return out;
  }
  TestVector random_vector() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(space_.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(u(rng_), u(rng_));
    return TestVector(v);
  }

 private:
  const RunConfig& cfg_;
  std::string hash_;
  TestSpace space_;
  std::mt19937_64 rng_;
  Report report_;
};

inline std::string tag(const std::string& base, int degree) { return base + "[N=" + std::to_string(degree) + "]"; }

inline void require_ccr_truncation(const RunConfig& cfg) {
  if (cfg.truncation < 2) throw UsageError("truncation must be at least 2 for CCR suites");
}

inline void suite_validate(SuiteRun& run) {
  const ValidationReport v = validate(run.space(), run.cfg().tolerance);
  for (const CheckResult& c : v.checks) run.record({"validate." + c.name, {}, c.defect, c.threshold, c.pass, 0.0, {}});
}

inline void suite_gram(SuiteRun& run) {
  const WightmanFunctional fn(run.space());
  for (int n = 0; n <= run.cfg().truncation; ++n) {
    const GramMatrix g = gram(fn, n);
    const double scale = std::max(1.0, max_abs(g.g));
    run.check(tag("gram.hermitian", n), 1e-12, [&] { return max_abs(g.g - g.g.adjoint()) / scale; });
    run.check(tag("gram.positivity", n), run.cfg().tolerance, [&] {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g.g + g.g.adjoint()), Eigen::EigenvaluesOnly);
      return std::max(0.0, -es.eigenvalues().minCoeff()) / es.eigenvalues().maxCoeff();
    });
  }
}

inline void suite_bch(SuiteRun& run) {
  constexpr int degree = 6;
  const TestSpace& space = run.space();
  for (int trial = 0; trial < 3; ++trial) {
    const TestVector f = run.random_hermitian();
    const TestVector g = run.random_hermitian();
    const TensorPoly w = bch_log(space, f, g, 1.0, degree);
    const std::string suffix = "#" + std::to_string(trial);
    run.check("bch.closure" + suffix, 1e-10, [&] {
      const TensorPoly product = tensor_mul(exp_field(space, f, 1.0, degree), exp_field(space, g, 1.0, degree), degree);
      return max_abs_diff(product, exp_poly(w));
    });
    run.check("bch.scalar_and_linear" + suffix, 1e-12, [&] {
      return max_abs_diff(w.truncated(1), TensorPoly::vector(space, 1, f + g));
    });
    run.check("bch.commutator_term" + suffix, 1e-12, [&] {
      const TensorPoly fv = TensorPoly::vector(space, 2, f);
      const TensorPoly gv = TensorPoly::vector(space, 2, g);
      TensorPoly expected = cplx(0.5) * (tensor_mul(fv, gv) - tensor_mul(gv, fv));
      TensorPoly level2(space, 2);
      std::copy(w.level(2).begin(), w.level(2).end(), level2.level(2).begin());
      return max_abs_diff(level2, expected);
    });
  }
}

inline void suite_ccr(SuiteRun& run) {
  require_ccr_truncation(run.cfg());
  const int n = run.cfg().truncation;
  const GnsSpace g = build_gns(WightmanFunctional(run.space()), n, run.cfg().tolerance);
  const auto basis = hermitian_basis(run.space());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j)
      run.check(tag("ccr.defect(b" + std::to_string(i) + ",b" + std::to_string(j) + ")", n), 1e-10,
                [&] { return commutator_defect(g, basis[i], basis[j]); },
                "sigma=" + format_number(sigma(run.space(), basis[i], basis[j])));
}

inline void suite_weyl(SuiteRun& run) {
  require_ccr_truncation(run.cfg());
  const RunConfig& cfg = run.cfg();
  const int n = cfg.truncation;
  const WightmanFunctional fn(run.space());
  const GnsSpace g = build_gns(fn, n, cfg.tolerance);
  const auto basis = hermitian_basis(run.space());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::string b = "(b" + std::to_string(i) + ")";
    const Matrix field = represent_field(g, basis[i]).matrix;
    run.check(tag("weyl.field_hermitian" + b, n), 1e-12, [&] { return max_abs(field - field.adjoint()); });
    run.check(tag("weyl.unitarity" + b, n), 1e-10, [&] {
      const Matrix u = weyl_operator(g, basis[i], 0.7).matrix;
      return max_abs(u.adjoint() * u - Matrix::Identity(g.rank(), g.rank()));
    });
    run.check(tag("weyl.group_law" + b, n), 1e-10, [&] {
      return op_norm(weyl_operator(g, basis[i], 0.3).matrix * weyl_operator(g, basis[i], 0.45).matrix -
                     weyl_operator(g, basis[i], 0.75).matrix);
    });
    GeneratorReport gen;
    run.check(tag("weyl.generator_defect" + b, n), 1e-4, [&] {
      gen = generator_check(g, basis[i], 1e-3);
      return gen.defect;
    });
    run.record({tag("weyl.generator_order" + b, n), {}, std::abs(gen.order - 2.0), 0.1, std::abs(gen.order - 2.0) <= 0.1, 0.0,
                "order=" + format_number(gen.order)});
  }

  // Truncation trend of the Weyl relation at probe degree P.
  const TestVector f = basis.front();
  const TestVector h = basis.size() > 1 ? basis[1] : basis.front();
  std::vector<double> defects;
  std::string column;
  for (int m : {4, 6, 8}) {
    if (m - 2 < cfg.probe_degree) continue;
    if (monomial_count(run.space().dim(), m) > default_monomial_cap) continue;
    if (2 * m > WightmanFunctional::max_points) continue;
    const GnsSpace gm = build_gns(fn, m, cfg.tolerance);
    const double d = weyl_defect(gm, f, h, cfg.probe_degree);
    defects.push_back(d);
    column += (column.empty() ? "" : " ") + std::string("N=") + std::to_string(m) + ":" + format_number(d);
  }
  double worst_increase = 0.0;
  for (std::size_t k = 1; k < defects.size(); ++k) worst_increase = std::max(worst_increase, defects[k] - defects[k - 1]);
  run.record({"weyl.defect_trend[P=" + std::to_string(cfg.probe_degree) + "]", {}, worst_increase, 1e-12,
              worst_increase <= 1e-12, 0.0, column});
}

inline void suite_radical(SuiteRun& run) {
  const int n = std::max(run.cfg().truncation, 4);
  const GnsSpace g = build_gns(WightmanFunctional(run.space()), n, run.cfg().tolerance);
  const auto by_sigma = sigma_radical(run.space());
  const auto by_field = field_radical(g);
  run.check(tag("radical.principal_angle", n), 1e-8, [&] { return max_principal_angle(by_sigma, by_field); },
            "dim(N_sigma)=" + std::to_string(by_sigma.size()) + " dim(N_r)=" + std::to_string(by_field.size()));
}

inline void suite_fock(SuiteRun& run) {
  const RunConfig& cfg = run.cfg();
  const int n = cfg.truncation;
  const TestSpace& space = run.space();
  const FockSpace fs = build_fock(space, n, cfg.tolerance);
  run.check("fock.embedding_isometry", 1e-10, [&] {
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      const TestVector f = run.random_vector();
      const TestVector g = run.random_vector();
      worst = std::max(worst, std::abs(fs.embed(f).dot(fs.embed(g)) - one_particle_form(space, f, g)));
    }
    return worst;
  });
  if (n >= 2) {
    const Matrix frame_proj = [&] {
      Matrix p = Matrix::Zero(fs.dimension(), fs.dimension());
      for (int s = 0; s < fs.dimension(); ++s)
        if (fs.particle_number(s) <= n - 2) p(s, s) = 1.0;
      return p;
    }();
    run.check(tag("fock.ccr", n), 1e-10, [&] {
      double worst = 0.0;
      for (int trial = 0; trial < 4; ++trial) {
        const TestVector f = run.random_hermitian();
        const TestVector g = run.random_hermitian();
        const Matrix a = segal_field(fs, f).matrix;
        const Matrix b = segal_field(fs, g).matrix;
        const Matrix c = a * b - b * a - I * sigma(space, f, g) * Matrix::Identity(fs.dimension(), fs.dimension());
        worst = std::max(worst, op_norm(c * frame_proj));
      }
      return worst;
    });
  }
  const GnsSpace g = build_gns(WightmanFunctional(space), n, cfg.tolerance);
  const IntertwinerReport r = intertwiner(g, fs);
  run.check(tag("fock.intertwiner_isometry", n), 1e-8, [&] { return r.isometry_defect; },
            "gns_rank=" + std::to_string(g.rank()) + " fock_dim=" + std::to_string(fs.dimension()));
  run.check(tag("fock.intertwining", n), 1e-8, [&] { return r.intertwining_defect; });

  // Characteristic function against the Wick moment series
  // sum_m (i t)^{2m} (2m-1)!! W2(f,f)^m / (2m)!.
  const TestVector f = hermitian_basis(space).front();
  constexpr double t = 0.5;
  cplx oracle = 0.0;
  {
    const cplx w2 = space.w2(f, f);
    cplx term = 1.0;  // m = 0
    for (int m = 0; m < 60; ++m) {
      oracle += term;
      // ratio of consecutive terms: (i t)^2 (2m+1) W2 / ((2m+1)(2m+2))
      term *= -t * t * w2 / static_cast<double>(2 * m + 2);
    }
  }
  run.check(tag("fock.vacuum_characteristic", n), 1e-6, [&] { return std::abs(vacuum_characteristic(fs, f, t) - oracle); },
            "t=0.5 oracle=" + format_number(oracle.real()));
}

}  // namespace detail

/// Runs one named suite (or "all") on a validated configuration.
inline Report run_suite(const RunConfig& cfg, const std::string& suite) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) throw UsageError("unknown suite '" + suite + "'");
  detail::SuiteRun run(cfg);
  const bool all = suite == "all";
  if (all || suite == "validate") detail::suite_validate(run);
  if (all || suite == "gram") detail::suite_gram(run);
  if (all || suite == "bch") detail::suite_bch(run);
  if (all || suite == "ccr") detail::suite_ccr(run);
  if (all || suite == "weyl") detail::suite_weyl(run);
  if (all || suite == "radical") detail::suite_radical(run);
  if (all || suite == "fock-compare") detail::suite_fock(run);
  return run.report();
}

}  // namespace ccr

#endif  // CCR_LAB_SUITES_HPP
