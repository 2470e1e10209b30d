#ifndef CCR_LAB_CONFIG_HPP
#define CCR_LAB_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccr_lab/core.hpp"
#include "ccr_lab/test_space.hpp"

namespace ccr {

/// Configuration problem; `check` names the failed validation step.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string check, const std::string& message)
      : std::runtime_error(check + ": " + message), check_(std::move(check)) {}
  const std::string& check() const { return check_; }

 private:
  std::string check_;
};

struct RunConfig {
  int dim = 0;
  int truncation = 0;
  double tolerance = 1e-10;
  RealMatrix w2_real;
  RealMatrix w2_imag;
  std::optional<Matrix> involution;
  std::vector<std::string> components;
  std::uint64_t seed = 0;
  int probe_degree = 0;

  Matrix two_point() const {
    Matrix k(dim, dim);
    k.real() = w2_real;
    k.imag() = w2_imag;
    return k;
  }
  TestSpace space() const { return TestSpace(two_point(), involution, components); }

  nlohmann::ordered_json to_json() const {
    auto rows = [](const RealMatrix& m) {
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
      }
      return out;
    };
    nlohmann::ordered_json j;
    j["dim"] = dim;
    j["truncation"] = truncation;
    j["tolerance"] = tolerance;
    j["w2_real"] = rows(w2_real);
    j["w2_imag"] = rows(w2_imag);
    if (involution) j["involution"] = {{"real", rows(involution->real())}, {"imag", rows(involution->imag())}};
    if (!components.empty()) j["components"] = components;
    j["seed"] = seed;
    j["probe_degree"] = probe_degree;
    return j;
  }

  /// FNV-1a of the canonical JSON form, as 16 hex digits.
  std::string hash() const {
    const std::string text = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

namespace detail {

inline RealMatrix read_matrix(const nlohmann::json& j, const std::string& key, int dim) {
  if (!j.is_array()) throw ConfigError("shape", key + " must be an array of rows");
  if (static_cast<int>(j.size()) != dim)
    throw ConfigError("shape", key + " has " + std::to_string(j.size()) + " rows, expected " + std::to_string(dim));
  RealMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw ConfigError("shape", key + " is not a square " + std::to_string(dim) + " x " + std::to_string(dim) + " matrix");
    for (int c = 0; c < dim; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw ConfigError("parse", key + " entries must be numbers");
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace detail

/// Builds and validates a RunConfig. Every TestSpace invariant is checked.
inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("parse", "configuration must be a JSON object");
  static const std::vector<std::string> known = {"dim",        "truncation", "tolerance", "w2_real",     "w2_imag",
                                                 "involution", "components", "seed",      "probe_degree"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("parse", "unknown key '" + key + "'");
  for (const char* key : {"dim", "truncation", "w2_real", "w2_imag"})
    if (!j.contains(key)) throw ConfigError("parse", std::string("missing key '") + key + "'");

  RunConfig cfg;
  try {
    cfg.dim = j.at("dim").get<int>();
    cfg.truncation = j.at("truncation").get<int>();
    if (j.contains("tolerance")) cfg.tolerance = j.at("tolerance").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("probe_degree")) cfg.probe_degree = j.at("probe_degree").get<int>();
    if (j.contains("components")) cfg.components = j.at("components").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("parse", e.what());
  }
  if (cfg.dim <= 0) throw ConfigError("shape", "dim must be positive");
  if (cfg.truncation < 0) throw ConfigError("truncation", "truncation must be non-negative");
  if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance", "tolerance must be positive");
  if (cfg.probe_degree < 0) throw ConfigError("probe_degree", "probe_degree must be non-negative");
  cfg.w2_real = detail::read_matrix(j.at("w2_real"), "w2_real", cfg.dim);
  cfg.w2_imag = detail::read_matrix(j.at("w2_imag"), "w2_imag", cfg.dim);
  if (j.contains("involution")) {
    const auto& inv = j.at("involution");
    if (!inv.is_object() || !inv.contains("real"))
      throw ConfigError("parse", "involution must be an object with 'real' and optional 'imag' rows");
    Matrix a(cfg.dim, cfg.dim);
    a.real() = detail::read_matrix(inv.at("real"), "involution.real", cfg.dim);
    a.imag() = inv.contains("imag") ? detail::read_matrix(inv.at("imag"), "involution.imag", cfg.dim)
                                    : RealMatrix::Zero(cfg.dim, cfg.dim);
    cfg.involution = a;
  }
  if (!cfg.components.empty() && static_cast<int>(cfg.components.size()) != cfg.dim)
    throw ConfigError("shape", "components must hold one label per basis index");

  const ValidationReport report = validate(cfg.space(), cfg.tolerance);
  for (const CheckResult& c : report.checks)
    if (!c.pass) throw ConfigError(c.name, "test-space invariant violated (defect " + std::to_string(c.defect) + ")");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("parse", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("parse", e.what());
  }
  return parse_config(j);
}

}  // namespace ccr

#endif  // CCR_LAB_CONFIG_HPP
