// ccr-lab: batch front-end for the verification suites.
//
//   ccr-lab <suite> --config <path> [--degree N] [--seed S] [--probe P] [--out report.jsonl]
//
// Exit status: 0 all checks pass, 1 a check failed, 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ccr_lab/ccr_lab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ccr-lab: finite-dimensional checks of Wightman/GNS and CCR/Weyl structure"};
  std::string suite;
  std::string config_path;
  std::optional<int> degree;
  std::optional<std::uint64_t> seed;
  std::optional<int> probe;
  std::string out_path;

  std::string suites;
  for (const auto& s : ccr::suite_names()) suites += (suites.empty() ? "" : ", ") + s;
  app.add_option("suite", suite, "Suite to run: " + suites)->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--degree", degree, "Override the truncation degree N");
  app.add_option("--seed", seed, "Override the seed for randomized checks");
  app.add_option("--probe", probe, "Override the probe degree P");
  app.add_option("--out", out_path, "Write the machine-readable report (JSON lines) here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    ccr::RunConfig cfg = ccr::load_config(config_path);
    if (degree) {
      if (*degree < 0) throw ccr::ConfigError("truncation", "degree must be non-negative");
      cfg.truncation = *degree;
    }
    if (seed) cfg.seed = *seed;
    if (probe) {
      if (*probe < 0) throw ccr::ConfigError("probe_degree", "probe must be non-negative");
      cfg.probe_degree = *probe;
    }

    const ccr::Report report = ccr::run_suite(cfg, suite);
    std::cout << "suite " << suite << " on " << config_path << " (N=" << cfg.truncation << ", config " << cfg.hash()
              << ")\n"
              << report.table();
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "ccr-lab: cannot write '" << out_path << "'\n";
        return 2;
      }
      out << report.jsonl();
    }
    return report.ok() ? 0 : 1;
  } catch (const ccr::ConfigError& e) {
    std::cerr << "ccr-lab: configuration error [" << e.check() << "]: " << e.what() << "\n";
    return 2;
  } catch (const ccr::UsageError& e) {
    std::cerr << "ccr-lab: " << e.what() << "\n";
    return 2;
  } catch (const ccr::CapacityError& e) {
    std::cerr << "ccr-lab: resource cap exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ccr-lab: " << e.what() << "\n";
    return 2;
  }
}
