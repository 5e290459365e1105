#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wlanloc/core.hpp"
#include "wlanloc/locator.hpp"
#include "wlanloc/radio_sim.hpp"

namespace wlanloc {

struct EvalConfig {
  std::int64_t k{3};
  double epsilon{0.0};
  ScanMode mode{ScanMode::passive};
};

struct ErrorReport {
  std::int64_t k{0};
  double mean_m{0.0};
  double median_m{0.0};
  double p95_m{0.0};
  std::vector<double> sorted_errors_m;

  friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

/// One test point with the seed its scan is simulated from.
struct Trial {
  Point2 truth;
  std::uint64_t scan_seed{0};

  friend bool operator==(const Trial&, const Trial&) = default;
};

/// n uniform positions over the site. Positions come from a stream seeded
/// with `seed`; trial i scans with seed ^ i.
[[nodiscard]] std::vector<Trial> sample_trials(const Site& site, std::size_t n_trials,
                                               std::uint64_t seed);

/// Linear interpolation between order statistics at rank q * (n - 1).
[[nodiscard]] double percentile(std::span<const double> sorted, double q);

/// Simulates, locates and scores every trial. Throws on an empty trial list.
[[nodiscard]] ErrorReport evaluate_trials(const RadioMap& map, const NNIndex& index,
                                          const Site& site, const PathLossModel& model,
                                          const EvalConfig& cfg, std::span<const Trial> trials);

/// sample_trials + evaluate_trials. Throws InvariantError if n_trials < 1.
[[nodiscard]] ErrorReport evaluate(const RadioMap& map, const Site& site,
                                   const PathLossModel& model, const EvalConfig& cfg,
                                   std::size_t n_trials, std::uint64_t seed);

/// One report per k, every k scored on the same trials.
[[nodiscard]] std::vector<ErrorReport> k_sweep(const RadioMap& map, const Site& site,
                                               const PathLossModel& model,
                                               std::span<const std::int64_t> k_values,
                                               double epsilon, ScanMode mode,
                                               std::size_t n_trials, std::uint64_t seed);

/// "k,mean_m,median_m,p95_m" header plus one row per report, LF endings.
[[nodiscard]] std::string to_csv(std::span<const ErrorReport> reports);

}  // namespace wlanloc
