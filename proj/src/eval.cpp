#include "wlanloc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wlanloc/random.hpp"
#include "wlanloc/text.hpp"

namespace wlanloc {

namespace {
// Keeps the position stream apart from trial 0's scan stream (seed ^ 0).
constexpr std::uint64_t kPositionStreamSalt = 0x9E3779B97F4A7C15ULL;
}  // namespace

std::vector<Trial> sample_trials(const Site& site, std::size_t n_trials, std::uint64_t seed) {
  DeterministicRng rng(seed ^ kPositionStreamSalt);
  std::vector<Trial> trials;
  trials.reserve(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) {
    const double x = rng.uniform(0.0, site.width());
    const double y = rng.uniform(0.0, site.depth());
    trials.push_back(Trial{Point2{x, y}, seed ^ static_cast<std::uint64_t>(i)});
  }
  return trials;
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvariantError("percentile of an empty sample");
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ErrorReport evaluate_trials(const RadioMap& map, const NNIndex& index, const Site& site,
                            const PathLossModel& model, const EvalConfig& cfg,
                            std::span<const Trial> trials) {
  if (trials.empty()) throw InvariantError("evaluation needs at least one trial");
  if (cfg.k < 1) throw InvariantError("k must be at least 1");

  std::vector<double> errors;
  errors.reserve(trials.size());
  for (const auto& t : trials) {
    const auto obs = simulate_scan(site, t.truth, cfg.mode, model, t.scan_seed);
    const auto est = locate(map, index, obs, cfg.k, cfg.epsilon);
    errors.push_back(planar_distance(est.pos, t.truth));
  }
  std::sort(errors.begin(), errors.end());

  ErrorReport report;
  report.k = std::min<std::int64_t>(cfg.k, static_cast<std::int64_t>(map.size()));
  report.mean_m = std::accumulate(errors.begin(), errors.end(), 0.0) /
                  static_cast<double>(errors.size());
  report.median_m = percentile(errors, 0.5);
  report.p95_m = percentile(errors, 0.95);
  report.sorted_errors_m = std::move(errors);
  return report;
}

ErrorReport evaluate(const RadioMap& map, const Site& site, const PathLossModel& model,
                     const EvalConfig& cfg, std::size_t n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw InvariantError("evaluation needs at least one trial");
  const NNIndex index(map);
  const auto trials = sample_trials(site, n_trials, seed);
  return evaluate_trials(map, index, site, model, cfg, trials);
}

std::vector<ErrorReport> k_sweep(const RadioMap& map, const Site& site, const PathLossModel& model,
                                 std::span<const std::int64_t> k_values, double epsilon,
                                 ScanMode mode, std::size_t n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw InvariantError("evaluation needs at least one trial");
  const NNIndex index(map);
  const auto trials = sample_trials(site, n_trials, seed);
  std::vector<ErrorReport> out;
  out.reserve(k_values.size());
  for (const auto k : k_values) {
    out.push_back(evaluate_trials(map, index, site, model, EvalConfig{k, epsilon, mode}, trials));
  }
  return out;
}

std::string to_csv(std::span<const ErrorReport> reports) {
  std::string out = "k,mean_m,median_m,p95_m\n";
  for (const auto& r : reports) {
    out += std::to_string(r.k) + ',' + text::format_fixed(r.mean_m, 4) + ',' +
           text::format_fixed(r.median_m, 4) + ',' + text::format_fixed(r.p95_m, 4) + '\n';
  }
  return out;
}

}  // namespace wlanloc
