#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/observables.hpp"

namespace wpk {

struct ObservationRecord {
  std::size_t index = 0;  // 1-based observation number
  double r_x = 0.0;
  double r_y = 0.0;
  double bond_length = 0.0;
};

struct SamplingRun {
  std::uint64_t seed = 0;
  std::string prng_id;
  std::vector<ObservationRecord> records;
  std::vector<double> running_mean;  // mean of bond_length over records 1..i
};

struct SampleStats {
  double mean = 0.0;
  double std_dev = 0.0;  // population convention (divide by N)
  double mode = 0.0;     // most frequent value, ties to the smallest
};

namespace detail {

// 53-bit uniform in [0, 1) built from the raw engine output. Not routed
// through uniform_real_distribution on purpose: that one is implementation
// defined, and sampled runs must replay bit for bit everywhere.
inline double canonical_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Draws n_obs positions from the marginal by inverting its CDF. The CDF is
// the running row-major sum of p * dV; each observation takes the first index
// whose CDF reaches the uniform variate. Everything downstream of the seed is
// deterministic, so (seed, prng_id, marginal) fully identifies the run.
inline SamplingRun sample(const MarginalDensity& marginal, std::size_t n_obs,
                          std::uint64_t seed) {
  validate_grid(marginal.grid);
  if (marginal.grid.rank() != 2) throw ConfigError("sampling expects a two-axis marginal");
  if (marginal.p.size() != total_points(marginal.grid)) {
    throw ConfigError("marginal density is not sized to its grid");
  }
  if (n_obs == 0) throw ConfigError("need at least one observation");

  const double dv = volume_element(marginal.grid);
  std::vector<double> cdf(marginal.p.size());
  long double acc = 0.0L;
  for (std::size_t i = 0; i < marginal.p.size(); ++i) {
    if (marginal.p[i] < 0.0) {
      throw ConfigError("marginal density has a negative entry at flat index " +
                        std::to_string(i));
    }
    acc += static_cast<long double>(marginal.p[i]) * static_cast<long double>(dv);
    cdf[i] = static_cast<double>(acc);
  }
  if (!(cdf.back() > 0.0)) throw ConfigError("marginal density sums to zero");

  const auto xs = coordinates(marginal.grid.axes[0]);
  const auto ys = coordinates(marginal.grid.axes[1]);
  const std::size_t ny = marginal.grid.axes[1].n_points;

  SamplingRun run;
  run.seed = seed;
  run.prng_id = "mt19937_64";
  run.records.reserve(n_obs);
  run.running_mean.reserve(n_obs);

  std::mt19937_64 rng(seed);
  long double mean_acc = 0.0L;
  for (std::size_t i = 1; i <= n_obs; ++i) {
    const double u = detail::canonical_uniform(rng);
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const std::size_t flat =
        (it == cdf.end()) ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());

    ObservationRecord rec;
    rec.index = i;
    rec.r_x = xs[flat / ny];
    rec.r_y = ys[flat % ny];
    rec.bond_length = std::hypot(rec.r_x, rec.r_y);
    mean_acc += static_cast<long double>(rec.bond_length);
    run.records.push_back(rec);
    run.running_mean.push_back(static_cast<double>(mean_acc / static_cast<long double>(i)));
  }
  return run;
}

inline SampleStats run_stats(const SamplingRun& run) {
  if (run.records.empty()) throw ConfigError("cannot summarize an empty sampling run");
  const auto n = static_cast<double>(run.records.size());

  long double mean_acc = 0.0L;
  for (const auto& r : run.records) mean_acc += static_cast<long double>(r.bond_length);
  const double mean = static_cast<double>(mean_acc) / n;

  long double var_acc = 0.0L;
  std::map<double, std::size_t> counts;
  for (const auto& r : run.records) {
    const double d = r.bond_length - mean;
    var_acc += static_cast<long double>(d) * static_cast<long double>(d);
    ++counts[r.bond_length];
  }

  // ascending key order plus strict > keeps the smallest value among tied counts
  double mode = run.records.front().bond_length;
  std::size_t best = 0;
  for (const auto& [value, count] : counts) {
    if (count > best) {
      best = count;
      mode = value;
    }
  }

  return {mean, std::sqrt(static_cast<double>(var_acc) / n), mode};
}

}  // namespace wpk
