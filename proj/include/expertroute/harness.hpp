#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "expertroute/core.hpp"
#include "expertroute/rng.hpp"
#include "expertroute/routing.hpp"

namespace expertroute {

/// Uniform area in [1, m] and uniform tau in [1, n/h - 1] (unified) or
/// [1, lambda] (diversified).
Query gen_query(const ModelConfig& config, SplitMix64& rng);

/// Forwarding probability against relative expertise difference
/// ||e(w) - e(u)||_1 / ||e(u)||_1. Bins are right-open, [i*w, (i+1)*w).
class Histogram {
 public:
  explicit Histogram(double bin_width = 0.1);

  void add(double value);
  void merge(const Histogram& other);

  double bin_width() const { return bin_width_; }
  std::uint64_t total() const { return total_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  struct Bin {
    double lo;
    double hi;
    double probability;
  };
  /// Empty when nothing was recorded.
  std::vector<Bin> bins() const;

 private:
  double bin_width_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Adds every forwarding step of one route.
void accumulate_forwarding(const RouteResult& route, const ExpertNetwork& net, Histogram& hist);

Histogram forwarding_histogram(const std::vector<RouteResult>& routes, const ExpertNetwork& net,
                               double bin_width = 0.1);

struct SweepPoint {
  ModelConfig config;  // config.seed is the master seed; config.r and config.k are overridden
  double c = 0.0;
  std::int64_t realizations = 100;
  std::int64_t trials_per_realization = 500;
};

struct SweepOptions {
  /// 0 means default_thread_count().
  unsigned threads = 0;
  bool collect_histogram = false;
  double bin_width = 0.1;
  TieBreak tie = TieBreak::kClosestAbove;
};

struct SweepReport {
  ModelKind model = ModelKind::kUnified;
  std::int64_t n = 0;
  std::int64_t h_or_m = 0;
  std::int64_t k = 0;
  double r = 0.0;
  double c = 0.0;
  bool no_long_range = false;
  double mean_hops = 0.0;
  double stderr_hops = 0.0;
  std::int64_t max_hops = 0;
  std::int64_t trials = 0;  // completed routes (resolved or aborted)
  std::int64_t aborted = 0;
  std::int64_t errors = 0;  // trials that threw
  std::int64_t cap_violations = 0;
  std::int64_t path_cap = 0;
  std::uint64_t master_seed = 0;
  std::string first_error;
  Histogram histogram;
};

/// Monte Carlo sweep. For each (r, k) it builds `realizations` fresh networks
/// and routes `trials_per_realization` random queries from uniform first
/// holders on each. Seeds derive from (master, r index, k index, realization,
/// trial), so results do not depend on thread count or scheduling. Reports are
/// returned in r-major, k-minor order.
std::vector<SweepReport> run_sweep(const SweepPoint& point, const std::vector<double>& r_grid,
                                   const std::vector<std::int64_t>& k_grid,
                                   const SweepOptions& opts = {});

/// Mean hop count over every (area, tau, start) in gen_query's support on a
/// fixed network, exact mode.
double exhaustive_mean_hops(const ExpertNetwork& net);

/// EXPERTROUTE_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Shortest round-trip decimal.
std::string format_double(double v);

void write_sweep_csv(std::ostream& out, const std::vector<SweepReport>& reports);
std::string sweep_json(const std::vector<SweepReport>& reports);
void write_histogram_csv(std::ostream& out, const Histogram& hist);

}  // namespace expertroute
