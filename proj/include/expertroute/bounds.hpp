#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "expertroute/core.hpp"

namespace expertroute {

/// Average-path-length bound expressions for the two models. The default
/// evaluators return the constant-free asymptotic shape. With `explicit_constants`
/// they return the concrete expressions the proofs establish:
///
///   upper, unified:      2 (ln(3n/h))^(r+1)
///   lower, unified:      5 min(r-1, 1) / 192 * k^(-1/r) (n/h)^((r-1)/r)
///   upper, diversified:  c0 m (ln(3 m lambda))^(r+1), lambda = n^(1/m)
///   lower, diversified:  5 min(r-1, 1) / 192 * k^(-1/r) lambda^((r-1)/r)
///
/// Upper bounds hold for 0 <= r <= 1, lower bounds for r > 1; other r throw
/// std::domain_error.
enum class BoundKind {
  kUpperUnified,
  kLowerUnified,
  kUpperDiversified,
  kLowerDiversified,
  kCapUnified,
  kCapDiversified,
};

std::string to_string(BoundKind kind);

struct BoundOptions {
  bool explicit_constants = false;
  /// c0 for the explicit diversified upper bound; unset means 2m.
  std::optional<double> c0;
};

struct BoundValue {
  BoundKind kind;
  double value;
  std::int64_t n;
  std::int64_t h_or_m;
  std::int64_t k;
  double r;
};

double upper_unified(double n, double h, double r, const BoundOptions& opts = {});
double lower_unified(double n, double h, double k, double r, const BoundOptions& opts = {});
double upper_diversified(double n, double m, double r, const BoundOptions& opts = {});
double lower_diversified(double n, double m, double k, double r, const BoundOptions& opts = {});

/// Hard cap on any single path: n/h (unified) or lambda = n^(1/m) (diversified).
std::int64_t path_cap(const ModelConfig& config);

/// Every bound that applies to config at its r: the cap, plus the upper bound
/// when r <= 1 or the lower bound when r > 1.
std::vector<BoundValue> applicable_bounds(const ModelConfig& config, const BoundOptions& opts = {});

/// Predicted L1/L2 from the diversified lower bound at r1 and r2 (both > 1).
/// Constants cancel.
double predict_ratio(double n, double m, double k, double r1, double r2);

/// Golden-section minimisation of f on [lo, hi] until the bracket is below tol.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

struct FitOptions {
  double r_min = 0.0;
  double r_max = 10.0;
  double tolerance = 1e-3;
};

struct FitResult {
  double r = 0.0;
  double log_likelihood = 0.0;
  std::size_t edges = 0;
  std::size_t sources = 0;
};

/// Log-likelihood of observed long-range edges under the inverse r-th power
/// model, normalised per source over its full candidate set.
class EdgeLikelihood {
 public:
  /// Throws InvalidInput on an empty edge list or an edge outside C_src.
  EdgeLikelihood(const ExpertTable& experts, const std::vector<std::pair<ExpertId, ExpertId>>& edges);

  double operator()(double r) const;
  std::size_t edges() const { return edge_count_; }
  std::size_t sources() const { return sources_.size(); }

 private:
  struct Source {
    std::int64_t edge_count;
    // (distance, number of candidates at that distance)
    std::vector<std::pair<std::int64_t, std::int64_t>> shells;
  };
  std::vector<Source> sources_;
  // sum over edges of ln d(src -> dst)
  double sum_log_distance_ = 0.0;
  std::size_t edge_count_ = 0;
};

/// Maximum-likelihood r over [r_min, r_max] by golden-section search.
FitResult fit_r(const ExpertTable& experts, const std::vector<std::pair<ExpertId, ExpertId>>& edges,
                const FitOptions& opts = {});
FitResult fit_r(const ExpertNetwork& net, const std::vector<std::pair<ExpertId, ExpertId>>& edges,
                const FitOptions& opts = {});

/// Every long-range edge of net as (src, dst).
std::vector<std::pair<ExpertId, ExpertId>> long_range_edges(const ExpertNetwork& net);

}  // namespace expertroute
