#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "expertroute/core.hpp"
#include "expertroute/rng.hpp"

namespace expertroute {

using BigCount = boost::multiprecision::cpp_int;

// Substrates. Ids: unified id = row * (n/h) + column; diversified
// id = sum_j (e_j - 1) * lambda^j with area 0 least significant.

ExpertTable unified_experts(std::int64_t n, std::int64_t h);
ExpertTable diversified_experts(std::int64_t m, std::int64_t lambda);

/// Columns j-1, j, j+1 across every row, minus self.
Adjacency unified_local_contacts(std::int64_t n, std::int64_t h);
/// m-dimensional grid adjacency.
Adjacency diversified_local_contacts(std::int64_t m, std::int64_t lambda);

/// O(n^2) reference substrate straight from the homophily rule.
Adjacency brute_force_local_contacts(const ExpertTable& experts, Level delta);

/// Draws long-range contacts from the inverse r-th power distribution
/// Pr(u->w) = d(u->w)^-r / sum_{v in C_u} d(u->v)^-r over the candidate set.
/// Weights are computed per call; nothing O(n^2) is stored.
class LongRangeSampler {
 public:
  LongRangeSampler(const ExpertTable& experts, double r);

  /// k independent draws; empty when C_u is empty. Duplicates are kept.
  std::vector<ExpertId> sample(ExpertId u, std::int64_t k, SplitMix64& rng);

  struct Candidate {
    ExpertId id;
    double probability;
  };
  /// Exact distribution over C_u in id order.
  std::vector<Candidate> distribution(ExpertId u);

  /// d^-r, via exp(-r ln d). Exactly 1 when r == 0 or d == 1.
  double weight(std::int64_t d) const { return weights_[static_cast<std::size_t>(d)]; }

 private:
  double fill(ExpertId u);

  const ExpertTable* experts_;
  double r_;
  std::vector<double> weights_;
  std::vector<ExpertId> ids_;
  std::vector<double> cumulative_;
};

std::vector<ExpertId> sample_long_range(ExpertId u, const ExpertTable& experts, std::int64_t k,
                                        double r, SplitMix64& rng);

/// Stream for expert u's long-range draws.
inline SplitMix64 expert_stream(std::uint64_t network_seed, ExpertId u) {
  return SplitMix64(derive_seed(network_seed, {0x4c52ULL, u}));
}

/// Long-range layer for every expert, each from its own substream.
Adjacency sample_long_range_layer(const ExpertTable& experts, std::int64_t k, double r,
                                  std::uint64_t seed);

ExpertNetwork build_unified(const ModelConfig& config);
ExpertNetwork build_diversified(const ModelConfig& config);
/// Validates and dispatches on config.kind.
ExpertNetwork build_network(const ModelConfig& config);

/// Rebuilds a network from stored experts and long-range lists; the substrate
/// is regenerated from the config.
ExpertNetwork assemble_network(const ModelConfig& config, ExpertTable experts, Adjacency long_range);

// Total-ability distribution of the diversified model.

/// Number of points of [1, lambda]^m with coordinate sum phi (inclusion-exclusion).
BigCount ability_count(std::int64_t phi, std::int64_t m, std::int64_t lambda);

struct AbilityHistogram {
  std::int64_t m = 0;
  std::int64_t lambda = 0;
  std::map<std::int64_t, BigCount> counts;  // phi -> experts

  BigCount total() const;
  double mean() const;
};

AbilityHistogram ability_histogram(std::int64_t m, std::int64_t lambda);

/// (m + m * n^(1/m)) / 2; exact when n is a perfect m-th power.
double expected_ability(std::int64_t m, std::int64_t n);

BigCount binomial(std::int64_t a, std::int64_t b);

}  // namespace expertroute
