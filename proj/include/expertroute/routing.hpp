#pragma once

#include <cstdint>
#include <vector>

#include "expertroute/core.hpp"
#include "expertroute/rng.hpp"

namespace expertroute {

enum class RouteStatus { kResolved, kAbortedHopCap };

struct RouteResult {
  std::vector<ExpertId> path;  // first holder .. resolver
  std::int64_t hops = 0;       // path.size() - 1
  RouteStatus status = RouteStatus::kResolved;
};

/// Difficulty misinterpretation: sigma = c * (tau - e_i(u)). c == 0 is exact.
struct ErrorModel {
  double c = 0.0;
};

/// How next_hop orders contacts that tie on min(e_i(w) - tau_eff, 0).
///
/// Both policies produce identical hop counts when tau_eff == tau: ties at a
/// negative score share the same e_i, and ties at zero are all qualified.
/// They differ only under misreads.
enum class TieBreak {
  /// Among tied contacts prefer those above the holder's own level, then the
  /// lowest e_i (the least over-qualified contact), then the smallest id.
  kClosestAbove,
  /// Largest e_i, then smallest id. Makes the choice independent of tau_eff.
  kHighestSkill,
};

/// Contact of u maximising min(e_i(w) - tau_eff, 0) over local and
/// long-range contacts. Throws InvalidInput if u has no contacts.
ExpertId next_hop(ExpertId u, const Query& query, const ExpertNetwork& net, Level tau_eff,
                  TieBreak tie = TieBreak::kClosestAbove);

/// Continuous draw from N(mean, sigma^2) truncated below at lower, by
/// inverse CDF on the truncated upper range.
double sample_truncated_normal(double mean, double sigma, double lower, SplitMix64& rng);

/// Holder's perceived difficulty. Requires holder_level < tau. The draw is
/// rounded half away from zero and never falls below holder_level.
Level sample_misread_tau(Level holder_level, Level tau, double c, SplitMix64& rng);
Level sample_misread_tau(ExpertId u, const Query& query, const ExpertNetwork& net, double c,
                         SplitMix64& rng);

/// Greedy decentralized search. The exit test always uses the true tau; under
/// an error model each unqualified holder re-samples tau' for its own choice.
/// No random numbers are consumed when error.c == 0.
RouteResult route(const Query& query, ExpertId start, const ExpertNetwork& net,
                  const ErrorModel& error, SplitMix64& rng, TieBreak tie = TieBreak::kClosestAbove);

/// Exact mode convenience overload.
RouteResult route(const Query& query, ExpertId start, const ExpertNetwork& net,
                  TieBreak tie = TieBreak::kClosestAbove);

}  // namespace expertroute
