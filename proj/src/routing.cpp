#include "expertroute/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

namespace expertroute {

namespace {

struct Choice {
  std::int64_t score;
  Level skill;
  ExpertId id;
};

// True when a is preferred over b.
bool better(const Choice& a, const Choice& b, Level holder, TieBreak tie) {
  if (a.score != b.score) return a.score > b.score;
  if (a.skill != b.skill) {
    if (tie == TieBreak::kHighestSkill) return a.skill > b.skill;
    const bool a_up = a.skill > holder;
    const bool b_up = b.skill > holder;
    if (a_up != b_up) return a_up;
    return a.skill < b.skill;
  }
  return a.id < b.id;
}

}  // namespace

ExpertId next_hop(ExpertId u, const Query& query, const ExpertNetwork& net, Level tau_eff,
                  TieBreak tie) {
  const std::size_t area = query.area_index();
  const ExpertTable& experts = net.experts();
  const Level holder = experts.level(u, area);

  bool found = false;
  Choice best{};
  auto consider = [&](ExpertId w) {
    const Level skill = experts.level(w, area);
    const Choice c{std::min<std::int64_t>(static_cast<std::int64_t>(skill) - tau_eff, 0), skill, w};
    if (!found || better(c, best, holder, tie)) {
      best = c;
      found = true;
    }
  };
  for (ExpertId w : net.local_contacts()[u]) consider(w);
  for (ExpertId w : net.long_range_contacts()[u]) consider(w);

  if (!found) throw InvalidInput("expert " + std::to_string(u) + " has no contacts");
  return best.id;
}

double sample_truncated_normal(double mean, double sigma, double lower, SplitMix64& rng) {
  if (!(sigma > 0.0)) return std::max(mean, lower);
  // Sample the upper tail mass q in (0, Phi((mean - lower) / sigma)] and map
  // it back with x = mean - sigma * Phi^-1(q), Phi^-1(q) = -sqrt(2) erfc^-1(2q).
  const double upper_mass = 0.5 * std::erfc((lower - mean) / (sigma * std::sqrt(2.0)));
  const double q = rng.uniform_open_closed() * upper_mass;
  if (!(q > 0.0)) return lower;
  const double two_q = std::min(2.0 * q, std::nextafter(2.0, 0.0));
  const double x = mean + sigma * std::sqrt(2.0) * boost::math::erfc_inv(two_q);
  return std::max(x, lower);
}

Level sample_misread_tau(Level holder_level, Level tau, double c, SplitMix64& rng) {
  if (c < 0.0) throw InvalidInput("error scaling c must be non-negative");
  if (c == 0.0 || holder_level >= tau) return tau;
  const double sigma = c * static_cast<double>(tau - holder_level);
  const double x = sample_truncated_normal(tau, sigma, holder_level, rng);
  const double rounded = std::round(x);  // half away from zero
  const double capped = std::min(rounded, static_cast<double>(std::numeric_limits<Level>::max()));
  return std::max(holder_level, static_cast<Level>(capped));
}

Level sample_misread_tau(ExpertId u, const Query& query, const ExpertNetwork& net, double c,
                         SplitMix64& rng) {
  return sample_misread_tau(net.experts().level(u, query.area_index()), query.tau, c, rng);
}

RouteResult route(const Query& query, ExpertId start, const ExpertNetwork& net,
                  const ErrorModel& error, SplitMix64& rng, TieBreak tie) {
  if (start >= net.size()) throw InvalidInput("start expert out of range");
  if (query.area < 1 || static_cast<std::size_t>(query.area) > net.experts().dims()) {
    throw InvalidInput("query area out of range");
  }
  if (error.c < 0.0) throw InvalidInput("error scaling c must be non-negative");

  const std::size_t area = query.area_index();
  const auto cap = static_cast<std::int64_t>(net.size());
  RouteResult result;
  result.path.push_back(start);
  ExpertId u = start;
  while (net.experts().level(u, area) < query.tau) {
    if (result.hops >= cap) {
      result.status = RouteStatus::kAbortedHopCap;
      return result;
    }
    const Level tau_eff =
        error.c > 0.0 ? sample_misread_tau(u, query, net, error.c, rng) : query.tau;
    u = next_hop(u, query, net, tau_eff, tie);
    result.path.push_back(u);
    ++result.hops;
  }
  return result;
}

RouteResult route(const Query& query, ExpertId start, const ExpertNetwork& net, TieBreak tie) {
  SplitMix64 unused(0);
  return route(query, start, net, ErrorModel{}, unused, tie);
}

}  // namespace expertroute
