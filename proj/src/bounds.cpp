#include "expertroute/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace expertroute {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::domain_error(std::string(name) + " must be positive");
}

void require_upper_range(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("upper bound requires 0 <= r <= 1");
}

void require_lower_range(double r) {
  if (!(r > 1.0)) throw std::domain_error("lower bound requires r > 1");
}

double proof_factor(double r) { return 5.0 * std::min(r - 1.0, 1.0) / 192.0; }

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kUpperUnified: return "upper_unified";
    case BoundKind::kLowerUnified: return "lower_unified";
    case BoundKind::kUpperDiversified: return "upper_diversified";
    case BoundKind::kLowerDiversified: return "lower_diversified";
    case BoundKind::kCapUnified: return "cap_unified";
    case BoundKind::kCapDiversified: return "cap_diversified";
  }
  return "unknown";
}

double upper_unified(double n, double h, double r, const BoundOptions& opts) {
  require_upper_range(r);
  require_positive(n, "n");
  require_positive(h, "h");
  if (opts.explicit_constants) return 2.0 * std::pow(std::log(3.0 * n / h), r + 1.0);
  return std::pow(std::log(n / h), r + 1.0);
}

double lower_unified(double n, double h, double k, double r, const BoundOptions& opts) {
  require_lower_range(r);
  require_positive(n, "n");
  require_positive(h, "h");
  require_positive(k, "k");
  const double shape = std::pow(k, -1.0 / r) * std::pow(n / h, (r - 1.0) / r);
  return opts.explicit_constants ? proof_factor(r) * shape : shape;
}

double upper_diversified(double n, double m, double r, const BoundOptions& opts) {
  require_upper_range(r);
  require_positive(n, "n");
  require_positive(m, "m");
  if (opts.explicit_constants) {
    const double lambda = std::pow(n, 1.0 / m);
    const double c0 = opts.c0.value_or(2.0 * m);
    return c0 * m * std::pow(std::log(3.0 * m * lambda), r + 1.0);
  }
  return std::pow(m, -r) * std::pow(std::log(n), r + 1.0);
}

double lower_diversified(double n, double m, double k, double r, const BoundOptions& opts) {
  require_lower_range(r);
  require_positive(n, "n");
  require_positive(m, "m");
  require_positive(k, "k");
  const double shape = std::pow(k, -1.0 / r) * std::pow(n, (r - 1.0) / (m * r));
  return opts.explicit_constants ? proof_factor(r) * shape : shape;
}

std::int64_t path_cap(const ModelConfig& config) {
  config.validate();
  return config.kind == ModelKind::kUnified ? config.n / config.h : config.lambda;
}

std::vector<BoundValue> applicable_bounds(const ModelConfig& config, const BoundOptions& opts) {
  const auto cap = path_cap(config);
  const auto n = static_cast<double>(config.n);
  const bool unified = config.kind == ModelKind::kUnified;
  const auto hm = config.h_or_m();
  std::vector<BoundValue> out;
  auto push = [&](BoundKind kind, double v) {
    out.push_back({kind, v, config.n, hm, config.k, config.r});
  };
  if (config.r <= 1.0) {
    push(unified ? BoundKind::kUpperUnified : BoundKind::kUpperDiversified,
         unified ? upper_unified(n, static_cast<double>(config.h), config.r, opts)
                 : upper_diversified(n, static_cast<double>(config.m), config.r, opts));
  } else {
    push(unified ? BoundKind::kLowerUnified : BoundKind::kLowerDiversified,
         unified ? lower_unified(n, static_cast<double>(config.h), static_cast<double>(config.k),
                                 config.r, opts)
                 : lower_diversified(n, static_cast<double>(config.m),
                                     static_cast<double>(config.k), config.r, opts));
  }
  push(unified ? BoundKind::kCapUnified : BoundKind::kCapDiversified, static_cast<double>(cap));
  return out;
}

double predict_ratio(double n, double m, double k, double r1, double r2) {
  if (!(r1 > 1.0) || !(r2 > 1.0)) throw std::domain_error("predict_ratio requires r1, r2 > 1");
  if (r1 == r2) return 1.0;
  return lower_diversified(n, m, k, r1) / lower_diversified(n, m, k, r2);
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // The interior minimum may sit on an endpoint of the search interval.
  double best = (a + b) / 2.0;
  double fbest = f(best);
  for (double edge : {lo, hi}) {
    if (std::abs(best - edge) <= tol) {
      const double fe = f(edge);
      if (fe <= fbest) {
        best = edge;
        fbest = fe;
      }
    }
  }
  return best;
}

EdgeLikelihood::EdgeLikelihood(const ExpertTable& experts,
                               const std::vector<std::pair<ExpertId, ExpertId>>& edges) {
  if (edges.empty()) throw InvalidInput("no edges to fit");
  const auto n = static_cast<ExpertId>(experts.size());
  std::map<ExpertId, std::int64_t> per_source;
  for (const auto& [src, dst] : edges) {
    if (src >= n || dst >= n) throw InvalidInput("edge references an unknown expert");
    const std::int64_t d = expertise_distance(experts[src], experts[dst]);
    if (src == dst || d == 0) {
      throw InvalidInput("edge " + std::to_string(src) + " -> " + std::to_string(dst) +
                         " violates candidate set");
    }
    sum_log_distance_ += std::log(static_cast<double>(d));
    ++per_source[src];
  }
  edge_count_ = edges.size();
  for (const auto& [src, count] : per_source) {
    std::map<std::int64_t, std::int64_t> shells;
    const auto es = experts[src];
    for (ExpertId w = 0; w < n; ++w) {
      const std::int64_t d = expertise_distance(es, experts[w]);
      if (d > 0) ++shells[d];
    }
    sources_.push_back({count, {shells.begin(), shells.end()}});
  }
}

double EdgeLikelihood::operator()(double r) const {
  double ll = -r * sum_log_distance_;
  for (const auto& s : sources_) {
    double z = 0.0;
    for (const auto& [d, cnt] : s.shells) {
      z += static_cast<double>(cnt) * std::exp(-r * std::log(static_cast<double>(d)));
    }
    ll -= static_cast<double>(s.edge_count) * std::log(z);
  }
  return ll;
}

FitResult fit_r(const ExpertTable& experts, const std::vector<std::pair<ExpertId, ExpertId>>& edges,
                const FitOptions& opts) {
  if (!(opts.r_max > opts.r_min) || !(opts.tolerance > 0.0)) {
    throw InvalidInput("fit_r needs r_min < r_max and a positive tolerance");
  }
  const EdgeLikelihood ll(experts, edges);
  const double r = golden_section_minimize([&](double x) { return -ll(x); }, opts.r_min,
                                           opts.r_max, opts.tolerance);
  return {r, ll(r), ll.edges(), ll.sources()};
}

FitResult fit_r(const ExpertNetwork& net, const std::vector<std::pair<ExpertId, ExpertId>>& edges,
                const FitOptions& opts) {
  return fit_r(net.experts(), edges, opts);
}

std::vector<std::pair<ExpertId, ExpertId>> long_range_edges(const ExpertNetwork& net) {
  std::vector<std::pair<ExpertId, ExpertId>> out;
  out.reserve(net.long_range_contacts().edge_count());
  for (ExpertId u = 0; u < net.size(); ++u) {
    for (ExpertId w : net.long_range_contacts()[u]) out.emplace_back(u, w);
  }
  return out;
}

}  // namespace expertroute
