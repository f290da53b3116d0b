#include "expertroute/models.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace expertroute {

namespace mp = boost::multiprecision;

ExpertTable unified_experts(std::int64_t n, std::int64_t h) {
  const std::int64_t cols = n / h;
  std::vector<Level> levels;
  levels.reserve(static_cast<std::size_t>(n) * 2);
  for (std::int64_t row = 0; row < h; ++row) {
    for (std::int64_t col = 0; col < cols; ++col) {
      levels.push_back(static_cast<Level>(col));
      levels.push_back(static_cast<Level>(cols - 1 - col));
    }
  }
  return ExpertTable(2, std::move(levels));
}

ExpertTable diversified_experts(std::int64_t m, std::int64_t lambda) {
  std::int64_t n = 1;
  for (std::int64_t i = 0; i < m; ++i) n *= lambda;
  std::vector<Level> levels(static_cast<std::size_t>(n * m));
  for (std::int64_t id = 0; id < n; ++id) {
    std::int64_t rest = id;
    for (std::int64_t j = 0; j < m; ++j) {
      levels[static_cast<std::size_t>(id * m + j)] = static_cast<Level>(rest % lambda + 1);
      rest /= lambda;
    }
  }
  return ExpertTable(static_cast<std::size_t>(m), std::move(levels));
}

Adjacency unified_local_contacts(std::int64_t n, std::int64_t h) {
  const std::int64_t cols = n / h;
  std::vector<std::size_t> offsets{0};
  std::vector<ExpertId> targets;
  targets.reserve(static_cast<std::size_t>(n * (3 * h - 1)));
  for (std::int64_t row = 0; row < h; ++row) {
    for (std::int64_t col = 0; col < cols; ++col) {
      const std::int64_t self = row * cols + col;
      const std::int64_t lo = std::max<std::int64_t>(col - 1, 0);
      const std::int64_t hi = std::min<std::int64_t>(col + 1, cols - 1);
      for (std::int64_t r2 = 0; r2 < h; ++r2) {
        for (std::int64_t c2 = lo; c2 <= hi; ++c2) {
          const std::int64_t w = r2 * cols + c2;
          if (w != self) targets.push_back(static_cast<ExpertId>(w));
        }
      }
      offsets.push_back(targets.size());
    }
  }
  return Adjacency(std::move(offsets), std::move(targets));
}

Adjacency diversified_local_contacts(std::int64_t m, std::int64_t lambda) {
  std::int64_t n = 1;
  for (std::int64_t i = 0; i < m; ++i) n *= lambda;
  std::vector<std::size_t> offsets{0};
  std::vector<ExpertId> targets;
  std::vector<ExpertId> scratch;
  for (std::int64_t id = 0; id < n; ++id) {
    scratch.clear();
    std::int64_t stride = 1;
    std::int64_t rest = id;
    for (std::int64_t j = 0; j < m; ++j) {
      const std::int64_t coord = rest % lambda;
      rest /= lambda;
      if (coord > 0) scratch.push_back(static_cast<ExpertId>(id - stride));
      if (coord + 1 < lambda) scratch.push_back(static_cast<ExpertId>(id + stride));
      stride *= lambda;
    }
    std::sort(scratch.begin(), scratch.end());
    targets.insert(targets.end(), scratch.begin(), scratch.end());
    offsets.push_back(targets.size());
  }
  return Adjacency(std::move(offsets), std::move(targets));
}

Adjacency brute_force_local_contacts(const ExpertTable& experts, Level delta) {
  const auto n = static_cast<ExpertId>(experts.size());
  std::vector<std::vector<ExpertId>> lists(n);
  for (ExpertId u = 0; u < n; ++u) {
    for (ExpertId w = 0; w < n; ++w) {
      if (w != u && is_local_contact(experts[u], experts[w], delta)) lists[u].push_back(w);
    }
  }
  return Adjacency(lists);
}

LongRangeSampler::LongRangeSampler(const ExpertTable& experts, double r)
    : experts_(&experts), r_(r) {
  if (!(r >= 0.0)) throw InvalidInput("r must be non-negative");
  std::int64_t max_d = 0;
  for (std::size_t a = 0; a < experts.dims(); ++a) {
    Level lo = 0, hi = 0;
    for (ExpertId u = 0; u < experts.size(); ++u) {
      const Level e = experts.level(u, a);
      if (u == 0 || e < lo) lo = e;
      if (u == 0 || e > hi) hi = e;
    }
    max_d += static_cast<std::int64_t>(hi) - lo;
  }
  weights_.resize(static_cast<std::size_t>(max_d) + 1, 0.0);
  for (std::int64_t d = 1; d <= max_d; ++d) {
    weights_[static_cast<std::size_t>(d)] = std::exp(-r_ * std::log(static_cast<double>(d)));
  }
  ids_.reserve(experts.size());
  cumulative_.reserve(experts.size());
}

double LongRangeSampler::fill(ExpertId u) {
  ids_.clear();
  cumulative_.clear();
  const auto eu = (*experts_)[u];
  const auto n = static_cast<ExpertId>(experts_->size());
  double total = 0.0;
  for (ExpertId w = 0; w < n; ++w) {
    const auto ew = (*experts_)[w];
    std::int64_t d = 0;
    for (std::size_t i = 0; i < eu.size(); ++i) {
      const std::int64_t diff = static_cast<std::int64_t>(ew[i]) - eu[i];
      if (diff > 0) d += diff;
    }
    if (d == 0) continue;  // dominated (this includes u itself)
    total += weights_[static_cast<std::size_t>(d)];
    ids_.push_back(w);
    cumulative_.push_back(total);
  }
  return total;
}

std::vector<ExpertId> LongRangeSampler::sample(ExpertId u, std::int64_t k, SplitMix64& rng) {
  std::vector<ExpertId> out;
  const double total = fill(u);
  if (ids_.empty()) return out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::int64_t draw = 0; draw < k; ++draw) {
    const double target = rng.uniform() * total;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) --it;  // target rounded up to total
    out.push_back(ids_[static_cast<std::size_t>(it - cumulative_.begin())]);
  }
  return out;
}

std::vector<LongRangeSampler::Candidate> LongRangeSampler::distribution(ExpertId u) {
  const double total = fill(u);
  std::vector<Candidate> out;
  out.reserve(ids_.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    out.push_back({ids_[i], (cumulative_[i] - prev) / total});
    prev = cumulative_[i];
  }
  return out;
}

std::vector<ExpertId> sample_long_range(ExpertId u, const ExpertTable& experts, std::int64_t k,
                                        double r, SplitMix64& rng) {
  LongRangeSampler sampler(experts, r);
  return sampler.sample(u, k, rng);
}

Adjacency sample_long_range_layer(const ExpertTable& experts, std::int64_t k, double r,
                                  std::uint64_t seed) {
  LongRangeSampler sampler(experts, r);
  std::vector<std::size_t> offsets{0};
  std::vector<ExpertId> targets;
  targets.reserve(experts.size() * static_cast<std::size_t>(k));
  const auto n = static_cast<ExpertId>(experts.size());
  for (ExpertId u = 0; u < n; ++u) {
    SplitMix64 rng = expert_stream(seed, u);
    const auto drawn = sampler.sample(u, k, rng);
    targets.insert(targets.end(), drawn.begin(), drawn.end());
    offsets.push_back(targets.size());
  }
  return Adjacency(std::move(offsets), std::move(targets));
}

namespace {

Adjacency substrate_for(const ModelConfig& config) {
  return config.kind == ModelKind::kUnified ? unified_local_contacts(config.n, config.h)
                                            : diversified_local_contacts(config.m, config.lambda);
}

Adjacency long_range_for(const ModelConfig& config, const ExpertTable& experts) {
  if (config.no_long_range) {
    return Adjacency(std::vector<std::size_t>(experts.size() + 1, 0), {});
  }
  return sample_long_range_layer(experts, config.k, config.r, config.seed);
}

}  // namespace

ExpertNetwork build_unified(const ModelConfig& config) {
  if (config.kind != ModelKind::kUnified) throw ConfigError("expected a unified-model config");
  config.validate();
  ExpertTable experts = unified_experts(config.n, config.h);
  Adjacency lr = long_range_for(config, experts);
  return ExpertNetwork(config, std::move(experts), substrate_for(config), std::move(lr));
}

ExpertNetwork build_diversified(const ModelConfig& config) {
  if (config.kind != ModelKind::kDiversified) {
    throw ConfigError("expected a diversified-model config");
  }
  config.validate();
  ExpertTable experts = diversified_experts(config.m, config.lambda);
  Adjacency lr = long_range_for(config, experts);
  return ExpertNetwork(config, std::move(experts), substrate_for(config), std::move(lr));
}

ExpertNetwork build_network(const ModelConfig& config) {
  return config.kind == ModelKind::kUnified ? build_unified(config) : build_diversified(config);
}

ExpertNetwork assemble_network(const ModelConfig& config, ExpertTable experts,
                               Adjacency long_range) {
  config.validate();
  const ExpertTable expected = config.kind == ModelKind::kUnified
                                   ? unified_experts(config.n, config.h)
                                   : diversified_experts(config.m, config.lambda);
  if (expected.raw() != experts.raw() || expected.dims() != experts.dims()) {
    throw InvalidInput("expert vectors do not match the model configuration");
  }
  if (long_range.size() != experts.size()) {
    throw InvalidInput("long-range list count does not match expert count");
  }
  for (ExpertId u = 0; u < experts.size(); ++u) {
    const auto lr = long_range[u];
    if (config.no_long_range ? !lr.empty() : lr.size() > static_cast<std::size_t>(config.k)) {
      throw InvalidInput("expert " + std::to_string(u) + " has too many long-range contacts");
    }
    for (ExpertId w : lr) {
      if (w >= experts.size() || w == u || dominated_by(experts[w], experts[u])) {
        throw InvalidInput("long-range contact " + std::to_string(u) + " -> " + std::to_string(w) +
                           " violates candidate set");
      }
    }
  }
  return ExpertNetwork(config, std::move(experts), substrate_for(config), std::move(long_range));
}

BigCount binomial(std::int64_t a, std::int64_t b) {
  if (b < 0 || a < 0 || a < b) return 0;
  b = std::min(b, a - b);
  BigCount result = 1;
  for (std::int64_t i = 1; i <= b; ++i) {
    result *= (a - b + i);
    result /= i;
  }
  return result;
}

BigCount ability_count(std::int64_t phi, std::int64_t m, std::int64_t lambda) {
  if (m < 1 || lambda < 1) throw InvalidInput("ability_count requires m >= 1 and lambda >= 1");
  if (phi < m || phi > m * lambda) return 0;
  const std::int64_t upper = std::min(m, (phi - m) / lambda);
  BigCount sum = 0;
  for (std::int64_t q = 0; q <= upper; ++q) {
    BigCount term = binomial(m, q) * binomial(phi - 1 - q * lambda, m - 1);
    if (q % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum;
}

BigCount AbilityHistogram::total() const {
  BigCount t = 0;
  for (const auto& [phi, c] : counts) t += c;
  return t;
}

double AbilityHistogram::mean() const {
  BigCount num = 0;
  for (const auto& [phi, c] : counts) num += c * phi;
  const BigCount den = total();
  if (den == 0) return 0.0;
  return static_cast<double>(mp::cpp_rational(num, den));
}

AbilityHistogram ability_histogram(std::int64_t m, std::int64_t lambda) {
  AbilityHistogram hist;
  hist.m = m;
  hist.lambda = lambda;
  for (std::int64_t phi = m; phi <= m * lambda; ++phi) hist.counts[phi] = ability_count(phi, m, lambda);
  return hist;
}

double expected_ability(std::int64_t m, std::int64_t n) {
  if (m < 1 || n < 1) throw InvalidInput("expected_ability requires m >= 1 and n >= 1");
  const double root = std::pow(static_cast<double>(n), 1.0 / static_cast<double>(m));
  const auto lambda = static_cast<std::int64_t>(std::llround(root));
  BigCount check = 1;
  for (std::int64_t i = 0; i < m; ++i) check *= lambda;
  const double side = check == n ? static_cast<double>(lambda) : root;
  return (static_cast<double>(m) + static_cast<double>(m) * side) / 2.0;
}

}  // namespace expertroute
