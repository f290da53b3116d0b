#include "expertroute/core.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace expertroute {

namespace {

void require_same_length(std::span<const Level> u, std::span<const Level> w) {
  if (u.size() != w.size()) {
    throw InvalidInput("expertise vectors differ in length (" + std::to_string(u.size()) +
                       " vs " + std::to_string(w.size()) + ")");
  }
}

}  // namespace

ExpertiseVector::ExpertiseVector(std::vector<Level> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidInput("expertise vector must have at least one area");
  for (Level e : entries_) {
    if (e < 0) throw InvalidInput("expertise levels must be non-negative");
  }
}

ExpertiseVector::ExpertiseVector(std::initializer_list<Level> entries)
    : ExpertiseVector(std::vector<Level>(entries)) {}

std::int64_t l1_norm(std::span<const Level> v) {
  std::int64_t sum = 0;
  for (Level e : v) sum += e < 0 ? -static_cast<std::int64_t>(e) : e;
  return sum;
}

std::int64_t expertise_distance(std::span<const Level> u, std::span<const Level> w) {
  require_same_length(u, w);
  std::int64_t d = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::int64_t diff = static_cast<std::int64_t>(w[i]) - u[i];
    if (diff > 0) d += diff;
  }
  return d;
}

std::int64_t l1_difference(std::span<const Level> u, std::span<const Level> w) {
  require_same_length(u, w);
  std::int64_t d = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::int64_t diff = static_cast<std::int64_t>(w[i]) - u[i];
    d += diff < 0 ? -diff : diff;
  }
  return d;
}

bool dominated_by(std::span<const Level> w, std::span<const Level> u) {
  require_same_length(u, w);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (w[i] > u[i]) return false;
  }
  return true;
}

bool is_local_contact(std::span<const Level> u, std::span<const Level> w, Level delta) {
  return l1_difference(u, w) <= delta;
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kUnified ? "unified" : "diversified";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "unified") return ModelKind::kUnified;
  if (s == "diversified") return ModelKind::kDiversified;
  throw ConfigError("unknown model '" + s + "' (expected unified or diversified)");
}

ModelConfig ModelConfig::unified(std::int64_t n, std::int64_t h, std::int64_t k, double r,
                                 std::uint64_t seed) {
  ModelConfig c;
  c.kind = ModelKind::kUnified;
  c.n = n;
  c.h = h;
  c.m = 2;
  c.lambda = 0;
  c.delta = 2;
  c.k = k;
  c.r = r;
  c.seed = seed;
  return c;
}

ModelConfig ModelConfig::diversified(std::int64_t m, std::int64_t lambda, std::int64_t k,
                                     double r, std::uint64_t seed) {
  ModelConfig c;
  c.kind = ModelKind::kDiversified;
  c.m = m;
  c.lambda = lambda;
  c.h = 1;
  c.delta = 1;
  c.k = k;
  c.r = r;
  c.seed = seed;
  c.n = 0;
  // n = lambda^m, computed with an overflow guard.
  if (m >= 1 && lambda >= 2) {
    constexpr std::int64_t kMaxExperts = std::numeric_limits<ExpertId>::max();
    std::int64_t n = 1;
    for (std::int64_t i = 0; i < m; ++i) {
      if (n > kMaxExperts / lambda) {
        n = -1;
        break;
      }
      n *= lambda;
    }
    c.n = n;
  }
  return c;
}

void ModelConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (!(r >= 0.0)) throw ConfigError("r must be non-negative");
  if (kind == ModelKind::kUnified) {
    if (m != 2) throw ConfigError("unified model requires m = 2");
    if (delta != 2) throw ConfigError("unified model requires delta = 2");
    if (h < 1) throw ConfigError("h must be at least 1");
    if (n < 1) throw ConfigError("n must be positive");
    if (n % h != 0) throw ConfigError("n must be divisible by h");
    if (n / h < 2) throw ConfigError("n/h must be at least 2");
    if (n > std::numeric_limits<ExpertId>::max()) throw ConfigError("n is too large");
  } else {
    if (delta != 1) throw ConfigError("diversified model requires delta = 1");
    if (m < 1) throw ConfigError("m must be at least 1");
    if (lambda < 2) throw ConfigError("lambda must be at least 2");
    if (n < 0) throw ConfigError("lambda^m overflows the expert id range");
    std::int64_t expect = 1;
    for (std::int64_t i = 0; i < m; ++i) expect *= lambda;
    if (n != expect) throw ConfigError("diversified model requires n = lambda^m");
  }
}

Level ModelConfig::max_level() const {
  return static_cast<Level>(kind == ModelKind::kUnified ? n / h - 1 : lambda);
}

ExpertTable::ExpertTable(std::size_t dims, std::vector<Level> levels)
    : dims_(dims), levels_(std::move(levels)) {
  if (dims_ == 0) throw InvalidInput("expert table needs at least one area");
  if (levels_.size() % dims_ != 0) throw InvalidInput("level count is not a multiple of m");
  for (Level e : levels_) {
    if (e < 0) throw InvalidInput("expertise levels must be non-negative");
  }
}

ExpertTable::ExpertTable(const std::vector<ExpertiseVector>& experts) {
  if (experts.empty()) return;
  dims_ = experts.front().size();
  levels_.reserve(experts.size() * dims_);
  for (const auto& e : experts) {
    if (e.size() != dims_) throw InvalidInput("experts have inconsistent dimension");
    levels_.insert(levels_.end(), e.entries().begin(), e.entries().end());
  }
}

ExpertiseVector ExpertTable::vector(ExpertId id) const {
  auto row = (*this)[id];
  return ExpertiseVector(std::vector<Level>(row.begin(), row.end()));
}

std::vector<ExpertId> ExpertTable::candidate_set(ExpertId u) const {
  std::vector<ExpertId> out;
  const auto eu = (*this)[u];
  const auto n = static_cast<ExpertId>(size());
  for (ExpertId w = 0; w < n; ++w) {
    if (w != u && !dominated_by((*this)[w], eu)) out.push_back(w);
  }
  return out;
}

Adjacency::Adjacency(const std::vector<std::vector<ExpertId>>& lists) : offsets_{0} {
  offsets_.reserve(lists.size() + 1);
  for (const auto& l : lists) {
    targets_.insert(targets_.end(), l.begin(), l.end());
    offsets_.push_back(targets_.size());
  }
}

Adjacency::Adjacency(std::vector<std::size_t> offsets, std::vector<ExpertId> targets)
    : offsets_(std::move(offsets)), targets_(std::move(targets)) {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != targets_.size() ||
      !std::is_sorted(offsets_.begin(), offsets_.end())) {
    throw InvalidInput("malformed adjacency offsets");
  }
}

ExpertNetwork::ExpertNetwork(ModelConfig config, ExpertTable experts, Adjacency local,
                             Adjacency long_range)
    : config_(config),
      experts_(std::move(experts)),
      local_(std::move(local)),
      long_range_(std::move(long_range)) {
  if (local_.size() != experts_.size() || long_range_.size() != experts_.size()) {
    throw InvalidInput("adjacency size does not match expert count");
  }
}

void check_query(const Query& q, const ExpertNetwork& net) {
  const auto m = net.experts().dims();
  if (q.area < 1 || static_cast<std::size_t>(q.area) > m) {
    throw InvalidInput("query area " + std::to_string(q.area) + " outside [1, " +
                       std::to_string(m) + "]");
  }
  if (q.tau < 1) throw InvalidInput("query difficulty must be positive");
  Level best = 0;
  for (ExpertId u = 0; u < net.size(); ++u) best = std::max(best, net.experts().level(u, q.area_index()));
  if (q.tau > best) {
    throw InvalidInput("no expert can solve query (area " + std::to_string(q.area) + ", tau " +
                       std::to_string(q.tau) + ")");
  }
}

}  // namespace expertroute
