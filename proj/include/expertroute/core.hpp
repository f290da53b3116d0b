#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace expertroute {

/// Skill level in one problem area.
using Level = std::int32_t;
/// Dense expert index in [0, n), assigned in construction order.
using ExpertId = std::uint32_t;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-area skill profile of one expert. Entries are non-negative.
class ExpertiseVector {
 public:
  ExpertiseVector() = default;
  explicit ExpertiseVector(std::vector<Level> entries);
  ExpertiseVector(std::initializer_list<Level> entries);

  std::size_t size() const { return entries_.size(); }
  Level operator[](std::size_t i) const { return entries_[i]; }
  std::span<const Level> entries() const { return entries_; }
  operator std::span<const Level>() const { return entries_; }

  friend bool operator==(const ExpertiseVector&, const ExpertiseVector&) = default;

 private:
  std::vector<Level> entries_;
};

// Expertise arithmetic. Distances accumulate in 64 bits.

std::int64_t l1_norm(std::span<const Level> v);

/// One-sided distance d(u->w) = sum_i max(w_i - u_i, 0). Asymmetric.
std::int64_t expertise_distance(std::span<const Level> u, std::span<const Level> w);

/// ||w - u||_1.
std::int64_t l1_difference(std::span<const Level> u, std::span<const Level> w);

/// True when w is componentwise <= u.
bool dominated_by(std::span<const Level> w, std::span<const Level> u);

/// Homophily predicate. Callers are responsible for excluding u == w as
/// experts; equal vectors are a valid local pair.
bool is_local_contact(std::span<const Level> u, std::span<const Level> w, Level delta);

enum class ModelKind { kUnified, kDiversified };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& s);

struct ModelConfig {
  ModelKind kind = ModelKind::kUnified;
  std::int64_t n = 0;
  std::int64_t h = 1;       // unified only
  std::int64_t m = 2;
  std::int64_t lambda = 0;  // diversified only
  Level delta = 2;
  std::int64_t k = 1;
  double r = 0.0;
  std::uint64_t seed = 0;
  // Stands in for r -> infinity: no heterophily edges at all.
  bool no_long_range = false;

  static ModelConfig unified(std::int64_t n, std::int64_t h, std::int64_t k, double r,
                             std::uint64_t seed);
  static ModelConfig diversified(std::int64_t m, std::int64_t lambda, std::int64_t k, double r,
                                 std::uint64_t seed);

  /// Throws ConfigError with a user-facing message.
  void validate() const;

  /// Columns (unified) or lambda (diversified).
  std::int64_t side() const { return kind == ModelKind::kUnified ? n / h : lambda; }
  /// Maximum level reachable in any area.
  Level max_level() const;
  /// h for unified, m for diversified.
  std::int64_t h_or_m() const { return kind == ModelKind::kUnified ? h : m; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Flat table of expertise vectors, row-major (n x m).
class ExpertTable {
 public:
  ExpertTable() = default;
  ExpertTable(std::size_t dims, std::vector<Level> levels);
  explicit ExpertTable(const std::vector<ExpertiseVector>& experts);

  std::size_t size() const { return dims_ == 0 ? 0 : levels_.size() / dims_; }
  std::size_t dims() const { return dims_; }

  std::span<const Level> operator[](ExpertId id) const {
    return {levels_.data() + static_cast<std::size_t>(id) * dims_, dims_};
  }
  Level level(ExpertId id, std::size_t area) const {
    return levels_[static_cast<std::size_t>(id) * dims_ + area];
  }
  ExpertiseVector vector(ExpertId id) const;
  const std::vector<Level>& raw() const { return levels_; }

  /// All w != u with some area strictly above u, in id order.
  std::vector<ExpertId> candidate_set(ExpertId u) const;

 private:
  std::size_t dims_ = 0;
  std::vector<Level> levels_;
};

/// Compressed adjacency list.
class Adjacency {
 public:
  Adjacency() : offsets_{0} {}
  explicit Adjacency(const std::vector<std::vector<ExpertId>>& lists);
  Adjacency(std::vector<std::size_t> offsets, std::vector<ExpertId> targets);

  std::size_t size() const { return offsets_.size() - 1; }
  std::span<const ExpertId> operator[](ExpertId u) const {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t edge_count() const { return targets_.size(); }

  friend bool operator==(const Adjacency&, const Adjacency&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<ExpertId> targets_;
};

/// Expert set plus substrate (local) and sampled long-range contacts.
/// Immutable once built.
class ExpertNetwork {
 public:
  ExpertNetwork(ModelConfig config, ExpertTable experts, Adjacency local, Adjacency long_range);

  const ModelConfig& config() const { return config_; }
  const ExpertTable& experts() const { return experts_; }
  const Adjacency& local_contacts() const { return local_; }
  const Adjacency& long_range_contacts() const { return long_range_; }

  std::size_t size() const { return experts_.size(); }
  std::span<const Level> expertise(ExpertId id) const { return experts_[id]; }

  std::vector<ExpertId> candidate_set(ExpertId u) const { return experts_.candidate_set(u); }

 private:
  ModelConfig config_;
  ExpertTable experts_;
  Adjacency local_;
  Adjacency long_range_;
};

/// A single-area query: area is 1-based, tau > 0.
struct Query {
  int area = 1;
  Level tau = 1;

  std::size_t area_index() const { return static_cast<std::size_t>(area - 1); }
  friend bool operator==(const Query&, const Query&) = default;
};

/// Throws InvalidInput if the query has no qualified expert in net.
void check_query(const Query& q, const ExpertNetwork& net);

}  // namespace expertroute
