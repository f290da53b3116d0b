#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "expertroute/core.hpp"

namespace expertroute {

// Network files: {"config": {...}, "experts": [[...], ...], "long_range": [[...], ...]}.
// Local contacts are not stored; they are regenerated from the config on load.

nlohmann::json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::json& j);

nlohmann::json network_to_json(const ExpertNetwork& net);
/// Throws InvalidInput when the file is inconsistent with its own config.
ExpertNetwork network_from_json(const nlohmann::json& j);

void save_network(const std::string& path, const ExpertNetwork& net);
ExpertNetwork load_network(const std::string& path);

// Routing-log ingestion. experts.csv rows are `id,e_1,...,e_m`; edges.csv rows
// are `src_id,dst_id`. A leading non-numeric row is taken as a header. Ids are
// arbitrary non-negative integers mapped to dense indices in file order.

struct IngestIssue {
  std::string file;
  std::size_t line;
  std::string message;
};

struct IngestResult {
  ExpertTable experts;
  std::vector<std::int64_t> external_ids;  // dense index -> id from the file
  std::vector<std::pair<ExpertId, ExpertId>> edges;
  std::vector<IngestIssue> issues;

  bool ok() const { return issues.empty(); }
};

/// Parses both files; every problem is reported with its line number rather
/// than stopping at the first.
IngestResult ingest_csv(std::istream& experts_csv, std::istream& edges_csv);

void write_experts_csv(std::ostream& out, const ExpertTable& experts);
void write_edges_csv(std::ostream& out, const std::vector<std::pair<ExpertId, ExpertId>>& edges);

}  // namespace expertroute
