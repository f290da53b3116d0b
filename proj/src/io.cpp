#include "expertroute/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "expertroute/models.hpp"

namespace expertroute {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
  json j;
  j["model"] = to_string(c.kind);
  j["n"] = c.n;
  j["h"] = c.h;
  j["m"] = c.m;
  j["lambda"] = c.lambda;
  j["delta"] = c.delta;
  j["k"] = c.k;
  j["r"] = c.r;
  j["seed"] = c.seed;
  j["no_long_range"] = c.no_long_range;
  return j;
}

ModelConfig config_from_json(const json& j) {
  try {
    const ModelKind kind = parse_model_kind(j.at("model").get<std::string>());
    ModelConfig c = kind == ModelKind::kUnified
                        ? ModelConfig::unified(j.at("n").get<std::int64_t>(),
                                               j.at("h").get<std::int64_t>(),
                                               j.at("k").get<std::int64_t>(),
                                               j.at("r").get<double>(),
                                               j.at("seed").get<std::uint64_t>())
                        : ModelConfig::diversified(j.at("m").get<std::int64_t>(),
                                                   j.at("lambda").get<std::int64_t>(),
                                                   j.at("k").get<std::int64_t>(),
                                                   j.at("r").get<double>(),
                                                   j.at("seed").get<std::uint64_t>());
    c.no_long_range = j.value("no_long_range", false);
    c.validate();
    if (j.contains("n") && j["n"].get<std::int64_t>() != c.n) {
      throw InvalidInput("config n does not equal lambda^m");
    }
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed network config: ") + e.what());
  }
}

json network_to_json(const ExpertNetwork& net) {
  json j;
  j["config"] = config_to_json(net.config());
  json experts = json::array();
  for (ExpertId u = 0; u < net.size(); ++u) {
    auto row = net.expertise(u);
    experts.push_back(std::vector<Level>(row.begin(), row.end()));
  }
  j["experts"] = std::move(experts);
  json lr = json::array();
  for (ExpertId u = 0; u < net.size(); ++u) {
    auto row = net.long_range_contacts()[u];
    lr.push_back(std::vector<ExpertId>(row.begin(), row.end()));
  }
  j["long_range"] = std::move(lr);
  return j;
}

ExpertNetwork network_from_json(const json& j) {
  try {
    const ModelConfig config = config_from_json(j.at("config"));
    std::vector<ExpertiseVector> experts;
    for (const auto& row : j.at("experts")) experts.emplace_back(row.get<std::vector<Level>>());
    std::vector<std::vector<ExpertId>> lr;
    for (const auto& row : j.at("long_range")) lr.push_back(row.get<std::vector<ExpertId>>());
    return assemble_network(config, ExpertTable(experts), Adjacency(lr));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed network file: ") + e.what());
  }
}

void save_network(const std::string& path, const ExpertNetwork& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << network_to_json(net).dump() << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

ExpertNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  return network_from_json(j);
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_int(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Rows of integer fields, skipping blank lines and a leading header.
struct Row {
  std::size_t line;
  std::vector<std::int64_t> values;
};

std::vector<Row> read_rows(std::istream& in, const std::string& file, std::vector<IngestIssue>& issues) {
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    Row row{lineno, {}};
    bool numeric = true;
    for (const auto& f : fields) {
      std::int64_t v = 0;
      if (!parse_int(f, v)) {
        numeric = false;
        break;
      }
      row.values.push_back(v);
    }
    if (!numeric) {
      if (!seen_data) {
        seen_data = true;  // header
        continue;
      }
      issues.push_back({file, lineno, "malformed row (expected integers)"});
      continue;
    }
    seen_data = true;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

IngestResult ingest_csv(std::istream& experts_csv, std::istream& edges_csv) {
  IngestResult result;
  const auto expert_rows = read_rows(experts_csv, "experts", result.issues);
  std::unordered_map<std::int64_t, ExpertId> index;
  std::vector<Level> levels;
  std::size_t dims = 0;
  for (const auto& row : expert_rows) {
    if (row.values.size() < 2) {
      result.issues.push_back({"experts", row.line, "row needs an id and at least one level"});
      continue;
    }
    if (dims == 0) dims = row.values.size() - 1;
    if (row.values.size() - 1 != dims) {
      result.issues.push_back({"experts", row.line,
                               "expected " + std::to_string(dims) + " levels, found " +
                                   std::to_string(row.values.size() - 1)});
      continue;
    }
    const std::int64_t id = row.values[0];
    bool bad = id < 0;
    for (std::size_t i = 1; i < row.values.size(); ++i) {
      bad = bad || row.values[i] < 0 || row.values[i] > std::numeric_limits<Level>::max();
    }
    if (bad) {
      result.issues.push_back({"experts", row.line, "ids and levels must be non-negative"});
      continue;
    }
    if (index.count(id) != 0) {
      result.issues.push_back({"experts", row.line, "duplicate expert id " + std::to_string(id)});
      continue;
    }
    index.emplace(id, static_cast<ExpertId>(result.external_ids.size()));
    result.external_ids.push_back(id);
    for (std::size_t i = 1; i < row.values.size(); ++i) levels.push_back(static_cast<Level>(row.values[i]));
  }
  if (dims > 0) result.experts = ExpertTable(dims, std::move(levels));
  if (result.external_ids.empty()) result.issues.push_back({"experts", 0, "no experts"});

  const auto edge_rows = read_rows(edges_csv, "edges", result.issues);
  for (const auto& row : edge_rows) {
    if (row.values.size() != 2) {
      result.issues.push_back({"edges", row.line, "expected src_id,dst_id"});
      continue;
    }
    auto src = index.find(row.values[0]);
    auto dst = index.find(row.values[1]);
    if (src == index.end() || dst == index.end()) {
      result.issues.push_back({"edges", row.line, "dangling expert id"});
      continue;
    }
    const auto es = result.experts[src->second];
    const auto ed = result.experts[dst->second];
    if (src->second == dst->second || dominated_by(ed, es)) {
      result.issues.push_back({"edges", row.line, "edge violates candidate set"});
      continue;
    }
    result.edges.emplace_back(src->second, dst->second);
  }
  if (edge_rows.empty()) result.issues.push_back({"edges", 0, "no edges"});
  return result;
}

void write_experts_csv(std::ostream& out, const ExpertTable& experts) {
  out << "id";
  for (std::size_t i = 1; i <= experts.dims(); ++i) out << ",e_" << i;
  out << '\n';
  for (ExpertId u = 0; u < experts.size(); ++u) {
    out << u;
    for (Level e : experts[u]) out << ',' << e;
    out << '\n';
  }
}

void write_edges_csv(std::ostream& out, const std::vector<std::pair<ExpertId, ExpertId>>& edges) {
  out << "src_id,dst_id\n";
  for (const auto& [s, d] : edges) out << s << ',' << d << '\n';
}

}  // namespace expertroute
