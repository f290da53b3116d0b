#include "expertroute/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "expertroute/bounds.hpp"
#include "expertroute/harness.hpp"
#include "expertroute/io.hpp"
#include "expertroute/models.hpp"

namespace expertroute {

std::string format_truncated(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double t = std::trunc(v * scale + (v >= 0 ? 1e-9 : -1e-9)) / scale;
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << t;
  return os.str();
}

std::string format_fixed(double v, int decimals) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string field;
  while (std::getline(ss, field, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw ConfigError("bad range '" + spec + "' (expected start:stop:step)");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ConfigError("bad range '" + spec + "' (expected start:stop:step with step > 0)");
  }
  std::vector<double> out;
  const auto steps = static_cast<std::int64_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (std::int64_t i = 0; i <= steps; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return out;
}

namespace {

struct ModelArgs {
  std::string model = "unified";
  std::int64_t n = 0;
  std::vector<std::int64_t> h;
  std::vector<std::int64_t> m;
  std::int64_t lambda = 0;
  std::int64_t k = 1;
  double r = 0.0;
  std::uint64_t seed = 0;
  bool no_long_range = false;
};

void add_model_options(CLI::App* cmd, ModelArgs& a, bool lists) {
  cmd->add_option("--model", a.model, "unified or diversified")->check(CLI::IsMember({"unified", "diversified"}));
  cmd->add_option("--n", a.n, "number of experts");
  auto* h = cmd->add_option("--h", a.h, "rows of the unified grid");
  auto* m = cmd->add_option("--m", a.m, "problem areas (diversified)");
  if (lists) {
    h->delimiter(',');
    m->delimiter(',');
  } else {
    h->expected(1);
    m->expected(1);
  }
  cmd->add_option("--lambda", a.lambda, "max level per area (diversified)");
  cmd->add_option("--seed", a.seed, "master RNG seed");
  cmd->add_flag("--no-long-range", a.no_long_range, "drop heterophily edges (r -> infinity)");
}

std::int64_t integer_root(std::int64_t n, std::int64_t m) {
  const auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(m))));
  for (std::int64_t cand = std::max<std::int64_t>(guess - 1, 1); cand <= guess + 1; ++cand) {
    long double p = 1;
    for (std::int64_t i = 0; i < m; ++i) p *= static_cast<long double>(cand);
    if (p == static_cast<long double>(n)) return cand;
  }
  throw ConfigError("n must equal lambda^m for the diversified model");
}

ModelConfig make_config(const ModelArgs& a, std::int64_t h_or_m, std::int64_t k, double r) {
  ModelConfig c;
  if (parse_model_kind(a.model) == ModelKind::kUnified) {
    if (a.n <= 0) throw ConfigError("--n is required for the unified model");
    c = ModelConfig::unified(a.n, h_or_m, k, r, a.seed);
  } else {
    if (h_or_m < 1) throw ConfigError("m must be at least 1");
    std::int64_t lambda = a.lambda;
    if (lambda == 0) {
      if (a.n <= 0) throw ConfigError("diversified model needs --lambda or --n");
      lambda = integer_root(a.n, h_or_m);
    }
    c = ModelConfig::diversified(h_or_m, lambda, k, r, a.seed);
    if (a.n > 0 && a.n != c.n) throw ConfigError("n must equal lambda^m for the diversified model");
  }
  c.no_long_range = a.no_long_range;
  c.validate();
  return c;
}

std::vector<std::int64_t> shape_values(const ModelArgs& a) {
  const bool unified = parse_model_kind(a.model) == ModelKind::kUnified;
  const auto& v = unified ? a.h : a.m;
  if (v.empty()) throw ConfigError(unified ? "--h is required for the unified model" : "--m is required for the diversified model");
  return v;
}

// Output sink that is either a file or the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }
  bool is_file() const { return file_ != nullptr; }

 private:
  std::ostream& fallback_;
  std::unique_ptr<std::ofstream> file_;
};

int cmd_generate(const ModelArgs& a, const std::string& out_path, const std::string& experts_csv,
                 const std::string& edges_csv, std::ostream& out) {
  const auto shapes = shape_values(a);
  if (shapes.size() != 1) throw ConfigError("generate takes a single --h or --m");
  const ModelConfig config = make_config(a, shapes.front(), a.k, a.r);
  const ExpertNetwork net = build_network(config);
  save_network(out_path, net);
  if (!experts_csv.empty()) {
    std::ofstream f(experts_csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + experts_csv);
    write_experts_csv(f, net.experts());
  }
  if (!edges_csv.empty()) {
    std::ofstream f(edges_csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + edges_csv);
    write_edges_csv(f, long_range_edges(net));
  }
  out << "model=" << to_string(config.kind) << " n=" << net.size()
      << " local_contacts=" << net.local_contacts().edge_count()
      << " long_range_contacts=" << net.long_range_contacts().edge_count() << " file=" << out_path
      << '\n';
  return kExitOk;
}

struct SweepArgs {
  std::vector<std::int64_t> k{1};
  std::vector<double> r{0.0};
  std::string r_range;
  std::vector<double> c{0.0};
  std::int64_t realizations = 100;
  std::int64_t trials = 500;
  unsigned threads = 0;
  std::string format = "csv";
  std::string out;
  std::string histogram_out;
  double bin_width = 0.1;
};

int cmd_sweep(const ModelArgs& a, const SweepArgs& s, std::ostream& out, std::ostream& err) {
  const auto shapes = shape_values(a);
  const std::vector<double> r_grid = s.r_range.empty() ? s.r : parse_range(s.r_range);
  if (r_grid.empty() || s.k.empty() || s.c.empty()) throw ConfigError("sweep grids must be non-empty");
  for (double c : s.c) {
    if (!(c >= 0.0)) throw ConfigError("c must be non-negative");
  }

  SweepOptions opts;
  opts.threads = s.threads;
  opts.collect_histogram = !s.histogram_out.empty();
  opts.bin_width = s.bin_width;

  std::vector<SweepReport> reports;
  for (std::int64_t shape : shapes) {
    const ModelConfig base = make_config(a, shape, s.k.front(), r_grid.front());
    for (double c : s.c) {
      SweepPoint point{base, c, s.realizations, s.trials};
      auto part = run_sweep(point, r_grid, s.k, opts);
      reports.insert(reports.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
  }

  Sink sink(s.out, out);
  if (s.format == "json") {
    sink.stream() << sweep_json(reports);
  } else {
    write_sweep_csv(sink.stream(), reports);
  }

  if (opts.collect_histogram) {
    Sink hist(s.histogram_out, out);
    if (reports.size() == 1) {
      write_histogram_csv(hist.stream(), reports.front().histogram);
    } else {
      hist.stream() << "model,n,h_or_m,k,r,c,bin_lo,bin_hi,probability\n";
      for (const auto& rep : reports) {
        for (const auto& b : rep.histogram.bins()) {
          hist.stream() << to_string(rep.model) << ',' << rep.n << ',' << rep.h_or_m << ',' << rep.k
                        << ',' << (rep.no_long_range ? std::string("inf") : format_double(rep.r)) << ','
                        << format_double(rep.c) << ',' << format_double(b.lo) << ',' << format_double(b.hi) << ','
                        << format_double(b.probability) << '\n';
        }
      }
    }
  }

  std::int64_t violations = 0;
  for (const auto& rep : reports) {
    violations += rep.cap_violations;
    if (sink.is_file()) {
      out << to_string(rep.model) << " n=" << rep.n << " h_or_m=" << rep.h_or_m << " k=" << rep.k
          << " r=" << format_double(rep.r) << " c=" << format_double(rep.c)
          << " mean_L=" << format_fixed(rep.mean_hops, 3) << " stderr_L=" << format_fixed(rep.stderr_hops, 3)
          << " max_L=" << rep.max_hops << " trials=" << rep.trials << '\n';
    }
    if (rep.errors > 0) {
      err << "warning: " << rep.errors << " trial(s) failed at r=" << format_double(rep.r) << " k=" << rep.k
          << ": " << rep.first_error << '\n';
    }
  }
  if (violations > 0) {
    err << "error: " << violations << " route(s) exceeded the path-length cap\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_bounds(const ModelArgs& a, bool explicit_constants, std::optional<double> c0, std::ostream& out) {
  const auto shapes = shape_values(a);
  BoundOptions opts;
  opts.explicit_constants = explicit_constants;
  opts.c0 = c0;
  for (std::int64_t shape : shapes) {
    const ModelConfig config = make_config(a, shape, a.k, a.r);
    for (const auto& b : applicable_bounds(config, opts)) {
      out << to_string(b.kind) << " n=" << b.n << " h_or_m=" << b.h_or_m << " k=" << b.k
          << " r=" << format_double(b.r) << " value=" << format_fixed(b.value, 3) << '\n';
    }
  }
  return kExitOk;
}

int cmd_ingest(const std::string& experts_path, const std::string& edges_path, std::ostream& out,
               std::ostream& err) {
  std::ifstream experts(experts_path, std::ios::binary);
  if (!experts) throw std::runtime_error("cannot read " + experts_path);
  std::ifstream edges(edges_path, std::ios::binary);
  if (!edges) throw std::runtime_error("cannot read " + edges_path);
  const IngestResult data = ingest_csv(experts, edges);
  if (!data.ok()) {
    for (const auto& issue : data.issues) {
      const std::string& file = issue.file == "experts" ? experts_path : edges_path;
      err << file << ':' << issue.line << ": " << issue.message << '\n';
    }
    return kExitUsage;
  }
  const FitResult fit = fit_r(data.experts, data.edges);
  out << "fitted_r=" << format_fixed(fit.r, 3) << '\n'
      << "n=" << data.experts.size() << '\n'
      << "m=" << data.experts.dims() << '\n'
      << "edges=" << fit.edges << '\n'
      << "log_likelihood=" << format_fixed(fit.log_likelihood, 3) << '\n';
  return kExitOk;
}

ModelArgs diversified_args(const ModelArgs& a) {
  ModelArgs d;
  d.model = "diversified";
  d.n = a.n;
  d.m = a.m;
  d.lambda = a.lambda;
  return d;
}

int cmd_distribution(const ModelArgs& a, const std::string& out_path, std::ostream& out) {
  const auto shapes = shape_values(diversified_args(a));
  Sink sink(out_path, out);
  sink.stream() << "m,lambda,phi,count,probability\n";
  for (std::int64_t m : shapes) {
    const ModelConfig config = make_config(diversified_args(a), m, 1, 0.0);
    const AbilityHistogram hist = ability_histogram(config.m, config.lambda);
    const BigCount total = hist.total();
    for (const auto& [phi, count] : hist.counts) {
      const double p = static_cast<double>(boost::multiprecision::cpp_rational(count, total));
      sink.stream() << config.m << ',' << config.lambda << ',' << phi << ',' << count << ','
                    << format_double(p) << '\n';
    }
    if (sink.is_file()) {
      out << "m=" << config.m << " lambda=" << config.lambda << " n=" << config.n
          << " mean=" << format_fixed(hist.mean(), 3)
          << " expected=" << format_fixed(expected_ability(config.m, config.n), 3) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized query routing in expert networks", "expertroute"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  ModelArgs gen_model;
  std::string gen_out = "network.json", gen_experts_csv, gen_edges_csv;
  auto* gen = app.add_subcommand("generate", "build a network and write it as JSON");
  add_model_options(gen, gen_model, false);
  gen->add_option("--k", gen_model.k, "long-range contacts per expert");
  gen->add_option("--r", gen_model.r, "power-law exponent");
  gen->add_option("--out,-o", gen_out, "network JSON path");
  gen->add_option("--experts-csv", gen_experts_csv, "also export experts as CSV");
  gen->add_option("--edges-csv", gen_edges_csv, "also export long-range edges as CSV");

  ModelArgs sweep_model;
  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo average path length over an (r, k, c) grid");
  add_model_options(sweep, sweep_model, true);
  sweep->add_option("--k", sweep_args.k, "k values")->delimiter(',');
  auto* r_list = sweep->add_option("--r", sweep_args.r, "r values")->delimiter(',');
  sweep->add_option("--r-range", sweep_args.r_range, "r grid as start:stop:step")->excludes(r_list);
  sweep->add_option("--c", sweep_args.c, "error scaling values")->delimiter(',');
  sweep->add_option("--realizations", sweep_args.realizations, "networks per grid point");
  sweep->add_option("--trials", sweep_args.trials, "routes per network");
  sweep->add_option("--threads", sweep_args.threads, "worker threads (default: EXPERTROUTE_THREADS or all cores)");
  sweep->add_option("--format", sweep_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out,-o", sweep_args.out, "report path (default stdout)");
  sweep->add_option("--histogram-out", sweep_args.histogram_out, "forwarding histogram CSV path");
  sweep->add_option("--bin-width", sweep_args.bin_width, "histogram bin width");

  ModelArgs bounds_model;
  bool explicit_constants = false;
  std::optional<double> c0;
  auto* bounds = app.add_subcommand("bounds", "evaluate the applicable path-length bounds");
  add_model_options(bounds, bounds_model, true);
  bounds->add_option("--k", bounds_model.k, "long-range contacts per expert");
  bounds->add_option("--r", bounds_model.r, "power-law exponent");
  bounds->add_flag("--explicit-constants", explicit_constants, "use the proof constants");
  bounds->add_option("--c0", c0, "c0 for the explicit diversified upper bound (default 2m)");

  double pn = 0, pm = 2, pk = 1, r1 = 0, r2 = 0;
  auto* predict = app.add_subcommand("predict", "predicted L1/L2 ratio from the diversified lower bound");
  predict->add_option("--n", pn, "number of experts")->required();
  predict->add_option("--m", pm, "problem areas");
  predict->add_option("--k", pk, "long-range contacts per expert");
  predict->add_option("--r1", r1, "exponent before")->required();
  predict->add_option("--r2", r2, "exponent after")->required();

  std::string experts_path, edges_path;
  auto* ingest = app.add_subcommand("ingest", "fit r from an external expert list and routing edges");
  ingest->add_option("--experts", experts_path, "experts.csv (id,e_1,...,e_m)")->required();
  ingest->add_option("--edges", edges_path, "edges.csv (src_id,dst_id)")->required();

  ModelArgs dist_model;
  dist_model.model = "diversified";
  std::string dist_out;
  auto* dist = app.add_subcommand("distribution", "total-ability histogram of the diversified model");
  dist->add_option("--n", dist_model.n, "number of experts (lambda^m)");
  dist->add_option("--m", dist_model.m, "problem areas")->delimiter(',')->required();
  dist->add_option("--lambda", dist_model.lambda, "max level per area");
  dist->add_option("--out,-o", dist_out, "CSV path (default stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_model, gen_out, gen_experts_csv, gen_edges_csv, out);
    if (*sweep) return cmd_sweep(sweep_model, sweep_args, out, err);
    if (*bounds) return cmd_bounds(bounds_model, explicit_constants, c0, out);
    if (*predict) {
      out << format_truncated(predict_ratio(pn, pm, pk, r1, r2), 2) << '\n';
      return kExitOk;
    }
    if (*ingest) return cmd_ingest(experts_path, edges_path, out, err);
    if (*dist) return cmd_distribution(dist_model, dist_out, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace expertroute
