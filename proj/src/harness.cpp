#include "expertroute/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "expertroute/bounds.hpp"
#include "expertroute/models.hpp"

namespace expertroute {

Query gen_query(const ModelConfig& config, SplitMix64& rng) {
  Query q;
  q.area = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.m))) + 1;
  const Level top = config.max_level();
  q.tau = static_cast<Level>(rng.below(static_cast<std::uint64_t>(top))) + 1;
  return q;
}

Histogram::Histogram(double bin_width) : bin_width_(bin_width) {
  if (!(bin_width > 0.0)) throw InvalidInput("histogram bin width must be positive");
}

void Histogram::add(double value) {
  if (!(value >= 0.0)) throw InvalidInput("histogram values must be non-negative");
  // The relative nudge keeps exact multiples of the width (0.3 / 0.1) in the upper bin.
  const auto bin = static_cast<std::size_t>(std::floor(value / bin_width_ * (1.0 + 1e-12)));
  if (bin >= counts_.size()) counts_.resize(bin + 1, 0);
  ++counts_[bin];
  ++total_;
}

void Histogram::merge(const Histogram& other) {
  if (other.bin_width_ != bin_width_) throw InvalidInput("cannot merge histograms of different widths");
  if (other.counts_.size() > counts_.size()) counts_.resize(other.counts_.size(), 0);
  for (std::size_t i = 0; i < other.counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

std::vector<Histogram::Bin> Histogram::bins() const {
  std::vector<Bin> out;
  if (total_ == 0) return out;
  out.reserve(counts_.size());
  // Widths like 0.1 are reciprocals of integers; dividing keeps edges exact (0.3, not 0.30000000000000004).
  const double recip = std::round(1.0 / bin_width_);
  const bool reciprocal = std::abs(recip * bin_width_ - 1.0) < 1e-12;
  auto edge = [&](std::size_t i) {
    return reciprocal ? static_cast<double>(i) / recip : static_cast<double>(i) * bin_width_;
  };
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out.push_back({edge(i), edge(i + 1), static_cast<double>(counts_[i]) / static_cast<double>(total_)});
  }
  return out;
}

void accumulate_forwarding(const RouteResult& route, const ExpertNetwork& net, Histogram& hist) {
  for (std::size_t i = 0; i + 1 < route.path.size(); ++i) {
    const auto eu = net.expertise(route.path[i]);
    const auto ew = net.expertise(route.path[i + 1]);
    const std::int64_t norm = l1_norm(eu);
    if (norm == 0) throw InvalidInput("forwarding expert has zero total ability");
    hist.add(static_cast<double>(l1_difference(eu, ew)) / static_cast<double>(norm));
  }
}

Histogram forwarding_histogram(const std::vector<RouteResult>& routes, const ExpertNetwork& net,
                               double bin_width) {
  Histogram hist(bin_width);
  for (const auto& r : routes) accumulate_forwarding(r, net, hist);
  return hist;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("EXPERTROUTE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

// Per-realization accumulator; integer sums make merging order-free.
struct Tally {
  std::int64_t trials = 0;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  std::int64_t max_hops = 0;
  std::int64_t aborted = 0;
  std::int64_t errors = 0;
  std::int64_t cap_violations = 0;
  std::string first_error;
  Histogram histogram;
};

}  // namespace

std::vector<SweepReport> run_sweep(const SweepPoint& point, const std::vector<double>& r_grid,
                                   const std::vector<std::int64_t>& k_grid,
                                   const SweepOptions& opts) {
  if (r_grid.empty() || k_grid.empty()) throw InvalidInput("sweep grids must be non-empty");
  if (point.realizations < 1 || point.trials_per_realization < 1) {
    throw InvalidInput("realizations and trials must be at least 1");
  }
  if (point.c < 0.0) throw InvalidInput("error scaling c must be non-negative");

  const std::uint64_t master = point.config.seed;
  const std::size_t cells = r_grid.size() * k_grid.size();
  const auto reals = static_cast<std::size_t>(point.realizations);

  std::vector<ModelConfig> configs;
  configs.reserve(cells);
  for (double r : r_grid) {
    for (std::int64_t k : k_grid) {
      ModelConfig c = point.config;
      c.r = r;
      c.k = k;
      c.validate();
      configs.push_back(c);
    }
  }

  Tally blank;
  blank.histogram = Histogram(opts.bin_width);
  std::vector<Tally> tallies(cells * reals, blank);
  parallel_for(cells * reals, opts.threads, [&](std::size_t job) {
    const std::size_t cell = job / reals;
    const std::size_t realization = job % reals;
    const std::size_t ri = cell / k_grid.size();
    const std::size_t ki = cell % k_grid.size();
    Tally& t = tallies[job];

    ModelConfig config = configs[cell];
    config.seed = derive_seed(master, {ri, ki, realization});
    const std::int64_t cap = path_cap(config);
    std::optional<ExpertNetwork> net;
    try {
      net.emplace(build_network(config));
    } catch (const std::exception& e) {
      t.errors = point.trials_per_realization;
      t.first_error = e.what();
      return;
    }
    const ErrorModel error{point.c};
    const auto n = static_cast<std::uint64_t>(net->size());
    for (std::int64_t trial = 0; trial < point.trials_per_realization; ++trial) {
      SplitMix64 rng(derive_seed(master, {ri, ki, realization, static_cast<std::uint64_t>(trial)}));
      try {
        const Query q = gen_query(config, rng);
        const auto start = static_cast<ExpertId>(rng.below(n));
        const RouteResult res = route(q, start, *net, error, rng, opts.tie);
        ++t.trials;
        if (res.status == RouteStatus::kAbortedHopCap) ++t.aborted;
        if (res.hops > cap) ++t.cap_violations;
        t.sum += res.hops;
        t.sum_sq += res.hops * res.hops;
        t.max_hops = std::max(t.max_hops, res.hops);
        if (opts.collect_histogram) accumulate_forwarding(res, *net, t.histogram);
      } catch (const std::exception& e) {
        if (t.errors++ == 0) t.first_error = e.what();
      }
    }
  });

  std::vector<SweepReport> reports;
  reports.reserve(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const ModelConfig& config = configs[cell];
    SweepReport rep;
    rep.histogram = Histogram(opts.bin_width);
    rep.model = config.kind;
    rep.n = config.n;
    rep.h_or_m = config.h_or_m();
    rep.k = config.k;
    rep.r = config.r;
    rep.c = point.c;
    rep.no_long_range = config.no_long_range;
    rep.path_cap = path_cap(config);
    rep.master_seed = master;
    std::int64_t sum = 0, sum_sq = 0;
    for (std::size_t real = 0; real < reals; ++real) {
      const Tally& t = tallies[cell * reals + real];
      rep.trials += t.trials;
      sum += t.sum;
      sum_sq += t.sum_sq;
      rep.max_hops = std::max(rep.max_hops, t.max_hops);
      rep.aborted += t.aborted;
      rep.errors += t.errors;
      rep.cap_violations += t.cap_violations;
      if (rep.first_error.empty()) rep.first_error = t.first_error;
      rep.histogram.merge(t.histogram);
    }
    if (rep.trials > 0) {
      const auto N = static_cast<int128>(rep.trials);
      rep.mean_hops = static_cast<double>(sum) / static_cast<double>(rep.trials);
      if (rep.trials > 1) {
        const int128 scaled = N * sum_sq - static_cast<int128>(sum) * sum;  // N^2 * var_pop
        const double var = static_cast<double>(scaled) / static_cast<double>(N * (N - 1));
        rep.stderr_hops = std::sqrt(var / static_cast<double>(rep.trials));
      }
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

double exhaustive_mean_hops(const ExpertNetwork& net) {
  const ModelConfig& config = net.config();
  const Level top = config.max_level();
  std::int64_t total = 0;
  std::int64_t count = 0;
  for (int area = 1; area <= static_cast<int>(config.m); ++area) {
    for (Level tau = 1; tau <= top; ++tau) {
      for (ExpertId s = 0; s < net.size(); ++s) {
        total += route(Query{area, tau}, s, net).hops;
        ++count;
      }
    }
  }
  return static_cast<double>(total) / static_cast<double>(count);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepReport>& reports) {
  out << "model,n,h_or_m,k,r,c,mean_L,stderr_L,max_L,trials\n";
  for (const auto& r : reports) {
    out << to_string(r.model) << ',' << r.n << ',' << r.h_or_m << ',' << r.k << ','
        << (r.no_long_range ? std::string("inf") : format_double(r.r)) << ',' << format_double(r.c)
        << ',' << format_double(r.mean_hops) << ',' << format_double(r.stderr_hops) << ','
        << r.max_hops << ',' << r.trials << '\n';
  }
}

std::string sweep_json(const std::vector<SweepReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["model"] = to_string(r.model);
    j["n"] = r.n;
    j["h_or_m"] = r.h_or_m;
    j["k"] = r.k;
    if (r.no_long_range) {
      j["r"] = "inf";
    } else {
      j["r"] = r.r;
    }
    j["c"] = r.c;
    j["mean_L"] = r.mean_hops;
    j["stderr_L"] = r.stderr_hops;
    j["max_L"] = r.max_hops;
    j["trials"] = r.trials;
    j["aborted"] = r.aborted;
    j["errors"] = r.errors;
    j["cap_violations"] = r.cap_violations;
    j["path_cap"] = r.path_cap;
    j["master_seed"] = r.master_seed;
    if (r.histogram.total() > 0) {
      nlohmann::json bins = nlohmann::json::array();
      for (const auto& b : r.histogram.bins()) bins.push_back({b.lo, b.hi, b.probability});
      j["histogram"] = bins;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

void write_histogram_csv(std::ostream& out, const Histogram& hist) {
  out << "bin_lo,bin_hi,probability\n";
  for (const auto& b : hist.bins()) {
    out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << format_double(b.probability)
        << '\n';
  }
}

}  // namespace expertroute
