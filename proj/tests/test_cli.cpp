#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "expertroute/cli.hpp"
#include "expertroute/core.hpp"

using namespace expertroute;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "expertroute");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "expertroute_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("formatting helpers") {
  CHECK(format_truncated(1.6386, 2) == "1.63");
  CHECK(format_truncated(1.2655, 2) == "1.26");
  CHECK(format_truncated(1.0, 2) == "1.00");
  CHECK(format_fixed(2.0 / 3.0, 3) == "0.667");
  const auto grid = parse_range("0:4:0.5");
  REQUIRE(grid.size() == 9);
  CHECK(grid.back() == 4.0);
  CHECK(parse_range("1:1:0.1") == std::vector<double>{1.0});
  CHECK_THROWS_AS(parse_range("0:4"), ConfigError);
  CHECK_THROWS_AS(parse_range("0:4:0"), ConfigError);
  CHECK_THROWS_AS(parse_range("4:0:1"), ConfigError);
  CHECK_THROWS_AS(parse_range("a:b:c"), ConfigError);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"teleport"}).code == kExitUsage);
  CHECK(run({"predict", "--n", "184"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("predict") {
  CHECK(run({"predict", "--n", "184", "--m", "2", "--k", "1", "--r1", "1.98", "--r2", "1.44"}).out == "1.63\n");
  CHECK(run({"predict", "--n", "122", "--m", "2", "--k", "1", "--r1", "1.24", "--r2", "1.04"}).out == "1.45\n");
  CHECK(run({"predict", "--n", "305", "--m", "2", "--k", "1", "--r1", "1.61", "--r2", "1.01"}).out == "2.87\n");
  CHECK(run({"predict", "--n", "266", "--m", "2", "--k", "1", "--r1", "1.14", "--r2", "1.04"}).out == "1.26\n");
  CHECK(run({"predict", "--n", "266", "--r1", "1.5", "--r2", "1.5"}).out == "1.00\n");
  const Run bad = run({"predict", "--n", "266", "--r1", "0.9", "--r2", "1.5"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("r1, r2 > 1") != std::string::npos);
}

TEST_CASE("generate") {
  const auto file = scratch("gen_unified.json");
  const Run u = run({"generate", "--model", "unified", "--n", "240", "--h", "4", "--r", "1", "--k", "1", "--seed",
                     "7", "--out", file.string()});
  REQUIRE(u.code == kExitOk);
  CHECK(u.out.rfind("model=unified n=240 ", 0) == 0);
  const auto j = nlohmann::json::parse(slurp(file));
  CHECK(j["experts"].size() == 240);
  CHECK(j["config"]["seed"] == 7);

  const auto div = scratch("gen_div.json");
  const Run d = run({"generate", "--model", "diversified", "--m", "3", "--lambda", "9", "--out", div.string()});
  REQUIRE(d.code == kExitOk);
  CHECK(nlohmann::json::parse(slurp(div))["experts"].size() == 729);

  const Run bad = run({"generate", "--model", "unified", "--n", "241", "--h", "4", "--out", file.string()});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("n must be divisible by h") != std::string::npos);

  CHECK(run({"generate", "--model", "unified", "--n", "240", "--h", "4", "--out", "/nonexistent/dir/x.json"}).code ==
        kExitFailure);
}

TEST_CASE("sweep grids") {
  const Run grid = run({"sweep", "--model", "unified", "--n", "240", "--h", "4,6,8", "--k", "1,2,3", "--r-range",
                       "0:4:0.5", "--realizations", "1", "--trials", "2", "--seed", "3"});
  REQUIRE(grid.code == kExitOk);
  CHECK(line_count(grid.out) == 82);
  CHECK(grid.out.rfind("model,n,h_or_m,k,r,c,mean_L,stderr_L,max_L,trials\n", 0) == 0);

  const Run robust = run({"sweep", "--model", "diversified", "--n", "729", "--m", "1,2,3", "--k", "3", "--r",
                          "0,0.5,1", "--c", "0,0.5,1,2", "--realizations", "1", "--trials", "2"});
  REQUIRE(robust.code == kExitOk);
  CHECK(line_count(robust.out) == 1 + 3 * 4 * 3);

  const Run one = run({"sweep", "--model", "unified", "--n", "40", "--h", "4", "--realizations", "1", "--trials",
                       "1"});
  REQUIRE(one.code == kExitOk);
  CHECK(line_count(one.out) == 2);
  CHECK(one.out.find("\nunified,40,4,1,0,0,") != std::string::npos);

  const Run json = run({"sweep", "--model", "unified", "--n", "40", "--h", "4", "--r", "0.5", "--realizations", "2",
                        "--trials", "3", "--format", "json"});
  REQUIRE(json.code == kExitOk);
  CHECK(nlohmann::json::parse(json.out)[0]["trials"] == 6);

  CHECK(run({"sweep", "--model", "unified", "--n", "40", "--h", "4", "--c", "-1"}).code == kExitUsage);
  CHECK(run({"sweep", "--model", "unified", "--n", "40", "--h", "4", "--format", "xml"}).code == kExitUsage);
  CHECK(run({"sweep", "--model", "diversified", "--n", "730", "--m", "3"}).code == kExitUsage);
}

TEST_CASE("sweep output is reproducible") {
  const auto a = scratch("sweep_a.csv"), b = scratch("sweep_b.csv");
  const auto ha = scratch("hist_a.csv"), hb = scratch("hist_b.csv");
  for (const auto& [out, hist] : {std::pair{a, ha}, std::pair{b, hb}}) {
    const Run r = run({"sweep", "--model", "diversified", "--m", "2", "--lambda", "9", "--k", "1,2", "--r", "0,2",
                       "--c", "1", "--realizations", "3", "--trials", "20", "--seed", "11", "--out", out.string(),
                       "--histogram-out", hist.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(line_count(r.out) == 4);
    CHECK(r.out.find("mean_L=") != std::string::npos);
  }
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(ha) == slurp(hb));
  CHECK(slurp(ha).rfind("model,n,h_or_m,k,r,c,bin_lo,bin_hi,probability\n", 0) == 0);

  const auto single = scratch("hist_single.csv");
  REQUIRE(run({"sweep", "--model", "diversified", "--m", "2", "--lambda", "9", "--realizations", "2", "--trials",
               "20", "--histogram-out", single.string(), "--bin-width", "0.05", "--out", scratch("s.csv").string()})
              .code == kExitOk);
  CHECK(slurp(single).rfind("bin_lo,bin_hi,probability\n0,0.05,", 0) == 0);
}

TEST_CASE("bounds") {
  const Run up = run({"bounds", "--model", "unified", "--n", "240", "--h", "4", "--r", "1", "--explicit-constants"});
  REQUIRE(up.code == kExitOk);
  CHECK(up.out == "upper_unified n=240 h_or_m=4 k=1 r=1 value=53.934\ncap_unified n=240 h_or_m=4 k=1 r=1 value=60.000\n");

  const Run low = run({"bounds", "--model", "diversified", "--n", "729", "--m", "1,2,3", "--k", "2", "--r", "2"});
  REQUIRE(low.code == kExitOk);
  CHECK(line_count(low.out) == 6);
  CHECK(low.out.find("lower_diversified n=729 h_or_m=2 k=2 r=2 value=3.674\n") != std::string::npos);
  CHECK(low.out.find("cap_diversified n=729 h_or_m=3 k=2 r=2 value=9.000\n") != std::string::npos);
}

TEST_CASE("distribution") {
  const Run d = run({"distribution", "--m", "2,3,4", "--n", "4096"});
  REQUIRE(d.code == kExitOk);
  std::istringstream in(d.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "m,lambda,phi,count,probability");
  std::map<int, long long> counts;
  std::map<int, double> prob;
  while (std::getline(in, line)) {
    int m = 0, lambda = 0, phi = 0;
    long long count = 0;
    double p = 0;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%d,%lld,%lf", &m, &lambda, &phi, &count, &p) == 5);
    counts[m] += count;
    prob[m] += p;
  }
  for (int m : {2, 3, 4}) {
    CHECK(counts[m] == 4096);
    CHECK(prob[m] == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(run({"distribution", "--m", "5", "--n", "4096"}).code == kExitUsage);
}

TEST_CASE("ingest") {
  const auto net = scratch("ingest_net.json");
  const auto experts = scratch("experts.csv"), edges = scratch("edges.csv");
  REQUIRE(run({"generate", "--model", "diversified", "--m", "2", "--lambda", "27", "--k", "14", "--r", "1.5",
               "--seed", "5", "--out", net.string(), "--experts-csv", experts.string(), "--edges-csv",
               edges.string()})
              .code == kExitOk);
  const Run fit = run({"ingest", "--experts", experts.string(), "--edges", edges.string()});
  REQUIRE(fit.code == kExitOk);
  double r = -1;
  REQUIRE(std::sscanf(fit.out.c_str(), "fitted_r=%lf", &r) == 1);
  CHECK(std::abs(r - 1.5) <= 0.1);
  CHECK(fit.out.find("\nn=729\nm=2\nedges=10192\n") != std::string::npos);

  const auto empty = scratch("empty_edges.csv");
  std::ofstream(empty) << "src_id,dst_id\n";
  const Run no_edges = run({"ingest", "--experts", experts.string(), "--edges", empty.string()});
  CHECK(no_edges.code == kExitUsage);
  CHECK(no_edges.err.find("no edges") != std::string::npos);

  const auto bad = scratch("bad_edges.csv");
  std::ofstream(bad) << "src_id,dst_id\n1,0\n";
  const Run violating = run({"ingest", "--experts", experts.string(), "--edges", bad.string()});
  CHECK(violating.code == kExitUsage);
  CHECK(violating.err.find(bad.string() + ":2: edge violates candidate set") != std::string::npos);

  CHECK(run({"ingest", "--experts", "/nonexistent.csv", "--edges", bad.string()}).code == kExitFailure);
}

}  // TEST_SUITE
