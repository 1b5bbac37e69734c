#include "gsq/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gsq/census.hpp"
#include "gsq/io.hpp"

namespace gsq {
namespace {

struct ClusterOpts {
  std::string input;
  std::string output;
  std::string stats_path;
  std::string mode = "exact";
  std::string horizon;
  double epsilon = 1e-9;
  double alpha = 0.25;
  int instances = 8;
  bool oracle = false;
  std::uint64_t seed = 1;
};

struct CensusOpts {
  int d = 1;
  std::uint64_t nmin = 256, nmax = 4096;
  std::string dist = "uniform";
  std::uint64_t seed = 1;
  double alpha = 0.25;
  std::string output;
};

struct GenOpts {
  std::uint64_t n = 100;
  std::string dist = "uniform";
  double weight_ratio = 10000.0;
  std::int64_t coord_max = 1000000;
  std::uint64_t seed = 1;
  std::string output;
};

std::pair<std::uint32_t, std::uint32_t> alpha_fraction(double alpha) {
  if (!(alpha > 2.0 / 11.0 && alpha <= 0.2929))
    throw input_error("alpha must lie in (2/11, 1 - sqrt(2)/2]");
  return {static_cast<std::uint32_t>(std::llround(alpha * 1000000.0)), 1000000u};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw input_error("cannot open output file: " + path);
  return f;
}

std::vector<InputRecord> read_records(const std::string& path) {
  if (path == "-") return parse_records(std::cin, "");
  std::ifstream f(path);
  if (!f) throw input_error("cannot open input file: " + path);
  return parse_records(f, path);
}

template <class M>
int run_cluster(const ClusterOpts& o, std::ostream& out, std::ostream& err) {
  const auto recs = read_records(o.input);
  const auto pts = to_points<M>(recs);
  EngineConfig cfg;
  cfg.instances = o.instances;
  std::tie(cfg.alpha_num, cfg.alpha_den) = alpha_fraction(o.alpha);
  cfg.eps = o.epsilon;
  std::optional<typename M::Scalar> horizon;
  if (!o.horizon.empty()) horizon = parse_scalar<M>(o.horizon);

  RunStats stats;
  const Dendrogram<M> dendro = cluster<M>(pts, horizon, cfg, &stats);
  const ordered_json j = dendrogram_json(dendro);

  if (!o.stats_path.empty()) {
    auto f = open_out(o.stats_path);
    f << stats_json(stats).dump(2) << "\n";
  }
  if (!o.output.empty()) {
    auto f = open_out(o.output);
    f << j.dump(2) << "\n";
  }
  if (o.oracle) {
    const Dendrogram<M> want = brute_cluster<M>(pts, horizon);
    if (dendro == want) {
      out << "MATCH\n";
    } else {
      out << "MISMATCH: " << first_divergence(dendro, want) << "\n";
      err << "oracle mismatch\n";
      return 3;
    }
  } else if (o.output.empty()) {
    out << j.dump(2) << "\n";
  }
  return 0;
}

int run_census(const CensusOpts& o, std::ostream& out) {
  const auto [an, ad] = alpha_fraction(o.alpha);
  std::ostringstream csv;
  csv << census_csv_header() << "\n";
  for (std::uint64_t n = o.nmin; n <= o.nmax; n *= 2) {
    CensusConfig cfg;
    cfg.d = o.d;
    cfg.n = static_cast<std::uint32_t>(n);
    cfg.m = static_cast<std::uint32_t>(n);
    cfg.dist = census_dist_from(o.dist);
    cfg.seed = o.seed;
    cfg.alpha_num = an;
    cfg.alpha_den = ad;
    csv << to_csv(count_links(cfg)) << "\n";
  }
  if (!o.output.empty()) {
    auto f = open_out(o.output);
    f << csv.str();
  } else {
    out << csv.str();
  }
  return 0;
}

struct SplitMix {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::int64_t below(std::int64_t n) { return static_cast<std::int64_t>(next() % n); }
};

int run_gen(const GenOpts& o, std::ostream& out) {
  if (o.dist != "uniform" && o.dist != "clustered")
    throw input_error("gen distribution must be uniform or clustered");
  if (o.weight_ratio < 1.0) throw input_error("weight-ratio must be >= 1");
  SplitMix rng{o.seed};
  std::ostringstream csv;
  csv << "id,x,y,weight\n";
  const std::uint64_t blobs = std::max<std::uint64_t>(1, o.n / 64);
  std::vector<std::pair<std::int64_t, std::int64_t>> centers;
  for (std::uint64_t b = 0; b < blobs; ++b)
    centers.emplace_back(rng.below(o.coord_max + 1), rng.below(o.coord_max + 1));
  const double sigma = static_cast<double>(o.coord_max) / 50.0;
  auto clamp = [&](double v) {
    return std::min<std::int64_t>(o.coord_max,
                                  std::max<std::int64_t>(0, std::llround(v)));
  };
  for (std::uint64_t i = 0; i < o.n; ++i) {
    std::int64_t x, y;
    if (o.dist == "uniform") {
      x = rng.below(o.coord_max + 1);
      y = rng.below(o.coord_max + 1);
    } else {
      const auto& c = centers[rng.below(static_cast<std::int64_t>(centers.size()))];
      const double u1 = std::max(rng.real01(), 1e-12);
      const double u2 = rng.real01();
      const double r = std::sqrt(-2.0 * std::log(u1));
      x = clamp(c.first + sigma * r * std::cos(6.283185307179586 * u2));
      y = clamp(c.second + sigma * r * std::sin(6.283185307179586 * u2));
    }
    // log-uniform weights: glyph sizes in deployments span orders of magnitude
    const std::int64_t w =
        std::max<std::int64_t>(1, std::llround(std::pow(o.weight_ratio, rng.real01())));
    csv << i << "," << x << "," << y << "," << w << "\n";
  }
  if (!o.output.empty()) {
    auto f = open_out(o.output);
    f << csv.str();
  } else {
    out << csv.str();
  }
  return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"growing-squares clustering: kinetic maintenance of disjoint growing squares,\n"
               "first-intersection detection, agglomerative glyph clustering, and\n"
               "dominance-link counting"};
  app.require_subcommand(1);

  ClusterOpts co;
  auto* cl = app.add_subcommand("cluster", "compute the merge dendrogram of growing squares");
  cl->add_option("input", co.input, "CSV (id,x,y,weight; header optional) or JSON array")
      ->required();
  cl->add_option("-o,--output", co.output, "dendrogram JSON path (default: stdout)");
  cl->add_option("--mode", co.mode, "arithmetic mode: exact|float (default exact)")
      ->check(CLI::IsMember({"exact", "float"}));
  cl->add_option("--epsilon", co.epsilon, "float-mode comparison tolerance (default 1e-9)");
  cl->add_option("--alpha", co.alpha, "weight-balance parameter (default 0.25)");
  cl->add_option("--horizon", co.horizon, "stop after this time (number or p/q)");
  cl->add_option("--instances", co.instances, "structure instances: 8|4 (default 8)")
      ->check(CLI::IsMember({"8", "4"}));
  cl->add_flag("--oracle", co.oracle, "also run the quadratic oracle and report MATCH/MISMATCH");
  cl->add_option("--stats", co.stats_path, "write run statistics JSON to this path");
  cl->add_option("--seed", co.seed, "seed (used by generator commands)");

  CensusOpts ce;
  auto* cs = app.add_subcommand("census", "count dominance links between range trees");
  cs->add_option("--d", ce.d, "dimension 1..3")->required()->check(CLI::Range(1, 3));
  cs->add_option("--nmin", ce.nmin, "smallest point count (per side)")->required();
  cs->add_option("--nmax", ce.nmax, "largest point count; sweep doubles n")->required();
  cs->add_option("--dist", ce.dist, "uniform|grid|diag (default uniform)")
      ->check(CLI::IsMember({"uniform", "grid", "diag"}));
  cs->add_option("--seed", ce.seed, "seed (default 1)");
  cs->add_option("--alpha", ce.alpha, "weight-balance parameter (default 0.25)");
  cs->add_option("-o,--output", ce.output, "CSV path (default: stdout)");

  GenOpts ge;
  auto* gn = app.add_subcommand("gen", "generate a synthetic instance CSV");
  gn->add_option("--n", ge.n, "number of glyphs")->required();
  gn->add_option("--dist", ge.dist, "uniform|clustered (default uniform)");
  gn->add_option("--weight-ratio", ge.weight_ratio,
                 "max/min weight ratio of the log-uniform weights (default 10000)");
  gn->add_option("--coord-max", ge.coord_max, "coordinates drawn from [0, coord-max]");
  gn->add_option("--seed", ge.seed, "seed (default 1)");
  gn->add_option("-o,--output", ge.output, "CSV path (default: stdout)");

  std::vector<const char*> argv;
  argv.push_back("gsq");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand(cl))
      return co.mode == "float" ? run_cluster<FloatMode>(co, out, err)
                                : run_cluster<ExactMode>(co, out, err);
    if (app.got_subcommand(cs)) return run_census(ce, out);
    return run_gen(ge, out);
  } catch (const input_error& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const invariant_error& e) {
    err << "internal invariant violation: " << e.what() << "\n";
    return 3;
  }
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_run(args, std::cout, std::cerr);
}

}  // namespace gsq
