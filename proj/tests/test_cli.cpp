#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gsq/cli.hpp"

using json = nlohmann::json;

namespace {

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = gsq::cli_run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content = "") {
    path = std::string("/tmp/gsq_cli_test_") + name;
    if (!content.empty()) {
      std::ofstream f(path);
      f << content;
    }
  }
  ~TempFile() { std::remove(path.c_str()); }
  std::string read() const {
    std::ifstream f(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
};

// Structural mirror of schema/dendrogram.schema.json (the python smoke tests
// validate against the schema file itself).
void check_dendrogram_shape(const json& j, bool exact) {
  REQUIRE(j.is_object());
  REQUIRE(j.contains("mode"));
  CHECK(j["mode"] == (exact ? "exact" : "float"));
  for (const char* k : {"leaves", "merges", "roots"}) REQUIRE(j.contains(k));
  auto check_num = [&](const json& v) {
    if (exact) {
      REQUIRE(v.is_string());
      const std::string s = v.get<std::string>();
      CHECK(s.find('/') != std::string::npos);
    } else {
      CHECK(v.is_number());
    }
  };
  for (const auto& l : j["leaves"]) {
    CHECK(l["id"].is_number_integer());
    check_num(l["x"]);
    check_num(l["y"]);
    check_num(l["w"]);
  }
  for (const auto& m : j["merges"]) {
    check_num(m["t"]);
    CHECK(m["left"].is_number_integer());
    CHECK(m["right"].is_number_integer());
    CHECK(m["result"].is_number_integer());
    check_num(m["x"]);
    check_num(m["y"]);
    check_num(m["w"]);
  }
  for (const auto& r : j["roots"]) CHECK(r.is_number_integer());
}

}  // namespace

TEST_CASE("gen is deterministic and shapes weights") {
  const auto a = run({"gen", "--n", "200", "--seed", "9"});
  const auto b = run({"gen", "--n", "200", "--seed", "9"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.substr(0, 16) == "id,x,y,weight\n0,");

  // n = 0: header only
  const auto empty = run({"gen", "--n", "0"});
  CHECK(empty.out == "id,x,y,weight\n");

  // log-uniform weights span at least three orders of magnitude here
  long wmin = 1 << 30, wmax = 0;
  std::istringstream in(a.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto p = line.rfind(',');
    const long w = std::stol(line.substr(p + 1));
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
  }
  CHECK(wmax / wmin >= 1000);
}

TEST_CASE("cluster emits schema-shaped JSON with exact fraction times") {
  TempFile in("collinear.csv", "id,x,y,weight\n0,0,0,1\n1,3,0,1\n2,10,0,1\n");
  const auto r = run({"cluster", in.path});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  check_dendrogram_shape(j, true);
  REQUIRE(j["merges"].size() == 2);
  CHECK(j["merges"][0]["t"] == "3/1");
  CHECK(j["merges"][1]["t"] == "17/3");
  CHECK(j["roots"] == json::array({4}));

  // single row: one leaf, no merges
  TempFile one("one.csv", "5,1,2,3\n");
  const auto r1 = run({"cluster", one.path});
  const json j1 = json::parse(r1.out);
  CHECK(j1["leaves"].size() == 1);
  CHECK(j1["merges"].empty());
  CHECK(j1["roots"] == json::array({5}));
}

TEST_CASE("cluster accepts JSON input and float mode") {
  TempFile in("pts.json", R"([{"x": 0, "y": 0, "weight": 1}, {"x": 4, "y": 0, "weight": 1}])");
  const auto r = run({"cluster", in.path, "--mode", "float"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  check_dendrogram_shape(j, false);
  REQUIRE(j["merges"].size() == 1);
  CHECK(j["merges"][0]["t"].get<double>() == 4.0);
}

TEST_CASE("oracle flag reports MATCH and writes sidecar artifacts") {
  TempFile in("rnd.csv");
  {
    const auto g = run({"gen", "--n", "40", "--seed", "11", "-o", in.path});
    REQUIRE(g.code == 0);
  }
  TempFile outj("dendro.json");
  TempFile stats("stats.json");
  const auto r = run({"cluster", in.path, "--oracle", "-o", outj.path, "--stats", stats.path,
                      "--instances", "4"});
  CHECK(r.code == 0);
  CHECK(r.out == "MATCH\n");
  const json j = json::parse(outj.read());
  check_dendrogram_shape(j, true);
  const json st = json::parse(stats.read());
  CHECK(st["mode"] == "exact");
  CHECK(st["total_events"].get<long>() > 0);
  CHECK(st["n"] == 40);
}

TEST_CASE("exact-mode outputs are byte-identical across runs") {
  TempFile in("rnd2.csv");
  run({"gen", "--n", "64", "--seed", "12", "-o", in.path});
  const auto a = run({"cluster", in.path});
  const auto b = run({"cluster", in.path});
  CHECK(a.out == b.out);
}

TEST_CASE("input errors carry line numbers and exit code 2") {
  TempFile bad("bad.csv", "id,x,y,weight\n0,1,2,3\n1,4\n");
  const auto r = run({"cluster", bad.path});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);

  TempFile neg("neg.csv", "0,1,2,-3\n");
  CHECK(run({"cluster", neg.path}).code == 2);

  TempFile dup("dup.csv", "0,1,2,3\n0,4,5,6\n");
  const auto rd = run({"cluster", dup.path});
  CHECK(rd.code == 2);
  CHECK(rd.err.find("duplicate id") != std::string::npos);

  CHECK(run({"cluster", "/nonexistent/file.csv"}).code == 2);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"cluster"}).code == 1);
  CHECK(run({"cluster", "x.csv", "--instances", "5"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("census sweeps emit reproducible CSV") {
  const auto a = run({"census", "--d", "1", "--nmin", "64", "--nmax", "256", "--seed", "5"});
  const auto b = run({"census", "--d", "1", "--nmin", "64", "--nmax", "256", "--seed", "5"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream in(a.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "d,n,m,dist,seed,alpha,links,max_links_per_node,ratio");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);

  const auto diag = run({"census", "--d", "2", "--nmin", "32", "--nmax", "32", "--dist", "diag"});
  CHECK(diag.code == 0);
}
