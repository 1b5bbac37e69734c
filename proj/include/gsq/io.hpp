#pragma once

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gsq/clustering.hpp"

namespace gsq {

using ordered_json = nlohmann::ordered_json;

// One glyph per input row; ids are optional and assigned sequentially when
// absent. Weight must be positive, explicit ids unique.
struct InputRecord {
  bool has_id = false;
  PointId id = kNoPoint;
  std::string x, y, w;  // numeric literals, parsed per arithmetic mode
};

namespace io_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }
  return out;
}

inline bool looks_like_header(const std::vector<std::string>& cols) {
  for (const auto& c : cols)
    if (c == "x" || c == "id" || c == "weight" || c == "w" || c == "y") return true;
  return false;
}

}  // namespace io_detail

inline std::vector<InputRecord> parse_csv_records(std::istream& in) {
  std::vector<InputRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cols = io_detail::split_csv_line(line);
    if (first && io_detail::looks_like_header(cols)) {
      first = false;
      continue;
    }
    first = false;
    InputRecord rec;
    if (cols.size() == 4) {
      rec.has_id = true;
      try {
        const long long v = std::stoll(cols[0]);
        if (v < 0) throw input_error("");
        rec.id = static_cast<PointId>(v);
      } catch (...) {
        throw input_error("line " + std::to_string(lineno) + ": bad id '" + cols[0] + "'");
      }
      rec.x = cols[1];
      rec.y = cols[2];
      rec.w = cols[3];
    } else if (cols.size() == 3) {
      rec.x = cols[0];
      rec.y = cols[1];
      rec.w = cols[2];
    } else {
      throw input_error("line " + std::to_string(lineno) + ": expected 3 or 4 columns, got " +
                        std::to_string(cols.size()));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<InputRecord> parse_json_records(std::istream& in) {
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("bad JSON input: ") + e.what());
  }
  if (!j.is_array()) throw input_error("JSON input must be an array of records");
  std::vector<InputRecord> out;
  auto num_str = [](const ordered_json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  std::size_t idx = 0;
  for (const auto& item : j) {
    ++idx;
    if (!item.is_object())
      throw input_error("record " + std::to_string(idx) + ": expected an object");
    InputRecord rec;
    if (item.contains("id")) {
      rec.has_id = true;
      rec.id = item["id"].get<PointId>();
    }
    const char* wkey = item.contains("weight") ? "weight" : "w";
    if (!item.contains("x") || !item.contains("y") || !item.contains(wkey))
      throw input_error("record " + std::to_string(idx) + ": needs x, y, weight");
    rec.x = num_str(item["x"]);
    rec.y = num_str(item["y"]);
    rec.w = num_str(item[wkey]);
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<InputRecord> parse_records(std::istream& in, const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return parse_json_records(in);
  // sniff: a JSON array begins with '['
  const int c = in.peek();
  if (c == '[') return parse_json_records(in);
  return parse_csv_records(in);
}

template <class M>
std::vector<WeightedPoint<M>> to_points(const std::vector<InputRecord>& recs) {
  std::vector<WeightedPoint<M>> pts;
  pts.reserve(recs.size());
  std::vector<bool> used;
  PointId next = 0;
  for (const auto& r : recs) {
    WeightedPoint<M> p;
    if (r.has_id) {
      p.id = r.id;
    } else {
      p.id = next++;
    }
    if (p.id >= used.size()) used.resize(p.id + 1, false);
    if (used[p.id]) throw input_error("duplicate id " + std::to_string(p.id));
    used[p.id] = true;
    p.x = parse_scalar<M>(r.x);
    p.y = parse_scalar<M>(r.y);
    p.w = parse_scalar<M>(r.w);
    if (scalar_cmp(p.w, typename M::Scalar(0)) <= 0)
      throw input_error("non-positive weight for id " + std::to_string(p.id));
    pts.push_back(std::move(p));
  }
  return pts;
}

namespace io_detail {
inline ordered_json num_out(const mpq_class& v, bool) { return scalar_to_string(v); }
inline ordered_json num_out(double v, bool) { return v; }
}  // namespace io_detail

// Dendrogram JSON: leaves echo the input, merges carry exact times and
// centers (fraction strings in exact mode, numbers in float mode), roots are
// the clusters alive at the horizon. The shape is pinned by
// schema/dendrogram.schema.json.
template <class M>
ordered_json dendrogram_json(const Dendrogram<M>& d) {
  ordered_json j;
  j["mode"] = M::is_exact ? "exact" : "float";
  j["leaves"] = ordered_json::array();
  for (const auto& p : d.leaves) {
    ordered_json e;
    e["id"] = p.id;
    e["x"] = io_detail::num_out(p.x, true);
    e["y"] = io_detail::num_out(p.y, true);
    e["w"] = io_detail::num_out(p.w, true);
    j["leaves"].push_back(std::move(e));
  }
  j["merges"] = ordered_json::array();
  for (const auto& m : d.merges) {
    ordered_json e;
    e["t"] = io_detail::num_out(m.time, true);
    e["left"] = m.left;
    e["right"] = m.right;
    e["result"] = m.result;
    e["x"] = io_detail::num_out(m.x, true);
    e["y"] = io_detail::num_out(m.y, true);
    e["w"] = io_detail::num_out(m.w, true);
    j["merges"].push_back(std::move(e));
  }
  j["roots"] = d.roots;
  return j;
}

inline ordered_json stats_json(const RunStats& st) {
  ordered_json j;
  j["n"] = st.n;
  j["total_events"] = st.total_events;
  j["tournament_events"] = st.tournament_events;
  j["linking_events"] = st.linking_events;
  j["peak_certificates"] = st.peak_certificates;
  j["max_links_per_node"] = st.max_links_per_node;
  j["wall_ms"] = st.wall_ms;
  j["mode"] = st.mode;
  return j;
}

}  // namespace gsq
