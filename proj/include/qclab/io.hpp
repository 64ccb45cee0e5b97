#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qclab/core.hpp"
#include "qclab/dtree.hpp"

namespace qclab {

using Json = nlohmann::json;

// Functions, relations, distributions and mixtures travel as structured text
// documents (JSON).  Rationals are "p/q" strings; bit strings are ASCII
// '0'/'1' with index 1 leftmost.

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

// --- partial functions: {"m": int, "zeros": [...], "ones": [...]}
//     or {"named": "g0", "n": int}

inline PartialFunction function_from_json(const Json& j);

inline Json function_to_json(const PartialFunction& g) {
  Json j;
  j["m"] = g.arity();
  j["zeros"] = Json::array();
  j["ones"] = Json::array();
  for (const auto& x : g.zeros()) j["zeros"].push_back(x);
  for (const auto& x : g.ones()) j["ones"].push_back(x);
  return j;
}

// --- relations: {"n": int, "outputs": [...], "pairs": [[z, s], ...]}
//     or {"named": "f0", "n": int}

inline Relation relation_from_json(const Json& j);

namespace detail {

inline std::vector<std::string> string_array(const Json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array())
    throw ParseError(std::string("missing array field: ") + field);
  std::vector<std::string> out;
  for (const auto& e : j[field]) out.push_back(e.get<std::string>());
  return out;
}

}  // namespace detail

inline PartialFunction function_from_json(const Json& j) {
  try {
    if (j.contains("named")) {
      std::string name = j["named"].get<std::string>();
      if (name == "g0") {
        int n = j.at("n").get<int>();
        PartialFunction g = PartialFunction::weight_threshold(n);
        return n <= 16 ? g.materialize() : g;
      }
      throw ParseError("unknown named function: " + name);
    }
    int m = j.at("m").get<int>();
    auto zs = detail::string_array(j, "zeros");
    auto os = detail::string_array(j, "ones");
    return PartialFunction(m, {zs.begin(), zs.end()}, {os.begin(), os.end()});
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad function document: ") + e.what());
  }
}

inline Relation relation_from_json(const Json& j) {
  try {
    if (j.contains("named")) {
      std::string name = j["named"].get<std::string>();
      if (name == "f0") return Relation::xor_distance_threshold(j.at("n").get<int>());
      throw ParseError("unknown named relation: " + name);
    }
    int n = j.at("n").get<int>();
    auto outputs = detail::string_array(j, "outputs");
    std::set<std::pair<std::string, std::string>> members;
    for (const auto& e : j.at("pairs")) {
      if (!e.is_array() || e.size() != 2) throw ParseError("relation pair must be [z, s]");
      members.emplace(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return Relation(n, std::move(outputs), std::move(members));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad relation document: ") + e.what());
  }
}

// --- distributions: {"m": int, "weights": {"bits": "p/q", ...}}

inline Dist dist_from_json(const Json& j) {
  try {
    int m = j.at("m").get<int>();
    std::map<std::string, Rat> w;
    for (const auto& [k, v] : j.at("weights").items())
      w[k] = parse_rat(v.get<std::string>());
    return Dist(m, std::move(w));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad distribution document: ") + e.what());
  }
}

inline Json dist_to_json(const Dist& d) {
  Json j;
  j["m"] = d.arity();
  j["weights"] = Json::object();
  for (const auto& [x, w] : d.weights()) j["weights"][x] = rat_str(w);
  return j;
}

// --- mixtures: {"m": int, "entries": [{"weight": "p/q", "mu0": {...},
//     "mu1": {...}}, ...]}

inline PairMixture mixture_from_json(const Json& j) {
  try {
    std::vector<std::pair<Rat, DistPair>> entries;
    for (const auto& e : j.at("entries")) {
      Rat w = parse_rat(e.at("weight").get<std::string>());
      entries.emplace_back(w, DistPair(dist_from_json(e.at("mu0")),
                                       dist_from_json(e.at("mu1"))));
    }
    return PairMixture(std::move(entries));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad mixture document: ") + e.what());
  }
}

inline Json mixture_to_json(const PairMixture& q) {
  Json j;
  j["m"] = q.arity();
  j["entries"] = Json::array();
  for (const auto& [w, pair] : q.entries()) {
    Json e;
    e["weight"] = rat_str(w);
    e["mu0"] = dist_to_json(pair.mu0);
    e["mu1"] = dist_to_json(pair.mu1);
    j["entries"].push_back(std::move(e));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Report tables

/// Report rows; provenance tags ("exact", "lower-bound", "monte-carlo(...)",
/// "budget") occupy their own columns, declared in the header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string csv_escape(const std::string& s) {
  bool needs = s.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (size_t i = 0; i < t.header.size(); ++i)
    out << (i ? "," : "") << csv_escape(t.header[i]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
    out << "\n";
  }
  return out.str();
}

inline std::string to_jsonish(const Table& t) {
  Json j;
  j["header"] = t.header;
  j["rows"] = Json::array();
  for (const auto& row : t.rows) j["rows"].push_back(row);
  return j.dump(2) + "\n";
}

inline std::string format_table(const Table& t, const std::string& format) {
  if (format == "csv") return to_csv(t);
  if (format == "json-like") return to_jsonish(t);
  throw ConfigError("unknown format: " + format);
}

/// Fixed-width scientific-free rendering for Monte Carlo cells: six
/// significant digits, C locale.
inline std::string mc_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace qclab
