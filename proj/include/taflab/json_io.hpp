#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "taflab/chains.hpp"
#include "taflab/distance.hpp"
#include "taflab/spectrum.hpp"
#include "taflab/tower.hpp"
#include "taflab/tribool.hpp"

namespace taflab::io {

using json = nlohmann::json;

namespace detail {

inline std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
inline std::string child(const std::string& ptr, std::size_t idx) { return ptr + "/" + std::to_string(idx); }

inline const json& member(const json& j, const std::string& ptr, const std::string& key) {
  if (!j.is_object()) throw schema_error(ptr + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw schema_error(child(ptr, key) + ": missing required key '" + key + "'");
  return *it;
}

inline int as_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw schema_error(ptr + ": expected an integer");
  return j.get<int>();
}

inline double as_double(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw schema_error(ptr + ": expected a number");
  return j.get<double>();
}

inline const json& as_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw schema_error(ptr + ": expected an array");
  return j;
}

inline std::vector<int> int_list(const json& j, const std::string& ptr) {
  std::vector<int> out;
  for (std::size_t i = 0; i < as_array(j, ptr).size(); ++i) out.push_back(as_int(j[i], child(ptr, i)));
  return out;
}

inline MatrixUnit unit(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw schema_error(ptr + ": expected a matrix unit string \"s:i:j\"");
  try {
    return parse_matrix_unit(j.get<std::string>());
  } catch (const coordinate_error& e) {
    throw schema_error(ptr + ": " + e.what());
  }
}

inline std::vector<MatrixUnit> unit_list(const json& j, const std::string& ptr) {
  std::vector<MatrixUnit> out;
  for (std::size_t i = 0; i < as_array(j, ptr).size(); ++i) out.push_back(unit(j[i], child(ptr, i)));
  return out;
}

inline int opt_int(const json& j, const std::string& ptr, const std::string& key, int fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_int(*it, child(ptr, key));
}

} // namespace detail

/// Embedding given as {"s:i:j": ["s:i:j", ...], ...} over the triangular
/// source units.
inline Embedding embedding_from_json(const json& j, const DigraphAlgebra& src, const DigraphAlgebra& tgt,
                                     const std::string& ptr) {
  if (!j.is_object()) throw schema_error(ptr + ": expected an object mapping units to image lists");
  std::map<MatrixUnit, std::vector<MatrixUnit>> images;
  for (const auto& [key, val] : j.items()) {
    const std::string kp = detail::child(ptr, key);
    MatrixUnit e;
    try {
      e = parse_matrix_unit(key);
    } catch (const coordinate_error& err) {
      throw schema_error(kp + ": key is not a matrix unit: " + err.what());
    }
    if (!src.contains(e)) throw schema_error(kp + ": " + key + " is not a unit of " + src.describe());
    images[e] = detail::unit_list(val, kp);
  }
  for (const auto& e : src.units())
    if (!images.count(e)) throw schema_error(ptr + ": no image given for " + to_string(e));
  return Embedding(src, tgt, images);
}

/// Levels and raw embeddings of a custom presentation, before validation.
struct CustomTower {
  std::vector<DigraphAlgebra> levels;
  std::vector<Embedding> embeddings;
};

inline CustomTower custom_tower_from_json(const json& j, const std::string& ptr = "") {
  CustomTower t;
  const auto& lv = detail::as_array(detail::member(j, ptr, "levels"), detail::child(ptr, "levels"));
  for (std::size_t k = 0; k < lv.size(); ++k) {
    auto sizes = detail::int_list(lv[k], detail::child(detail::child(ptr, "levels"), k));
    if (sizes.empty()) throw schema_error(detail::child(detail::child(ptr, "levels"), k) + ": no summands");
    for (int n : sizes)
      if (n < 1) throw schema_error(detail::child(detail::child(ptr, "levels"), k) + ": sizes must be positive");
    t.levels.emplace_back(sizes);
  }
  const std::string ep = detail::child(ptr, "embeddings");
  const auto& em = detail::as_array(detail::member(j, ptr, "embeddings"), ep);
  if (em.size() + 1 != t.levels.size())
    throw schema_error(ep + ": expected " + std::to_string(t.levels.size() - 1) + " embeddings, got " +
                       std::to_string(em.size()));
  for (std::size_t k = 0; k < em.size(); ++k)
    t.embeddings.push_back(embedding_from_json(em[k], t.levels[k], t.levels[k + 1], detail::child(ep, k)));
  return t;
}

inline bool is_custom(const json& j) { return j.is_object() && !j.contains("builder"); }

/// Presentation from its JSON description:
///   {"builder": {"kind": "refinement", "base": 1, "factor": 2}, "depth": 5}
///   {"builder": {"kind": "nest", "base": 1, "factors": [2, 3]}, "depth": 4}
///   {"levels": [[2], [4]], "embeddings": [{"1:1:1": ["1:1:1", "1:2:2"], ...}]}
/// with optional "stationary": {"period", "base", "relabel"} and, for custom
/// towers, "ordered": true.
inline Presentation presentation_from_json(const json& j, const std::string& ptr = "") {
  if (!j.is_object()) throw schema_error((ptr.empty() ? "/" : ptr) + ": expected an object");
  Presentation p;
  if (j.contains("builder")) {
    const std::string bp = detail::child(ptr, "builder");
    const auto& b = j["builder"];
    const auto& kind_j = detail::member(b, bp, "kind");
    if (!kind_j.is_string()) throw schema_error(detail::child(bp, "kind") + ": expected a string");
    const auto kind = kind_j.get<std::string>();
    const int depth = detail::as_int(detail::member(j, ptr, "depth"), detail::child(ptr, "depth"));
    if (depth < 1) throw schema_error(detail::child(ptr, "depth") + ": must be positive");
    if (kind == "refinement" || kind == "standard") {
      int base = detail::opt_int(b, bp, "base", 1);
      int factor = detail::as_int(detail::member(b, bp, "factor"), detail::child(bp, "factor"));
      if (base < 1 || factor < 1) throw schema_error(bp + ": base and factor must be positive");
      p = kind == "refinement" ? builders::refinement(base, factor, depth) : builders::standard(base, factor, depth);
    } else if (kind == "nest") {
      int base = detail::opt_int(b, bp, "base", 1);
      auto factors = detail::int_list(detail::member(b, bp, "factors"), detail::child(bp, "factors"));
      if (factors.empty()) throw schema_error(detail::child(bp, "factors") + ": must not be empty");
      for (int f : factors)
        if (f < 1) throw schema_error(detail::child(bp, "factors") + ": factors must be positive");
      if (base < 1) throw schema_error(detail::child(bp, "base") + ": must be positive");
      p = builders::nest(base, factors, depth);
    } else if (kind == "example_1_3") {
      p = builders::example_1_3(depth);
    } else {
      throw schema_error(detail::child(bp, "kind") + ": unknown builder '" + kind + "'");
    }
  } else {
    auto t = custom_tower_from_json(j, ptr);
    p = Presentation(std::move(t.levels), std::move(t.embeddings), BuilderRule{"custom", 1, {}});
    if (j.contains("ordered")) {
      if (!j["ordered"].is_boolean()) throw schema_error(detail::child(ptr, "ordered") + ": expected a boolean");
      if (j["ordered"].get<bool>()) declare_ordered(p);
    }
  }
  if (j.contains("stationary")) {
    const std::string sp = detail::child(ptr, "stationary");
    const auto& s = j["stationary"];
    if (!s.is_object()) throw schema_error(sp + ": expected an object");
    Stationarity st;
    st.period = detail::opt_int(s, sp, "period", 1);
    st.base = detail::opt_int(s, sp, "base", 1);
    if (s.contains("relabel")) st.relabel = detail::int_list(s["relabel"], detail::child(sp, "relabel"));
    declare_stationarity(p, st);
  }
  return p;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw argument_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw schema_error(path + ": malformed JSON: " + e.what());
  }
}

/// {"start_level": 1, "units": ["1:1:2", ...]}
inline Chain chain_from_json(const json& j, const std::string& ptr = "") {
  Chain ch;
  ch.start_level = detail::opt_int(j, ptr, "start_level", 1);
  ch.units = detail::unit_list(detail::member(j, ptr, "units"), detail::child(ptr, "units"));
  if (ch.units.empty()) throw schema_error(detail::child(ptr, "units") + ": a chain needs at least one unit");
  return ch;
}

/// {"start_level": 2, "path": ["1:1:1", ...], "tail": [0, 1]}; the tail is
/// optional and lists child indices repeated forever.
inline Point point_from_json(const Presentation& pres, const json& j, const std::string& ptr) {
  int start = detail::opt_int(j, ptr, "start_level", 1);
  auto path = detail::unit_list(detail::member(j, ptr, "path"), detail::child(ptr, "path"));
  Point p = make_point(pres, start, path);
  if (j.contains("tail")) {
    std::vector<std::size_t> tail;
    for (int v : detail::int_list(j["tail"], detail::child(ptr, "tail"))) {
      if (v < 0) throw schema_error(detail::child(ptr, "tail") + ": child indices are nonnegative");
      tail.push_back(static_cast<std::size_t>(v));
    }
    p.tail = tail;
  }
  return p;
}

/// {"thresholds": [[...], ...]} or {"generators": ["s:i:j", ...]}
inline Ideal ideal_from_json(const DigraphAlgebra& alg, const json& j, const std::string& ptr) {
  if (j.contains("thresholds")) {
    const std::string tp = detail::child(ptr, "thresholds");
    std::vector<std::vector<int>> c;
    const auto& arr = detail::as_array(j["thresholds"], tp);
    for (std::size_t s = 0; s < arr.size(); ++s) c.push_back(detail::int_list(arr[s], detail::child(tp, s)));
    try {
      return Ideal(alg, c);
    } catch (const error& e) {
      throw schema_error(tp + ": " + e.what());
    }
  }
  auto gens = detail::unit_list(detail::member(j, ptr, "generators"), detail::child(ptr, "generators"));
  for (std::size_t k = 0; k < gens.size(); ++k)
    if (!alg.contains(gens[k]))
      throw schema_error(detail::child(detail::child(ptr, "generators"), k) + ": not a unit of " + alg.describe());
  return ideal_from_generators(alg, gens);
}

/// A complex entry is a number or a pair [re, im].
inline cplx complex_from_json(const json& j, const std::string& ptr) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2)
    return {detail::as_double(j[0], detail::child(ptr, 0)), detail::as_double(j[1], detail::child(ptr, 1))};
  throw schema_error(ptr + ": expected a number or [re, im]");
}

inline CMatrix square_from_json(const json& j, const std::string& ptr) {
  const auto& rows = detail::as_array(j, ptr);
  const auto n = static_cast<Eigen::Index>(rows.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string rp = detail::child(ptr, static_cast<std::size_t>(i));
    const auto& row = detail::as_array(rows[static_cast<std::size_t>(i)], rp);
    if (static_cast<Eigen::Index>(row.size()) != n) throw schema_error(rp + ": matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c)
      m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)], detail::child(rp, static_cast<std::size_t>(c)));
  }
  return m;
}

/// One square matrix per summand.
inline SummandMatrix summand_matrix_from_json(const json& j, const std::string& ptr) {
  SummandMatrix t;
  const auto& arr = detail::as_array(j, ptr);
  for (std::size_t s = 0; s < arr.size(); ++s) t.push_back(square_from_json(arr[s], detail::child(ptr, s)));
  return t;
}

/// One threshold vector per summand.
inline ModulePattern pattern_from_json(const json& j, const std::string& ptr) {
  std::vector<std::vector<int>> c;
  const auto& arr = detail::as_array(j, ptr);
  for (std::size_t s = 0; s < arr.size(); ++s) c.push_back(detail::int_list(arr[s], detail::child(ptr, s)));
  try {
    return ModulePattern(c);
  } catch (const error& e) {
    throw schema_error(ptr + ": " + e.what());
  }
}

// ---- output ----

inline json to_json(const MatrixUnit& e) { return to_string(e); }

inline json to_json(const std::vector<MatrixUnit>& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back(to_string(e));
  return out;
}

inline json to_json(const TriBool& t) {
  return {{"status", t.status_name()}, {"level", t.level}, {"evidence", t.evidence}, {"summary", t.summary()}};
}

inline json to_json(const Ideal& i) { return {{"thresholds", i.thresholds()}, {"dimension", i.dimension()}}; }

inline json to_json(const Truncation& t) {
  return {{"level", t.level},
          {"depth", t.depth},
          {"exact", t.exact},
          {"candidate", to_json(t.candidate)},
          {"certified_out", to_json(t.certified_out)},
          {"certified_in", to_json(t.certified_in)},
          {"evidence", t.evidence}};
}

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(i, c).real(), m(i, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline json to_json(const SummandMatrix& t) {
  json out = json::array();
  for (const auto& m : t) out.push_back(to_json(m));
  return out;
}

inline json to_json(const ValidationReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"axiom", x.axiom}, {"message", x.message}, {"witness", to_json(x.witness)}});
  return v;
}

} // namespace taflab::io
