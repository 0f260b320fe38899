#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taflab/taflab.hpp"
#include "taflab/json_io.hpp"

using namespace taflab;
using io::json;

namespace {

// Exit codes.
constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_validation = 2;
constexpr int exit_unknown = 3;

struct Options {
  std::string pres;
  std::string file;
  int level = 1;
  std::optional<int> depth;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  bool assume_stationary = false;
  bool count = false;
  bool dot = false;
  int trials = 0;
  std::string action;
};

struct Outcome {
  json report;
  int code = exit_ok;
};

double round_to(double v, int digits) {
  double s = std::pow(10.0, digits);
  return std::round(v * s) / s;
}

json file_json(const Options& o) {
  if (o.file.empty()) throw argument_error("--file is required");
  return io::read_json_file(o.file);
}

/// The presentation from --pres, or from the "presentation" key of --file.
Presentation load_presentation(const Options& o, const json* doc = nullptr) {
  Presentation p;
  if (!o.pres.empty()) {
    p = io::presentation_from_json(io::read_json_file(o.pres));
  } else if (doc && doc->contains("presentation")) {
    p = io::presentation_from_json((*doc)["presentation"], "/presentation");
  } else {
    throw argument_error("no presentation: pass --pres or put a \"presentation\" key in --file");
  }
  if (o.assume_stationary && !p.stationarity()) {
    if (!p.rule() || p.rule()->kind == "custom")
      throw argument_error("--assume-stationary needs a builder presentation; declare \"stationary\" for custom towers");
    declare_stationarity(p, Stationarity{detail::builder_rule_period(*p.rule()), 1, {}});
  }
  return p;
}

int depth_or(const Options& o, int fallback) { return o.depth ? *o.depth : fallback; }

json describe(const Presentation& p) {
  json levels = json::array();
  for (int k = 1; k <= p.depth(); ++k) levels.push_back(p.level(k).summand_sizes());
  json out = {{"depth", p.depth()}, {"levels", levels}, {"ordered", p.ordered()}};
  if (p.stationarity())
    out["stationary"] = {{"period", p.stationarity()->period}, {"base", p.stationarity()->base},
                         {"relabel", p.stationarity()->relabel}};
  else
    out["stationary"] = nullptr;
  return out;
}

std::uint64_t ideal_cap() {
  if (const char* env = std::getenv("TAFLAB_MAX_IDEALS")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw argument_error(std::string("TAFLAB_MAX_IDEALS is not a number: ") + env);
    }
  }
  return 100000;
}

// ---- verbs ----

Outcome run_validate(const Options& o) {
  Outcome out;
  json doc = io::read_json_file(!o.pres.empty() ? o.pres : o.file);
  if (doc.contains("presentation")) doc = doc["presentation"];
  json violations = json::array();
  if (io::is_custom(doc)) {
    auto t = io::custom_tower_from_json(doc);
    for (std::size_t k = 0; k < t.embeddings.size(); ++k)
      for (const auto& v : validate_embedding(t.embeddings[k]).violations)
        violations.push_back({{"embedding", k + 1}, {"axiom", v.axiom}, {"message", v.message},
                              {"witness", io::to_json(v.witness)}});
  }
  std::optional<Presentation> p;
  if (violations.empty()) {
    try {
      Options copy = o;
      copy.pres.clear();
      json wrapped = {{"presentation", doc}};
      p = load_presentation(copy, &wrapped);
    } catch (const validation_error& e) {
      violations.push_back({{"axiom", "declaration"}, {"message", e.what()}, {"witness", json::array()}});
    }
  }
  out.report = {{"valid", violations.empty()}, {"violations", violations}};
  if (p) out.report["presentation"] = describe(*p);
  if (!violations.empty()) out.code = exit_validation;
  return out;
}

Outcome run_ideals(const Options& o) {
  auto p = load_presentation(o);
  const auto& alg = p.level(o.level);
  Outcome out;
  if (o.count) {
    out.report = {{"count", ideal_count(alg)}};
    return out;
  }
  json list = json::array();
  for (const auto& i : enumerate_ideals(alg, ideal_cap())) list.push_back(io::to_json(i));
  out.report = {{"level", o.level}, {"count", list.size()}, {"ideals", list}};
  return out;
}

Outcome run_mi(const Options& o) {
  auto p = load_presentation(o);
  const auto& alg = p.level(o.level);
  json list = json::array();
  for (const auto& e : alg.units()) {
    auto i = largest_ideal_excluding(alg, e);
    list.push_back({{"unit", to_string(e)}, {"ideal", io::to_json(i)}, {"meet_irreducible", is_meet_irreducible(i)}});
  }
  return {{{"level", o.level}, {"count", list.size()}, {"mi_ideals", list}}, exit_ok};
}

Outcome run_chain(const Options& o) {
  json doc = file_json(o);
  auto p = load_presentation(o, &doc);
  Chain ch = io::chain_from_json(io::detail::member(doc, "", "chain"), "/chain");
  const int depth = depth_or(o, std::min(p.depth(), ch.end_level()));
  Outcome out;
  if (o.action == "check") {
    auto mi = check_mi_chain(p, ch);
    out.report = {{"mi_chain", mi.ok}, {"depth", depth}};
    if (!mi.ok) {
      out.report["reason"] = mi.reason;
      out.report["witness_level"] = mi.witness_level;
      out.code = exit_validation;
      return out;
    }
    out.report["condition_c"] = io::to_json(check_condition_c_mi(p, ch, depth));
    out.report["cmi"] = io::to_json(check_cmi_chain(p, ch, depth));
    return out;
  }
  if (o.action == "ideal") {
    json levels = json::array();
    for (int k = ch.start_level; k <= depth; ++k) levels.push_back(io::to_json(chain_ideal_truncation(p, ch, k, depth)));
    out.report = {{"depth", depth}, {"truncations", levels}};
    return out;
  }
  throw argument_error("chain: unknown action '" + o.action + "' (use check or ideal)");
}

Outcome run_cmi(const Options& o) {
  json doc = file_json(o);
  auto p = load_presentation(o, &doc);
  Chain ch = io::chain_from_json(io::detail::member(doc, "", "chain"), "/chain");
  const int depth = depth_or(o, std::min(p.depth(), ch.end_level()));
  return {{{"depth", depth}, {"cmi", io::to_json(check_cmi_chain(p, ch, depth))}}, exit_ok};
}

IntervalSpec interval_from(const Presentation& p, const json& doc) {
  const auto& iv = io::detail::member(doc, "", "interval");
  IntervalSpec spec{make_point_pair(p, io::chain_from_json(io::detail::member(iv, "/interval", "chain"), "/interval/chain"))};
  if (iv.contains("include_left")) spec.include_left = iv["include_left"].get<bool>();
  if (iv.contains("include_right")) spec.include_right = iv["include_right"].get<bool>();
  return spec;
}

Outcome run_interval(const Options& o) {
  json doc = file_json(o);
  auto p = load_presentation(o, &doc);
  auto iv = interval_from(p, doc);
  const int depth = depth_or(o, p.depth());
  return {{{"level", o.level},
           {"q_set", io::to_json(q_set(p, iv, o.level))},
           {"truncation", io::to_json(interval_ideal(p, iv, o.level, depth))}},
          exit_ok};
}

json point_json(const Point& pt) {
  json j = {{"start_level", pt.start_level}, {"path", io::to_json(pt.path)}};
  if (pt.tail) j["tail"] = *pt.tail;
  return j;
}

Outcome run_classify(const Options& o) {
  json doc = file_json(o);
  auto p = load_presentation(o, &doc);
  Point a = io::point_from_json(p, io::detail::member(doc, "", "a"), "/a");
  Point b = io::point_from_json(p, io::detail::member(doc, "", "b"), "/b");
  const int depth = depth_or(o, p.depth());
  auto c = classify_theorem_3_1(p, a, b, depth);
  Outcome out;
  out.report = {{"sigma", c.sigma},
                {"tau", c.tau},
                {"order", c.order.name()},
                {"in_p", to_string(c.in_p)},
                {"gap_above_a", to_string(c.gap_above_a)},
                {"gap_below_b", to_string(c.gap_below_b)},
                {"tau_open", to_string(c.tau_open)},
                {"certified", c.certified},
                {"depth", c.depth},
                {"evidence", c.evidence}};
  if (c.sigma == "not_MI") {
    auto d = sigma_meet_decomposition(p, a, b, depth);
    out.report["decomposition"] = {{"a_successor", point_json(d.a_successor)},
                                   {"b_predecessor", point_json(d.b_predecessor)},
                                   {"meets_agree", d.meets_agree},
                                   {"strict_level", d.strict_level}};
  }
  if (c.sigma == "unknown" || c.tau == "unknown") out.code = exit_unknown;
  return out;
}

Outcome run_nestrep(const Options& o) {
  json doc = file_json(o);
  auto p = load_presentation(o, &doc);
  auto iv = interval_from(p, doc);
  const int depth = depth_or(o, o.level);
  auto rep = build_nest_rep(p, iv, o.level);
  auto lat = invariant_subspace_lattice(rep);
  auto ker = kernel_truncation(rep, p, iv, o.level, depth);
  auto fail = rep_multiplicativity_failure(rep);
  json subspaces = json::array();
  for (const auto& s : lat.subspaces) {
    json units = json::array();
    for (auto i : s) units.push_back(to_string(rep.basis[i]));
    subspaces.push_back(units);
  }
  return {{{"level", o.level},
           {"depth", depth},
           {"basis", io::to_json(rep.basis)},
           {"partial_permutations", rep_is_partial_permutation(rep)},
           {"multiplicative", !fail.has_value()},
           {"invariant_subspaces", subspaces},
           {"totally_ordered", lat.totally_ordered},
           {"initial_segments", lat.initial_segments},
           {"kernel", io::to_json(ker.kernel)},
           {"kernel_is_ideal", ker.kernel_is_ideal},
           {"kernel_equals_candidate", ker.equal}},
          exit_ok};
}

json distance_report(const SummandMatrix& t, const ModulePattern& sigma, double tol) {
  json rects = json::array();
  for (std::size_t s = 0; s < t.size(); ++s)
    for (const auto& [i0, j0] : maximal_rectangles(sigma, static_cast<int>(s + 1)))
      rects.push_back({{"summand", s + 1}, {"i0", i0}, {"j0", j0},
                       {"norm", round_to(spectral_norm(lower_left(t[s], i0, j0)), 8)}});
  auto near = nearest_element(t, sigma, tol);
  SummandMatrix rounded = near.S;
  for (auto& m : rounded)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        m(i, j) = cplx(round_to(m(i, j).real(), 10), round_to(m(i, j).imag(), 10));
  return {{"distance", round_to(near.distance, 8)},
          {"rectangles", rects},
          {"nearest", {{"S", io::to_json(rounded)}, {"achieved", round_to(near.achieved, 8)}}}};
}

Outcome run_distance(const Options& o) {
  Outcome out;
  if (o.trials > 0) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int k = 0; k < o.trials; ++k) {
      const int n = 1 + static_cast<int>(rng() % 8);
      CMatrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
      std::vector<int> c(static_cast<std::size_t>(n));
      int lo = 1;
      for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = lo = lo + static_cast<int>(rng() % static_cast<unsigned>(n + 2 - lo));
      auto r = nearest_element({m}, ModulePattern({c}), o.tol);
      worst = std::max(worst, std::abs(r.achieved - r.distance) / std::max(1.0, r.distance));
    }
    out.report = {{"trials", o.trials}, {"seed", o.seed}, {"worst_relative_gap", worst}};
    return out;
  }
  json doc = file_json(o);
  auto t = io::summand_matrix_from_json(io::detail::member(doc, "", "T"), "/T");
  if (doc.contains("ideal")) {
    auto p = load_presentation(o, &doc);
    int level = doc.contains("level") ? doc["level"].get<int>() : o.level;
    auto j = io::ideal_from_json(p.level(level), doc["ideal"], "/ideal");
    out.report = distance_report(t, ModulePattern::from_ideal(j), o.tol);
    auto r = cor_6_3_check(p, level, t, j);
    out.report["mi_sup"] = {{"direct", round_to(r.direct, 8)},
                            {"supremum", round_to(r.mi_sup, 8)},
                            {"mi_ideals", r.mi_ideals},
                            {"equal", r.equal},
                            {"construction_ok", r.construction_ok}};
    return out;
  }
  auto sigma = io::pattern_from_json(io::detail::member(doc, "", "sigma"), "/sigma");
  out.report = distance_report(t, sigma, o.tol);
  return out;
}

std::string ideal_label(const Ideal& i) {
  std::string s;
  for (const auto& c : i.thresholds()) {
    if (!s.empty()) s += "|";
    for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + std::to_string(c[k]);
  }
  return s;
}

Outcome run_mic(const Options& o, std::string& dot) {
  auto p = load_presentation(o);
  const auto& alg = p.level(o.level);
  auto ivs = mic_minimal_intervals(alg, ideal_cap());
  if (o.dot) {
    dot = "digraph ideals {\n  rankdir=BT;\n";
    for (const auto& iv : ivs)
      dot += "  \"" + ideal_label(iv.lower) + "\" -> \"" + ideal_label(iv.upper) + "\" [label=\"" + to_string(iv.added) +
             "\"];\n";
    dot += "}\n";
    return {};
  }
  json list = json::array();
  int classes = 0;
  for (const auto& iv : ivs) {
    classes = std::max(classes, iv.cone_class + 1);
    list.push_back({{"lower", iv.lower.thresholds()},
                    {"upper", iv.upper.thresholds()},
                    {"added", to_string(iv.added)},
                    {"class", iv.cone_class},
                    {"maximal", iv.maximal}});
  }
  return {{{"level", o.level}, {"pairs", list.size()}, {"classes", classes}, {"intervals", list}}, exit_ok};
}

Outcome run_cocycle(const Options& o) {
  json doc = o.file.empty() ? json::object() : file_json(o);
  auto p = load_presentation(o, &doc);
  const int depth = depth_or(o, p.depth());
  Cocycle c;
  if (doc.contains("cocycle")) {
    const auto& cj = doc["cocycle"];
    if (!cj.is_object()) throw schema_error("/cocycle: expected an object keyed by level");
    for (const auto& [lv, labels] : cj.items()) {
      int level = 0;
      try {
        level = std::stoi(lv);
      } catch (const std::exception&) {
        throw schema_error("/cocycle/" + lv + ": level keys are integers");
      }
      if (!labels.is_object()) throw schema_error("/cocycle/" + lv + ": expected an object of unit labels");
      for (const auto& [u, v] : labels.items()) {
        auto e = io::detail::unit(json(u), "/cocycle/" + lv + "/" + u);
        c.labels[level][e] = io::detail::as_int(v, "/cocycle/" + lv + "/" + u);
      }
    }
  } else {
    c = displacement_cocycle(p, depth);
  }
  auto rep = validate_cocycle(p, c, depth);
  Outcome out;
  out.report = {{"depth", depth}, {"valid", rep.ok()}, {"violations", io::to_json(rep)}};
  if (!rep.ok()) {
    out.code = exit_validation;
    return out;
  }
  if (doc.contains("interval")) {
    auto iv = interval_from(p, doc);
    auto m = interval_monotone(p, c, iv, depth);
    out.report["finiteness"] = {{"verdict", m.finiteness.verdict},
                                {"certified", m.finiteness.certified},
                                {"running_max", m.finiteness.running_max},
                                {"bound", m.finiteness.bound},
                                {"evidence", m.finiteness.evidence}};
    out.report["increasing"] = m.increasing;
    out.report["decreasing"] = m.decreasing;
    out.report["consistent"] = m.consistent;
    if (m.finiteness.verdict == "unknown") out.code = exit_unknown;
  }
  return out;
}

int error_code(const error& e) {
  if (dynamic_cast<const validation_error*>(&e)) return exit_validation;
  return exit_input;
}

std::string error_type(const error& e) {
  if (dynamic_cast<const validation_error*>(&e)) return "validation";
  if (dynamic_cast<const schema_error*>(&e)) return "schema";
  if (dynamic_cast<const capacity_error*>(&e)) return "capacity";
  if (dynamic_cast<const unsupported_order_error*>(&e)) return "unsupported_order";
  if (dynamic_cast<const feasibility_error*>(&e)) return "feasibility";
  if (dynamic_cast<const depth_error*>(&e)) return "depth";
  if (dynamic_cast<const extraction_error*>(&e)) return "extraction";
  return "argument";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ideal theory of triangular AF algebras at finite truncation"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool level, bool depth) {
    sub->add_option("--pres", o.pres, "presentation JSON file");
    sub->add_option("--file", o.file, "input JSON file");
    if (level) sub->add_option("--level", o.level, "level (1-based)")->check(CLI::PositiveNumber);
    if (depth) sub->add_option("--depth", o.depth, "truncation depth")->check(CLI::PositiveNumber);
    sub->add_flag("--assume-stationary", o.assume_stationary, "declare the builder rule stationary");
    return sub;
  };

  std::map<std::string, CLI::App*> subs;
  subs["validate"] = common(app.add_subcommand("validate", "validate a presentation"), false, false);
  subs["ideals"] = common(app.add_subcommand("ideals", "enumerate or count the ideals of a level"), true, false);
  subs["ideals"]->add_flag("--count", o.count, "print only the count");
  subs["mi"] = common(app.add_subcommand("mi", "meet irreducible ideals of a level"), true, false);
  subs["chain"] = common(app.add_subcommand("chain", "check an MI-chain or truncate its ideal"), false, true);
  subs["chain"]->add_option("action", o.action, "check | ideal")->required();
  subs["cmi"] = common(app.add_subcommand("cmi", "condition (C) for complete meet irreducibility"), false, true);
  subs["interval"] = common(app.add_subcommand("interval", "interval ideal at one level"), true, true);
  subs["classify"] = common(app.add_subcommand("classify", "classify sigma_{a,b} and tau_{a,b}"), false, true);
  subs["nestrep"] = common(app.add_subcommand("nestrep", "finite nest representation of an interval"), true, true);
  subs["distance"] = common(app.add_subcommand("distance", "rectangle distance and nearest element"), true, false);
  subs["distance"]->add_option("--tol", o.tol, "numerical tolerance");
  subs["distance"]->add_option("--seed", o.seed, "seed for --trials");
  subs["distance"]->add_option("--trials", o.trials, "run random nearest-element trials instead of --file");
  subs["mic"] = common(app.add_subcommand("mic", "minimal intervals of the ideal lattice"), true, false);
  subs["mic"]->add_flag("--dot", o.dot, "emit the Hasse diagram as DOT");
  subs["cocycle"] = common(app.add_subcommand("cocycle", "validate a cocycle and test interval finiteness"), false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    Outcome out;
    std::string dot;
    auto* chosen = app.get_subcommands().front();
    const std::string verb = chosen->get_name();
    if (verb == "validate") out = run_validate(o);
    else if (verb == "ideals") out = run_ideals(o);
    else if (verb == "mi") out = run_mi(o);
    else if (verb == "chain") out = run_chain(o);
    else if (verb == "cmi") out = run_cmi(o);
    else if (verb == "interval") out = run_interval(o);
    else if (verb == "classify") out = run_classify(o);
    else if (verb == "nestrep") out = run_nestrep(o);
    else if (verb == "distance") out = run_distance(o);
    else if (verb == "mic") out = run_mic(o, dot);
    else if (verb == "cocycle") out = run_cocycle(o);
    if (!dot.empty()) std::cout << dot;
    else std::cout << out.report.dump(2) << "\n";
    return out.code;
  } catch (const error& e) {
    json err = {{"error", {{"type", error_type(e)}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return error_code(e);
  } catch (const json::exception& e) {
    json err = {{"error", {{"type", "schema"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  }
}
