// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "distance_oracles.hpp"
#include "oracles.hpp"
#include "taflab/taflab.hpp"

using namespace taflab;
using oracle::UnitSet;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Check {
  Outcome out;
  void require(bool cond, const std::string& what) {
    if (!cond && out.ok) {
      out.ok = false;
      out.detail = what;
    }
  }
};

std::vector<Chain> subordinate_chains(const Presentation& p, int start, int depth) {
  std::vector<Chain> chains;
  for (const auto& u : p.level(start).units()) chains.push_back(Chain{start, {u}});
  for (int k = start; k < depth; ++k) {
    std::vector<Chain> next;
    for (const auto& ch : chains)
      for (const auto& v : p.embedding(k).image(ch.units.back())) {
        Chain c = ch;
        c.units.push_back(v);
        next.push_back(std::move(c));
      }
    chains = std::move(next);
  }
  return chains;
}

Chain random_subordinate_chain(const Presentation& p, int start, std::mt19937& rng) {
  auto units = p.level(start).units();
  Chain ch{start, {units[rng() % units.size()]}};
  for (int k = start; k < p.depth(); ++k) {
    const auto& img = p.embedding(k).image(ch.units.back());
    ch.units.push_back(img[rng() % img.size()]);
  }
  return ch;
}

Chain ex13_chain(int summand, int depth) {
  Chain ch{1, {}};
  for (int n = 1; n <= depth; ++n) ch.units.push_back({summand, 1, 1 << n});
  return ch;
}

// Point of refinement(1,2,K) from level 1 given by its binary steps.
Point binary_point(const std::vector<int>& steps) {
  Point p{1, {{1, 1, 1}}};
  int pos = 1;
  for (int d : steps) {
    pos = 2 * (pos - 1) + d + 1;
    p.path.push_back({1, pos, pos});
  }
  return p;
}

std::vector<std::vector<int>> all_steps(int n) {
  std::vector<std::vector<int>> out;
  for (int m = 0; m < (1 << n); ++m) {
    std::vector<int> s;
    for (int t = n - 1; t >= 0; --t) s.push_back((m >> t) & 1);
    out.push_back(s);
  }
  return out;
}

// Meet irreducible between two levels, on explicit unit sets: any two units
// outside the ideal have images whose generated ideals share a unit outside
// the ideal one level down.
bool mi_between_levels(const Presentation& p, int level, const Ideal& here, const Ideal& next) {
  std::vector<MatrixUnit> out;
  for (const auto& u : p.level(level).units())
    if (!here.contains(u)) out.push_back(u);
  if (out.empty()) return false;
  auto pushed = [&](const MatrixUnit& u) {
    UnitSet img;
    for (const auto& f : oracle::bimodule_closure(p.level(level), {u}))
      for (const auto& v : p.embedding(level).image(f)) img.insert(v);
    return oracle::bimodule_closure(p.level(level + 1), img);
  };
  std::vector<UnitSet> ps;
  for (const auto& u : out) ps.push_back(pushed(u));
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      bool escapes = false;
      for (const auto& v : oracle::intersect(ps[i], ps[j]))
        if (!next.contains(v)) escapes = true;
      if (!escapes) return false;
    }
  return true;
}

ModulePattern random_pattern(std::mt19937_64& rng, const std::vector<int>& sizes) {
  std::vector<std::vector<int>> c;
  for (int n : sizes) {
    std::vector<int> row(static_cast<std::size_t>(n));
    int lo = 1;
    for (int i = 0; i < n; ++i) {
      lo = lo + static_cast<int>(rng() % static_cast<unsigned>(n + 2 - lo));
      row[static_cast<std::size_t>(i)] = lo;
    }
    c.push_back(row);
  }
  return ModulePattern(c);
}

Ideal random_ideal(std::mt19937_64& rng, const DigraphAlgebra& alg) {
  std::vector<std::vector<int>> c;
  for (int n : alg.summand_sizes()) {
    std::vector<int> row(static_cast<std::size_t>(n));
    int prev = 1;
    for (int i = 1; i <= n; ++i) {
      int lo = std::max(prev, i);
      prev = lo + static_cast<int>(rng() % static_cast<unsigned>(n + 2 - lo));
      row[static_cast<std::size_t>(i - 1)] = prev;
    }
    c.push_back(row);
  }
  return Ideal(alg, c);
}

SummandMatrix random_summands(std::mt19937_64& rng, const std::vector<int>& sizes) {
  SummandMatrix t;
  for (int n : sizes) t.push_back(oracle::random_matrix(rng, n, n));
  return t;
}

// ---------------------------------------------------------------------------

Outcome ideal_census() {
  Check c;
  const std::uint64_t want[] = {2, 5, 14, 42, 132, 429};
  for (int n = 1; n <= 6; ++n) {
    std::uint64_t count = 0;
    for (const auto& i : enumerate_ideals(DigraphAlgebra({n}))) {
      (void)i;
      ++count;
    }
    c.require(count == want[n - 1], "T_" + std::to_string(n) + " has " + std::to_string(count) + " ideals");
  }
  if (c.out.ok) c.out.detail = "T_1..T_6: 2 5 14 42 132 429";
  return c.out;
}

Outcome mi_census() {
  Check c;
  for (int n = 1; n <= 5; ++n) {
    DigraphAlgebra alg({n});
    auto lattice = oracle::all_ideal_sets(alg);
    std::set<UnitSet> brute, formula;
    for (const auto& s : lattice)
      if (s.size() != alg.unit_count() && oracle::meet_irreducible(lattice, s)) brute.insert(s);
    for (const auto& e : alg.units()) formula.insert(oracle::support(largest_ideal_excluding(alg, e)));
    c.require(brute == formula, "MI ideals of T_" + std::to_string(n) + " differ");
    c.require(formula.size() == static_cast<std::size_t>(n * (n + 1) / 2),
              "T_" + std::to_string(n) + ": excluded-unit ideals not distinct");
  }
  if (c.out.ok) c.out.detail = "n <= 5, brute force = largest ideals excluding a unit";
  return c.out;
}

Outcome projection_meets() {
  Check c;
  int triples = 0, violations = 0;
  for (int n = 1; n <= 6; ++n) {
    DigraphAlgebra alg({n});
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) {
          ++triples;
          auto lib = leq(meet(principal_ideal(alg, {1, i, i}), principal_ideal(alg, {1, k, k})),
                         principal_ideal(alg, {1, j, j}));
          auto ii = oracle::bimodule_closure(alg, {{1, i, i}});
          auto jj = oracle::bimodule_closure(alg, {{1, j, j}});
          auto kk = oracle::bimodule_closure(alg, {{1, k, k}});
          bool brute = oracle::subset(oracle::intersect(ii, kk), jj);
          if (!lib || !brute) ++violations;
        }
  }
  c.require(violations == 0, std::to_string(violations) + " violations");
  if (c.out.ok) c.out.detail = std::to_string(triples) + " triples, 0 violations";
  return c.out;
}

Outcome example_1_3_chains() {
  Check c;
  auto ex = builders::example_1_3(6);
  for (int summand : {1, 2}) {
    auto ch = ex13_chain(summand, 6);
    std::string name = summand == 1 ? "e" : "f";
    c.require(bool(check_mi_chain(ex, ch)), name + " is not an MI-chain");
    c.require(check_condition_c_mi(ex, ch, 6).maybe_in(), name + " fails condition (C)");
    for (int level = 1; level <= 3; ++level)
      c.require(chain_ideal_truncation(ex, ch, level, 6).candidate.is_zero(),
                name + " truncation at level " + std::to_string(level) + " is not zero");
  }
  if (c.out.ok) c.out.detail = "e and f: MI, (C) holds, zero ideal at levels 1-3";
  return c.out;
}

Outcome round_trip() {
  Check c;
  auto p = builders::refinement(2, 2, 5);
  int covered = 0;
  for (int level = 1; level <= 2; ++level)
    for (const auto& e : p.level(level).units()) {
      auto tower = coherent_tower(p, level, largest_ideal_excluding(p.level(level), e), 5);
      auto ex = extract_chain_from_ideal(p, tower, 5);
      std::string tag = "level " + std::to_string(level) + " " + to_string(e);
      c.require(bool(check_mi_chain(ex.contraction, ex.chain)), tag + ": not an MI-chain");
      int K = ex.contraction.depth();
      for (int k = 1; k <= K; ++k)
        c.require(chain_ideal_truncation(ex.contraction, ex.chain, k, K).candidate == tower.at(ex.levels[k - 1]),
                  tag + ": tower differs at level " + std::to_string(ex.levels[k - 1]));
      ++covered;
    }
  c.require(covered >= 10, "only " + std::to_string(covered) + " ideals");
  if (c.out.ok) c.out.detail = std::to_string(covered) + " MI ideals extracted and reproduced";
  return c.out;
}

Outcome nest_representation() {
  Check c;
  auto p = builders::refinement(2, 2, 3);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int start = 1 + static_cast<int>(rng() % 3);
    IntervalSpec iv{make_point_pair(p, random_subordinate_chain(p, start, rng)), rng() % 2 == 0, rng() % 2 == 0};
    std::string tag = "trial " + std::to_string(trial);
    for (int level = start; level <= 3; ++level) {
      auto rep = build_nest_rep(p, iv, level);
      c.require(rep_is_partial_permutation(rep), tag + ": not partial permutations");
      c.require(!rep_multiplicativity_failure(rep), tag + ": not multiplicative");
      c.require(invariant_subspace_lattice(rep).totally_ordered, tag + ": invariant subspaces not a chain");
      c.require(kernel_truncation(rep, p, iv, level, level).equal, tag + ": kernel differs from candidate");
    }
  }
  if (c.out.ok) c.out.detail = "20 intervals, all levels";
  return c.out;
}

Outcome classification_census() {
  Check c;
  auto p = builders::refinement(1, 2, 4);
  declare_stationarity(p, Stationarity{1, 1, {}});
  auto pts = all_steps(3);
  int verdicts = 0, not_mi = 0;
  for (const auto& sa : pts)
    for (const auto& sb : pts) {
      auto a = binary_point(sa), b = binary_point(sb);
      auto cl = classify_theorem_3_1(p, a, b, 4);
      c.require(cl.certified, "uncertified verdict");
      for (auto v : {Variant::sigma, Variant::tau}) {
        const std::string& verdict = v == Variant::sigma ? cl.sigma : cl.tau;
        if (verdict == "not_ideal_set" || verdict == "unknown") continue;
        ++verdicts;
        auto s3 = sigma_tau_ab(p, a, b, 3, 4, v).candidate;
        auto s4 = sigma_tau_ab(p, a, b, 4, 4, v).candidate;
        if (verdict == "top") {
          c.require(s4.is_full(), "top verdict with proper ideal");
          continue;
        }
        bool mi = mi_between_levels(p, 3, s3, s4);
        c.require(mi == (verdict != "not_MI"), variant_name(v) + " verdict " + verdict + " disagrees with brute force");
        if (verdict == "not_MI") {
          ++not_mi;
          c.require(v != Variant::sigma || sigma_meet_decomposition(p, a, b, 4).ok(), "no meet decomposition");
        }
      }
    }
  c.require(not_mi > 0, "no not_MI verdicts exercised");
  if (c.out.ok)
    c.out.detail = std::to_string(verdicts) + " verdicts, " + std::to_string(not_mi) + " not_MI with decompositions";
  return c.out;
}

Outcome codimension_signature() {
  Check c;
  auto s = builders::standard(1, 2, 6);
  auto cocycle = displacement_cocycle(s, 6);
  c.require(validate_cocycle(s, cocycle, 6).ok(), "canonical cocycle invalid");
  int intervals = 0;
  for (int start = 2; start <= 4; ++start)
    for (const auto& ch : subordinate_chains(s, start, 6)) {
      IntervalSpec iv{make_point_pair(s, ch)};
      ++intervals;
      for (int level = start; level <= 5; ++level)
        c.require(interval_ideal(s, iv, level, 5).certified_out.size() ==
                      interval_ideal(s, iv, level, 6).certified_out.size(),
                  "OUT count moves between depth 5 and 6 at level " + std::to_string(level));
    }
  if (c.out.ok) c.out.detail = std::to_string(intervals) + " closed intervals stable from depth 5";
  return c.out;
}

Outcome parrott() {
  Check c;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int nontrivial = 0, literal_fails = 0, misclassified = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 4), q = 1 + static_cast<Eigen::Index>(rng() % 4);
    CMatrix full = oracle::random_contraction(rng, m + 1, q + 1);
    CMatrix B = full.block(0, 0, 1, q), A = full.block(1, 0, m, q), C = full.block(1, q, m, 1);
    auto r = parrott_step(A, B, C);
    for (int d = 0; d < 8; ++d)
      worst = std::max(worst, std::abs(oracle::boundary_radius(A, B, C, r.s, 2 * M_PI * d / 8) - r.t));
    for (int k = 0; k < 10; ++k) {
      cplx w = r.s + std::polar(2.0 * r.t * u(rng) + 1e-6, 2 * M_PI * u(rng));
      double dist = std::abs(w - r.s);
      if (std::abs(dist - r.t) < 1e-6) continue;
      bool in_disk = dist < r.t;
      bool contraction = oracle::norm2(oracle::corner_block(A, B, C, w)) <= 1.0 + 1e-12;
      if (in_disk != contraction) ++misclassified;
    }
    if (r.K.norm() < 1e-12 && r.L.norm() < 1e-12) continue;
    ++nontrivial;
    double literal = oracle::literal_radius(r.K.norm(), r.L.norm());
    if (std::abs(oracle::boundary_radius(A, B, C, r.s, 0.3) - literal) > 1e-8) ++literal_fails;
  }
  c.require(worst <= 1e-8, "boundary discrepancy " + std::to_string(worst));
  c.require(misclassified == 0, std::to_string(misclassified) + " misclassified samples");
  c.require(nontrivial > 0 && 100 * literal_fails >= 95 * nontrivial, "literal exponent survives too often");
  if (c.out.ok) {
    std::ostringstream os;
    os << "200 instances, max boundary gap " << worst << ", literal exponent fails " << literal_fails << "/"
       << nontrivial;
    c.out.detail = os.str();
  }
  return c.out;
}

Outcome distance_formula() {
  Check c;
  std::mt19937_64 rng(103);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> sizes{1 + static_cast<int>(rng() % 8)};
    if (trial % 3 == 0) sizes.push_back(1 + static_cast<int>(rng() % 8));
    auto sigma = random_pattern(rng, sizes);
    auto t = random_summands(rng, sizes);
    auto r = nearest_element(t, sigma);
    double gap = std::abs(r.achieved - r.distance) / std::max(1.0, r.distance);
    worst = std::max(worst, gap);
    c.require(gap <= 1e-6, "trial " + std::to_string(trial) + " misses by " + std::to_string(gap));
  }
  if (c.out.ok) {
    std::ostringstream os;
    os << "100 trials, max relative gap " << worst;
    c.out.detail = os.str();
  }
  return c.out;
}

Outcome mi_supremum() {
  Check c;
  auto p = builders::refinement(1, 2, 4);
  const auto& alg = p.level(3);
  std::mt19937_64 rng(107);
  int checked = 0;
  double worst = 0.0;
  while (checked < 20) {
    auto j = random_ideal(rng, alg);
    if (j.is_full()) continue;
    auto r = cor_6_3_check(p, 3, random_summands(rng, alg.summand_sizes()), j);
    worst = std::max(worst, std::abs(r.direct - r.mi_sup));
    c.require(std::abs(r.direct - r.mi_sup) <= 1e-6, "trial " + std::to_string(checked) + " differs");
    c.require(r.construction_ok, "trial " + std::to_string(checked) + ": witness construction failed");
    ++checked;
  }
  if (c.out.ok) {
    std::ostringstream os;
    os << "20 ideals of T_4, max gap " << worst;
    c.out.detail = os.str();
  }
  return c.out;
}

Outcome spectrum_injectivity() {
  Check c;
  auto p = builders::refinement(1, 2, 5);
  declare_stationarity(p, Stationarity{1, 1, {}});
  std::map<std::vector<MatrixUnit>, std::vector<std::vector<Ideal>>> by_prefix;
  for (const auto& ch : subordinate_chains(p, 2, 5)) {
    IntervalSpec iv{make_point_pair(p, ch)};
    std::vector<Ideal> tower;
    for (int level = 2; level <= 5; ++level) tower.push_back(interval_ideal(p, iv, level, 5).candidate);
    std::vector<MatrixUnit> prefix(ch.units.begin(), ch.units.end() - 1);
    by_prefix[prefix].push_back(tower);
  }
  std::map<std::vector<Ideal>, std::vector<MatrixUnit>> seen;
  for (const auto& [prefix, towers] : by_prefix)
    for (const auto& t : towers) {
      auto [it, fresh] = seen.emplace(t, prefix);
      c.require(fresh || it->second == prefix, "two prefixes give the same ideal");
    }
  if (c.out.ok)
    c.out.detail = std::to_string(by_prefix.size()) + " depth-4 prefixes, " + std::to_string(seen.size()) +
                   " distinct truncations";
  return c.out;
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {"ideal census", ideal_census, 1.0},
      {"meet irreducible census", mi_census, 5.0},
      {"diagonal projection meets", projection_meets, 0.0},
      {"block map chains", example_1_3_chains, 10.0},
      {"chain extraction round trip", round_trip, 0.0},
      {"nest representation", nest_representation, 0.0},
      {"classification census", classification_census, 0.0},
      {"codimension signature", codimension_signature, 0.0},
      {"Parrott step", parrott, 0.0},
      {"rectangle distance attained", distance_formula, 30.0},
      {"meet irreducible supremum", mi_supremum, 0.0},
      {"spectrum injectivity", spectrum_injectivity, 0.0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& cr = criteria[i];
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && cr.budget_s > 0 && secs >= cr.budget_s) {
      o.ok = false;
      o.detail += " (over " + std::to_string(cr.budget_s) + " s budget)";
    }
    if (!o.ok) ++failures;
    std::printf("%s %2zu %-30s %.3fs  %s\n", o.ok ? "PASS" : "FAIL", i + 1, cr.name, secs, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
