#include "tfm/suite.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>

#include "tfm/axioms.hpp"
#include "tfm/circuit.hpp"
#include "tfm/properties.hpp"
#include "tfm/reduction.hpp"
#include "tfm/report.hpp"
#include "tfm/scpdp.hpp"
#include "tfm/search.hpp"
#include "tfm/tabulated.hpp"
#include "tfm/utility.hpp"
#include "tfm/zoo.hpp"

namespace tfm {
namespace {

using nlohmann::json;

json grid_json(const std::vector<Money>& g) { return bids_to_json(g); }

SearchLimits limits_for(const SuiteOptions& opts) {
  SearchLimits lim;
  lim.workers = opts.workers;
  return lim;
}

bool holds(const SearchResult& r) { return r.verdict == Verdict::holds; }
bool refuted(const SearchResult& r) { return r.verdict == Verdict::refuted && r.witness.has_value(); }

json search_summary(const SearchResult& r) {
  json j{{"verdict", to_string(r.verdict)}, {"profiles_searched", r.profiles_searched}};
  if (r.witness) j["witness"] = witness_to_json(*r.witness);
  return j;
}

// Claim (*) bookkeeping pulled out of a trace.
void count_claims(const ReductionTrace& t, std::size_t& checked, std::size_t& nonzero) {
  for (const auto& s : t.stages) {
    if (s.stage != "isolate-mover") continue;
    ++checked;
    if (!s.details.value("claim_identity_zero", false)) ++nonzero;
  }
}

std::vector<Money> pick_grid(std::mt19937_64& rng, std::size_t k) {
  static const std::vector<Money> pool{Money(0), Money(1, 2), Money(1), Money(3, 2), Money(2), Money(3), Money(4)};
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Fisher-Yates with the raw engine so the draw is identical across standard libraries.
  for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng() % (i + 1)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<Money> g;
  for (std::size_t i : idx) g.push_back(pool[i]);
  return g;
}

}  // namespace

// 1 ------------------------------------------------------------------------

json salsa_example_report() {
  const Mechanism m = salsa_counterexample();
  const BidVector A{Money(10), Money(1)}, B{Money(9), Money(8)}, X{Money(9), Money(1)}, Y{Money(10), Money(8)};
  const BidderSet C{0, 1};
  auto joint = [&](const BidVector& bids, const BidVector& values) {
    Setting s(bids, values);
    Outcome o = m.evaluate(bids);
    return miner_utility(o, s) + coalition_utility(o, s, Setting::honest(values), C);
  };
  struct Step {
    const char* label;
    BidVector from, to;
    long long before, after;
  };
  const std::vector<Step> steps{{"A->B", A, B, 0, 1},
                                {"A->Y", A, Y, 0, -2},
                                {"A->X", A, X, 0, 0},
                                {"X->B", X, B, 0, 0},
                                {"Y->B", Y, B, 5, 1}};
  json rows = json::array();
  bool direct_ok = true;
  for (const auto& s : steps) {
    SignedMoney b = joint(s.from, s.from), a = joint(s.to, s.from);
    bool ok = b == Rational(s.before) && a == Rational(s.after);
    direct_ok = direct_ok && ok;
    rows.push_back({{"step", s.label}, {"before", b.str()}, {"after", a.str()}, {"ok", ok}});
  }

  SideContract sc;
  sc.coalition = C;
  sc.new_bids = {{0, B[0]}, {1, B[1]}};
  Witness w = make_witness(m, Setting::honest(A), sc);
  ReductionTrace t = reduce_to_2sc(m, w);
  bool trace_ok = !t.succeeded() && t.failure && t.failure->stage == "isolate-mover";
  json matched = json::object();
  for (const auto& st : t.stages) {
    if (st.stage != "isolate-mover") continue;
    for (const auto& s : steps) {
      if (std::string(s.label) == "A->B") continue;
      bool found = false;
      for (const auto& c : st.details.at("candidates")) {
        if (c.at("before") == bids_to_json(s.from) && c.at("after") == bids_to_json(s.to) &&
            Rational::parse(c.at("value_before").get<std::string>()) == Rational(s.before) &&
            Rational::parse(c.at("value_after").get<std::string>()) == Rational(s.after)) {
          found = true;
        }
      }
      matched[s.label] = found;
      trace_ok = trace_ok && found;
    }
  }
  trace_ok = trace_ok && matched.size() == 4 && t.input.delta == Rational(1);
  std::size_t checked = 0, nonzero = 0;
  count_claims(t, checked, nonzero);
  return {{"direct", rows},
          {"direct_ok", direct_ok},
          {"trace_failure_stage", t.failure ? t.failure->stage : ""},
          {"trace_steps_matched", matched},
          {"trace_ok", trace_ok},
          {"claim_identity", {{"checked", checked}, {"nonzero", nonzero}}},
          {"pass", direct_ok && trace_ok}};
}

// 2 ------------------------------------------------------------------------

json reduction_battery_report(const SuiteOptions& opts) {
  const SearchLimits base = limits_for(opts);
  json rows = json::array();
  std::size_t accepted = 0, generation_errors = 0, axiom_rejects = 0, reductions = 0, reduction_failures = 0,
              oracle_failures = 0, with_witness = 0, claims = 0, claims_nonzero = 0, passthrough = 0;
  std::map<std::string, std::size_t> routes;
  const std::size_t max_attempts = opts.mechanisms * 4;
  for (std::size_t t = 0; accepted < opts.mechanisms && t < max_attempts; ++t) {
    const std::uint64_t seed = opts.seed + t;
    std::mt19937_64 rng(seed);
    const std::size_t k = 3 + rng() % 3;
    const std::size_t n = 2 + rng() % 3;
    const auto grid = pick_grid(rng, k);
    const MinerModel model = t % 2 == 0 ? MinerModel::passive : MinerModel::active;
    std::optional<Mechanism> mech;
    try {
      mech = random_tabulated(grid, n, seed, all_axioms());
    } catch (const GenerationError&) {
      ++generation_errors;
      continue;
    }
    bool axioms_ok = true;
    for (const auto& r : check_all_axioms(*mech, grid, n)) axioms_ok = axioms_ok && r.pass;
    if (!axioms_ok) {
      ++axiom_rejects;
      continue;
    }
    ++accepted;
    json row{{"seed", seed}, {"grid", grid_json(grid)}, {"n", n}, {"model", to_string(model)}};

    std::vector<Witness> inputs;
    SearchResult full = find_c_sc(*mech, grid, n, n, model, base);
    if (full.witness) inputs.push_back(*full.witness);
    if (n >= 3) {
      SearchLimits wide = base;
      wide.min_coalition = 3;
      SearchResult big = find_c_sc(*mech, grid, n, n, model, wide);
      if (big.witness) inputs.push_back(*big.witness);
    }
    row["verdict"] = to_string(full.verdict);
    json reduced = json::array();
    for (const auto& w : inputs) {
      ReductionTrace tr = reduce_to_2sc(*mech, w);
      ++reductions;
      const bool ok = tr.succeeded() && verify_witness(*mech, *tr.output) && tr.output->contract.order() <= 2;
      if (!ok) ++reduction_failures;
      if (tr.passthrough) ++passthrough;
      if (ok) ++routes[tr.route];
      count_claims(tr, claims, claims_nonzero);
      json rj{{"input_order", w.contract.order()}, {"ok", ok}, {"route", tr.route}};
      if (tr.output) rj["output_order"] = tr.output->contract.order();
      if (tr.failure) rj["failure_stage"] = tr.failure->stage;
      reduced.push_back(rj);
    }
    row["reductions"] = reduced;
    if (full.witness) {
      ++with_witness;
      SearchResult pair = find_c_sc(*mech, grid, n, 2, model, base);
      row["pair_search"] = to_string(pair.verdict);
      if (!pair.witness) ++oracle_failures;
    }
    rows.push_back(row);
  }
  json route_counts = json::object();
  for (const auto& [r, c] : routes) route_counts[r] = c;
  const bool pass = accepted >= opts.mechanisms && reduction_failures == 0 && oracle_failures == 0;
  return {{"mechanisms_accepted", accepted},
          {"mechanisms_requested", opts.mechanisms},
          {"generation_errors", generation_errors},
          {"axiom_rejects", axiom_rejects},
          {"mechanisms_with_witness", with_witness},
          {"reductions", reductions},
          {"reduction_failures", reduction_failures},
          {"passthrough", passthrough},
          {"pair_search_failures", oracle_failures},
          {"routes", route_counts},
          {"claim_identity", {{"checked", claims}, {"nonzero", claims_nonzero}}},
          {"rows", rows},
          {"pass", pass}};
}

// 3 ------------------------------------------------------------------------

json single_item_report(const SuiteOptions& opts) {
  const SearchLimits lim = limits_for(opts);
  const std::map<int, std::vector<Money>> grids{
      {0, {Money(0), Money(1, 2), Money(1), Money(3, 2), Money(2)}},
      {1, {Money(0), Money(1, 2), Money(1), Money(3, 2), Money(2)}},
      {2, {Money(0), Money(1), Money(2), Money(5, 2), Money(3)}}};
  json rows = json::array();
  bool pass = true;
  for (const auto& [r, grid] : grids) {
    const Mechanism m = first_price_burned_reserve(Money(r));
    const Mechanism shaded = shaded_first_price(Money(r), Money(1, 2));
    for (std::size_t n = 1; n <= 3; ++n) {
      SearchResult p = find_c_sc(m, grid, n, n, MinerModel::passive, lim);
      SearchResult a = find_c_sc(m, grid, n, n, MinerModel::active, lim);
      SearchResult s = find_c_sc(shaded, grid, n, 1, MinerModel::passive, lim);
      const bool s_ok = refuted(s) && verify_witness(shaded, *s.witness);
      // With one bidder there is no loser to outbid the shaded winner.
      const bool need_refutation = n >= 2;
      const bool ok = holds(p) && holds(a) && (!need_refutation || s_ok);
      pass = pass && ok;
      rows.push_back({{"r", r},
                      {"grid", grid_json(grid)},
                      {"n", n},
                      {"passive", search_summary(p)},
                      {"active", search_summary(a)},
                      {"shaded_c1", search_summary(s)},
                      {"shaded_required", need_refutation},
                      {"ok", ok}});
    }
  }
  return {{"rows", rows}, {"pass", pass}};
}

// 4 ------------------------------------------------------------------------

json posted_price_report(const SuiteOptions& opts) {
  const SearchLimits lim = limits_for(opts);
  const std::vector<Money> grid{Money(0), Money(1, 2), Money(1), Money(2)};
  const Mechanism m = fully_burned_posted_price(Money(1));
  json rows = json::array();
  bool pass = true;
  for (std::size_t n = 1; n <= 4; ++n) {
    CheckReport uic = check_uic(m, grid, n);
    SearchResult p = find_c_sc(m, grid, n, n, MinerModel::passive, lim);
    SearchResult a = find_c_sc(m, grid, n, n, MinerModel::active, lim);
    const bool ok = uic.pass && holds(p) && holds(a);
    pass = pass && ok;
    rows.push_back({{"n", n},
                    {"uic", uic.to_json()},
                    {"passive", search_summary(p)},
                    {"active", search_summary(a)},
                    {"ok", ok}});
  }
  return {{"grid", grid_json(grid)}, {"rows", rows}, {"pass", pass}};
}

// 5 ------------------------------------------------------------------------

json second_price_report(const SuiteOptions& opts) {
  const SearchLimits lim = limits_for(opts);
  const std::vector<Money> grid{Money(0), Money(1), Money(2), Money(3)};
  const Mechanism m = fully_burned_second_price();
  json rows = json::array();
  bool pass = true;
  for (std::size_t n = 2; n <= 3; ++n) {
    SearchResult p = find_c_sc(m, grid, n, 1, MinerModel::passive, lim);
    SearchResult a = find_c_sc(m, grid, n, 1, MinerModel::active, lim);
    bool omits_second = false;
    if (a.witness) {
      const BidVector& bids = a.witness->A.bids();
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return bids[x] > bids[y]; });
      const auto& om = a.witness->contract.omitted;
      omits_second = std::find(om.begin(), om.end(), order[1]) != om.end();
    }
    const bool ok = holds(p) && refuted(a) && verify_witness(m, *a.witness) && omits_second;
    pass = pass && ok;
    rows.push_back({{"n", n},
                    {"passive_c1", search_summary(p)},
                    {"active_c1", search_summary(a)},
                    {"omits_second_highest", omits_second},
                    {"ok", ok}});
  }
  return {{"grid", grid_json(grid)}, {"rows", rows}, {"pass", pass}};
}

// 6 ------------------------------------------------------------------------

json lemma_checks_report() {
  struct Case {
    std::string label;
    Mechanism mech;
    std::vector<Money> grid;
  };
  const std::vector<Money> g5{Money(0), Money(1, 2), Money(1), Money(3, 2), Money(2)};
  const std::vector<Money> g5b{Money(0), Money(1), Money(2), Money(5, 2), Money(3)};
  const std::vector<Money> g3{Money(0), Money(1), Money(2)};
  const std::vector<Money> g4{Money(0), Money(1, 2), Money(1), Money(2)};
  std::vector<Case> positives{
      {"first-price-burned-reserve(r=0)", first_price_burned_reserve(Money(0)), g5},
      {"first-price-burned-reserve(r=1)", first_price_burned_reserve(Money(1)), g5},
      {"first-price-burned-reserve(r=2)", first_price_burned_reserve(Money(2)), g5b},
      {"fully-burned-posted-price(r=1)", fully_burned_posted_price(Money(1)), g4},
      {"fully-burned-posted-price(r=1)", fully_burned_posted_price(Money(1)), g3}};
  auto run_all = [](const Mechanism& m, const std::vector<Money>& g, std::size_t n) {
    return std::vector<CheckReport>{check_nonbossiness(m, g, n),
                                    check_monotonicity(m, g, n, MonotonicityDirection::increase),
                                    check_monotonicity(m, g, n, MonotonicityDirection::decrease)};
  };
  json pos = json::array();
  bool positives_ok = true;
  for (const auto& c : positives) {
    for (std::size_t n = 1; n <= 3; ++n) {
      json checks = json::array();
      for (const auto& r : run_all(c.mech, c.grid, n)) {
        positives_ok = positives_ok && r.pass;
        checks.push_back({{"check", r.check}, {"pass", r.pass}, {"cases", r.cases}});
        if (!r.pass) checks.back()["report"] = r.to_json();
      }
      pos.push_back({{"mechanism", c.label}, {"grid", grid_json(c.grid)}, {"n", n}, {"checks", checks}});
    }
  }

  const Mechanism salsa = salsa_counterexample();
  const std::vector<std::vector<Money>> salsa_grids{{Money(1), Money(8), Money(9), Money(10)},
                                                    {Money(0), Money(1), Money(8), Money(9), Money(10)}};
  std::map<std::string, json> first_violation;
  json neg = json::array();
  for (const auto& g : salsa_grids) {
    for (std::size_t n = 2; n <= 3; ++n) {
      json checks = json::array();
      for (const auto& r : run_all(salsa, g, n)) {
        checks.push_back({{"check", r.check}, {"pass", r.pass}, {"cases", r.cases}});
        if (!r.pass && !first_violation.count(r.check)) first_violation[r.check] = r.to_json();
      }
      neg.push_back({{"grid", grid_json(g)}, {"n", n}, {"checks", checks}});
    }
  }
  json violations = json::object();
  bool salsa_ok = true;
  for (const char* name : {"non-bossiness", "increase-monotonicity", "decrease-monotonicity"}) {
    auto it = first_violation.find(name);
    violations[name] = it == first_violation.end() ? json(nullptr) : it->second;
    salsa_ok = salsa_ok && it != first_violation.end();
  }
  return {{"positives", pos},
          {"positives_pass", positives_ok},
          {"salsa_runs", neg},
          {"salsa_violations", violations},
          {"salsa_each_violated", salsa_ok},
          {"pass", positives_ok && salsa_ok}};
}

// 7 ------------------------------------------------------------------------

json tautology_roundtrip_report(const SuiteOptions& opts) {
  auto circuits = structured_circuits(3);
  const std::size_t structured = circuits.size();
  auto random = random_circuits(opts.random_circuits, 5, opts.seed);
  circuits.insert(circuits.end(), random.begin(), random.end());
  std::string answers;
  json mismatches = json::array();
  std::size_t tautologies = 0;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const bool taut = is_tautology_bruteforce(circuits[i]);
    const ScpdpDecision d = decide_2scpdp(tautology_to_scpdp(circuits[i]));
    tautologies += taut ? 1 : 0;
    answers += d.yes ? 'Y' : 'N';
    if (d.yes != taut) {
      mismatches.push_back({{"index", i}, {"tautology", taut}, {"circuit", circuit_to_json(circuits[i])}});
    }
  }
  return {{"structured", structured},
          {"random", random.size()},
          {"tautologies", tautologies},
          {"answers", answers},
          {"mismatches", mismatches},
          {"pass", mismatches.empty()}};
}

// suite --------------------------------------------------------------------

std::string criterion_name(int id) {
  switch (id) {
    case 1: return "counterexample auction utilities and failure trace";
    case 2: return "reduction to two-bidder collusion on random mechanisms";
    case 3: return "first-price with burned reserve characterization";
    case 4: return "fully burned posted price";
    case 5: return "second price active/passive separation";
    case 6: return "monotonicity and non-bossiness checks";
    case 7: return "tautology reduction round trip";
    case 8: return "telescoping identity in single-mover isolation";
    case 9: return "determinism across worker counts";
  }
  return "unknown";
}

std::vector<CriterionResult> run_suite(const SuiteOptions& opts, const std::vector<int>& ids) {
  std::vector<int> todo = ids;
  if (todo.empty()) todo = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::map<std::pair<int, unsigned>, json> cache;
  auto report = [&](int id, unsigned workers) -> const json& {
    auto key = std::make_pair(id, workers);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    SuiteOptions o = opts;
    o.workers = workers;
    json j;
    switch (id) {
      case 1: j = salsa_example_report(); break;
      case 2: j = reduction_battery_report(o); break;
      case 3: j = single_item_report(o); break;
      case 4: j = posted_price_report(o); break;
      case 5: j = second_price_report(o); break;
      case 6: j = lemma_checks_report(); break;
      case 7: j = tautology_roundtrip_report(o); break;
      default: throw std::invalid_argument("no report for criterion " + std::to_string(id));
    }
    return cache.emplace(key, std::move(j)).first->second;
  };
  const unsigned w = opts.workers ? opts.workers : default_workers();
  std::vector<CriterionResult> out;
  for (int id : todo) {
    if (id < 1 || id > 9) throw std::invalid_argument("criterion " + std::to_string(id) + " does not exist");
    auto start = std::chrono::steady_clock::now();
    CriterionResult r{id, criterion_name(id)};
    if (id <= 7) {
      r.details = report(id, w);
      r.pass = r.details.at("pass").get<bool>();
    } else if (id == 8) {
      const json& c1 = report(1, w).at("claim_identity");
      const json& c2 = report(2, w).at("claim_identity");
      const std::size_t checked = c1.at("checked").get<std::size_t>() + c2.at("checked").get<std::size_t>();
      const std::size_t nonzero = c1.at("nonzero").get<std::size_t>() + c2.at("nonzero").get<std::size_t>();
      r.details = {{"checked", checked}, {"nonzero", nonzero}};
      r.pass = checked > 0 && nonzero == 0;
    } else {
      json per = json::object();
      r.pass = true;
      for (int c : {2, 3, 7}) {
        const bool same = canonical_json(report(c, 1)) == canonical_json(report(c, 8));
        per[std::to_string(c)] = same;
        r.pass = r.pass && same;
      }
      r.details = {{"identical", per}};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

json suite_to_json(const std::vector<CriterionResult>& results, bool timing) {
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    json j{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"details", r.details}};
    if (timing) j["seconds"] = r.seconds;
    arr.push_back(j);
    all = all && r.pass;
  }
  return {{"criteria", arr}, {"pass", all}};
}

std::string suite_to_csv(const std::vector<CriterionResult>& results, bool timing) {
  std::vector<std::string> header{"id", "name", "pass"};
  if (timing) header.push_back("seconds");
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) {
    std::vector<std::string> row{std::to_string(r.id), r.name, r.pass ? "pass" : "fail"};
    if (timing) row.push_back(std::to_string(r.seconds));
    rows.push_back(row);
  }
  return csv_table(header, rows);
}

}  // namespace tfm
