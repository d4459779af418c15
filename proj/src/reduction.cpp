#include "tfm/reduction.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tfm/search.hpp"
#include "tfm/utility.hpp"

namespace tfm {
namespace {

using nlohmann::json;

// Miner plus coalition utility with outcomes at `bids` and values `values`.
SignedMoney joint_value(const Mechanism& mech, const BidVector& bids, const BidVector& values, const BidderSet& C) {
  Setting s(bids, values);
  Outcome o = mech.evaluate(bids);
  return miner_utility(o, s) + coalition_utility(o, s, Setting::honest(values), C);
}

// Passive witness from honest `from` to `to` for coalition C.
Witness passive_witness(const Mechanism& mech, const BidVector& from, const BidVector& to, const BidderSet& C) {
  SideContract sc;
  sc.coalition = normalized(C);
  for (std::size_t i : sc.coalition) sc.new_bids.emplace(i, to[i]);
  return make_witness(mech, Setting::honest(from), std::move(sc));
}

// Coalition members whose bid changes.
std::vector<std::size_t> movers_of(const Witness& w) {
  std::vector<std::size_t> out;
  for (std::size_t i : w.contract.coalition) {
    if (w.A.bids()[i] != w.B.bids()[i]) out.push_back(i);
  }
  return out;
}

json step_json(const StepValue& s) {
  return {{"before", bids_to_json(s.before)},
          {"after", bids_to_json(s.after)},
          {"mover", s.mover},
          {"value_before", s.value_before.str()},
          {"value_after", s.value_after.str()},
          {"delta", (s.value_after - s.value_before).str()}};
}

json failure_json(const StageFailure& f) {
  return {{"stage", f.stage}, {"assumption", f.assumption}, {"message", f.message}, {"details", f.details}};
}

json witness_summary(const Witness& w) {
  json j = witness_to_json(w);
  j["order"] = w.contract.order();
  return j;
}

}  // namespace

// ---------------------------------------------------------------- activize

ActivizeResult activize_to_passive(const Mechanism& mech, const Witness& w) {
  if (w.contract.model == MinerModel::passive) return {w, "passive-input", json::object()};
  const std::size_t n = w.A.real_count();
  json details;

  // Fakes: each becomes a value-0 bidder in the coalition bidding the fake value.
  BidVector a = w.A.bids();
  SideContract sc;
  sc.model = MinerModel::active;
  sc.coalition = w.contract.coalition;
  sc.new_bids = w.contract.new_bids;
  sc.omitted = w.contract.omitted;
  for (std::size_t f = 0; f < w.contract.fakes.size(); ++f) {
    a.push_back(Money(0));
    sc.coalition.push_back(n + f);
    sc.new_bids.emplace(n + f, w.contract.fakes[f]);
  }
  Witness rewritten = make_witness(mech, Setting::honest(a), sc);
  details["fakes_rewritten"] = w.contract.fakes.size();
  details["delta_after_fake_rewrite"] = rewritten.delta.str();
  if (rewritten.delta != w.delta) {
    throw InternalConsistencyError("fake-bid rewrite changed the joint utility", details);
  }
  if (sc.omitted.empty()) {
    rewritten.contract.model = MinerModel::passive;
    Witness out = make_witness(mech, rewritten.A, rewritten.contract);
    return {out, w.contract.fakes.empty() ? "passive-input" : "fakes", details};
  }

  // Omissions: X applies only the omissions; one of A->X, X->B is beneficial.
  const BidderSet& C = rewritten.contract.coalition;
  SideContract omit_only;
  omit_only.model = MinerModel::active;
  omit_only.coalition = C;
  for (std::size_t i : C) omit_only.new_bids.emplace(i, rewritten.A.bids()[i]);
  omit_only.omitted = sc.omitted;
  Witness ax = make_witness(mech, rewritten.A, omit_only);
  BidVector x = ax.B.bids();
  Witness xb = passive_witness(mech, x, rewritten.B.bids(), C);
  details["A_to_X"] = ax.delta.str();
  details["X_to_B"] = xb.delta.str();
  details["X"] = bids_to_json(x);

  if (ax.delta.sign() > 0) {
    // Drop coalition members the omission alone does not need.
    Outcome oa = mech.evaluate(rewritten.A);
    Outcome ox = mech.evaluate(ax.B);
    std::vector<std::pair<SignedMoney, std::size_t>> gains;
    for (std::size_t i : C) {
      const Money& v = rewritten.A.values()[i];
      gains.emplace_back(bidder_utility(ox, ax.B, i, v) - bidder_utility(oa, rewritten.A, i, v), i);
    }
    std::stable_sort(gains.begin(), gains.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
    std::vector<BidderSet> candidates;
    if (!gains.empty()) candidates.push_back({gains[0].second});
    candidates.push_back({});
    if (gains.size() >= 2) candidates.push_back(normalized({gains[0].second, gains[1].second}));
    for (std::size_t p = 0; p < gains.size(); ++p) {
      for (std::size_t q = p + 1; q < gains.size(); ++q) candidates.push_back(normalized({gains[p].second, gains[q].second}));
    }
    json gj = json::object();
    for (const auto& [g, i] : gains) gj[std::to_string(i)] = g.str();
    details["omission_gains"] = gj;
    for (const auto& cand : candidates) {
      SideContract small;
      small.model = MinerModel::active;
      small.coalition = cand;
      for (std::size_t i : cand) small.new_bids.emplace(i, rewritten.A.bids()[i]);
      small.omitted = sc.omitted;
      Witness sw = make_witness(mech, rewritten.A, small);
      if (verify_witness(mech, sw)) {
        details["branch_coalition"] = cand;
        return {sw, "omit-only", details};
      }
    }
  }
  if (xb.delta.sign() > 0 && verify_witness(mech, xb)) return {xb, "after-omission", details};
  throw InternalConsistencyError("neither A->X nor X->B is beneficial for a verified active witness", details);
}

// ------------------------------------------------------------ canonicalize

CanonicalizeResult canonicalize(const Mechanism& mech, const Witness& w) {
  CanonicalizeResult r;
  const BidderSet& C = w.contract.coalition;
  std::vector<std::size_t> by_a(C.begin(), C.end());
  std::stable_sort(by_a.begin(), by_a.end(),
                   [&](std::size_t x, std::size_t y) { return w.A.bids()[x] > w.A.bids()[y]; });
  std::vector<Money> new_bids;
  for (std::size_t i : C) new_bids.push_back(w.B.bids()[i]);
  std::sort(new_bids.begin(), new_bids.end(), std::greater<>());
  SideContract sc = w.contract;
  for (std::size_t k = 0; k < by_a.size(); ++k) sc.new_bids[by_a[k]] = new_bids[k];
  if (sc == w.contract) {
    r.witness = w;
    return r;
  }
  Witness out = make_witness(mech, w.A, sc);
  r.changed = true;
  if (out.delta >= w.delta) {
    r.witness = std::move(out);
  } else if (out.delta.sign() > 0) {
    r.note = "canonical delta " + out.delta.str() + " below input delta " + w.delta.str();
    r.witness = std::move(out);
  } else {
    r.failure = StageFailure{"canonicalize", "prefix confirmation",
                             "reassigned contract is not beneficial",
                             {{"A", bids_to_json(w.A.bids())},
                              {"B", bids_to_json(out.B.bids())},
                              {"delta", out.delta.str()}}};
  }
  return r;
}

// -------------------------------------------------------------- decompose

std::string to_string(MoverClass c) {
  switch (c) {
    case MoverClass::U_I: return "U_I";
    case MoverClass::U_O: return "U_O";
    case MoverClass::D_I: return "D_I";
    case MoverClass::D_O: return "D_O";
  }
  return "?";
}

json Decomposition::to_json() const {
  json j;
  j["coalition"] = coalition;
  auto steps_j = json::array();
  for (const auto& s : steps) steps_j.push_back(bids_to_json(s));
  j["steps"] = steps_j;
  auto moves_j = json::array();
  for (const auto& m : moves) {
    json mj{{"bidder", m.bidder},
            {"from", m.from.str()},
            {"to", m.to.str()},
            {"class", to_string(m.cls)},
            {"mover_confirmed_after", m.mover_confirmed_after},
            {"guarantee_ok", m.guarantee_ok},
            {"order_maintained", m.order_maintained}};
    if (m.increase_side_condition) mj["increase_side_condition"] = *m.increase_side_condition;
    moves_j.push_back(mj);
  }
  j["moves"] = moves_j;
  j["classes"] = {{"U_I", U_I}, {"U_O", U_O}, {"D_I", D_I}, {"D_O", D_O}};
  j["violations"] = violations;
  return j;
}

Decomposition salsa_decompose(const Mechanism& mech, const Witness& w) {
  Decomposition d;
  d.coalition = w.contract.coalition;
  const BidVector& a = w.A.bids();
  const BidVector& b = w.B.bids();
  Outcome ob = mech.evaluate(b);
  std::vector<std::size_t> U, D;
  for (std::size_t i : d.coalition) {
    if (b[i] > a[i]) {
      (ob.confirmed[i] ? d.U_I : d.U_O).push_back(i);
    } else if (b[i] < a[i]) {
      (ob.confirmed[i] ? d.D_I : d.D_O).push_back(i);
      D.push_back(i);
    } else if (ob.confirmed[i]) {
      // unchanged members are in neither U nor D
    }
  }
  auto desc = [&](std::vector<std::size_t> v) {
    std::stable_sort(v.begin(), v.end(), [&](std::size_t x, std::size_t y) { return a[x] > a[y]; });
    return v;
  };
  auto asc = [&](std::vector<std::size_t> v) {
    // ascending A-bid; among equal bids the higher index first, mirroring the descending order
    std::sort(v.begin(), v.end(), [&](std::size_t x, std::size_t y) {
      if (a[x] != a[y]) return a[x] < a[y];
      return x > y;
    });
    return v;
  };
  std::vector<std::pair<std::size_t, MoverClass>> order;
  for (std::size_t i : desc(d.U_I)) order.emplace_back(i, MoverClass::U_I);
  for (std::size_t i : asc(D)) {
    order.emplace_back(i, std::binary_search(d.D_I.begin(), d.D_I.end(), i) ? MoverClass::D_I : MoverClass::D_O);
  }
  for (std::size_t i : desc(d.U_O)) order.emplace_back(i, MoverClass::U_O);

  d.steps.push_back(a);
  Outcome prev_out = mech.evaluate(a);
  for (const auto& [i, cls] : order) {
    const BidVector& prev = d.steps.back();
    BidVector next = prev;
    next[i] = b[i];
    Outcome out = mech.evaluate(next);
    DecompositionStep st{i, prev[i], next[i], cls};
    st.mover_confirmed_after = out.confirmed[i];
    if (cls == MoverClass::U_O && out.confirmed[i]) {
      st.guarantee_ok = false;
      d.violations.push_back("U_O mover " + std::to_string(i) + " is confirmed at " + to_string(next));
    }
    if (cls == MoverClass::D_I && !out.confirmed[i]) {
      st.guarantee_ok = false;
      d.violations.push_back("D_I mover " + std::to_string(i) + " is unconfirmed at " + to_string(next));
    }
    for (std::size_t p : d.coalition) {
      for (std::size_t q : d.coalition) {
        if (prev[p] > prev[q] && next[p] < next[q]) st.order_maintained = false;
      }
    }
    if (!st.order_maintained) {
      d.violations.push_back("coalition order broken by the move of bidder " + std::to_string(i) + " at " +
                             to_string(next));
    }
    if (cls == MoverClass::U_I || cls == MoverClass::U_O) {
      if (!prev_out.confirmed[i]) {
        std::optional<Money> lowest;
        for (std::size_t k = 0; k < prev.size(); ++k) {
          if (prev_out.confirmed[k] && (!lowest || prev[k] < *lowest)) lowest = prev[k];
        }
        st.increase_side_condition = !lowest || next[i] < *lowest;
      }
    }
    d.moves.push_back(st);
    d.steps.push_back(std::move(next));
    prev_out = std::move(out);
  }
  return d;
}

// ------------------------------------------------------------ single mover

SingleMoverResult isolate_single_mover(const Mechanism& mech, const Witness& input, const Decomposition& d) {
  SingleMoverResult r;
  const BidderSet& C = d.coalition;

  // Telescoping identity over sigma = U_I + D_I with i* the last mover.
  {
    const BidVector& a = d.steps.front();
    const BidVector& b = d.steps.back();
    Outcome ob = mech.evaluate(b);
    BidderSet sigma = d.U_I;
    sigma.insert(sigma.end(), d.D_I.begin(), d.D_I.end());
    sigma = normalized(sigma);
    SignedMoney total;
    if (!d.moves.empty()) {
      const std::size_t last = d.moves.back().bidder;
      const bool last_in_sigma = std::binary_search(sigma.begin(), sigma.end(), last);
      for (std::size_t i : sigma) total += a[i].value() - ob.pay[i].value();
      SignedMoney sub;
      for (std::size_t i : sigma) {
        if (i != last) sub += b[i].value() - ob.pay[i].value();
      }
      if (last_in_sigma) sub += a[last].value() - ob.pay[last].value();
      total -= sub;
      for (std::size_t i : sigma) {
        if (i != last) total += b[i].value() - a[i].value();
      }
    }
    r.claim_identity = total;
  }

  if (movers_of(input).size() == 1) {
    r.witness = input;
    r.scan = "input";
    return r;
  }

  auto consider = [&](const BidVector& before, const BidVector& after, std::size_t mover) {
    StepValue sv{before, after, mover, joint_value(mech, before, before, C), joint_value(mech, after, before, C)};
    r.candidates.push_back(sv);
    return sv.value_after > sv.value_before;
  };

  for (std::size_t s = 0; s + 1 < d.steps.size(); ++s) {
    if (consider(d.steps[s], d.steps[s + 1], d.moves[s].bidder)) {
      r.witness = passive_witness(mech, d.steps[s], d.steps[s + 1], C);
      r.scan = "decomposition";
      return r;
    }
  }

  // Lattice scan: every single move between partial applications of the contract.
  std::vector<std::size_t> movers;
  for (const auto& m : d.moves) movers.push_back(m.bidder);
  std::sort(movers.begin(), movers.end());
  const BidVector& a = d.steps.front();
  const BidVector& b = d.steps.back();
  std::set<std::pair<BidVector, BidVector>> seen;
  for (const auto& c : r.candidates) seen.insert({c.before, c.after});
  std::optional<std::pair<BidVector, BidVector>> hit;
  if (movers.size() <= 8) {
    std::vector<std::uint32_t> masks;
    for (std::uint32_t m = 0; m < (1u << movers.size()); ++m) masks.push_back(m);
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint32_t x, std::uint32_t y) { return __builtin_popcount(x) < __builtin_popcount(y); });
    for (std::uint32_t mask : masks) {
      BidVector from = a;
      for (std::size_t t = 0; t < movers.size(); ++t) {
        if (mask >> t & 1u) from[movers[t]] = b[movers[t]];
      }
      for (std::size_t t = 0; t < movers.size(); ++t) {
        if (mask >> t & 1u) continue;
        BidVector to = from;
        to[movers[t]] = b[movers[t]];
        if (!seen.insert({from, to}).second) continue;
        if (consider(from, to, movers[t]) && !hit) hit = {from, to};
      }
    }
  }
  if (hit) {
    r.witness = passive_witness(mech, hit->first, hit->second, C);
    r.scan = "lattice";
    return r;
  }

  // No single move helps: report the steps and a tie-breaking counter-profile.
  json cand = json::array();
  for (const auto& c : r.candidates) cand.push_back(step_json(c));
  json details{{"candidates", cand}};
  for (const auto& c : r.candidates) {
    Outcome o1 = mech.evaluate(c.before);
    Outcome o2 = mech.evaluate(c.after);
    const std::size_t j = c.mover;
    if (o1.confirmed[j] || o2.confirmed[j]) continue;
    for (std::size_t i = 0; i < c.before.size(); ++i) {
      if (i == j) continue;
      if (is_zero_utility(o1, c.before, i) && is_zero_utility(o2, c.after, i) && o1.confirmed[i] != o2.confirmed[i]) {
        details["tie_breaking_counter_profile"] = {{"before", bids_to_json(c.before)},
                                                   {"after", bids_to_json(c.after)},
                                                   {"mover", j},
                                                   {"flipped", i}};
        break;
      }
    }
    if (details.contains("tie_breaking_counter_profile")) break;
  }
  r.failure = StageFailure{"isolate-mover", "consistent tie-breaking",
                           "no single-move step of the decomposition is beneficial", details};
  return r;
}

// ---------------------------------------------------------------- localize

std::string to_string(LocalizeMode m) { return m == LocalizeMode::grid ? "grid" : "bisect"; }

LocalizeMode parse_localize_mode(const std::string& text) {
  if (text == "grid") return LocalizeMode::grid;
  if (text == "bisect") return LocalizeMode::bisect;
  throw std::invalid_argument("unknown localization mode '" + text + "' (expected grid|bisect)");
}

namespace {

struct MoverView {
  std::size_t mover;
  BidVector a;
  BidVector b;
};

MoverView single_mover(const Witness& w) {
  auto m = movers_of(w);
  if (m.size() != 1) throw std::invalid_argument("witness is not a single-mover witness");
  return {m[0], w.A.bids(), w.B.bids()};
}

}  // namespace

LocalizeResult localize_jump(const Mechanism& mech, const Witness& w, const ReductionOptions& opts) {
  LocalizeResult r;
  const MoverView mv = single_mover(w);
  const std::size_t i = mv.mover;
  const BidderSet& C = w.contract.coalition;
  const Money start = mv.a[i];
  const Money end = mv.b[i];
  const bool up = end > start;
  auto g = [&](const Money& x) {
    BidVector bids = mv.a;
    bids[i] = x;
    return joint_value(mech, bids, mv.a, C);
  };
  // Rebased pair: the mover's value is its bid at the start of the pair.
  auto rebased = [&](const Money& from, const Money& to) {
    BidVector lo = mv.a;
    lo[i] = from;
    BidVector hi = mv.a;
    hi[i] = to;
    return passive_witness(mech, lo, hi, C);
  };

  if (opts.mode == LocalizeMode::bisect) {
    if (mech.info().domain.is_grid()) {
      r.failure = StageFailure{"localize", "continuous domain",
                               "bisection needs a mechanism defined on all rationals; use grid mode", json::object()};
      return r;
    }
    const SignedMoney budget = w.delta / Rational(static_cast<long long>(2 * C.size() + 1));
    Money lo = start, hi = end;
    SignedMoney glo = g(lo), ghi = g(hi);
    std::set<std::string> distinct{glo.str(), ghi.str()};
    json trail = json::array();
    while (r.iterations < opts.max_iters) {
      Rational width = abs(hi.value() - lo.value());
      if (width < budget) break;
      Money mid(Rational((lo.value() + hi.value()) / Rational(2)));
      SignedMoney gm = g(mid);
      distinct.insert(gm.str());
      SignedMoney first = gm - glo, second = ghi - gm;
      if (first >= second) {
        hi = mid;
        ghi = gm;
      } else {
        lo = mid;
        glo = gm;
      }
      ++r.iterations;
      trail.push_back({{"lo", lo.str()}, {"hi", hi.str()}, {"jump", (ghi - glo).str()}});
    }
    r.epsilon = Money(abs(hi.value() - lo.value()));
    r.jump = ghi - glo;
    r.multi_jump = distinct.size() > 2;
    r.g_values = {{"bracket", trail}, {"distinct_values", distinct.size()}};
    Witness out = rebased(lo, hi);
    if (verify_witness(mech, out)) {
      r.witness = std::move(out);
    } else {
      r.alternates.push_back(std::move(out));
      r.failure = StageFailure{"localize", "single jump", "bisected pair is not beneficial",
                               {{"lo", lo.str()}, {"hi", hi.str()}, {"jump", r.jump.str()}}};
    }
    return r;
  }

  // Grid mode: walk every grid value between the two bids.
  std::vector<Money> path;
  std::vector<Money> grid = opts.grid;
  if (grid.empty() && mech.info().domain.grid) grid = *mech.info().domain.grid;
  const Money& lo_v = up ? start : end;
  const Money& hi_v = up ? end : start;
  path.push_back(start);
  path.push_back(end);
  for (const auto& x : grid) {
    if (x > lo_v && x < hi_v) path.push_back(x);
  }
  std::sort(path.begin(), path.end());
  path.erase(std::unique(path.begin(), path.end()), path.end());
  if (!up) std::reverse(path.begin(), path.end());

  std::vector<SignedMoney> gv;
  json gj = json::array();
  std::set<std::string> distinct;
  for (const auto& x : path) {
    gv.push_back(g(x));
    distinct.insert(gv.back().str());
    gj.push_back({{"bid", x.str()}, {"g", gv.back().str()}});
  }
  r.g_values = gj;
  r.multi_jump = distinct.size() > 2;

  struct Cand {
    std::size_t t;
    SignedMoney jump;
    Witness w;
  };
  std::vector<Cand> cands;
  for (std::size_t t = 0; t + 1 < path.size(); ++t) {
    cands.push_back({t, gv[t + 1] - gv[t], rebased(path[t], path[t + 1])});
  }
  std::stable_sort(cands.begin(), cands.end(), [&](const Cand& x, const Cand& y) {
    const bool fx = x.jump >= w.delta, fy = y.jump >= w.delta;
    if (fx != fy) return fx;
    return x.w.delta > y.w.delta;
  });
  for (auto& c : cands) {
    if (!verify_witness(mech, c.w)) continue;
    if (!r.witness) {
      r.witness = c.w;
      r.jump = c.jump;
      r.epsilon = Money(abs(path[c.t + 1].value() - path[c.t].value()));
    } else {
      r.alternates.push_back(c.w);
    }
  }
  if (!r.witness) {
    r.failure = StageFailure{"localize", "single jump", "no adjacent grid pair is beneficial", {{"g", gj}}};
  }
  return r;
}

// ----------------------------------------------------- isolate beneficiary

BeneficiaryResult isolate_beneficiary(const Mechanism& mech, const Witness& w, const Money& epsilon,
                                      const SignedMoney& target_delta, bool check_epsilon) {
  BeneficiaryResult r;
  const MoverView mv = single_mover(w);
  const std::size_t i = mv.mover;
  const BidderSet& C = w.contract.coalition;
  if (check_epsilon) {
    r.epsilon_ok = epsilon.value() * Rational(static_cast<long long>(2 * C.size() + 1)) < target_delta;
  }
  Outcome oa = mech.evaluate(w.A);
  Outcome ob = mech.evaluate(w.B);
  std::vector<std::pair<std::size_t, SignedMoney>> gains;
  for (std::size_t j : C) {
    if (j == i) continue;
    const Money& v = w.A.values()[j];
    gains.emplace_back(j, bidder_utility(ob, w.B, j, v) - bidder_utility(oa, w.A, j, v));
  }
  r.gains = gains;
  auto ranked = gains;
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.second > y.second; });

  std::vector<std::pair<BidderSet, bool>> tries;  // (coalition, reversed)
  if (!ranked.empty()) tries.push_back({normalized({i, ranked[0].first}), false});
  tries.push_back({{i}, false});
  tries.push_back({{i}, true});
  for (std::size_t k = 1; k < ranked.size(); ++k) {
    if (ranked[k].second.sign() > 0) tries.push_back({normalized({i, ranked[k].first}), false});
  }
  for (const auto& [coal, reversed] : tries) {
    Witness cand = reversed ? passive_witness(mech, mv.b, mv.a, coal) : passive_witness(mech, mv.a, mv.b, coal);
    if (verify_witness(mech, cand)) {
      r.witness = std::move(cand);
      return r;
    }
  }
  json gj = json::object();
  for (const auto& [j, gain] : gains) gj[std::to_string(j)] = gain.str();
  r.failure = StageFailure{"isolate-beneficiary", "epsilon bound",
                           "no pair containing the mover is beneficial",
                           {{"gains", gj}, {"epsilon", epsilon.str()}, {"epsilon_ok", r.epsilon_ok}}};
  return r;
}

// ---------------------------------------------------------------- pipeline

json ReductionTrace::to_json() const {
  json j;
  j["input"] = witness_summary(input);
  auto st = json::array();
  for (const auto& s : stages) st.push_back({{"stage", s.stage}, {"status", s.status}, {"details", s.details}});
  j["stages"] = st;
  j["status"] = succeeded() ? "ok" : "failed";
  j["passthrough"] = passthrough;
  if (!route.empty()) j["route"] = route;
  if (output) j["output"] = witness_summary(*output);
  if (failure) j["failure"] = failure_json(*failure);
  return j;
}

namespace {

// Every pair {i, j} and every adjacent grid step of the mover, both directions.
std::optional<Witness> pair_sweep(const Mechanism& mech, const Witness& w, const std::vector<Money>& grid) {
  const MoverView mv = single_mover(w);
  const std::size_t i = mv.mover;
  std::vector<Money> path{mv.a[i], mv.b[i]};
  const Money lo = std::min(mv.a[i], mv.b[i]), hi = std::max(mv.a[i], mv.b[i]);
  for (const auto& x : grid) {
    if (x > lo && x < hi) path.push_back(x);
  }
  std::sort(path.begin(), path.end());
  path.erase(std::unique(path.begin(), path.end()), path.end());
  std::vector<BidderSet> coalitions{{i}};
  for (std::size_t j : w.contract.coalition) {
    if (j != i) coalitions.push_back(normalized({i, j}));
  }
  for (const auto& coal : coalitions) {
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
      BidVector x = mv.a, y = mv.a;
      x[i] = path[t];
      y[i] = path[t + 1];
      for (const auto& cand : {passive_witness(mech, x, y, coal), passive_witness(mech, y, x, coal)}) {
        if (verify_witness(mech, cand)) return cand;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

ReductionTrace reduce_to_2sc(const Mechanism& mech, const Witness& w, const ReductionOptions& opts) {
  ReductionTrace t{w, {}, std::nullopt, std::nullopt, false, ""};
  auto fail = [&](StageFailure f) {
    t.failure = std::move(f);
    if (w.contract.order() <= 2 && verify_witness(mech, w)) {
      t.output = w;
      t.passthrough = true;
    }
    return t;
  };
  auto input_check = check_witness(mech, w);
  if (!input_check.ok) {
    t.failure = StageFailure{"input", "verified witness", input_check.diagnostic, json::object()};
    return t;
  }
  std::vector<Money> grid = opts.grid;
  if (grid.empty() && mech.info().domain.grid) grid = *mech.info().domain.grid;

  // 1. active -> passive
  Witness cur = w;
  try {
    ActivizeResult ar = activize_to_passive(mech, w);
    json d = ar.details;
    d["branch"] = ar.branch;
    d["output"] = witness_summary(ar.witness);
    t.stages.push_back({"activize", w.contract.model == MinerModel::passive ? "skipped" : "ok", d});
    cur = ar.witness;
    if (cur.contract.model == MinerModel::active) {
      t.output = cur;
      t.route = "omission-only contract";
      return t;
    }
  } catch (const InternalConsistencyError& e) {
    t.stages.push_back({"activize", "failed", e.details()});
    return fail({"activize", "active/passive rewrite", e.what(), e.details()});
  }

  // 2. canonical ordering
  CanonicalizeResult cr = canonicalize(mech, cur);
  if (cr.failure) {
    t.stages.push_back({"canonicalize", "failed", failure_json(*cr.failure)});
    return fail(*cr.failure);
  }
  {
    json d{{"changed", cr.changed}, {"output", witness_summary(*cr.witness)}};
    if (!cr.note.empty()) d["note"] = cr.note;
    t.stages.push_back({"canonicalize", "ok", d});
  }
  cur = *cr.witness;

  // 3. decomposition
  Decomposition dec = salsa_decompose(mech, cur);
  t.stages.push_back({"decompose", dec.violations.empty() ? "ok" : "ok-with-violations", dec.to_json()});

  // 4. single mover
  SingleMoverResult sm = isolate_single_mover(mech, cur, dec);
  {
    json cand = json::array();
    for (const auto& c : sm.candidates) cand.push_back(step_json(c));
    json d{{"scan", sm.scan}, {"candidates", cand}, {"claim_identity", sm.claim_identity.str()},
           {"claim_identity_zero", sm.claim_identity.is_zero()}};
    if (sm.witness) d["output"] = witness_summary(*sm.witness);
    if (sm.failure) d["failure"] = failure_json(*sm.failure);
    t.stages.push_back({"isolate-mover", sm.failure ? "failed" : "ok", d});
  }
  if (sm.failure) return fail(*sm.failure);
  cur = *sm.witness;

  // 5. localize the jump
  LocalizeResult lr = localize_jump(mech, cur, opts);
  {
    json d{{"mode", to_string(opts.mode)}, {"g", lr.g_values}, {"multi_jump", lr.multi_jump},
           {"iterations", lr.iterations}, {"epsilon", lr.epsilon.str()}, {"jump", lr.jump.str()},
           {"alternates", lr.alternates.size()}};
    if (lr.witness) d["output"] = witness_summary(*lr.witness);
    if (lr.failure) d["failure"] = failure_json(*lr.failure);
    t.stages.push_back({"localize", lr.failure ? "failed" : "ok", d});
  }

  // 6. one mover, one beneficiary
  std::vector<Witness> localized;
  if (lr.witness) localized.push_back(*lr.witness);
  localized.insert(localized.end(), lr.alternates.begin(), lr.alternates.end());
  json attempts = json::array();
  for (std::size_t k = 0; k < localized.size(); ++k) {
    BeneficiaryResult br = isolate_beneficiary(mech, localized[k], k == 0 ? lr.epsilon : Money(0), cur.delta,
                                               opts.mode == LocalizeMode::bisect && k == 0);
    json gj = json::object();
    for (const auto& [j, g] : br.gains) gj[std::to_string(j)] = g.str();
    attempts.push_back({{"gains", gj}, {"epsilon_ok", br.epsilon_ok}, {"ok", br.witness.has_value()}});
    if (br.witness) {
      t.stages.push_back({"isolate-beneficiary", "ok",
                          {{"attempts", attempts}, {"output", witness_summary(*br.witness)}}});
      t.output = *br.witness;
      t.route = k == 0 ? "constructive" : "constructive (alternate jump)";
      return t;
    }
  }
  if (auto sw = pair_sweep(mech, cur, grid)) {
    t.stages.push_back({"isolate-beneficiary", "ok",
                        {{"attempts", attempts}, {"sweep", true}, {"output", witness_summary(*sw)}}});
    t.output = *sw;
    t.route = "pair sweep along the mover path";
    return t;
  }
  if (opts.search_fallback && !grid.empty() && mech.accepts_length(cur.A.size())) {
    SearchLimits lim;
    lim.workers = 1;
    SearchResult s = find_c_sc(mech, grid, cur.A.size(), 2, MinerModel::passive, lim);
    if (s.witness) {
      t.stages.push_back({"isolate-beneficiary", "ok",
                          {{"attempts", attempts}, {"search_fallback", true}, {"output", witness_summary(*s.witness)}}});
      t.output = *s.witness;
      t.route = "exhaustive pair search";
      return t;
    }
  }
  StageFailure f{"isolate-beneficiary", "two-party collusion-proofness of the single-mover step",
                 "no pair witness found", {{"attempts", attempts}}};
  t.stages.push_back({"isolate-beneficiary", "failed", failure_json(f)});
  return fail(f);
}

}  // namespace tfm
