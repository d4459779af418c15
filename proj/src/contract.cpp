#include "tfm/contract.hpp"

#include <algorithm>
#include <stdexcept>

#include "tfm/utility.hpp"

namespace tfm {

std::string to_string(MinerModel m) { return m == MinerModel::passive ? "passive" : "active"; }

MinerModel parse_model(const std::string& text) {
  if (text == "passive") return MinerModel::passive;
  if (text == "active") return MinerModel::active;
  throw std::invalid_argument("unknown miner model '" + text + "' (expected passive|active)");
}

Setting apply_contract(const Setting& A, const SideContract& sc) {
  if (sc.model == MinerModel::passive && (!sc.omitted.empty() || !sc.fakes.empty())) {
    throw std::invalid_argument("passive contract cannot omit or inject bids");
  }
  const std::size_t n = A.real_count();
  BidVector bids = A.bids();
  std::vector<bool> omitted = A.omitted();
  for (std::size_t i : sc.coalition) {
    if (i >= n) throw std::out_of_range("coalition member " + std::to_string(i) + " is not a real bidder");
  }
  for (const auto& [i, bid] : sc.new_bids) {
    if (!std::binary_search(sc.coalition.begin(), sc.coalition.end(), i)) {
      throw std::invalid_argument("new bid for non-member " + std::to_string(i));
    }
    bids[i] = bid;
  }
  for (std::size_t i : sc.omitted) {
    if (i >= n) throw std::out_of_range("omitted index " + std::to_string(i) + " is not a real bidder");
    bids[i] = Money(0);
    omitted[i] = true;
  }
  for (const auto& f : sc.fakes) bids.push_back(f);
  return Setting(std::move(bids), A.values(), std::move(omitted));
}

SignedMoney joint_utility_delta(const Mechanism& mech, const Setting& A, const Setting& B,
                                const BidderSet& coalition) {
  const Outcome oa = mech.evaluate(A);
  const Outcome ob = mech.evaluate(B);
  SignedMoney before = miner_utility(oa, A) + coalition_utility(oa, A, A, coalition);
  SignedMoney after = miner_utility(ob, B) + coalition_utility(ob, B, A, coalition);
  return after - before;
}

SignedMoney joint_utility_delta(const Mechanism& mech, const Setting& A, const SideContract& sc) {
  return joint_utility_delta(mech, A, apply_contract(A, sc), sc.coalition);
}

Witness make_witness(const Mechanism& mech, const Setting& A, SideContract sc) {
  sc.coalition = normalized(std::move(sc.coalition));
  sc.omitted = normalized(std::move(sc.omitted));
  Setting B = apply_contract(A, sc);
  SignedMoney d = joint_utility_delta(mech, A, B, sc.coalition);
  return Witness{std::move(sc), A, std::move(B), std::move(d)};
}

WitnessCheck check_witness(const Mechanism& mech, const Witness& w) {
  WitnessCheck r;
  const auto& sc = w.contract;
  const std::size_t n = w.A.real_count();
  if (!w.A.is_honest()) {
    r.diagnostic = "baseline setting A is not honest";
    return r;
  }
  if (normalized(sc.coalition) != sc.coalition) {
    r.diagnostic = "coalition is not a sorted set";
    return r;
  }
  for (std::size_t i : sc.coalition) {
    if (i >= n) {
      r.diagnostic = "coalition member " + std::to_string(i) + " out of range for " +
                     std::to_string(n) + " bidders";
      return r;
    }
  }
  for (const auto& [i, bid] : sc.new_bids) {
    if (!std::binary_search(sc.coalition.begin(), sc.coalition.end(), i)) {
      r.diagnostic = "new bid for bidder " + std::to_string(i) + " outside the coalition";
      return r;
    }
  }
  for (std::size_t i : sc.omitted) {
    if (i >= n) {
      r.diagnostic = "omitted bidder " + std::to_string(i) + " out of range";
      return r;
    }
  }
  if (sc.model == MinerModel::passive && (!sc.omitted.empty() || !sc.fakes.empty())) {
    r.diagnostic = "passive contract carries miner actions";
    return r;
  }
  try {
    Setting B = apply_contract(w.A, sc);
    if (!(B == w.B)) {
      r.diagnostic = "setting B does not match the contract applied to A";
      return r;
    }
    r.recomputed = joint_utility_delta(mech, w.A, B, sc.coalition);
  } catch (const std::exception& e) {
    r.diagnostic = std::string("evaluation failed: ") + e.what();
    return r;
  }
  if (*r.recomputed != w.delta) {
    r.diagnostic = "stored delta " + w.delta.str() + " differs from recomputed " + r.recomputed->str();
    return r;
  }
  if (r.recomputed->sign() <= 0) {
    r.diagnostic = "delta " + r.recomputed->str() + " is not positive";
    return r;
  }
  r.ok = true;
  return r;
}

nlohmann::json bids_to_json(const BidVector& bids) {
  auto j = nlohmann::json::array();
  for (const auto& b : bids) j.push_back(b.str());
  return j;
}

BidVector bids_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of rationals");
  BidVector out;
  for (const auto& x : j) {
    if (!x.is_string()) throw std::invalid_argument("rationals are serialized as \"p/q\" strings");
    out.push_back(Money::parse(x.get<std::string>()));
  }
  return out;
}

nlohmann::json setting_to_json(const Setting& s) {
  nlohmann::json j;
  j["bids"] = bids_to_json(s.bids());
  j["values"] = bids_to_json(s.values());
  auto om = nlohmann::json::array();
  for (std::size_t i = 0; i < s.real_count(); ++i) {
    if (s.is_omitted(i)) om.push_back(i);
  }
  j["omitted"] = om;
  j["fakes"] = s.fake_count();
  return j;
}

nlohmann::json witness_to_json(const Witness& w) {
  nlohmann::json j;
  j["A"] = bids_to_json(w.A.bids());
  j["B"] = bids_to_json(w.B.bids());
  j["coalition"] = w.contract.coalition;
  nlohmann::json nb = nlohmann::json::object();
  for (const auto& [i, b] : w.contract.new_bids) nb[std::to_string(i)] = b.str();
  j["new_bids"] = nb;
  j["omitted"] = w.contract.omitted;
  j["fakes"] = bids_to_json(w.contract.fakes);
  j["delta"] = w.delta.str();
  j["model"] = to_string(w.contract.model);
  return j;
}

Witness witness_from_json(const Mechanism& mech, const nlohmann::json& j) {
  for (const char* key : {"A", "coalition", "new_bids", "delta"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("witness is missing \"") + key + "\"");
  }
  SideContract sc;
  sc.model = parse_model(j.value("model", std::string("passive")));
  for (const auto& x : j.at("coalition")) sc.coalition.push_back(x.get<std::size_t>());
  for (const auto& [k, v] : j.at("new_bids").items()) {
    sc.new_bids.emplace(std::stoul(k), Money::parse(v.get<std::string>()));
  }
  if (j.contains("omitted")) {
    for (const auto& x : j.at("omitted")) sc.omitted.push_back(x.get<std::size_t>());
  }
  if (j.contains("fakes")) sc.fakes = bids_from_json(j.at("fakes"));
  Setting A = Setting::honest(bids_from_json(j.at("A")));
  Witness w = make_witness(mech, A, std::move(sc));
  w.delta = Rational::parse(j.at("delta").get<std::string>());
  return w;
}

}  // namespace tfm
