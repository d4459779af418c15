#include "tfm/tabulated.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "tfm/axioms.hpp"
#include "tfm/grid.hpp"
#include "tfm/utility.hpp"

namespace tfm {

Mechanism make_tabulated(std::string name, std::vector<Money> values, std::size_t n,
                         std::vector<Outcome> table) {
  auto space = std::make_shared<const ProfileSpace>(values, n);
  if (space->grid() != values) throw FormatError("tabulated values must be sorted ascending and distinct");
  if (table.size() != space->size()) throw FormatError("non-total table");
  for (const auto& o : table) {
    if (o.size() != n || o.pay.size() != n || o.burn.size() != n) {
      throw FormatError("table entry has the wrong length");
    }
  }
  auto cells = std::make_shared<const std::vector<Outcome>>(std::move(table));
  MechanismInfo info{std::move(name), {}, Domain::on_grid(values), n};
  return Mechanism(std::move(info), [space, cells](std::span<const Money> bids) {
    std::size_t p = 0;
    for (const auto& b : bids) {
      std::size_t d = space->find(b);
      if (d == space->k()) throw DomainError("bid " + b.str() + " is not a tabulated value");
      p = p * space->k() + d;
    }
    return (*cells)[p];
  });
}

Mechanism tabulated_from_json(const nlohmann::json& j) {
  try {
    for (const char* key : {"values", "n", "table"}) {
      if (!j.contains(key)) throw FormatError(std::string("tabulated mechanism is missing \"") + key + "\"");
    }
    std::vector<Money> values;
    for (const auto& v : j.at("values")) values.push_back(Money::parse(v.get<std::string>()));
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (!(values[i - 1] < values[i])) throw FormatError("\"values\" must be sorted ascending and distinct");
    }
    if (values.empty()) throw FormatError("\"values\" is empty");
    auto n = j.at("n").get<std::size_t>();
    if (n == 0) throw FormatError("\"n\" must be at least 1");
    ProfileSpace space(values, n);
    std::vector<std::optional<Outcome>> cells(space.size());
    for (const auto& row : j.at("table")) {
      auto profile = row.at("profile").get<std::vector<std::size_t>>();
      auto confirm = row.at("confirm").get<std::vector<int>>();
      const auto& pay = row.at("pay");
      const auto& burn = row.at("burn");
      if (profile.size() != n || confirm.size() != n || pay.size() != n || burn.size() != n) {
        throw FormatError("table row has the wrong length");
      }
      for (std::size_t d : profile) {
        if (d >= values.size()) throw FormatError("profile index out of range");
      }
      Outcome o = Outcome::nobody(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (confirm[i] != 0 && confirm[i] != 1) throw FormatError("confirm entries must be 0 or 1");
        o.confirmed[i] = confirm[i] == 1;
        o.pay[i] = Money::parse(pay[i].get<std::string>());
        o.burn[i] = Money::parse(burn[i].get<std::string>());
      }
      auto& cell = cells[space.index(profile)];
      if (cell) throw FormatError("duplicate table row");
      cell = std::move(o);
    }
    std::vector<Outcome> table;
    table.reserve(cells.size());
    for (auto& c : cells) {
      if (!c) throw FormatError("non-total table");
      table.push_back(std::move(*c));
    }
    return make_tabulated(j.value("name", std::string("tabulated")), std::move(values), n, std::move(table));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tabulated mechanism: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed tabulated mechanism: ") + e.what());
  }
}

nlohmann::json tabulated_to_json(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n) {
  ProfileSpace space(grid, n);
  nlohmann::json j;
  j["name"] = mech.name();
  j["values"] = bids_to_json(space.grid());
  j["n"] = n;
  auto rows = nlohmann::json::array();
  for (std::size_t p = 0; p < space.size(); ++p) {
    Outcome o = mech.evaluate(space.profile(p));
    nlohmann::json row;
    row["profile"] = space.digits(p);
    std::vector<int> confirm;
    for (bool c : o.confirmed) confirm.push_back(c ? 1 : 0);
    row["confirm"] = confirm;
    row["pay"] = bids_to_json(o.pay);
    row["burn"] = bids_to_json(o.burn);
    rows.push_back(std::move(row));
  }
  j["table"] = std::move(rows);
  return j;
}

Mechanism load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return tabulated_from_json(j);
}

void save_tabulated(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << tabulated_to_json(mech, grid, n).dump(2) << "\n";
}

AxiomSet all_axioms() {
  return {Axiom::ir, Axiom::bb, Axiom::anonymous, Axiom::prefix, Axiom::consistent_tie_breaking};
}

Axiom parse_axiom(const std::string& text) {
  if (text == "IR" || text == "ir") return Axiom::ir;
  if (text == "BB" || text == "bb") return Axiom::bb;
  if (text == "anonymous") return Axiom::anonymous;
  if (text == "prefix" || text == "prefix-confirmation") return Axiom::prefix;
  if (text == "consistent-tie-breaking" || text == "ctb") return Axiom::consistent_tie_breaking;
  throw std::invalid_argument("unknown axiom '" + text + "'");
}

namespace {

// Stable descending order of a profile: position k holds a bidder index.
std::vector<std::size_t> descending_order(const std::vector<std::size_t>& digits) {
  std::vector<std::size_t> order(digits.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return digits[a] > digits[b]; });
  return order;
}

struct Generator {
  const ProfileSpace& space;
  const AxiomSet& axioms;
  std::mt19937_64 rng;
  // Cells are stored per canonical profile, positions in descending order
  // when anonymous and in index order otherwise.
  std::vector<Outcome> canon;

  bool has(Axiom a) const { return axioms.count(a) != 0; }
  std::uint64_t draw(std::uint64_t m) { return rng() % m; }

  std::size_t canonical(std::size_t p) const {
    if (!has(Axiom::anonymous)) return p;
    auto d = space.digits(p);
    std::sort(d.begin(), d.end(), std::greater<>());
    return space.index(d);
  }

  // Position of bidder i of profile p inside its canonical cell.
  std::size_t slot(std::size_t p, std::size_t i) const {
    if (!has(Axiom::anonymous)) return i;
    auto order = descending_order(space.digits(p));
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), i) - order.begin());
  }

  Money random_fraction(const Money& x) { return Money(x.value() * Rational(static_cast<long long>(draw(5)), 4)); }
  Money random_grid_value() { return space.grid()[draw(space.k())]; }

  void fill() {
    const std::size_t n = space.n();
    canon.assign(space.size(), Outcome::nobody(n));
    for (std::size_t p = 0; p < space.size(); ++p) {
      if (canonical(p) != p) continue;
      auto d = space.digits(p);
      auto order = has(Axiom::anonymous) ? std::vector<std::size_t>(n) : descending_order(d);
      if (has(Axiom::anonymous)) std::iota(order.begin(), order.end(), 0);  // p is already sorted
      Outcome o = Outcome::nobody(n);
      if (has(Axiom::prefix)) {
        std::size_t ell = draw(n + 1);
        for (std::size_t k = 0; k < ell; ++k) o.confirmed[order[k]] = true;
      } else {
        for (std::size_t i = 0; i < n; ++i) o.confirmed[i] = draw(2) == 1;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const Money& bid = space.grid()[d[i]];
        if (has(Axiom::ir)) {
          o.pay[i] = o.confirmed[i] ? random_fraction(bid) : Money(0);
        } else {
          o.pay[i] = random_grid_value();
        }
        o.burn[i] = has(Axiom::bb) ? random_fraction(o.pay[i]) : random_grid_value();
      }
      canon[p] = std::move(o);
    }
  }

  Outcome outcome(std::size_t p) const {
    std::size_t c = canonical(p);
    if (c == p || !has(Axiom::anonymous)) return canon[c];
    const Outcome& src = canon[c];
    auto order = descending_order(space.digits(p));
    Outcome o = Outcome::nobody(space.n());
    for (std::size_t k = 0; k < order.size(); ++k) {
      o.confirmed[order[k]] = src.confirmed[k];
      o.pay[order[k]] = src.pay[k];
      o.burn[order[k]] = src.burn[k];
    }
    return o;
  }

  // Makes bidder i of profile p non-zero-utility or unconfirmed.
  void repair(std::size_t p, std::size_t i) {
    std::size_t c = canonical(p);
    std::size_t s = slot(p, i);
    Outcome& o = canon[c];
    const Money bid = space.grid()[space.digits(c)[has(Axiom::anonymous) ? s : i]];
    if (!bid.is_zero()) {
      o.pay[s] = Money(bid.value() * Rational(3, 4));
      if (o.burn[s] > o.pay[s]) o.burn[s] = o.pay[s];
      return;
    }
    // A confirmed zero bid always has zero utility: drop it (and, to keep
    // the prefix shape, every later slot of the same cell).
    if (has(Axiom::prefix)) {
      auto order = has(Axiom::anonymous) ? std::vector<std::size_t>() : descending_order(space.digits(c));
      std::size_t pos = has(Axiom::anonymous)
                            ? s
                            : static_cast<std::size_t>(std::find(order.begin(), order.end(), s) - order.begin());
      for (std::size_t k = pos; k < space.n(); ++k) {
        std::size_t idx = has(Axiom::anonymous) ? k : order[k];
        o.confirmed[idx] = false;
        o.pay[idx] = Money(0);
        o.burn[idx] = Money(0);
      }
    } else {
      o.confirmed[s] = false;
      o.pay[s] = Money(0);
      o.burn[s] = Money(0);
    }
  }

  // Finds one consistent-tie-breaking violation: returns (profile, bidder)
  // of the confirmed zero-utility cell, or nothing.
  std::optional<std::pair<std::size_t, std::size_t>> ctb_violation(const std::vector<Outcome>& table) const {
    const std::size_t n = space.n();
    std::vector<std::uint32_t> conf(space.size()), zero(space.size());
    for (std::size_t p = 0; p < space.size(); ++p) {
      auto d = space.digits(p);
      for (std::size_t i = 0; i < n; ++i) {
        const bool c = table[p].confirmed[i];
        if (c) conf[p] |= 1u << i;
        if (!c || table[p].pay[i] == space.grid()[d[i]]) zero[p] |= 1u << i;
      }
    }
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t i = n - 1; i-- > 0;) stride[i] = stride[i + 1] * space.k();
    for (std::size_t p = 0; p < space.size(); ++p) {
      auto d = space.digits(p);
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint32_t bit = 1u << j;
        if (conf[p] & bit) continue;
        for (std::size_t v = 0; v < space.k(); ++v) {
          if (v == d[j]) continue;
          std::size_t q = p - d[j] * stride[j] + v * stride[j];
          if (conf[q] & bit) continue;
          std::uint32_t bad = (conf[p] ^ conf[q]) & zero[p] & zero[q] & ~bit;
          if (bad == 0) continue;
          std::size_t i = static_cast<std::size_t>(__builtin_ctz(bad));
          return (conf[p] >> i & 1u) ? std::pair{p, i} : std::pair{q, i};
        }
      }
    }
    return std::nullopt;
  }

  std::vector<Outcome> table() const {
    std::vector<Outcome> t;
    t.reserve(space.size());
    for (std::size_t p = 0; p < space.size(); ++p) t.push_back(outcome(p));
    return t;
  }
};

}  // namespace

Mechanism random_tabulated(const std::vector<Money>& grid, std::size_t n, std::uint64_t seed,
                           const AxiomSet& axioms) {
  ProfileSpace space(grid, n);
  constexpr int kAttempts = 8;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Generator g{space, axioms, std::mt19937_64(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt)), {}};
    g.fill();
    auto table = g.table();
    if (axioms.count(Axiom::consistent_tie_breaking) != 0) {
      const std::size_t budget = space.size() * n + 1;
      std::size_t repairs = 0;
      while (auto bad = g.ctb_violation(table)) {
        if (++repairs > budget) break;
        g.repair(bad->first, bad->second);
        table = g.table();
      }
    }
    std::string name = "random-tabulated(seed=" + std::to_string(seed) + ")";
    Mechanism m = make_tabulated(name, space.grid(), n, std::move(table));
    bool ok = true;
    if (axioms.count(Axiom::ir)) ok = ok && check_individual_rationality(m, grid, n).pass;
    if (axioms.count(Axiom::bb)) ok = ok && check_burn_balance(m, grid, n).pass;
    if (axioms.count(Axiom::anonymous)) ok = ok && check_anonymity(m, grid, n).pass;
    if (axioms.count(Axiom::prefix)) ok = ok && check_prefix_confirmation(m, grid, n).pass;
    if (axioms.count(Axiom::consistent_tie_breaking)) ok = ok && check_consistent_tie_breaking(m, grid, n).pass;
    if (ok) return m;
  }
  throw GenerationError("random_tabulated: no mechanism satisfying the requested axioms after " +
                        std::to_string(kAttempts) + " attempts (seed " + std::to_string(seed) + ")");
}

}  // namespace tfm
