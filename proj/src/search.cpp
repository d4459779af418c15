#include "tfm/search.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tfm/grid.hpp"
#include "tfm/utility.hpp"

namespace tfm {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::refuted: return "refuted";
    case Verdict::truncated: return "truncated";
  }
  return "?";
}

unsigned default_workers() {
  if (const char* env = std::getenv("TFM_WORKERS")) {
    try {
      long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

nlohmann::json SearchResult::to_json() const {
  nlohmann::json j;
  j["status"] = to_string(verdict);
  if (witness) j["witness"] = witness_to_json(*witness);
  if (verdict != Verdict::refuted) j["contracts_checked"] = contracts_checked;
  j["profiles_searched"] = profiles_searched;
  j["profiles_total"] = profiles_total;
  j["effective_max_fakes"] = effective_max_fakes;
  j["omissions"] = omissions;
  j["notes"] = notes;
  j["scope"] = "grid certificate only";
  return j;
}

namespace {

constexpr std::size_t kMaxCells = 1u << 24;

// All subsets of {0..m-1} of size in [lo, hi] as sorted tuples, in lexicographic order.
std::vector<std::vector<std::size_t>> subsets_lex(std::size_t m, std::size_t lo, std::size_t hi) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1u) s.push_back(i);
    }
    if (s.size() >= lo && s.size() <= hi) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Non-decreasing tuples over {0..g-1} of length 0..f, in lexicographic order.
std::vector<std::vector<std::size_t>> multisets_lex(std::size_t g, std::size_t f) {
  std::vector<std::vector<std::size_t>> out{{}};
  std::vector<std::vector<std::size_t>> layer{{}};
  for (std::size_t len = 1; len <= f; ++len) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& t : layer) {
      for (std::size_t v = t.empty() ? 0 : t.back(); v < g; ++v) {
        auto u = t;
        u.push_back(v);
        next.push_back(std::move(u));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Scaled-integer view of amounts: every value times a common denominator.
struct IntScale {
  mpz_class lcd = 1;
  bool fits = true;

  void add(const Rational& r) { lcd = mpz_class(lcm(lcd, r.denominator())); }
  long long to(const Rational& r) const {
    mpz_class scaled = r.numerator() * (lcd / r.denominator());
    return scaled.get_si();
  }
  bool small(const Rational& r) const {
    mpz_class scaled = abs(r.numerator() * (lcd / r.denominator()));
    static const mpz_class limit("1099511627776");  // 2^40
    return cmp(scaled, limit) < 0;
  }
};

template <class T>
T convert(const Rational& r, const IntScale& s) {
  if constexpr (std::is_same_v<T, long long>) {
    return s.to(r);
  } else {
    return r;
  }
}

// Outcome table for one vector length, flattened for the inner loop.
template <class T>
struct Layer {
  std::size_t len = 0;
  std::vector<std::uint8_t> confirmed;  // cells * len
  std::vector<T> pay;                   // cells * len
  std::vector<T> miner;                 // cells
};

struct Plan {
  std::vector<Money> grid;      // G
  std::vector<Money> values;    // V = G, plus 0 when omissions are on
  std::vector<std::size_t> gv;  // G index -> V index
  std::size_t zero = 0;         // V index of 0
  std::size_t n = 0;
  std::size_t fakes = 0;
  bool omissions = false;
  std::vector<std::vector<std::size_t>> coalitions;
  std::vector<std::vector<std::size_t>> fake_sets;
  std::vector<std::vector<std::vector<std::size_t>>> omission_sets;  // by eligible count
  std::vector<std::size_t> a_profiles;                               // G-digit profile indices to search
};

struct Found {
  std::size_t a_index;
  std::vector<std::size_t> coalition;
  std::vector<std::size_t> new_bids;  // G indices aligned with coalition
  std::vector<std::size_t> omitted;
  std::vector<std::size_t> fakes;     // G indices
};

template <class T>
class Engine {
 public:
  Engine(const Plan& plan, std::vector<Layer<T>> layers, std::vector<T> vals)
      : plan_(plan), layers_(std::move(layers)), vals_(std::move(vals)) {}

  // Searches one honest profile; returns the first beneficial contract.
  std::optional<Found> search(std::size_t a_pos) const {
    const Plan& P = plan_;
    const std::size_t n = P.n;
    const std::size_t g = P.grid.size();
    const std::size_t k = P.values.size();
    std::vector<std::size_t> a(n);
    {
      std::size_t idx = P.a_profiles[a_pos];
      for (std::size_t i = n; i-- > 0;) {
        a[i] = idx % g;
        idx /= g;
      }
    }
    std::vector<std::size_t> av(n);
    for (std::size_t i = 0; i < n; ++i) av[i] = P.gv[a[i]];
    const Layer<T>& base = layers_[0];
    std::size_t pa = 0;
    for (std::size_t i = 0; i < n; ++i) pa = pa * k + av[i];
    std::vector<T> ua(n);
    for (std::size_t i = 0; i < n; ++i) {
      const T& v = vals_[av[i]];
      ua[i] = (base.confirmed[pa * n + i] ? v : T{}) - base.pay[pa * n + i];
    }
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t i = n - 1; i-- > 0;) stride[i] = stride[i + 1] * k;

    std::vector<std::size_t> nb;
    std::vector<std::size_t> eligible;
    std::vector<bool> member(n);
    for (const auto& C : P.coalitions) {
      T baseline = base.miner[pa];
      for (std::size_t i : C) baseline += ua[i];
      std::fill(member.begin(), member.end(), false);
      for (std::size_t i : C) member[i] = true;
      eligible.clear();
      if (P.omissions) {
        for (std::size_t i = 0; i < n; ++i) {
          if (!member[i] && !P.values[av[i]].is_zero()) eligible.push_back(i);
        }
      }
      const auto& omits = P.omission_sets[eligible.size()];
      nb.assign(C.size(), 0);
      while (true) {
        std::size_t pb0 = pa;
        for (std::size_t m = 0; m < C.size(); ++m) {
          std::size_t i = C[m];
          pb0 = pb0 - av[i] * stride[i] + P.gv[nb[m]] * stride[i];
        }
        for (const auto& O : omits) {
          std::size_t pb = pb0;
          for (std::size_t e : O) {
            std::size_t i = eligible[e];
            pb = pb - av[i] * stride[i] + P.zero * stride[i];
          }
          for (const auto& F : P.fake_sets) {
            const Layer<T>& L = layers_[F.size()];
            std::size_t q = pb;
            for (std::size_t f : F) q = q * k + P.gv[f];
            T after = L.miner[q];
            const std::size_t row = q * L.len;
            for (std::size_t i : C) {
              after += (L.confirmed[row + i] ? vals_[av[i]] : T{}) - L.pay[row + i];
            }
            if (after > baseline) {
              Found found{a_pos, C, nb, {}, F};
              for (std::size_t e : O) found.omitted.push_back(eligible[e]);
              return found;
            }
          }
        }
        // Advance the new-bid odometer, last coordinate fastest.
        std::size_t m = C.size();
        while (m > 0) {
          if (++nb[m - 1] < g) break;
          nb[m - 1] = 0;
          --m;
        }
        if (m == 0) break;
      }
    }
    return std::nullopt;
  }

 private:
  const Plan& plan_;
  std::vector<Layer<T>> layers_;
  std::vector<T> vals_;
};

template <class T>
Engine<T> build_engine(const Plan& P, const std::vector<std::vector<Outcome>>& tables, const IntScale& s) {
  std::vector<Layer<T>> layers;
  for (std::size_t f = 0; f < tables.size(); ++f) {
    Layer<T> L;
    L.len = P.n + f;
    const auto& t = tables[f];
    L.confirmed.resize(t.size() * L.len);
    L.pay.resize(t.size() * L.len);
    L.miner.resize(t.size());
    for (std::size_t q = 0; q < t.size(); ++q) {
      T miner{};
      for (std::size_t i = 0; i < L.len; ++i) {
        L.confirmed[q * L.len + i] = t[q].confirmed[i] ? 1 : 0;
        L.pay[q * L.len + i] = convert<T>(t[q].pay[i], s);
        T burn = convert<T>(t[q].burn[i], s);
        if (i < P.n) {
          miner += L.pay[q * L.len + i] - burn;
        } else {
          miner -= burn;
        }
      }
      L.miner[q] = miner;
    }
    layers.push_back(std::move(L));
  }
  std::vector<T> vals;
  for (const auto& v : P.values) vals.push_back(convert<T>(v, s));
  return Engine<T>(P, std::move(layers), std::move(vals));
}

std::uint64_t contracts_for(const Plan& P, std::size_t a_index) {
  const std::size_t g = P.grid.size();
  std::vector<std::size_t> a(P.n);
  for (std::size_t i = P.n; i-- > 0;) {
    a[i] = a_index % g;
    a_index /= g;
  }
  std::uint64_t total = 0;
  for (const auto& C : P.coalitions) {
    std::uint64_t nb = 1;
    for (std::size_t m = 0; m < C.size(); ++m) nb *= g;
    std::size_t eligible = 0;
    if (P.omissions) {
      for (std::size_t i = 0; i < P.n; ++i) {
        if (!std::binary_search(C.begin(), C.end(), i) && !P.grid[a[i]].is_zero()) ++eligible;
      }
    }
    total += nb * (std::uint64_t{1} << eligible) * P.fake_sets.size();
  }
  return total;
}

template <class T>
std::optional<Found> run_search(const Engine<T>& engine, std::size_t count, unsigned workers) {
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};
  std::mutex mu;
  std::optional<Found> found;
  auto work = [&] {
    while (true) {
      std::size_t a = next.fetch_add(1);
      if (a >= count || a > best.load()) return;
      if (auto f = engine.search(a)) {
        std::lock_guard lock(mu);
        if (!found || a < found->a_index) {
          found = std::move(f);
          best.store(a);
        }
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return found;
}

}  // namespace

SearchResult find_c_sc(const Mechanism& mech, const std::vector<Money>& grid_in, std::size_t n, std::size_t c,
                       MinerModel model, const SearchLimits& limits) {
  SearchResult res;
  Plan P;
  P.grid = normalized_grid(grid_in);
  P.n = n;
  if (n == 0) throw std::invalid_argument("need at least one bidder");
  if (!mech.accepts_length(n)) throw std::invalid_argument(mech.label() + " does not accept " + std::to_string(n) + " bids");
  const bool active = model == MinerModel::active;

  P.fakes = active ? limits.max_fakes : 0;
  if (P.fakes > 0 && mech.info().arity) {
    P.fakes = 0;
    res.notes.push_back("fixed-arity mechanism: fake bids disabled");
  }
  P.omissions = active && limits.allow_omissions;
  if (P.omissions && !mech.info().domain.contains(Money(0))) {
    P.omissions = false;
    res.notes.push_back("bid 0 is outside the mechanism's domain: omissions disabled");
  }
  for (const auto& b : P.grid) {
    if (!mech.info().domain.contains(b)) throw DomainError("grid value " + b.str() + " is outside " + mech.label());
  }
  P.values = P.grid;
  if (P.omissions && P.values.front() != Money(0)) P.values.insert(P.values.begin(), Money(0));
  for (const auto& v : P.grid) {
    P.gv.push_back(static_cast<std::size_t>(std::lower_bound(P.values.begin(), P.values.end(), v) - P.values.begin()));
  }
  P.zero = 0;

  const std::size_t cmax = std::min(c, n);
  const std::size_t cmin = std::max<std::size_t>(limits.min_coalition, active ? 0 : 1);
  P.coalitions = subsets_lex(n, cmin, cmax);
  P.fake_sets = multisets_lex(P.grid.size(), P.fakes);
  for (std::size_t m = 0; m <= n; ++m) P.omission_sets.push_back(subsets_lex(m, 0, m));

  ProfileSpace aspace(P.grid, n);
  if (limits.fixed_profile) {
    if (limits.fixed_profile->size() != n) throw std::invalid_argument("fixed profile must have n bids");
    std::vector<std::size_t> d;
    for (const auto& b : *limits.fixed_profile) {
      std::size_t t = aspace.find(b);
      if (t == aspace.k()) throw std::invalid_argument("fixed profile bid " + b.str() + " is not on the grid");
      d.push_back(t);
    }
    P.a_profiles.push_back(aspace.index(d));
  } else {
    P.a_profiles.resize(aspace.size());
    for (std::size_t p = 0; p < aspace.size(); ++p) P.a_profiles[p] = p;
  }
  res.profiles_total = P.a_profiles.size();
  res.effective_max_fakes = P.fakes;
  res.omissions = P.omissions;

  // Deterministic truncation at profile granularity.
  std::size_t searchable = P.a_profiles.size();
  std::uint64_t budget_used = 0;
  if (limits.max_contracts > 0) {
    searchable = 0;
    for (std::size_t a : P.a_profiles) {
      std::uint64_t cnt = contracts_for(P, a);
      if (budget_used + cnt > limits.max_contracts) break;
      budget_used += cnt;
      ++searchable;
    }
  } else {
    for (std::size_t a : P.a_profiles) budget_used += contracts_for(P, a);
  }

  // Outcome cache for every vector length the search can produce.
  std::vector<std::vector<Outcome>> tables;
  IntScale scale;
  for (const auto& v : P.values) scale.add(v);
  for (std::size_t f = 0; f <= P.fakes; ++f) {
    ProfileSpace space(P.values, n + f);
    if (space.size() > kMaxCells) throw std::invalid_argument("grid too large for the outcome cache");
    tables.push_back(materialize(mech, space));
    for (const auto& o : tables.back()) {
      for (std::size_t i = 0; i < o.size(); ++i) {
        scale.add(o.pay[i]);
        scale.add(o.burn[i]);
      }
    }
  }
  bool fits = !limits.force_exact && cmp(scale.lcd, mpz_class(1048576)) < 0;
  if (fits) {
    for (const auto& v : P.values) fits = fits && scale.small(v);
    for (const auto& t : tables) {
      for (const auto& o : t) {
        for (std::size_t i = 0; i < o.size() && fits; ++i) fits = scale.small(o.pay[i]) && scale.small(o.burn[i]);
      }
    }
  }
  res.integer_path = fits;

  // Map a search position back onto P.a_profiles order.
  Plan searchable_plan = P;
  searchable_plan.a_profiles.resize(searchable);
  const unsigned workers = limits.workers == 0 ? default_workers() : limits.workers;
  std::optional<Found> found;
  if (fits) {
    auto engine = build_engine<long long>(searchable_plan, tables, scale);
    found = run_search(engine, searchable, workers);
  } else {
    auto engine = build_engine<Rational>(searchable_plan, tables, scale);
    found = run_search(engine, searchable, workers);
  }

  if (found) {
    SideContract sc;
    sc.model = model;
    sc.coalition = found->coalition;
    for (std::size_t m = 0; m < found->coalition.size(); ++m) {
      sc.new_bids.emplace(found->coalition[m], P.grid[found->new_bids[m]]);
    }
    sc.omitted = found->omitted;
    for (std::size_t f : found->fakes) sc.fakes.push_back(P.grid[f]);
    Setting A = Setting::honest(aspace.profile(searchable_plan.a_profiles[found->a_index]));
    Witness w = make_witness(mech, A, std::move(sc));
    auto check = check_witness(mech, w);
    if (!check.ok) throw std::logic_error("search produced an unverifiable witness: " + check.diagnostic);
    res.verdict = Verdict::refuted;
    res.witness = std::move(w);
    res.profiles_searched = found->a_index + 1;
    return res;
  }
  res.profiles_searched = searchable;
  res.contracts_checked = budget_used;
  res.verdict = searchable < P.a_profiles.size() ? Verdict::truncated : Verdict::holds;
  return res;
}

CheckReport check_uic(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n) {
  ProfileSpace space(grid, n);
  const auto table = materialize(mech, space);
  CheckReport r{.check = "uic"};
  for (std::size_t p = 0; p < space.size(); ++p) {
    auto d = space.digits(p);
    BidVector b = space.profile(p);
    Setting honest = Setting::honest(b);
    for (std::size_t i = 0; i < n; ++i) {
      SignedMoney truthful = bidder_utility(table[p], honest, i, b[i]);
      for (std::size_t v = 0; v < space.k(); ++v) {
        if (v == d[i]) continue;
        auto e = d;
        e[i] = v;
        std::size_t q = space.index(e);
        ++r.cases;
        SignedMoney dev = bidder_utility(table[q], Setting::honest(space.profile(q)), i, b[i]);
        if (dev > truthful) {
          r.pass = false;
          r.profile = b;
          r.other_profile = space.profile(q);
          r.bidder = i;
          r.message = "bidder " + std::to_string(i) + " gains " + (dev - truthful).str() + " by bidding " +
                      space.grid()[v].str() + " instead of " + b[i].str();
          return r;
        }
      }
    }
  }
  return r;
}

}  // namespace tfm
