#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfm/axioms.hpp"
#include "tfm/circuit.hpp"
#include "tfm/grid.hpp"
#include "tfm/properties.hpp"
#include "tfm/reduction.hpp"
#include "tfm/report.hpp"
#include "tfm/scpdp.hpp"
#include "tfm/search.hpp"
#include "tfm/suite.hpp"
#include "tfm/tabulated.hpp"
#include "tfm/zoo.hpp"

namespace {

using nlohmann::json;
using namespace tfm;

enum Exit { ok = 0, config = 2, io = 3, truncated = 4, internal = 5 };

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<Money> parse_money_list(const std::string& s, const char* what) {
  std::vector<Money> out;
  try {
    for (const auto& part : split(s, ',')) out.push_back(Money::parse(part));
  } catch (const std::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
  if (out.empty()) throw ConfigError(std::string(what) + " is empty");
  return out;
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    for (const auto& kv : split(item, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("parameter '" + kv + "' is not key=value");
      out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  return out;
}

struct MechSpec {
  std::string mech;
  std::vector<std::string> params;
  std::string grid;
};

struct Loaded {
  Mechanism mech;
  std::vector<Money> grid;
  json description;
};

// A zoo name, or a path to a tabulated mechanism file.
Loaded load_mechanism(const MechSpec& s, bool need_grid) {
  if (s.mech.empty()) throw ConfigError("--mech is required");
  std::optional<Mechanism> m;
  json desc;
  const auto names = zoo_names();
  const bool is_zoo = std::find(names.begin(), names.end(), s.mech) != names.end();
  if (is_zoo) {
    try {
      m = make_zoo_mechanism(s.mech, parse_params(s.params));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    desc = {{"zoo", s.mech}, {"label", m->label()}};
  } else if (std::filesystem::exists(s.mech)) {
    if (!s.params.empty()) throw ConfigError("--params applies to zoo mechanisms only");
    m = load_tabulated(s.mech);
    desc = {{"file", s.mech}, {"label", m->label()}};
  } else {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown mechanism '" + s.mech + "' (zoo: " + list + "; or a tabulated JSON file)");
  }
  std::vector<Money> grid;
  if (!s.grid.empty()) {
    grid = normalized_grid(parse_money_list(s.grid, "--grid"));
  } else if (m->info().domain.grid) {
    grid = *m->info().domain.grid;
  } else if (need_grid) {
    throw ConfigError("--grid is required for " + m->label());
  }
  if (m->info().domain.grid) {
    for (const auto& g : grid) {
      if (!m->info().domain.contains(g)) throw ConfigError("grid value " + g.str() + " is outside the mechanism's values");
    }
  }
  return {*m, grid, desc};
}

void check_n(const Mechanism& m, std::size_t n) {
  if (n == 0) throw ConfigError("--n must be at least 1");
  if (!m.accepts_length(n)) throw ConfigError(m.label() + " does not take " + std::to_string(n) + " bids");
}

unsigned workers_from(unsigned flag) {
  if (const char* env = std::getenv("TFM_WORKERS")) {
    try {
      long v = std::stol(env);
      if (v < 1) throw std::invalid_argument("");
      return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("TFM_WORKERS='") + env + "' is not a positive integer");
    }
  }
  return flag;
}

struct Output {
  std::string path;
  bool timing = false;
};

void emit(const Output& o, json report, std::chrono::steady_clock::time_point start) {
  if (o.timing) {
    report["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  const std::string text = canonical_json(report);
  if (o.path.empty()) {
    std::cout << text;
  } else {
    write_text(o.path, text);
  }
}

void add_mech_options(CLI::App* app, MechSpec& s) {
  app->add_option("--mech", s.mech, "zoo mechanism name or tabulated JSON file")->required();
  app->add_option("--params", s.params, "mechanism parameters, key=value[,key=value]");
  app->add_option("--grid", s.grid, "comma-separated rationals, e.g. 0,1/2,1");
}

void add_output_options(CLI::App* app, Output& o) {
  app->add_option("--out", o.path, "report file (default: stdout)");
  app->add_flag("--timing", o.timing, "include wall time in the report");
}

int run(int argc, char** argv) {
  CLI::App app{"Transaction fee mechanism collusion toolkit"};
  app.require_subcommand(1);
  const auto start = std::chrono::steady_clock::now();
  int exit_code = ok;

  // zoo
  auto* zoo = app.add_subcommand("zoo", "list the built-in mechanisms and their expected properties");
  Output zoo_out;
  add_output_options(zoo, zoo_out);
  zoo->callback([&] {
    json arr = json::array();
    for (const auto& name : zoo_names()) {
      ZooEntry e = zoo_entry(name, {});
      json props = json::array();
      for (const auto& p : e.expected) {
        props.push_back({{"property", to_string(p.property)}, {"holds", p.holds}, {"source", p.provenance}});
      }
      arr.push_back({{"name", name}, {"label", e.mechanism.label()}, {"expected", props}});
    }
    emit(zoo_out, {{"command", "zoo"}, {"mechanisms", arr}}, start);
  });

  // check-axioms
  auto* ca = app.add_subcommand("check-axioms", "check IR, burn balance, anonymity, tie-breaking and prefix confirmation");
  MechSpec ca_spec;
  std::size_t ca_n = 0;
  bool ca_extended = false;
  Output ca_out;
  add_mech_options(ca, ca_spec);
  ca->add_option("--n", ca_n, "number of bidders")->required();
  ca->add_flag("--extended", ca_extended, "also run non-bossiness, monotonicity and UIC checks");
  add_output_options(ca, ca_out);
  ca->callback([&] {
    Loaded l = load_mechanism(ca_spec, true);
    check_n(l.mech, ca_n);
    std::vector<CheckReport> reports = check_all_axioms(l.mech, l.grid, ca_n);
    if (ca_extended) {
      reports.push_back(check_nonbossiness(l.mech, l.grid, ca_n));
      reports.push_back(check_monotonicity(l.mech, l.grid, ca_n, MonotonicityDirection::increase));
      reports.push_back(check_monotonicity(l.mech, l.grid, ca_n, MonotonicityDirection::decrease));
      reports.push_back(check_uic(l.mech, l.grid, ca_n));
    }
    json arr = json::array();
    bool all = true;
    for (const auto& r : reports) {
      arr.push_back(r.to_json());
      all = all && r.pass;
    }
    emit(ca_out,
         {{"command", "check-axioms"},
          {"inputs", {{"mechanism", l.description}, {"grid", bids_to_json(l.grid)}, {"n", ca_n}}},
          {"reports", arr},
          {"all_pass", all},
          {"scope", "grid certificate only"}},
         start);
  });

  // find-sc
  auto* fs = app.add_subcommand("find-sc", "exhaustive search for a beneficial side contract");
  MechSpec fs_spec;
  std::size_t fs_n = 0, fs_c = 0, fs_fakes = 2, fs_min = 0;
  std::string fs_model = "passive", fs_profile;
  std::uint64_t fs_max = 0;
  bool fs_no_omit = false, fs_exact = false;
  unsigned fs_workers = 0;
  Output fs_out;
  add_mech_options(fs, fs_spec);
  fs->add_option("--n", fs_n, "number of bidders")->required();
  fs->add_option("--c", fs_c, "largest coalition size")->required();
  fs->add_option("--model", fs_model, "passive|active");
  fs->add_option("--max-fakes", fs_fakes, "fake bids the active miner may add");
  fs->add_flag("--no-omissions", fs_no_omit, "the active miner may not omit bids");
  fs->add_option("--max-contracts", fs_max, "stop after this many contracts (0: no limit)");
  fs->add_option("--min-coalition", fs_min, "smallest coalition size searched");
  fs->add_option("--profile", fs_profile, "search only this honest profile, e.g. 10,1");
  fs->add_option("--workers", fs_workers, "worker threads (TFM_WORKERS overrides)");
  fs->add_flag("--exact", fs_exact, "skip the scaled-integer fast path");
  add_output_options(fs, fs_out);
  fs->callback([&] {
    Loaded l = load_mechanism(fs_spec, true);
    check_n(l.mech, fs_n);
    MinerModel model;
    try {
      model = parse_model(fs_model);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (fs_c == 0 || fs_c > fs_n) throw ConfigError("--c must be between 1 and --n");
    SearchLimits lim;
    lim.max_fakes = fs_fakes;
    lim.allow_omissions = !fs_no_omit;
    lim.max_contracts = fs_max;
    lim.min_coalition = fs_min;
    lim.workers = workers_from(fs_workers);
    lim.force_exact = fs_exact;
    if (!fs_profile.empty()) {
      lim.fixed_profile = parse_money_list(fs_profile, "--profile");
      if (lim.fixed_profile->size() != fs_n) throw ConfigError("--profile must have --n entries");
    }
    SearchResult r = find_c_sc(l.mech, l.grid, fs_n, fs_c, model, lim);
    json report{{"command", "find-sc"},
                {"inputs",
                 {{"mechanism", l.description}, {"grid", bids_to_json(l.grid)}, {"n", fs_n}, {"c", fs_c},
                  {"model", to_string(model)}}},
                {"result", r.to_json()}};
    if (r.witness) report["witness"] = witness_to_json(*r.witness);
    emit(fs_out, report, start);
    if (r.verdict == Verdict::truncated) {
      std::cerr << "tfm: error[truncated]: search stopped after " << r.contracts_checked << " contracts\n";
      exit_code = truncated;
    }
  });

  // reduce
  auto* rd = app.add_subcommand("reduce", "reduce a side-contract witness to one with at most two bidders");
  MechSpec rd_spec;
  std::string rd_witness, rd_mode = "grid";
  std::size_t rd_iters = 64;
  bool rd_no_fallback = false;
  Output rd_out;
  add_mech_options(rd, rd_spec);
  rd->add_option("--witness", rd_witness, "witness JSON, or a find-sc report")->required();
  rd->add_option("--mode", rd_mode, "grid|bisect");
  rd->add_option("--max-iters", rd_iters, "bisection iteration cap");
  rd->add_flag("--no-fallback", rd_no_fallback, "disable the exhaustive pair search fallback");
  add_output_options(rd, rd_out);
  rd->callback([&] {
    Loaded l = load_mechanism(rd_spec, false);
    ReductionOptions opts;
    try {
      opts.mode = parse_localize_mode(rd_mode);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    opts.grid = l.grid;
    opts.max_iters = rd_iters;
    opts.search_fallback = !rd_no_fallback;
    json wj = read_json(rd_witness);
    if (wj.contains("witness")) wj = wj.at("witness");
    Witness w = [&] {
      try {
        return witness_from_json(l.mech, wj);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed witness: ") + e.what());
      }
    }();
    ReductionTrace t = reduce_to_2sc(l.mech, w, opts);
    emit(rd_out,
         {{"command", "reduce"},
          {"inputs", {{"mechanism", l.description}, {"mode", to_string(opts.mode)}, {"witness", rd_witness}}},
          {"trace", t.to_json()}},
         start);
  });

  // scpdp
  auto* sp = app.add_subcommand("scpdp", "decide whether a circuit-represented auction is 2-SCP");
  std::string sp_file, sp_model = "active";
  Output sp_out;
  sp->add_option("--circuits", sp_file, "circuit auction JSON")->required();
  sp->add_option("--model", sp_model, "active|passive");
  add_output_options(sp, sp_out);
  sp->callback([&] {
    MinerModel model;
    try {
      model = parse_model(sp_model);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    CircuitAuction auction = [&] {
      try {
        return circuit_auction_from_json(read_json(sp_file));
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
    }();
    ScpdpDecision d = decide_2scpdp(auction, model);
    emit(sp_out,
         {{"command", "scpdp"},
          {"inputs", {{"circuits", sp_file}, {"model", to_string(model)}, {"n", auction.n}}},
          {"result", d.to_json()},
          {"scope", "exhaustive over the auction's value grid"}},
         start);
  });

  // taut-reduce
  auto* tr = app.add_subcommand("taut-reduce", "build the auction that is 2-SCP iff a circuit is a tautology");
  std::string tr_file, tr_out;
  tr->add_option("--circuit", tr_file, "circuit JSON")->required();
  tr->add_option("--out", tr_out, "auction JSON (default: stdout)");
  tr->callback([&] {
    BoolCircuit c = [&] {
      try {
        return circuit_from_json(read_json(tr_file));
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
    }();
    emit({tr_out, false}, circuit_auction_to_json(tautology_to_scpdp(c)), start);
  });

  // tabulate
  auto* tb = app.add_subcommand("tabulate", "write a tabulated mechanism: a random one or a zoo mechanism on a grid");
  MechSpec tb_spec;
  std::size_t tb_n = 0;
  std::uint64_t tb_seed = 1;
  std::string tb_axioms;
  std::string tb_out;
  tb->add_option("--mech", tb_spec.mech, "zoo mechanism to tabulate (omit for a random mechanism)");
  tb->add_option("--params", tb_spec.params, "mechanism parameters");
  tb->add_option("--grid", tb_spec.grid, "comma-separated rationals")->required();
  tb->add_option("--n", tb_n, "number of bidders")->required();
  tb->add_option("--seed", tb_seed, "seed for the random generator");
  tb->add_option("--axioms", tb_axioms, "axioms for the random mechanism (default: all)");
  tb->add_option("--out", tb_out, "file (default: stdout)");
  tb->callback([&] {
    if (tb_n == 0) throw ConfigError("--n must be at least 1");
    std::optional<Mechanism> m;
    std::vector<Money> grid;
    if (tb_spec.mech.empty()) {
      grid = normalized_grid(parse_money_list(tb_spec.grid, "--grid"));
      AxiomSet ax = all_axioms();
      if (!tb_axioms.empty()) {
        ax.clear();
        try {
          for (const auto& a : split(tb_axioms, ',')) ax.insert(parse_axiom(a));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      m = random_tabulated(grid, tb_n, tb_seed, ax);
    } else {
      Loaded l = load_mechanism(tb_spec, true);
      check_n(l.mech, tb_n);
      m = l.mech;
      grid = l.grid;
    }
    emit({tb_out, false}, tabulated_to_json(*m, grid, tb_n), start);
  });

  // suite
  auto* su = app.add_subcommand("suite", "run the acceptance battery");
  SuiteOptions su_opts;
  std::string su_criteria, su_csv;
  unsigned su_workers = 0;
  Output su_out;
  su->add_option("--criteria", su_criteria, "comma-separated criterion ids (default: all)");
  su->add_option("--mechanisms", su_opts.mechanisms, "random mechanisms in the reduction battery");
  su->add_option("--seed", su_opts.seed, "base seed");
  su->add_option("--workers", su_workers, "worker threads (TFM_WORKERS overrides)");
  su->add_option("--csv", su_csv, "also write a CSV summary here");
  add_output_options(su, su_out);
  su->callback([&] {
    std::vector<int> ids;
    for (const auto& s : split(su_criteria, ',')) {
      try {
        ids.push_back(std::stoi(s));
      } catch (const std::exception&) {
        throw ConfigError("criterion id '" + s + "' is not a number");
      }
      if (ids.back() < 1 || ids.back() > 9) throw ConfigError("criterion id " + s + " is not in 1..9");
    }
    su_opts.workers = workers_from(su_workers);
    auto results = run_suite(su_opts, ids);
    for (const auto& r : results) {
      std::cerr << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  " << r.name << "\n";
    }
    if (!su_csv.empty()) write_text(su_csv, suite_to_csv(results, su_out.timing));
    emit(su_out, suite_to_json(results, su_out.timing), start);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "tfm: error[config]: " << e.what() << "\n";
    return config;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "tfm: error[config]: " << e.what() << "\n";
    return config;
  } catch (const FormatError& e) {
    std::cerr << "tfm: error[format]: " << e.what() << "\n";
    return io;
  } catch (const DomainError& e) {
    std::cerr << "tfm: error[domain]: " << e.what() << "\n";
    return config;
  } catch (const PreconditionError& e) {
    std::cerr << "tfm: error[precondition]: " << e.what() << "\n";
    return config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "tfm: error[config]: " << e.what() << "\n";
    return config;
  } catch (const std::runtime_error& e) {
    std::cerr << "tfm: error[io]: " << e.what() << "\n";
    return io;
  } catch (const std::exception& e) {
    std::cerr << "tfm: error[internal]: " << e.what() << "\n";
    return internal;
  }
}
