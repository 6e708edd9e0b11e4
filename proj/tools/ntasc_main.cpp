// Command-line front end: parse and validate a network, then decide whether
// the observer needs the shared clocks, synthesize the replacement, explain
// the evidence, export DOT artifacts, compare two networks, or fuzz the
// engines against each other.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ntasc/bisim.hpp"
#include "ntasc/contextual.hpp"
#include "ntasc/gen.hpp"
#include "ntasc/parser.hpp"
#include "ntasc/smod.hpp"
#include "ntasc/synth.hpp"
#include "ntasc/zones.hpp"

namespace {

using namespace ntasc;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Engine engine_of(const std::string& s) {
  if (s == "region") return Engine::Region;
  if (s == "zone") return Engine::Zone;
  if (s == "contextual") return Engine::Contextual;
  if (s == "all") return Engine::All;
  throw std::runtime_error("unknown engine '" + s + "' (region|zone|contextual|all)");
}

Network load(const std::string& path) {
  Network net = parse_file(path);
  Report rep = validate_network(net);
  if (has_errors(rep)) throw std::runtime_error(report_str(rep));
  return net;
}

const char* verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::NotNeeded: return "NOT-NEEDED";
    case Verdict::Needed: return "NEEDED";
    default: return "INCONCLUSIVE";
  }
}

int exit_of(Verdict::Kind k) {
  switch (k) {
    case Verdict::NotNeeded: return 0;
    case Verdict::Needed: return 1;
    default: return 2;
  }
}

struct EngineAnswer {
  std::string name;
  bool restricted = false;
  double ms = 0;
  bool skipped = false;
};

// The core question per engine: is the divergence detector reachable /
// does a restriction exist?
int cmd_check(const std::string& path, const std::string& engine, size_t budget) {
  Network net = load(path);
  Network n = normalize_sync_guards(net);
  bool diags = false;
  for (int i = 0; i < 2; ++i)
    for (const auto& e : n.comp(i).edges)
      if (!e.guard.diags.empty()) diags = true;

  std::vector<std::string> wanted;
  if (engine == "all")
    wanted = {"region", "zone", "contextual"};
  else
    wanted = {engine};

  std::optional<SModSystem> chk;
  std::optional<Trace> trace;
  std::optional<RestrictionWitness> witness;
  std::vector<EngineAnswer> answers;
  for (const auto& name : wanted) {
    EngineAnswer a;
    a.name = name;
    if (name == "zone" && diags && engine == "all") {
      a.skipped = true;
      answers.push_back(a);
      continue;
    }
    auto t0 = Clock::now();
    if (name == "contextual") {
      witness = find_restriction(n, budget);
      a.restricted = witness.has_value();
    } else {
      if (!chk) chk = build_smod(n, true, budget);
      auto tr = sad_reachable(*chk, engine_of(name), budget);
      a.restricted = tr.has_value();
      if (tr) trace = std::move(tr);
    }
    a.ms = ms_since(t0);
    answers.push_back(a);
  }

  bool restricted = false, first = true, agree = true;
  for (const auto& a : answers) {
    if (a.skipped) continue;
    if (first) {
      restricted = a.restricted;
      first = false;
    } else if (a.restricted != restricted) {
      agree = false;
    }
  }
  for (const auto& a : answers) {
    if (a.skipped) {
      std::cout << "engine " << a.name << ": skipped (difference constraints)\n";
      continue;
    }
    std::ostringstream t;
    t.precision(1);
    t << std::fixed << a.ms;
    std::cout << "engine " << a.name << ": " << (a.restricted ? "restricted" : "unrestricted")
              << " (" << t.str() << " ms)\n";
  }
  if (!agree) {
    std::cerr << "error: engines disagree on restriction existence\n";
    return 3;
  }

  Verdict::Kind kind = !restricted          ? Verdict::NotNeeded
                       : is_deterministic(n.a2) ? Verdict::Needed
                                                : Verdict::Inconclusive;
  std::cout << "verdict: " << verdict_name(kind) << "\n";
  if (kind == Verdict::Inconclusive)
    std::cout << "restriction found, but the observer is nondeterministic; shared reads may "
                 "still be removable\n";
  if (restricted) {
    if (!witness) witness = find_restriction(n, budget);
    if (witness) std::cout << "witness: " << witness->describe(FlatSys(n)) << "\n";
    if (trace && chk)
      std::cout << "trace to the divergence detector:\n" << trace_str(*trace, chk->assembly());
  }
  return exit_of(kind);
}

std::string default_out(const std::string& in, const std::string& suffix) {
  std::string stem = in;
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".nta")
    stem = stem.substr(0, stem.size() - 4);
  return stem + suffix;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

int cmd_transform(const std::string& path, std::string out, const std::string& engine,
                  size_t budget, bool verify) {
  Network net = load(path);
  Verdict v = decide_need(net, engine_of(engine), budget);
  if (v.kind != Verdict::NotNeeded) {
    std::cerr << "refusing to transform: verdict " << verdict_name(v.kind) << "\n";
    if (v.witness) std::cerr << "witness: " << v.witness->describe(FlatSys(net)) << "\n";
    return exit_of(v.kind);
  }
  const SynthesizedNetwork& sn = *v.synth;
  if (out.empty()) out = default_out(path, "_nsc.nta");
  std::string psi_path = default_out(out, ".psi.map");
  write_file(out, serialize(sn.net));
  std::ostringstream psi;
  for (const auto& line : sn.psi_lines) psi << line << "\n";
  write_file(psi_path, psi.str());
  std::cout << "wrote " << out << " and " << psi_path << "\n";

  if (verify) {
    NscReport rep = check_def_nsc(net, sn, budget);
    auto line = [](const char* what, const BisimResult& r) {
      std::cout << "verify " << what << ": " << (r.bisimilar ? "PASS" : "FAIL");
      if (!r.bisimilar) std::cout << " (distinguished by: " << r.sequence_str() << ")";
      std::cout << "\n";
    };
    line("global", rep.global);
    line("watched", rep.watched);
    line("knowledge", rep.contextual);
    if (!rep.all()) return 3;
  }
  return 0;
}

int cmd_explain(const std::string& path, size_t budget) {
  Network net = load(path);
  Network n = normalize_sync_guards(net);
  SModSystem chk = build_smod(n, true, budget);
  auto tr = sad_reachable(chk, Engine::Region, budget);
  auto wit = find_restriction(n, budget);
  if (!tr && !wit) {
    std::cout << "no witness: \xE2\x8A\xA5 unreachable\n";
    return 0;
  }
  if (wit) std::cout << "restriction witness: " << wit->describe(FlatSys(n)) << "\n";
  if (tr) {
    std::cout << "trace to the divergence detector (shadow clocks carry the observer's "
                 "belief):\n";
    std::cout << trace_str(*tr, chk.assembly());
  }
  return 0;
}

std::string cluster_dot(const SModSystem& sm) {
  std::ostringstream os;
  std::vector<const TimedAutomaton*> parts = {&sm.a1_prime, &sm.a12, &sm.a2mod};
  std::vector<ntasc::Clock> clocks = sm.clocks;
  os << "digraph smod {\n  rankdir=LR;\n  node [fontsize=10];\n";
  for (size_t ci = 0; ci < parts.size(); ++ci) {
    const TimedAutomaton& a = *parts[ci];
    os << "  subgraph cluster_" << ci << " {\n    label=\"" << a.name << "\";\n";
    for (size_t li = 0; li < a.locations.size(); ++li) {
      os << "    c" << ci << "_" << li << " [label=\"" << a.locations[li].name;
      if (!a.locations[li].inv.empty()) os << "\\n" << inv_str(a.locations[li].inv, clocks);
      os << "\"";
      if ((int)li == a.init) os << ", style=bold";
      if (ci == 2 && (int)li == sm.sad_loc) os << ", shape=doubleoctagon";
      os << "];\n";
    }
    for (const auto& e : a.edges) {
      os << "    c" << ci << "_" << e.src << " -> c" << ci << "_" << e.tgt << " [label=\"";
      if (e.kind == ActKind::Eps)
        os << "eps";
      else
        os << e.label;
      if (!e.guard.trivial()) os << "\\n" << guard_str(e.guard, clocks);
      if (!e.resets.empty()) {
        os << "\\nreset";
        for (int c : e.resets) os << " " << clocks[c].name;
      }
      for (auto [dst, src] : e.copies)
        os << "\\n" << clocks[dst].name << " := " << clocks[src].name;
      os << "\"";
      if (e.kind == ActKind::Sync) os << ", style=dashed";
      os << "];\n";
    }
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

int cmd_export(const std::string& path, const std::string& what, const std::string& out,
               size_t budget) {
  Network net = load(path);
  Network n = normalize_sync_guards(net);
  std::string dot;
  if (what == "regions") {
    // Region graph of the watched automaton on its own.
    FlatSys solo(n.clocks, {n.a1});
    dot = export_dot(build_region_graph(solo, budget));
  } else if (what == "joint") {
    dot = export_dot(build_region_graph(FlatSys(n), budget, true));
  } else if (what == "contextual") {
    dot = export_dot(build_contextual_graph(n, budget));
  } else if (what == "smod") {
    dot = cluster_dot(build_smod(n, true, budget));
  } else if (what == "network") {
    dot = export_dot(n);
  } else {
    throw std::runtime_error("unknown --dot artifact '" + what +
                             "' (regions|joint|contextual|smod|network)");
  }
  if (out.empty())
    std::cout << dot;
  else
    write_file(out, dot);
  return 0;
}

int cmd_bisim(const std::string& pa, const std::string& pb, bool weak, bool enriched,
              size_t budget) {
  Network a = load(pa), b = load(pb);
  auto [ls, rs] = align_union(FlatSys(normalize_sync_guards(a)), FlatSys(normalize_sync_guards(b)));
  BisimOptions opt;
  opt.weak = weak;
  opt.enrich_sync = enriched;
  opt.budget = budget;
  BisimResult r = timed_bisim(ls, rs, opt);
  if (r.bisimilar) {
    std::cout << "bisimilar (" << r.positions << " game positions)\n";
    return 0;
  }
  std::cout << "not bisimilar; distinguished by: " << r.sequence_str() << "\n";
  return 1;
}

int cmd_fuzz(int count, unsigned seed, size_t budget, long long grid) {
  std::mt19937 rng(seed);
  int done = 0, skipped = 0, mismatches = 0;
  int attempts = 0;
  while (done < count && attempts < count * 10) {
    ++attempts;
    Network net = random_network(rng);
    if (has_errors(validate_network(net))) continue;
    Network n = normalize_sync_guards(net);
    try {
      SModSystem chk = build_smod(n, true, budget);
      bool sad_region = sad_reachable(chk, Engine::Region, budget).has_value();
      bool sad_zone = sad_reachable(chk, Engine::Zone, budget).has_value();
      bool restric = find_restriction(n, budget).has_value();
      if (sad_region != sad_zone || sad_region != restric) {
        ++mismatches;
        std::cout << "mismatch (region=" << sad_region << " zone=" << sad_zone
                  << " contextual=" << restric << ") on:\n"
                  << serialize(net);
      }
      if (grid > 0) {
        // Soundness spot check: every grid-reachable location vector must be
        // region-reachable.
        auto states = discrete_simulate(n, grid, Rat(4), budget);
        RegionGraph rg = build_region_graph(FlatSys(n), budget);
        std::set<std::vector<int>> locs;
        for (const auto& st : rg.states) locs.insert(st.locs);
        for (const auto& gs : states)
          if (!locs.count(gs.locs)) {
            ++mismatches;
            std::cout << "grid state outside region reachability on:\n" << serialize(net);
            break;
          }
      }
      ++done;
    } catch (const StateBudgetExceeded&) {
      ++skipped;
    }
  }
  std::cout << done << " networks checked, " << skipped << " skipped, " << mismatches
            << " mismatches\n";
  return mismatches == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shared-clock necessity checker and network transformer"};
  app.require_subcommand(1);

  std::string in, in_b, engine = "all", out, what;
  size_t budget = effective_budget();
  bool verify = false, weak = false, enriched = false;
  int count = 100;
  unsigned seed = 0;
  long long grid = 0;

  auto add_budget = [&](CLI::App* c) {
    c->add_option("--budget", budget, "state budget before giving up");
  };

  CLI::App* check = app.add_subcommand("check", "decide whether the observer needs the shared clocks");
  check->add_option("file", in, "network file")->required();
  check->add_option("--engine", engine, "region|zone|contextual|all (default all)");
  add_budget(check);

  std::string tr_engine = "region";
  CLI::App* transform = app.add_subcommand("transform", "synthesize a shared-clock-free network");
  transform->add_option("file", in, "network file")->required();
  transform->add_option("-o", out, "output path (default <input>_nsc.nta)");
  transform->add_option("--engine", tr_engine, "region|zone|contextual (default region)");
  transform->add_flag("--verify", verify, "check the output against the input");
  add_budget(transform);

  CLI::App* explain = app.add_subcommand("explain", "show the evidence for the verdict");
  explain->add_option("file", in, "network file")->required();
  add_budget(explain);

  CLI::App* exp = app.add_subcommand("export", "emit DOT for an intermediate artifact");
  exp->add_option("file", in, "network file")->required();
  exp->add_option("--dot", what, "regions|joint|contextual|smod|network")->required();
  exp->add_option("-o", out, "output path (default stdout)");
  add_budget(exp);

  CLI::App* bis = app.add_subcommand("bisim", "timed bisimulation between two networks");
  bis->add_option("a", in, "left network")->required();
  bis->add_option("b", in_b, "right network")->required();
  bis->add_flag("--weak", weak, "allow silent moves around answers");
  bis->add_flag("--enriched", enriched, "announce landing location and region at syncs");
  add_budget(bis);

  CLI::App* fuzz = app.add_subcommand("fuzz", "random differential testing");
  fuzz->group("");  // hidden
  fuzz->add_option("--count", count, "number of networks");
  fuzz->add_option("--seed", seed, "generator seed");
  fuzz->add_option("--grid", grid, "also cross-check a discrete grid simulation");
  add_budget(fuzz);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(in, engine, budget);
    if (transform->parsed()) return cmd_transform(in, out, tr_engine, budget, verify);
    if (explain->parsed()) return cmd_explain(in, budget);
    if (exp->parsed()) return cmd_export(in, what, out, budget);
    if (bis->parsed()) return cmd_bisim(in, in_b, weak, enriched, budget);
    if (fuzz->parsed()) return cmd_fuzz(count, seed, budget, grid);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bis->parsed() ? 2 : 3;
  }
  return 3;
}
