// cubecode: run the constructions, check and dissect their traces.
//
// exit status: 0 ok, 1 a check failed, 2 bad usage / config / input

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cubecode/config.hpp"
#include "cubecode/error.hpp"
#include "cubecode/replay.hpp"
#include "cubecode/suites.hpp"

namespace fs = std::filesystem;
using namespace cubecode;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spill(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + p.string());
  out << text;
}

// "-" is stdout
void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    spill(out, text);
  }
}

Trace load_trace(const fs::path& p) { return Trace::parse(slurp(p)); }

std::string paths_text(const ExtractedPaths& paths) {
  std::ostringstream out;
  for (const auto& p : paths.paths) {
    out << (p.a == 0 ? "f" : "g") << ' ' << p.v << ' ' << p.mother << ' '
        << format_string(p.prefix);
    for (const auto& [n, u] : p.by_u) out << ' ' << n << ':' << u;
    out << '\n';
  }
  return out.str();
}

// --- run ---------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::string out_dir = ".";
  Nat horizon = 0;
};

int cmd_run(const RunArgs& a) {
  RunConfig cfg = load_run_config(a.config);
  if (a.horizon) cfg.horizon = a.horizon;
  Run run(cfg);
  run.execute();
  const fs::path dir = a.out_dir;
  spill(dir / "trace.txt", run.trace().str());
  spill(dir / "snapshot.txt", run.snapshot().store->dump());
  if (auto* dc = run.dc()) {
    spill(dir / "paths.txt", paths_text(extract_paths(run.trace(), cfg.horizon, cfg.true_path)));
    spill(dir / "halting.txt", dc->halting().dump());
  }
  std::cerr << "stages " << cfg.horizon << ", events " << run.trace().events().size() << "\n";
  return kOk;
}

// --- verify ------------------------------------------------------------------

struct VerifyArgs {
  std::string trace;
  std::string config;
  std::vector<std::string> suites{"invariants"};
  Nat early = 0;
  Nat min_infinite = 20;
};

void merge(Report& into, const Report& from) {
  into.checks.insert(into.checks.end(), from.checks.begin(), from.checks.end());
}

int cmd_verify(const VerifyArgs& a) {
  const Trace trace = load_trace(a.trace);
  const Nat horizon = trace_horizon(trace);
  std::optional<RunConfig> cfg;
  if (!a.config.empty()) cfg = load_run_config(a.config);
  auto need_config = [&](const std::string& suite) -> const RunConfig& {
    if (!cfg) throw Error(ErrorCode::config_invalid, "suite " + suite + " needs --config");
    return *cfg;
  };
  const TruePathParams params = cfg ? cfg->true_path : TruePathParams{};

  Report report;
  for (const auto& suite : a.suites) {
    if (suite.empty()) continue;
    if (suite == "invariants") {
      merge(report, check_trace_invariants(trace));
    } else if (suite == "labeling") {
      const Nat early = a.early ? a.early : horizon / 2;
      std::set<NatString> chosen;
      for (const auto& [input, s] : compute_Q(trace, early, params).phi) chosen.insert(s);
      merge(report, check_labeling(trace, chosen, early, horizon));
    } else if (suite == "modulus") {
      merge(report, modulus_suite(trace, PhiPredicate(need_config(suite).phi), horizon, params));
    } else if (suite == "diagonalization") {
      merge(report, diagonalization_suite(trace, need_config(suite).functionals, horizon, params));
    } else if (suite == "isomorphism") {
      Run run(need_config(suite));
      run.execute_to(horizon);
      std::vector<const Adversary*> adv;
      for (std::size_t k = 0; k < run.adversary_count(); ++k) adv.push_back(&run.adversary(k));
      merge(report, isomorphism_suite(trace, adv, horizon, a.min_infinite, params));
    } else {
      throw Error(ErrorCode::config_invalid, "unknown suite '" + suite + "'");
    }
  }
  std::cout << report.str();
  return report.ok() ? kOk : kCheckFailed;
}

// --- extract -----------------------------------------------------------------

struct ExtractArgs {
  std::string trace;
  std::string config;
  std::string target;
  std::string out;
  Nat adversary = 0;
};

int cmd_extract(const ExtractArgs& a) {
  const Trace trace = load_trace(a.trace);
  const Nat horizon = trace_horizon(trace);
  std::optional<RunConfig> cfg;
  if (!a.config.empty()) cfg = load_run_config(a.config);
  const TruePathParams params = cfg ? cfg->true_path : TruePathParams{};

  if (a.target == "Q") {
    const TreeQ q = compute_Q(trace, horizon, params);
    std::ostringstream out;
    for (const auto& [input, s] : q.phi) {
      out << format_string(input) << ' ' << format_string(s) << ' ' << q.chooser.at(input) << '\n';
    }
    emit(a.out, out.str());
    return kOk;
  }
  if (a.target == "paths") {
    emit(a.out, paths_text(extract_paths(trace, horizon, params)));
    return kOk;
  }
  // isomorphism
  if (!cfg) throw Error(ErrorCode::config_invalid, "isomorphism needs --config");
  Run run(*cfg);
  run.execute_to(horizon);
  if (a.adversary >= run.adversary_count()) {
    throw Error(ErrorCode::config_invalid, "no adversary " + std::to_string(a.adversary));
  }
  const std::string type = "M" + std::to_string(a.adversary);
  std::optional<NodeId> node;
  for (const auto& st : true_path_approx(TraceIndex(trace).nodes(), horizon, params)) {
    if (st.type == type) node = st.node;
  }
  if (!node) {
    std::cerr << type << " is not on the true path\n";
    return kCheckFailed;
  }
  const Adversary& adv = run.adversary(a.adversary);
  const Extraction ex = extract_isomorphism(trace, *node, adv, horizon);
  std::ostringstream out;
  out << "# node " << ex.node << (ex.optimistic ? " optimistic" : "") << '\n';
  for (const auto& [e, x] : ex.g) out << "g " << format_elem(e) << ' ' << x << '\n';
  for (const auto& e : ex.stalled) out << "stall " << format_elem(e) << '\n';
  emit(a.out, out.str());

  auto store = std::make_shared<const LabelStore>(replay_store(trace, horizon));
  const IsoCheck iso = check_isomorphism(
      ex.g, {read_trace_config(trace).variant, store, horizon}, adv.stream(), horizon, adv.delay());
  if (!iso.ok) {
    std::cerr << "not an isomorphism: " << iso.failure << '\n';
    return kCheckFailed;
  }
  if (!ex.stalled.empty()) std::cerr << "warning: " << ex.stalled.size() << " stalled elements\n";
  return kOk;
}

// --- replay ------------------------------------------------------------------

struct ReplayArgs {
  std::string config;
  std::string trace;
};

int cmd_replay(const ReplayArgs& a) {
  const std::string recorded = slurp(a.trace);
  Run run(load_run_config(a.config));
  run.execute_to(trace_horizon(Trace::parse(recorded)));
  const std::string fresh = run.trace().str();
  if (fresh == recorded) {
    std::cout << "identical (" << fresh.size() << " bytes)\n";
    return kOk;
  }
  std::istringstream x(recorded), y(fresh);
  std::string lx, ly;
  for (std::size_t line = 1;; ++line) {
    const bool gx = static_cast<bool>(std::getline(x, lx));
    const bool gy = static_cast<bool>(std::getline(y, ly));
    if (!gx && !gy) break;
    if (!gx || !gy || lx != ly) {
      std::cout << "differs at line " << line << "\n- " << (gx ? lx : "<eof>") << "\n+ "
                << (gy ? ly : "<eof>") << "\n";
      break;
    }
  }
  return kCheckFailed;
}

// --- gen-adversary -----------------------------------------------------------

struct GenArgs {
  std::string config;
  Nat index = 0;
  std::string out;
};

int cmd_gen_adversary(const GenArgs& a) {
  RunConfig cfg = load_run_config(a.config);
  Run run(cfg);
  if (a.index >= run.adversary_count()) {
    throw Error(ErrorCode::config_invalid, "no adversary " + std::to_string(a.index));
  }
  run.execute();
  emit(a.out, run.adversary(a.index).stream().dump());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cubecode: cube coding constructions"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run a construction to its horizon");
  run->add_option("-c,--config", run_args.config, "JSON run config")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", run_args.out_dir, "output directory (trace.txt, snapshot.txt, ...)");
  run->add_option("--horizon", run_args.horizon, "override the configured horizon");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "check a trace");
  verify->add_option("-t,--trace", verify_args.trace, "trace file")->required();
  verify->add_option("-c,--config", verify_args.config, "run config, needed by modulus / diagonalization / isomorphism");
  verify->add_option("-s,--suite", verify_args.suites,
                     "suites: invariants labeling modulus diagonalization isomorphism")
      ->delimiter(',');
  verify->add_option("--early", verify_args.early, "earlier stage for labeling (default horizon/2)");
  verify->add_option("--min-infinite", verify_args.min_infinite,
                     "infinite outcomes an M-node needs before isomorphism is checked");

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "derive Q, paths or an isomorphism from a trace");
  extract->add_option("-t,--trace", extract_args.trace, "trace file")->required();
  extract->add_option("--target", extract_args.target, "Q, paths or isomorphism")
      ->required()
      ->check(CLI::IsMember({"Q", "paths", "isomorphism"}));
  extract->add_option("-c,--config", extract_args.config, "run config");
  extract->add_option("-a,--adversary", extract_args.adversary, "adversary index (isomorphism)");
  extract->add_option("-o,--out", extract_args.out, "output file, default stdout");

  ReplayArgs replay_args;
  auto* replay = app.add_subcommand("replay", "rerun a config and compare with a recorded trace");
  replay->add_option("-c,--config", replay_args.config, "run config")->required();
  replay->add_option("-t,--trace", replay_args.trace, "recorded trace")->required();

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen-adversary", "dump the fact stream of a configured adversary");
  gen->add_option("-c,--config", gen_args.config, "run config")->required();
  gen->add_option("-i,--index", gen_args.index, "adversary index");
  gen->add_option("-o,--out", gen_args.out, "output file, default stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*verify) return cmd_verify(verify_args);
    if (*extract) return cmd_extract(extract_args);
    if (*replay) return cmd_replay(replay_args);
    if (*gen) return cmd_gen_adversary(gen_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
