#pragma once

// JSON run configurations and the objects they describe: which variant,
// how far, the input tree or phi / functionals, and the opponents.

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cubecode/adversary.hpp"
#include "cubecode/cc_construction.hpp"
#include "cubecode/dc_construction.hpp"
#include "cubecode/engine.hpp"

namespace cubecode {

struct AdversarySpec {
  enum class Kind { mirror, file };
  Kind kind = Kind::mirror;
  std::string name;
  // mirror
  bool shuffle = false;
  std::uint64_t seed = 0;
  Nat block = 1;
  Nat delay = 0;
  std::vector<Defect> defects;
  // file: a fact stream, relative paths resolved against the config file
  std::string path;
};

struct RunConfig {
  Variant variant = Variant::cc;
  Nat horizon = 1;
  WindowParams window;
  std::vector<Requirement> ordering;
  std::vector<AdversarySpec> adversaries;
  TruePathParams true_path;
  // cc
  std::vector<NatString> tree{NatString{}};
  // dc
  DcShape shape;
  std::vector<PhiRow> phi;
  std::vector<Functional> functionals;
  Nat witness_base = 1000;
  std::size_t witness_search_cap = 100000;

  std::filesystem::path base_dir;
};

/// Throws config_invalid on anything malformed or out of bounds.
RunConfig parse_run_config(std::string_view json_text, std::filesystem::path base_dir = {});
RunConfig load_run_config(const std::filesystem::path& file);
/// Canonical JSON form (sorted keys, two-space indent).
std::string dump_run_config(const RunConfig& config);

std::unique_ptr<Adversary> build_adversary(const AdversarySpec& spec, const RunConfig& config);

/// A configured construction wired to its engine and trace.
class Run {
 public:
  explicit Run(const RunConfig& config);
  Run(const Run&) = delete;
  Run& operator=(const Run&) = delete;

  void execute() { engine_->run(config_.horizon); }
  void execute_to(Nat stage);

  const RunConfig& config() const { return config_; }
  const Trace& trace() const { return trace_; }
  const NodeStore& nodes() const { return engine_->nodes(); }
  StructureSnapshot snapshot() const;
  Adversary& adversary(Nat i);
  std::size_t adversary_count() const;
  /// Null for the other variant.
  CcConstruction* cc() { return cc_.get(); }
  DcConstruction* dc() { return dc_.get(); }

 private:
  RunConfig config_;
  Trace trace_;
  std::unique_ptr<CcConstruction> cc_;
  std::unique_ptr<DcConstruction> dc_;
  std::unique_ptr<Engine> engine_;
};

}  // namespace cubecode
