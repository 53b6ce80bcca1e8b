#include "cubecode/config.hpp"

#include <fstream>
#include <sstream>

#include "cubecode/error.hpp"
#include "json.hpp"

namespace cubecode {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::config_invalid, what); }

Nat get_nat(const json& j, const char* key, Nat fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) bad(std::string(key) + " must be a natural number");
  const auto n = v.get<std::uint64_t>();
  if (n > 0xFFFFFFFFu) bad(std::string(key) + " too large");
  return static_cast<Nat>(n);
}

Defect parse_defect(const json& j) {
  Defect d;
  const auto kind = j.value("kind", std::string{});
  if (kind == "omit_label") {
    d.kind = Defect::Kind::omit_label;
    d.label = get_nat(j, "label", 0);
    d.key = parse_key(j.value("key", std::string("<>")));
  } else if (kind == "break_p") {
    d.kind = Defect::Kind::break_p;
    d.key = parse_key(j.value("key", std::string("<>")));
    d.child = get_nat(j, "child", 0);
  } else if (kind == "freeze_after") {
    d.kind = Defect::Kind::freeze_after;
    d.step = get_nat(j, "step", 0);
  } else {
    bad("unknown defect kind '" + kind + "'");
  }
  return d;
}

json defect_json(const Defect& d) {
  switch (d.kind) {
    case Defect::Kind::omit_label:
      return {{"kind", "omit_label"}, {"label", d.label}, {"key", format_key(d.key)}};
    case Defect::Kind::break_p:
      return {{"kind", "break_p"}, {"key", format_key(d.key)}, {"child", d.child}};
    case Defect::Kind::freeze_after:
      return {{"kind", "freeze_after"}, {"step", d.step}};
  }
  return {};
}

AdversarySpec parse_adversary(const json& j, std::size_t index) {
  AdversarySpec a;
  a.name = j.value("name", "M" + std::to_string(index));
  const auto kind = j.value("kind", std::string("mirror"));
  if (kind == "file") {
    a.kind = AdversarySpec::Kind::file;
    a.path = j.value("path", std::string{});
    if (a.path.empty()) bad("file adversary needs a path");
    return a;
  }
  if (kind != "mirror") bad("unknown adversary kind '" + kind + "'");
  a.delay = get_nat(j, "delay", 0);
  if (j.contains("permutation")) {
    const auto& p = j.at("permutation");
    const auto pk = p.value("kind", std::string("identity"));
    if (pk == "block_shuffle") {
      a.shuffle = true;
      a.seed = p.value("seed", std::uint64_t{0});
      a.block = get_nat(p, "block", 8);
      if (a.block == 0) bad("block must be positive");
    } else if (pk != "identity") {
      bad("unknown permutation '" + pk + "'");
    }
  }
  if (j.contains("defects")) {
    for (const auto& d : j.at("defects")) a.defects.push_back(parse_defect(d));
  }
  return a;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, std::filesystem::path base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) bad("config must be an object");
  RunConfig c;
  c.base_dir = std::move(base_dir);
  try {
    c.variant = parse_variant(j.value("variant", std::string("cc")));
  } catch (const Error&) {
    bad("variant must be cc or dc");
  }
  c.horizon = get_nat(j, "horizon", 0);
  if (c.horizon < 1) bad("horizon must be at least 1");
  if (j.contains("window")) {
    const auto& w = j.at("window");
    c.window.box_length = get_nat(w, "box_length", c.window.box_length);
    c.window.box_width = get_nat(w, "box_width", c.window.box_width);
    c.window.support = get_nat(w, "support", c.window.support);
  }
  if (c.window.support > 16) bad("support is at most 16");
  if (j.contains("true_path")) {
    const auto& t = j.at("true_path");
    c.true_path.recent = get_nat(t, "recent", static_cast<Nat>(c.true_path.recent));
    c.true_path.threshold = get_nat(t, "threshold", static_cast<Nat>(c.true_path.threshold));
  }
  try {
    if (j.contains("ordering")) {
      for (const auto& r : j.at("ordering")) c.ordering.push_back(parse_requirement(r.get<std::string>()));
    }
    if (j.contains("tree")) {
      c.tree.clear();
      for (const auto& s : j.at("tree")) c.tree.push_back(parse_string(s.get<std::string>()));
    }
    if (j.contains("adversaries")) {
      std::size_t k = 0;
      for (const auto& a : j.at("adversaries")) c.adversaries.push_back(parse_adversary(a, k++));
    }
    if (j.contains("shape")) {
      const auto& s = j.at("shape");
      c.shape.mothers = get_nat(s, "mothers", c.shape.mothers);
      c.shape.daughters = get_nat(s, "daughters", c.shape.daughters);
      c.shape.u_indices = get_nat(s, "u_indices", c.shape.u_indices);
      c.shape.u_functionals = get_nat(s, "u_functionals", c.shape.u_functionals);
    }
    if (j.contains("phi")) {
      for (const auto& r : j.at("phi")) c.phi.push_back(parse_phi_row(r.get<std::string>()));
    }
    if (j.contains("functionals")) {
      for (const auto& f : j.at("functionals")) {
        c.functionals.push_back(parse_functional(f.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    bad(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_invalid) throw;
    bad(e.what());
  }
  c.witness_base = get_nat(j, "witness_base", c.witness_base);
  c.witness_search_cap = get_nat(j, "witness_search_cap", static_cast<Nat>(c.witness_search_cap));
  c.shape.adversaries = static_cast<Nat>(c.adversaries.size());
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), file.parent_path());
}

std::string dump_run_config(const RunConfig& c) {
  json j;
  j["variant"] = to_string(c.variant);
  j["horizon"] = c.horizon;
  j["window"] = {{"box_length", c.window.box_length},
                 {"box_width", c.window.box_width},
                 {"support", c.window.support}};
  j["true_path"] = {{"recent", c.true_path.recent}, {"threshold", c.true_path.threshold}};
  if (!c.ordering.empty()) {
    j["ordering"] = json::array();
    for (const auto& r : c.ordering) j["ordering"].push_back(format_requirement(r));
  }
  j["adversaries"] = json::array();
  for (const auto& a : c.adversaries) {
    json aj{{"name", a.name}};
    if (a.kind == AdversarySpec::Kind::file) {
      aj["kind"] = "file";
      aj["path"] = a.path;
    } else {
      aj["kind"] = "mirror";
      aj["delay"] = a.delay;
      aj["permutation"] = a.shuffle ? json{{"kind", "block_shuffle"}, {"seed", a.seed}, {"block", a.block}}
                                    : json{{"kind", "identity"}};
      aj["defects"] = json::array();
      for (const auto& d : a.defects) aj["defects"].push_back(defect_json(d));
    }
    j["adversaries"].push_back(aj);
  }
  if (c.variant == Variant::cc) {
    j["tree"] = json::array();
    for (const auto& s : c.tree) j["tree"].push_back(format_string(s));
  } else {
    j["shape"] = {{"mothers", c.shape.mothers},
                  {"daughters", c.shape.daughters},
                  {"u_indices", c.shape.u_indices},
                  {"u_functionals", c.shape.u_functionals}};
    j["phi"] = json::array();
    for (const auto& r : c.phi) j["phi"].push_back(format_phi_row(r));
    j["functionals"] = json::array();
    for (const auto& f : c.functionals) j["functionals"].push_back(format_functional(f));
    j["witness_base"] = c.witness_base;
    j["witness_search_cap"] = c.witness_search_cap;
  }
  return j.dump(2) + "\n";
}

std::unique_ptr<Adversary> build_adversary(const AdversarySpec& spec, const RunConfig& config) {
  if (spec.kind == AdversarySpec::Kind::file) {
    std::filesystem::path p = spec.path;
    if (p.is_relative()) p = config.base_dir / p;
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::io_error, "cannot read adversary " + p.string());
    std::ostringstream text;
    text << in.rdbuf();
    return std::make_unique<StreamAdversary>(spec.name, FactStream::parse(text.str()));
  }
  Permutation perm = spec.shuffle ? Permutation::block_shuffle(spec.seed, spec.block)
                                  : Permutation::identity();
  return std::make_unique<MirrorAdversary>(spec.name, MirrorSpec{perm, spec.delay, spec.defects},
                                           config.window.support);
}

Run::Run(const RunConfig& config) : config_(config) {
  std::vector<std::unique_ptr<Adversary>> adversaries;
  for (const auto& spec : config_.adversaries) adversaries.push_back(build_adversary(spec, config_));
  if (config_.variant == Variant::cc) {
    cc_ = std::make_unique<CcConstruction>(CcConfig{config_.tree, config_.ordering, config_.window},
                                           std::move(adversaries), trace_);
    engine_ = std::make_unique<Engine>(*cc_, trace_);
  } else {
    DcConfig dc;
    dc.shape = config_.shape;
    dc.ordering = config_.ordering;
    dc.window = config_.window;
    dc.phi = PhiPredicate(config_.phi);
    dc.functionals = config_.functionals;
    dc.witness_base = config_.witness_base;
    dc.witness_search_cap = config_.witness_search_cap;
    dc_ = std::make_unique<DcConstruction>(std::move(dc), std::move(adversaries), trace_);
    engine_ = std::make_unique<Engine>(*dc_, trace_);
  }
}

void Run::execute_to(Nat stage) {
  while (engine_->stage() < stage) engine_->run_stage(engine_->stage() + 1);
}

StructureSnapshot Run::snapshot() const {
  return {config_.variant, cc_ ? cc_->shared_store() : dc_->shared_store(), engine_->stage()};
}

Adversary& Run::adversary(Nat i) { return cc_ ? cc_->adversary(i) : dc_->adversary(i); }

std::size_t Run::adversary_count() const {
  return cc_ ? cc_->adversary_count() : dc_->adversary_count();
}

}  // namespace cubecode
