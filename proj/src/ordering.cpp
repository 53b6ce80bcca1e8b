#include "cubecode/ordering.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "cubecode/error.hpp"

namespace cubecode {

namespace {

Nat num(std::string_view text, std::string_view token) {
  Nat v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::config_invalid, "bad requirement '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

std::string format_requirement(const Requirement& req) {
  using K = Requirement::Kind;
  switch (req.kind) {
    case K::n_string: return "N" + format_string(req.pi);
    case K::mother: return "N" + std::to_string(req.r) + "^" + std::to_string(req.a);
    case K::daughter:
      return "N" + std::to_string(req.r) + "," + std::to_string(req.n) + "^" +
             std::to_string(req.a);
    case K::u: return "U" + std::to_string(req.i) + "," + std::to_string(req.e);
    case K::m: return "M" + std::to_string(req.index);
    case K::idle: return "idle";
  }
  return "idle";
}

Requirement parse_requirement(std::string_view token) {
  if (token == "idle") return Requirement::idle();
  if (token.size() < 2) throw Error(ErrorCode::config_invalid, "bad requirement");
  const char head = token[0];
  auto body = token.substr(1);
  if (head == 'M') return Requirement::m(num(body, token));
  if (head == 'U') {
    auto comma = body.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::config_invalid, "bad U token");
    return Requirement::u(num(body.substr(0, comma), token), num(body.substr(comma + 1), token));
  }
  if (head == 'N') {
    if (body.front() == '<') return Requirement::n_string(parse_string(body));
    auto caret = body.find('^');
    if (caret == std::string_view::npos) throw Error(ErrorCode::config_invalid, "bad N token");
    const Nat a = num(body.substr(caret + 1), token);
    if (a > 1) throw Error(ErrorCode::config_invalid, "sort must be 0 or 1");
    auto left = body.substr(0, caret);
    auto comma = left.find(',');
    if (comma == std::string_view::npos) return Requirement::mother(num(left, token), a);
    const Nat n = num(left.substr(comma + 1), token);
    if (n == 0) throw Error(ErrorCode::config_invalid, "daughters start at n = 1");
    return Requirement::daughter(num(left.substr(0, comma), token), n, a);
  }
  throw Error(ErrorCode::config_invalid, "bad requirement '" + std::string(token) + "'");
}

std::vector<Requirement> default_cc_ordering(const std::vector<NatString>& tree,
                                             Nat adversaries) {
  std::vector<NatString> rest(tree.begin(), tree.end());
  rest.erase(std::remove(rest.begin(), rest.end(), NatString{}), rest.end());
  std::stable_sort(rest.begin(), rest.end(), [](const NatString& a, const NatString& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<Requirement> out{Requirement::n_string({})};
  for (std::size_t k = 0; k < std::max<std::size_t>(rest.size(), adversaries); ++k) {
    if (k < adversaries) out.push_back(Requirement::m(static_cast<Nat>(k)));
    if (k < rest.size()) out.push_back(Requirement::n_string(rest[k]));
  }
  return out;
}

void validate_cc_ordering(const std::vector<Requirement>& ordering,
                          const std::vector<NatString>& tree) {
  std::set<NatString> in_tree(tree.begin(), tree.end());
  if (!in_tree.count({})) throw Error(ErrorCode::config_invalid, "tree lacks the root");
  for (const auto& s : tree) {
    if (!s.empty() && !in_tree.count(NatString(s.begin(), s.end() - 1))) {
      throw Error(ErrorCode::config_invalid, "tree not prefix closed at " + format_string(s));
    }
  }
  if (ordering.empty() || ordering.front() != Requirement::n_string({})) {
    throw Error(ErrorCode::config_invalid, "N<> must come first");
  }
  std::set<Requirement> seen;
  for (const auto& req : ordering) {
    if (!seen.insert(req).second) {
      throw Error(ErrorCode::config_invalid, "repeated " + format_requirement(req));
    }
    if (req.kind == Requirement::Kind::n_string) {
      if (!in_tree.count(req.pi)) {
        throw Error(ErrorCode::config_invalid, format_requirement(req) + " not in tree");
      }
      if (!req.pi.empty()) {
        auto parent = Requirement::n_string(NatString(req.pi.begin(), req.pi.end() - 1));
        if (!seen.count(parent)) {
          throw Error(ErrorCode::config_invalid,
                      format_requirement(req) + " precedes " + format_requirement(parent));
        }
      }
    } else if (req.kind != Requirement::Kind::m) {
      throw Error(ErrorCode::config_invalid,
                  format_requirement(req) + " does not belong to the cc variant");
    }
  }
}

std::vector<Requirement> default_dc_ordering(const DcShape& shape) {
  std::vector<Requirement> out;
  const Nat rounds = std::max({shape.mothers + shape.daughters,
                               shape.u_indices + shape.u_functionals, shape.adversaries}) + 1;
  for (Nat k = 0; k < rounds; ++k) {
    if (k < shape.mothers) {
      for (Nat a = 0; a < 2; ++a) out.push_back(Requirement::mother(k, a));
    }
    for (Nat r = 0; r < shape.mothers && r < k; ++r) {
      const Nat n = k - r;
      if (n < 1 || n > shape.daughters) continue;
      for (Nat a = 0; a < 2; ++a) out.push_back(Requirement::daughter(r, n, a));
    }
    for (Nat i = 0; i < shape.u_indices && i <= k; ++i) {
      const Nat e = k - i;
      if (e < shape.u_functionals) out.push_back(Requirement::u(i, e));
    }
    if (k < shape.adversaries) out.push_back(Requirement::m(k));
  }
  return out;
}

void validate_dc_ordering(const std::vector<Requirement>& ordering) {
  std::set<Requirement> seen;
  for (const auto& req : ordering) {
    if (!seen.insert(req).second) {
      throw Error(ErrorCode::config_invalid, "repeated " + format_requirement(req));
    }
    if (req.kind == Requirement::Kind::n_string) {
      throw Error(ErrorCode::config_invalid, "string requirements belong to the cc variant");
    }
    if (req.kind != Requirement::Kind::daughter) continue;
    if (!seen.count(Requirement::mother(req.r, req.a))) {
      throw Error(ErrorCode::config_invalid, format_requirement(req) + " precedes its mother");
    }
    if (req.n > 1 && !seen.count(Requirement::daughter(req.r, req.n - 1, req.a))) {
      throw Error(ErrorCode::config_invalid,
                  format_requirement(req) + " precedes its elder sister");
    }
  }
}

}  // namespace cubecode
