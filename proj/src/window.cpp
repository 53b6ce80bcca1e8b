#include "cubecode/window.hpp"

namespace cubecode {

namespace {

void add_box(std::set<NatString>& out, NatString prefix, Nat length, Nat width) {
  out.insert(prefix);
  if (prefix.size() + 1 >= length) return;
  for (Nat j = 0; j < width; ++j) add_box(out, extend(prefix, j), length, width);
}

}  // namespace

StringWindow::StringWindow(WindowParams params) : params_(params) {
  if (params_.box_length > 0) add_box(strings_, {}, params_.box_length, params_.box_width);
}

void StringWindow::add_chosen(const NatString& s) {
  for (std::size_t len = 0; len <= s.size(); ++len) {
    strings_.insert(NatString(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(len)));
  }
  for (Nat j = 0; j < params_.box_width; ++j) strings_.insert(extend(s, j));
}

std::vector<NatString> StringWindow::range(Nat s) const {
  std::vector<NatString> out;
  for (const auto& str : strings_) {
    if (in_cube_range(str, s)) out.push_back(str);
  }
  return out;
}

}  // namespace cubecode
