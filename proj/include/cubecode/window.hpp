#pragma once

// The finite set of tree addresses actually materialized. The ground
// structure has a cube at every string; a run only ever looks at a small
// box of short strings, the strings chosen by strategies, and the children
// of chosen strings below the box width.

#include <set>
#include <vector>

#include "cubecode/labeled_structure.hpp"

namespace cubecode {

struct WindowParams {
  Nat box_length = 3;  // box strings are shorter than this
  Nat box_width = 2;   // ... and use symbols below this
  Nat support = 3;     // cube vertices F inside {0,...,support-1}
};

class StringWindow {
 public:
  explicit StringWindow(WindowParams params = {});

  /// Adds a chosen string together with its box-width children.
  void add_chosen(const NatString& s);
  bool contains(const NatString& s) const { return strings_.count(s) != 0; }

  /// Window strings inside s^{<s}, in lexicographic order (prefixes first).
  std::vector<NatString> range(Nat s) const;

  const std::set<NatString>& strings() const { return strings_; }
  const WindowParams& params() const { return params_; }

 private:
  WindowParams params_;
  std::set<NatString> strings_;
};

}  // namespace cubecode
