#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recur/common.hpp"

namespace recur {

enum class Outcome { True, False, Unknown };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::True:
      return "true";
    case Outcome::False:
      return "false";
    default:
      return "unknown";
  }
}

/// Structured, re-checkable evidence attached to a certified verdict.
/// Group elements, points and cells are carried in their canonical text
/// forms so witnesses can be replayed through the parsers.
struct Witness {
  std::string kind;
  std::string detail;
  std::vector<std::string> elements;
  std::vector<std::string> points;
  std::vector<std::string> cells;
  std::optional<Int> modulus;

  bool empty() const {
    return kind.empty() && elements.empty() && points.empty() && cells.empty() &&
           !modulus.has_value();
  }
};

struct Budget {
  int level = 0;
  Int radius = 0;
  int samples = 0;
};

/// Tri-state certified outcome. Unknown is the honest default; True and
/// False always carry a witness, and `exact` is set only when the claim
/// is backed by a capability of the producing system rather than by a
/// finite scan.
struct Verdict {
  Outcome outcome = Outcome::Unknown;
  bool exact = false;
  Witness witness;
  Budget budget;
  std::string note;

  static Verdict yes(Witness w, Budget b, bool exact_flag, std::string note_text = {}) {
    return Verdict{Outcome::True, exact_flag, std::move(w), b, std::move(note_text)};
  }
  static Verdict no(Witness w, Budget b, bool exact_flag, std::string note_text = {}) {
    return Verdict{Outcome::False, exact_flag, std::move(w), b, std::move(note_text)};
  }
  static Verdict unknown(Budget b, std::string note_text = {}) {
    return Verdict{Outcome::Unknown, false, Witness{}, b, std::move(note_text)};
  }

  bool certified() const { return outcome != Outcome::Unknown; }
};

}  // namespace recur
