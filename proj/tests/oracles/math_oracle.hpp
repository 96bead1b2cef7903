#pragma once

#include <string>
#include <string_view>

namespace oracle {

struct MathVerdict {
  bool ok = false;
  std::string expected;  // oracle answer when the question parsed
  std::string reason;    // failure description
};

/// Re-derives the answer of a generated question from its text alone, using
/// arbitrary-precision rationals and brute-force comparison. Fails on
/// unparseable questions, ambiguous (tied) comparisons, and answer mismatch.
MathVerdict check_math_item(std::string_view module, std::string_view question, std::string_view answer);

}  // namespace oracle
