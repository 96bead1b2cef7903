#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rational.hpp"

namespace chartsynth {

/// Base-10 fixed-point value: mantissa * 10^-scale. Equality and ordering are
/// by numeric value, so 3.1 == 3.10; the scale only affects formatting.
class Decimal {
 public:
  static constexpr int kMaxScale = 9;
  static constexpr int kMaxDigits = 18;

  constexpr Decimal() = default;
  /// Throws std::invalid_argument when scale exceeds kMaxScale.
  Decimal(std::int64_t mantissa, int scale);

  static Decimal from_int(std::int64_t value) { return Decimal(value, 0); }

  /// Strict grammar: [-]digits[.digits]. No exponent, no leading '+', no
  /// thousands separators. Returns nullopt on anything else or on overflow.
  static std::optional<Decimal> parse(std::string_view text);

  std::int64_t mantissa() const noexcept { return mantissa_; }
  int scale() const noexcept { return scale_; }

  /// Smallest scale representing the same value (trailing zeros dropped).
  int min_scale() const noexcept;

  /// Same value at a wider scale. Throws std::invalid_argument when `scale`
  /// would drop significant digits or overflow.
  Decimal rescaled(int scale) const;

  /// Formats with the value's own scale.
  std::string to_string() const;
  /// Formats with exactly `scale` decimals; `scale` must be >= min_scale().
  std::string to_string(int scale) const;

  double to_double() const noexcept;
  Rational to_rational() const;

  friend bool operator==(const Decimal& a, const Decimal& b) noexcept {
    return (a <=> b) == 0;
  }
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) noexcept;

 private:
  std::int64_t mantissa_ = 0;
  int scale_ = 0;
};

std::int64_t pow10_i64(int exponent);

}  // namespace chartsynth
