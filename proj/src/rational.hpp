#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chartsynth {

/// Exact rational number on 128-bit integers. Always normalized: gcd(num, den)
/// is 1 and den > 0. Arithmetic that would overflow throws std::overflow_error.
class Rational {
 public:
  using Int = __int128;

  constexpr Rational() = default;
  Rational(Int numerator, Int denominator = 1);

  Int num() const noexcept { return num_; }
  Int den() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_ == 0; }
  bool is_negative() const noexcept { return num_ < 0; }
  bool is_positive() const noexcept { return num_ > 0; }
  bool is_integer() const noexcept { return den_ == 1; }
  /// True when the decimal expansion terminates (den has no factors but 2, 5).
  bool is_terminating() const noexcept;

  Rational abs() const;
  double to_double() const noexcept;

  /// Canonical answer text: "12", "-0.25", or "-3/7" in lowest terms.
  std::string to_string() const;
  /// "a/b" form always (integers print as "a/1").
  std::string to_fraction_string() const;

  /// Accepts "p/q", integers, and plain decimals ("12.5"); optional sign.
  static std::optional<Rational> parse(std::string_view text);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  /// Throws std::domain_error on division by zero.
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  Int num_ = 0;
  Int den_ = 1;
};

std::string int128_to_string(__int128 value);

}  // namespace chartsynth
