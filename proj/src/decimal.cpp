#include "decimal.hpp"

#include <cstdlib>
#include <stdexcept>

namespace chartsynth {

std::int64_t pow10_i64(int exponent) {
  std::int64_t out = 1;
  for (int i = 0; i < exponent; ++i) out *= 10;
  return out;
}

Decimal::Decimal(std::int64_t mantissa, int scale) : mantissa_(mantissa), scale_(scale) {
  if (scale < 0 || scale > kMaxScale) throw std::invalid_argument("decimal scale out of range");
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;
  std::int64_t mantissa = 0;
  int scale = 0;
  int digits = 0;
  bool seen_point = false;
  bool digit_before_point = false;
  bool digit_after_point = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    if (seen_point) {
      digit_after_point = true;
      if (++scale > kMaxScale) return std::nullopt;
    } else {
      digit_before_point = true;
    }
    if (mantissa != 0 || c != '0') ++digits;
    if (digits > kMaxDigits) return std::nullopt;
    mantissa = mantissa * 10 + (c - '0');
  }
  if (!digit_before_point) return std::nullopt;
  if (seen_point && !digit_after_point) return std::nullopt;
  return Decimal(negative ? -mantissa : mantissa, scale);
}

int Decimal::min_scale() const noexcept {
  int scale = scale_;
  std::int64_t m = mantissa_;
  while (scale > 0 && m % 10 == 0) {
    m /= 10;
    --scale;
  }
  return scale;
}

Decimal Decimal::rescaled(int scale) const {
  if (scale < min_scale() || scale > kMaxScale) {
    throw std::invalid_argument("decimal rescale would lose digits");
  }
  std::int64_t m = mantissa_;
  if (scale >= scale_) {
    std::int64_t factor = pow10_i64(scale - scale_);
    std::int64_t out;
    if (__builtin_mul_overflow(m, factor, &out)) throw std::invalid_argument("decimal overflow");
    m = out;
  } else {
    m /= pow10_i64(scale_ - scale);
  }
  return Decimal(m, scale);
}

std::string Decimal::to_string() const { return to_string(scale_); }

std::string Decimal::to_string(int scale) const {
  Decimal d = rescaled(scale);
  bool negative = d.mantissa_ < 0;
  // Magnitude via unsigned to survive INT64_MIN.
  std::uint64_t mag = negative ? 0 - static_cast<std::uint64_t>(d.mantissa_)
                               : static_cast<std::uint64_t>(d.mantissa_);
  std::string digits = std::to_string(mag);
  if (scale > 0) {
    if (static_cast<int>(digits.size()) <= scale) {
      digits.insert(0, static_cast<std::size_t>(scale + 1 - static_cast<int>(digits.size())), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
  }
  return negative ? "-" + digits : digits;
}

double Decimal::to_double() const noexcept {
  return static_cast<double>(mantissa_) / static_cast<double>(pow10_i64(scale_));
}

Rational Decimal::to_rational() const { return Rational(mantissa_, pow10_i64(scale_)); }

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) noexcept {
  int scale = a.scale_ > b.scale_ ? a.scale_ : b.scale_;
  __int128 lhs = static_cast<__int128>(a.mantissa_) * pow10_i64(scale - a.scale_);
  __int128 rhs = static_cast<__int128>(b.mantissa_) * pow10_i64(scale - b.scale_);
  return lhs <=> rhs;
}

}  // namespace chartsynth
