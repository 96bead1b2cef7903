#include "rational.hpp"

#include <algorithm>
#include <stdexcept>

namespace chartsynth {

namespace {

using Int = Rational::Int;

Int gcd128(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int checked_mul(Int a, Int b) {
  Int out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("rational overflow");
  return out;
}

Int checked_add(Int a, Int b) {
  Int out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("rational overflow");
  return out;
}

}  // namespace

std::string int128_to_string(__int128 value) {
  if (value == 0) return "0";
  bool negative = value < 0;
  unsigned __int128 magnitude =
      negative ? static_cast<unsigned __int128>(-(value + 1)) + 1 : static_cast<unsigned __int128>(value);
  std::string digits;
  while (magnitude > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(magnitude % 10)));
    magnitude /= 10;
  }
  if (negative) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Rational::Rational(Int numerator, Int denominator) {
  if (denominator == 0) throw std::domain_error("rational with zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  Int g = gcd128(numerator, denominator);
  if (g > 1) {
    numerator /= g;
    denominator /= g;
  }
  num_ = numerator;
  den_ = denominator;
}

bool Rational::is_terminating() const noexcept {
  Int d = den_;
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

Rational Rational::abs() const { return num_ < 0 ? -*this : *this; }

double Rational::to_double() const noexcept {
  return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
}

std::string Rational::to_fraction_string() const {
  return int128_to_string(num_) + "/" + int128_to_string(den_);
}

std::string Rational::to_string() const {
  if (den_ == 1) return int128_to_string(num_);
  if (!is_terminating()) return to_fraction_string();
  // Scale to 10^k so the value becomes an integer, then place the point.
  Int d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  int places = std::max(twos, fives);
  Int scaled = num_;
  for (int i = 0; i < places - twos; ++i) scaled = checked_mul(scaled, 2);
  for (int i = 0; i < places - fives; ++i) scaled = checked_mul(scaled, 5);
  // num_/den_ * 10^places == scaled since den_ * 2^a * 5^b == 10^places.
  bool negative = scaled < 0;
  std::string digits = int128_to_string(negative ? -scaled : scaled);
  if (static_cast<int>(digits.size()) <= places) {
    digits.insert(0, static_cast<std::size_t>(places + 1 - static_cast<int>(digits.size())), '0');
  }
  digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  return negative ? "-" + digits : digits;
}

std::optional<Rational> Rational::parse(std::string_view text) {
  auto parse_decimal = [](std::string_view s) -> std::optional<Rational> {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
      negative = s.front() == '-';
      s.remove_prefix(1);
    }
    if (s.empty()) return std::nullopt;
    Int num = 0;
    Int den = 1;
    bool seen_point = false;
    bool seen_digit = false;
    try {
      for (char c : s) {
        if (c == '.') {
          if (seen_point) return std::nullopt;
          seen_point = true;
        } else if (c >= '0' && c <= '9') {
          seen_digit = true;
          num = checked_add(checked_mul(num, 10), c - '0');
          if (seen_point) den = checked_mul(den, 10);
        } else {
          return std::nullopt;
        }
      }
    } catch (const std::overflow_error&) {
      return std::nullopt;
    }
    if (!seen_digit) return std::nullopt;
    return Rational(negative ? -num : num, den);
  };

  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  auto top = parse_decimal(text.substr(0, slash));
  auto bottom = parse_decimal(text.substr(slash + 1));
  if (!top || !bottom || !top->is_integer() || !bottom->is_integer() || bottom->is_zero()) {
    return std::nullopt;
  }
  return Rational(top->num(), bottom->num());
}

Rational operator+(const Rational& a, const Rational& b) {
  Int g = gcd128(a.den_, b.den_);
  Int lhs = checked_mul(a.num_, b.den_ / g);
  Int rhs = checked_mul(b.num_, a.den_ / g);
  return Rational(checked_add(lhs, rhs), checked_mul(a.den_ / g, b.den_));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  Int g1 = gcd128(a.num_, b.den_);
  Int g2 = gcd128(b.num_, a.den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  return Rational(checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("division by zero");
  return a * Rational(b.den_, b.num_);
}

Rational Rational::operator-() const {
  Rational out;
  out.num_ = -num_;
  out.den_ = den_;
  return out;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Int lhs = checked_mul(a.num_, b.den_);
  Int rhs = checked_mul(b.num_, a.den_);
  return lhs <=> rhs;
}

}  // namespace chartsynth
