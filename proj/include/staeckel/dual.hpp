#pragma once

// Forward-mode dual numbers: a value carried together with one directional
// derivative. Every observable in the library is written once as a template
// over its scalar type and evaluated either on double or on Dual.

#include <cmath>
#include <ostream>

namespace staeckel {

template <typename T>
class DualNumber {
 public:
  constexpr DualNumber() = default;
  constexpr DualNumber(T value) : value_(value) {}  // NOLINT(implicit)
  constexpr DualNumber(T value, T derivative) : value_(value), deriv_(derivative) {}

  static constexpr DualNumber variable(T value) { return {value, T(1)}; }

  constexpr T value() const { return value_; }
  constexpr T derivative() const { return deriv_; }

  constexpr DualNumber operator-() const { return {-value_, -deriv_}; }
  constexpr DualNumber operator+() const { return *this; }

  constexpr DualNumber& operator+=(const DualNumber& o) {
    value_ += o.value_;
    deriv_ += o.deriv_;
    return *this;
  }
  constexpr DualNumber& operator-=(const DualNumber& o) {
    value_ -= o.value_;
    deriv_ -= o.deriv_;
    return *this;
  }
  constexpr DualNumber& operator*=(const DualNumber& o) {
    deriv_ = deriv_ * o.value_ + value_ * o.deriv_;
    value_ *= o.value_;
    return *this;
  }
  constexpr DualNumber& operator/=(const DualNumber& o) {
    const T inv = T(1) / o.value_;
    value_ *= inv;
    deriv_ = (deriv_ - value_ * o.deriv_) * inv;
    return *this;
  }

  friend constexpr DualNumber operator+(DualNumber a, const DualNumber& b) { return a += b; }
  friend constexpr DualNumber operator-(DualNumber a, const DualNumber& b) { return a -= b; }
  friend constexpr DualNumber operator*(DualNumber a, const DualNumber& b) { return a *= b; }
  friend constexpr DualNumber operator/(DualNumber a, const DualNumber& b) { return a /= b; }

  friend constexpr DualNumber operator+(DualNumber a, T b) { return a += DualNumber(b); }
  friend constexpr DualNumber operator+(T a, DualNumber b) { return b += DualNumber(a); }
  friend constexpr DualNumber operator-(DualNumber a, T b) { return a -= DualNumber(b); }
  friend constexpr DualNumber operator-(T a, const DualNumber& b) { return DualNumber(a) - b; }
  friend constexpr DualNumber operator*(const DualNumber& a, T b) { return {a.value_ * b, a.deriv_ * b}; }
  friend constexpr DualNumber operator*(T a, const DualNumber& b) { return {a * b.value_, a * b.deriv_}; }
  friend constexpr DualNumber operator/(const DualNumber& a, T b) { return {a.value_ / b, a.deriv_ / b}; }
  friend constexpr DualNumber operator/(T a, const DualNumber& b) { return DualNumber(a) / b; }

  friend constexpr bool operator<(const DualNumber& a, const DualNumber& b) { return a.value_ < b.value_; }
  friend constexpr bool operator>(const DualNumber& a, const DualNumber& b) { return a.value_ > b.value_; }

  friend std::ostream& operator<<(std::ostream& os, const DualNumber& d) {
    return os << d.value_ << " + " << d.deriv_ << "e";
  }

 private:
  T value_{};
  T deriv_{};
};

using Dual = DualNumber<double>;

// Scalar helpers overloaded for double and Dual so templated formulas read the
// same on both.
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value(); }

inline double sqrt(double x) { return std::sqrt(x); }
inline double pow(double x, double e) { return std::pow(x, e); }
inline double abs(double x) { return std::fabs(x); }

inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return {s, x.derivative() / (2.0 * s)};
}

inline Dual pow(const Dual& x, double e) {
  const double v = std::pow(x.value(), e);
  return {v, e * std::pow(x.value(), e - 1.0) * x.derivative()};
}

inline Dual abs(const Dual& x) { return x.value() < 0.0 ? -x : x; }

inline bool isfinite(const Dual& x) {
  return std::isfinite(x.value()) && std::isfinite(x.derivative());
}

}  // namespace staeckel
