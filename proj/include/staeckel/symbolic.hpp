#pragma once

// Symbolic coefficient expressions for differential operators.
//
// Expressions are immutable DAG nodes over the symbols q1..q3, r, hbar,
// alpha, lambda, eta and the imaginary unit, with exact rational constants.
// r is bound by r^2 = q.q: it evaluates to +sqrt(q.q) and differentiates as
// dr/dq_k = q_k / r. Zero-testing is never structural; it is done by
// evaluating at random points (see weyl.hpp).

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace staeckel::symbolic {

inline constexpr int kMaxVariables = 3;

class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  friend bool operator==(const Rational& a, const Rational& b) = default;

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    os << r.num_;
    if (r.den_ != 1) os << '/' << r.den_;
    return os;
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

enum class Symbol : std::uint8_t { Q1, Q2, Q3, R, Hbar, Alpha, Lambda, Eta, I };

inline Symbol position_symbol(int k) { return static_cast<Symbol>(k); }

inline const char* symbol_name(Symbol s) {
  switch (s) {
    case Symbol::Q1: return "q1";
    case Symbol::Q2: return "q2";
    case Symbol::Q3: return "q3";
    case Symbol::R: return "r";
    case Symbol::Hbar: return "hbar";
    case Symbol::Alpha: return "alpha";
    case Symbol::Lambda: return "lambda";
    case Symbol::Eta: return "eta";
    case Symbol::I: return "i";
  }
  return "?";
}

class Expr;

namespace detail {

enum class Kind : std::uint8_t { Const, Sym, Add, Mul, Div, Pow, Sqrt };

struct Node {
  Kind kind = Kind::Const;
  Rational value;
  Symbol symbol = Symbol::Q1;
  int exponent = 0;
  std::vector<Expr> args;
  // d/dq_k, filled lazily.
  mutable std::array<std::shared_ptr<const Node>, kMaxVariables> derivative_cache;
};

}  // namespace detail

class Expr {
 public:
  Expr() : Expr(Rational(0)) {}
  Expr(Rational c) : node_(make_const(c)) {}  // NOLINT(implicit)
  Expr(std::int64_t c) : Expr(Rational(c)) {}  // NOLINT(implicit)
  Expr(int c) : Expr(Rational(c)) {}           // NOLINT(implicit)

  static Expr symbol(Symbol s) {
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::Kind::Sym;
    n->symbol = s;
    return Expr(std::move(n));
  }

  const detail::Node& node() const { return *node_; }
  const detail::Node* id() const { return node_.get(); }
  detail::Kind kind() const { return node_->kind; }

  bool is_const() const { return kind() == detail::Kind::Const; }
  bool is_zero() const { return is_const() && node_->value.is_zero(); }
  bool is_one() const { return is_const() && node_->value.is_one(); }

  friend Expr operator+(const Expr& a, const Expr& b) { return make_add({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b) { return make_add({a, negate(b)}); }
  friend Expr operator-(const Expr& a) { return negate(a); }
  friend Expr operator*(const Expr& a, const Expr& b) { return make_mul({a, b}); }
  friend Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw std::domain_error("symbolic division by zero");
    if (a.is_zero()) return Expr(0);
    if (b.is_one()) return a;
    if (a.is_const() && b.is_const()) return Expr(a.node_->value / b.node_->value);
    if (b.is_const()) return make_mul({Expr(Rational(1) / b.node_->value), a});
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::Kind::Div;
    n->args = {a, b};
    return Expr(std::move(n));
  }
  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }

  friend Expr pow(const Expr& a, int e) {
    if (e == 0) return Expr(1);
    if (e == 1) return a;
    if (a.is_zero()) {
      if (e < 0) throw std::domain_error("symbolic zero to a negative power");
      return Expr(0);
    }
    if (a.is_const() && e > 0) {
      Rational out(1);
      for (int i = 0; i < e; ++i) out = out * a.node_->value;
      return Expr(out);
    }
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::Kind::Pow;
    n->exponent = e;
    n->args = {a};
    return Expr(std::move(n));
  }

  friend Expr sqrt(const Expr& a) {
    if (a.is_zero() || a.is_one()) return a;
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::Kind::Sqrt;
    n->args = {a};
    return Expr(std::move(n));
  }

  /// d/dq_k (k 0-based), with dr/dq_k = q_k / r.
  friend Expr diff(const Expr& e, int k);

  std::string str() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

  /// Number of distinct nodes reachable from this expression.
  std::size_t dag_size() const {
    std::unordered_map<const detail::Node*, bool> seen;
    count(seen);
    return seen.size();
  }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const detail::Node> make_const(Rational c) {
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::Kind::Const;
    n->value = c;
    return n;
  }

  static Expr negate(const Expr& a) {
    if (a.is_const()) return Expr(Rational(0) - a.node_->value);
    return make_mul({Expr(-1), a});
  }

  static Expr make_add(std::initializer_list<Expr> items) {
    std::vector<Expr> terms;
    Rational c(0);
    auto absorb = [&](const Expr& e, auto&& self) -> void {
      if (e.is_const()) {
        c = c + e.node_->value;
      } else if (e.kind() == detail::Kind::Add) {
        for (const auto& t : e.node_->args) self(t, self);
      } else {
        terms.push_back(e);
      }
    };
    for (const auto& e : items) absorb(e, absorb);
    if (!c.is_zero()) terms.push_back(Expr(c));
    if (terms.empty()) return Expr(0);
    if (terms.size() == 1) return terms.front();
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::Kind::Add;
    n->args = std::move(terms);
    return Expr(std::move(n));
  }

  static Expr make_mul(std::initializer_list<Expr> items) {
    std::vector<Expr> factors;
    Rational c(1);
    bool zero = false;
    auto absorb = [&](const Expr& e, auto&& self) -> void {
      if (e.is_const()) {
        c = c * e.node_->value;
        if (c.is_zero()) zero = true;
      } else if (e.kind() == detail::Kind::Mul) {
        for (const auto& t : e.node_->args) self(t, self);
      } else {
        factors.push_back(e);
      }
    };
    for (const auto& e : items) absorb(e, absorb);
    if (zero) return Expr(0);
    if (factors.empty()) return Expr(c);
    if (!c.is_one()) factors.insert(factors.begin(), Expr(c));
    if (factors.size() == 1) return factors.front();
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::Kind::Mul;
    n->args = std::move(factors);
    return Expr(std::move(n));
  }

  void count(std::unordered_map<const detail::Node*, bool>& seen) const {
    if (!seen.emplace(id(), true).second) return;
    for (const auto& a : node_->args) a.count(seen);
  }

  void print(std::ostream& os) const {
    const auto& n = *node_;
    switch (n.kind) {
      case detail::Kind::Const: os << n.value; break;
      case detail::Kind::Sym: os << symbol_name(n.symbol); break;
      case detail::Kind::Add:
      case detail::Kind::Mul: {
        os << '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          if (i) os << (n.kind == detail::Kind::Add ? " + " : "*");
          n.args[i].print(os);
        }
        os << ')';
        break;
      }
      case detail::Kind::Div:
        os << '(';
        n.args[0].print(os);
        os << ")/(";
        n.args[1].print(os);
        os << ')';
        break;
      case detail::Kind::Pow:
        os << '(';
        n.args[0].print(os);
        os << ")^" << n.exponent;
        break;
      case detail::Kind::Sqrt:
        os << "sqrt(";
        n.args[0].print(os);
        os << ')';
        break;
    }
  }

  std::shared_ptr<const detail::Node> node_;
};

inline Expr sym(Symbol s) { return Expr::symbol(s); }
inline Expr q(int k) { return sym(position_symbol(k)); }  // 0-based
inline Expr rational(std::int64_t n, std::int64_t d = 1) { return Expr(Rational(n, d)); }

inline Expr diff(const Expr& e, int k) {
  using detail::Kind;
  if (k < 0 || k >= kMaxVariables) throw std::out_of_range("derivative index");
  const auto& n = e.node();
  if (const auto& cached = n.derivative_cache[static_cast<std::size_t>(k)]) return Expr(cached);

  Expr out(0);
  bool refers_to_self = false;  // caching these would form a reference cycle
  switch (n.kind) {
    case Kind::Const:
      break;
    case Kind::Sym:
      if (n.symbol == position_symbol(k)) out = Expr(1);
      else if (n.symbol == Symbol::R) {
        out = q(k) / e;
        refers_to_self = true;
      }
      break;
    case Kind::Add:
      for (const auto& a : n.args) out += diff(a, k);
      break;
    case Kind::Mul:
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        Expr d = diff(n.args[i], k);
        if (d.is_zero()) continue;
        Expr term = d;
        for (std::size_t j = 0; j < n.args.size(); ++j)
          if (j != i) term *= n.args[j];
        out += term;
      }
      break;
    case Kind::Div: {
      const Expr& a = n.args[0];
      const Expr& b = n.args[1];
      const Expr da = diff(a, k);
      const Expr db = diff(b, k);
      if (!da.is_zero()) out += da / b;
      if (!db.is_zero()) out -= a * db / pow(b, 2);
      break;
    }
    case Kind::Pow: {
      const Expr da = diff(n.args[0], k);
      if (!da.is_zero()) out = Expr(n.exponent) * pow(n.args[0], n.exponent - 1) * da;
      break;
    }
    case Kind::Sqrt: {
      const Expr da = diff(n.args[0], k);
      if (!da.is_zero()) out = da / (Expr(2) * e);
      refers_to_self = true;
      break;
    }
  }
  if (!refers_to_self) n.derivative_cache[static_cast<std::size_t>(k)] = out.node_;
  return out;
}

// ---------------------------------------------------------------------------
// Batched numerical evaluation
// ---------------------------------------------------------------------------

/// Values for every symbol at one evaluation point; r is derived from q.
struct EvalPoint {
  std::array<double, kMaxVariables> q{};
  double hbar = 1.0;
  double alpha = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
};

/// Evaluates expressions at a fixed batch of points, memoized per DAG node.
/// Alongside each value it tracks a magnitude: the value the expression would
/// take if no cancellation occurred, which bounds its rounding error up to a
/// factor of machine epsilon.
class Evaluator {
 public:
  using Complex = std::complex<double>;

  struct Batch {
    std::vector<Complex> value;
    std::vector<double> magnitude;
  };

  explicit Evaluator(std::vector<EvalPoint> points) : points_(std::move(points)) {}

  std::size_t size() const { return points_.size(); }
  const std::vector<EvalPoint>& points() const { return points_; }

  const Batch& eval(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second.batch;
    Batch b = compute(e);
    return memo_.emplace(e.id(), Entry{e, std::move(b)}).first->second.batch;
  }

  void clear() { memo_.clear(); }

 private:
  Batch compute(const Expr& e) {
    using detail::Kind;
    const auto& n = e.node();
    const std::size_t m = points_.size();
    Batch out{std::vector<Complex>(m), std::vector<double>(m)};
    switch (n.kind) {
      case Kind::Const: {
        const double v = n.value.to_double();
        for (std::size_t i = 0; i < m; ++i) {
          out.value[i] = v;
          out.magnitude[i] = std::abs(v);
        }
        break;
      }
      case Kind::Sym:
        for (std::size_t i = 0; i < m; ++i) {
          out.value[i] = symbol_value(n.symbol, points_[i]);
          out.magnitude[i] = std::abs(out.value[i]);
        }
        break;
      case Kind::Add: {
        for (const auto& a : n.args) {
          const Batch& ba = eval(a);
          for (std::size_t i = 0; i < m; ++i) {
            out.value[i] += ba.value[i];
            out.magnitude[i] += ba.magnitude[i];
          }
        }
        break;
      }
      case Kind::Mul: {
        for (std::size_t i = 0; i < m; ++i) {
          out.value[i] = 1.0;
          out.magnitude[i] = 1.0;
        }
        for (const auto& a : n.args) {
          const Batch& ba = eval(a);
          for (std::size_t i = 0; i < m; ++i) {
            out.value[i] *= ba.value[i];
            out.magnitude[i] *= ba.magnitude[i];
          }
        }
        break;
      }
      case Kind::Div: {
        const Batch& ba = eval(n.args[0]);
        const Batch& bb = eval(n.args[1]);
        for (std::size_t i = 0; i < m; ++i) {
          const double den = std::abs(bb.value[i]);
          out.value[i] = ba.value[i] / bb.value[i];
          out.magnitude[i] = ba.magnitude[i] / den + std::abs(ba.value[i]) * bb.magnitude[i] / (den * den);
        }
        break;
      }
      case Kind::Pow: {
        const Batch& ba = eval(n.args[0]);
        const int p = n.exponent;
        for (std::size_t i = 0; i < m; ++i) {
          out.value[i] = std::pow(ba.value[i], p);
          const double base = std::abs(ba.value[i]);
          out.magnitude[i] = std::max(std::abs(out.value[i]),
                                      std::abs(p) * std::pow(base, p - 1) * ba.magnitude[i]);
        }
        break;
      }
      case Kind::Sqrt: {
        const Batch& ba = eval(n.args[0]);
        for (std::size_t i = 0; i < m; ++i) {
          out.value[i] = std::sqrt(ba.value[i]);
          const double s = std::abs(out.value[i]);
          out.magnitude[i] = std::max(s, ba.magnitude[i] / (2.0 * s));
        }
        break;
      }
    }
    return out;
  }

  static Complex symbol_value(Symbol s, const EvalPoint& p) {
    switch (s) {
      case Symbol::Q1: return p.q[0];
      case Symbol::Q2: return p.q[1];
      case Symbol::Q3: return p.q[2];
      case Symbol::R: return std::sqrt(p.q[0] * p.q[0] + p.q[1] * p.q[1] + p.q[2] * p.q[2]);
      case Symbol::Hbar: return p.hbar;
      case Symbol::Alpha: return p.alpha;
      case Symbol::Lambda: return p.lambda;
      case Symbol::Eta: return p.eta;
      case Symbol::I: return Complex(0.0, 1.0);
    }
    return 0.0;
  }

  // The entry holds its expression so memoized node addresses stay unique.
  struct Entry {
    Expr keep;
    Batch batch;
  };

  std::vector<EvalPoint> points_;
  std::unordered_map<const detail::Node*, Entry> memo_;
};

}  // namespace staeckel::symbolic
