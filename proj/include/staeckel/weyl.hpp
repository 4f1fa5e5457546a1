#pragma once

// Normal-ordered differential operators with symbolic coefficients,
//
//     A = sum_beta c_beta(q) d^beta,
//
// the algebra in which q^_i acts by multiplication and p^_j = -i hbar d_j.
// Products are normal-ordered with the generalized Leibniz rule; identities
// are decided by randomized evaluation of every coefficient.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "staeckel/core.hpp"
#include "staeckel/symbolic.hpp"

namespace staeckel {

using symbolic::Expr;
using symbolic::Symbol;

using MultiIndex = std::array<int, symbolic::kMaxVariables>;

inline int order(const MultiIndex& m) { return m[0] + m[1] + m[2]; }

class WeylOperator {
 public:
  using TermMap = std::map<MultiIndex, Expr>;

  explicit WeylOperator(int dim) : dim_(dim) {
    if (dim < 1 || dim > symbolic::kMaxVariables)
      throw Error(ErrorKind::UnsupportedDimension, "Weyl operators support 1 <= N <= 3");
  }

  static WeylOperator multiplication(int dim, const Expr& c) {
    WeylOperator op(dim);
    op.accumulate({0, 0, 0}, c);
    return op;
  }
  static WeylOperator identity(int dim) { return multiplication(dim, Expr(1)); }
  static WeylOperator zero(int dim) { return WeylOperator(dim); }

  /// d/dq_k, 0-based.
  static WeylOperator partial(int dim, int k) {
    WeylOperator op(dim);
    MultiIndex m{};
    m[static_cast<std::size_t>(k)] = 1;
    op.accumulate(m, Expr(1));
    return op;
  }

  /// q^_k, 0-based.
  static WeylOperator position(int dim, int k) { return multiplication(dim, symbolic::q(k)); }

  /// p^_k = -i hbar d_k, 0-based.
  static WeylOperator momentum(int dim, int k) {
    WeylOperator op(dim);
    MultiIndex m{};
    m[static_cast<std::size_t>(k)] = 1;
    op.accumulate(m, -symbolic::sym(Symbol::I) * symbolic::sym(Symbol::Hbar));
    return op;
  }

  int dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  int max_order() const {
    int m = 0;
    for (const auto& [idx, c] : terms_) m = std::max(m, order(idx));
    return m;
  }

  void accumulate(const MultiIndex& idx, const Expr& c) {
    if (c.is_zero()) return;
    for (int k = dim_; k < symbolic::kMaxVariables; ++k)
      if (idx[static_cast<std::size_t>(k)] != 0)
        throw Error(ErrorKind::IndexOutOfRange, "derivative index beyond operator dimension");
    auto [it, inserted] = terms_.emplace(idx, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  WeylOperator& operator+=(const WeylOperator& o) {
    check_dim(o);
    for (const auto& [idx, c] : o.terms_) accumulate(idx, c);
    return *this;
  }
  WeylOperator& operator-=(const WeylOperator& o) {
    check_dim(o);
    for (const auto& [idx, c] : o.terms_) accumulate(idx, -c);
    return *this;
  }
  friend WeylOperator operator+(WeylOperator a, const WeylOperator& b) { return a += b; }
  friend WeylOperator operator-(WeylOperator a, const WeylOperator& b) { return a -= b; }
  friend WeylOperator operator-(const WeylOperator& a) { return WeylOperator(a.dim_) - a; }

  /// Left multiplication by a function of q; stays normal-ordered.
  friend WeylOperator operator*(const Expr& c, const WeylOperator& a) {
    WeylOperator out(a.dim_);
    for (const auto& [idx, coeff] : a.terms_) out.accumulate(idx, c * coeff);
    return out;
  }

  void check_dim(const WeylOperator& o) const {
    if (o.dim_ != dim_) throw Error(ErrorKind::InvalidParameter, "operator dimensions differ");
  }

 private:
  int dim_;
  TermMap terms_;
};

namespace detail {

inline std::int64_t binomial(int n, int k) {
  std::int64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

/// d^gamma c, via the per-node derivative cache.
inline Expr multi_derivative(const Expr& c, const MultiIndex& gamma) {
  Expr out = c;
  for (int k = 0; k < symbolic::kMaxVariables; ++k)
    for (int t = 0; t < gamma[static_cast<std::size_t>(k)] && !out.is_zero(); ++t) out = diff(out, k);
  return out;
}

}  // namespace detail

/// Normal-ordered product a o b:
///   (c_a d^alpha) o (c_b d^beta) = sum_{gamma <= alpha} C(alpha, gamma) c_a (d^gamma c_b) d^(alpha - gamma + beta).
inline WeylOperator op_compose(const WeylOperator& a, const WeylOperator& b) {
  a.check_dim(b);
  WeylOperator out(a.dim());
  for (const auto& [alpha, ca] : a.terms()) {
    for (const auto& [beta, cb] : b.terms()) {
      for (int g0 = 0; g0 <= alpha[0]; ++g0)
        for (int g1 = 0; g1 <= alpha[1]; ++g1)
          for (int g2 = 0; g2 <= alpha[2]; ++g2) {
            const MultiIndex gamma{g0, g1, g2};
            const Expr dcb = detail::multi_derivative(cb, gamma);
            if (dcb.is_zero()) continue;
            std::int64_t weight = 1;
            MultiIndex idx{};
            for (std::size_t k = 0; k < 3; ++k) {
              weight *= detail::binomial(alpha[k], gamma[k]);
              idx[k] = alpha[k] - gamma[k] + beta[k];
            }
            out.accumulate(idx, Expr(weight) * ca * dcb);
          }
    }
  }
  return out;
}

inline WeylOperator operator*(const WeylOperator& a, const WeylOperator& b) { return op_compose(a, b); }

inline WeylOperator commutator(const WeylOperator& a, const WeylOperator& b) {
  return op_compose(a, b) - op_compose(b, a);
}

// ---------------------------------------------------------------------------
// Randomized zero-testing
// ---------------------------------------------------------------------------

inline constexpr double kZeroTestTol = 1e-10;
inline constexpr int kMinConfidencePoints = 20;

struct ZeroTestResult {
  bool zero = true;
  double max_normalized = 0.0;  // max |c| / max(1, magnitude(c))
  std::size_t terms = 0;
};

/// Random admissible points: q with mixed magnitudes and signs, positive hbar,
/// generic alpha, lambda, eta of either sign with 1 + lambda r^2 and eta + r
/// kept away from zero.
inline std::vector<symbolic::EvalPoint> random_eval_points(int dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.3, 1.6);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> hbar(0.4, 2.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<symbolic::EvalPoint> pts;
  while (static_cast<int>(pts.size()) < count) {
    symbolic::EvalPoint p;
    for (int k = 0; k < dim; ++k) p.q[static_cast<std::size_t>(k)] = (coin(rng) ? 1.0 : -1.0) * mag(rng);
    const double r2 = p.q[0] * p.q[0] + p.q[1] * p.q[1] + p.q[2] * p.q[2];
    p.hbar = hbar(rng);
    p.alpha = 2.0 * unit(rng);
    p.lambda = unit(rng);
    p.eta = 2.0 * unit(rng);
    if (1.0 + p.lambda * r2 < 0.2) continue;
    if (p.eta + std::sqrt(r2) < 0.2 || std::fabs(p.eta) < 0.05) continue;
    if (std::fabs(p.lambda) < 0.05 || std::fabs(p.alpha) < 0.05) continue;
    pts.push_back(p);
  }
  return pts;
}

inline ZeroTestResult zero_test(const WeylOperator& op, int confidence_points, std::uint64_t seed,
                                double tol = kZeroTestTol) {
  if (confidence_points < kMinConfidencePoints)
    throw Error(ErrorKind::InvalidParameter, "zero test needs at least 20 evaluation points");
  symbolic::Evaluator ev(random_eval_points(op.dim(), confidence_points, seed));
  ZeroTestResult res;
  res.terms = op.term_count();
  for (const auto& [idx, c] : op.terms()) {
    const auto& batch = ev.eval(c);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const double normalized = std::abs(batch.value[i]) / std::max(1.0, batch.magnitude[i]);
      res.max_normalized = std::max(res.max_normalized, normalized);
      if (!(normalized <= tol)) res.zero = false;
    }
  }
  return res;
}

inline bool is_zero(const WeylOperator& op, int confidence_points = kMinConfidencePoints,
                    std::uint64_t seed = 0x5eed) {
  return zero_test(op, confidence_points, seed).zero;
}

/// Full normal-ordered symbol sum_beta c_beta(q) (i p / hbar)^beta at one
/// point; its hbar -> 0 limit is the classical observable.
inline std::complex<double> operator_symbol(const WeylOperator& op, const symbolic::EvalPoint& point,
                                            std::span<const double> p) {
  symbolic::Evaluator ev({point});
  std::complex<double> out = 0.0;
  const std::complex<double> i_over_hbar(0.0, 1.0 / point.hbar);
  for (const auto& [idx, c] : op.terms()) {
    std::complex<double> mono = ev.eval(c).value[0];
    for (int k = 0; k < op.dim(); ++k)
      for (int t = 0; t < idx[static_cast<std::size_t>(k)]; ++t) mono *= i_over_hbar * p[static_cast<std::size_t>(k)];
    out += mono;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quantum catalog
// ---------------------------------------------------------------------------

struct NamedOperator {
  std::string name;
  WeylOperator op;
};

struct QuantumSystem {
  SystemId id;
  int dim;
  WeylOperator h;
  std::vector<NamedOperator> symmetries;  // angular towers, then Fradkin or LRL
  /// Sum identities written as lhs - rhs, expected to vanish.
  std::vector<NamedOperator> identities;
};

namespace quantum {

inline Expr hbar() { return symbolic::sym(Symbol::Hbar); }
inline Expr alpha() { return symbolic::sym(Symbol::Alpha); }
inline Expr lambda() { return symbolic::sym(Symbol::Lambda); }
inline Expr eta() { return symbolic::sym(Symbol::Eta); }
inline Expr r() { return symbolic::sym(Symbol::R); }

inline Expr q_squared(int dim) {
  Expr s(0);
  for (int k = 0; k < dim; ++k) s += symbolic::q(k) * symbolic::q(k);
  return s;
}

inline WeylOperator p_squared(int dim) {
  WeylOperator out(dim);
  for (int k = 0; k < dim; ++k) out += WeylOperator::momentum(dim, k) * WeylOperator::momentum(dim, k);
  return out;
}

/// J^_ij = q^_i p^_j - q^_j p^_i (0-based).
inline WeylOperator rotation(int dim, int i, int j) {
  return WeylOperator::position(dim, i) * WeylOperator::momentum(dim, j) -
         WeylOperator::position(dim, j) * WeylOperator::momentum(dim, i);
}

/// sum_{first <= i < j <= last} J^_ij^2 (0-based, inclusive).
inline WeylOperator angular_casimir(int dim, int first, int last) {
  WeylOperator out(dim);
  for (int i = first; i <= last; ++i)
    for (int j = i + 1; j <= last; ++j) {
      const WeylOperator J = rotation(dim, i, j);
      out += J * J;
    }
  return out;
}

/// Symmetrized LRL seed: 1/2 sum_k p_k J_ki + 1/2 sum_k J_ki p_k with
/// J_ki = q_k p_i - q_i p_k.
inline WeylOperator symmetrized_lrl_seed(int dim, int i) {
  WeylOperator out(dim);
  const Expr half = symbolic::rational(1, 2);
  for (int k = 0; k < dim; ++k) {
    const WeylOperator pk = WeylOperator::momentum(dim, k);
    const WeylOperator J = rotation(dim, k, i);
    out += half * (pk * J);
    out += half * (J * pk);
  }
  return out;
}

inline void require_quantum_dim(int dim) {
  if (dim < 2 || dim > 3)
    throw Error(ErrorKind::UnsupportedDimension, "quantum verification supports N in {2, 3}");
}

}  // namespace quantum

/// Quantum Hamiltonian, angular towers, Fradkin/LRL symmetries and sum
/// identities, with the coefficient functions to the left of p^2 and the
/// orderings exactly as printed in the quantum table. alpha, lambda, eta and
/// hbar stay symbolic.
inline QuantumSystem build_quantum_system(const SystemSpec& spec) {
  using namespace quantum;
  const int n = spec.dim;
  require_quantum_dim(n);
  if (!is_curved(spec.id))
    throw Error(ErrorKind::NotCurved, "quantum catalog covers the four curved systems only");

  const Expr q2 = q_squared(n);
  const WeylOperator P2 = p_squared(n);
  const WeylOperator one = WeylOperator::identity(n);
  const Expr half = symbolic::rational(1, 2);

  WeylOperator h(n);
  switch (spec.id) {
    case SystemId::CurvedKC:
      h = (Expr(1) / (Expr(2) * q2)) * P2 + WeylOperator::multiplication(n, alpha() / q2);
      break;
    case SystemId::DarbouxIII: {
      const Expr s = Expr(1) + lambda() * q2;
      h = (Expr(1) / (Expr(2) * s)) * P2 - WeylOperator::multiplication(n, lambda() * alpha() * q2 / s);
      break;
    }
    case SystemId::SphericalOscillator:
      h = (half * r()) * P2 + WeylOperator::multiplication(n, alpha() * r());
      break;
    case SystemId::TaubNut: {
      const Expr s = eta() + r();
      h = (r() / (Expr(2) * s)) * P2 + WeylOperator::multiplication(n, alpha() * r() / s);
      break;
    }
    default:
      break;
  }

  QuantumSystem sys{spec.id, n, h, {}, {}};
  for (int m = 2; m <= n; ++m) {
    const std::string left = m == n ? "L^2" : "S^(" + std::to_string(m) + ")";
    sys.symmetries.push_back({left, angular_casimir(n, 0, m - 1)});
    if (m != n)
      sys.symmetries.push_back({"S_(" + std::to_string(m) + ")", angular_casimir(n, n - m, n - 1)});
  }
  const WeylOperator L2 = angular_casimir(n, 0, n - 1);
  const Expr spread = symbolic::rational((n - 1) * (n - 1), 2);  // (N-1)^2 / 2

  if (spec.id == SystemId::CurvedKC || spec.id == SystemId::DarbouxIII) {
    // S_ij = p_i p_j - 2 q_i q_j H            (curved KC)
    // S_ij = p_i p_j - 2 lambda q_i q_j (H + alpha)   (Darboux III)
    const WeylOperator tail = spec.id == SystemId::CurvedKC ? h : h + alpha() * one;
    const Expr c = spec.id == SystemId::CurvedKC ? Expr(2) : Expr(2) * lambda();
    WeylOperator trace(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        WeylOperator s = WeylOperator::momentum(n, i) * WeylOperator::momentum(n, j) -
                         (c * symbolic::q(i) * symbolic::q(j)) * tail;
        if (i == j) trace += s;
        sys.symmetries.push_back({"S_" + std::to_string(i + 1) + std::to_string(j + 1), std::move(s)});
      }
    if (spec.id == SystemId::CurvedKC)
      sys.identities.push_back({"sum S_ii = -2 alpha", trace + (Expr(2) * alpha()) * one});
    else
      sys.identities.push_back({"sum S_ii = 2 H", trace - Expr(2) * h});
  } else {
    // S_i = symmetrized seed + c q_i / |q| H, c = 1 (spherical) or eta (Taub-NUT).
    const Expr c = spec.id == SystemId::SphericalOscillator ? Expr(1) : eta();
    WeylOperator sum_sq(n);
    for (int i = 0; i < n; ++i) {
      WeylOperator s = symmetrized_lrl_seed(n, i) + (c * symbolic::q(i) / r()) * h;
      sum_sq += s * s;
      sys.symmetries.push_back({"S_" + std::to_string(i + 1), std::move(s)});
    }
    const Expr hb2 = hbar() * hbar();
    if (spec.id == SystemId::SphericalOscillator) {
      // sum S_i^2 = H^2 - 2 alpha L^2 - (N-1)^2/2 hbar^2 alpha
      WeylOperator rhs = h * h - (Expr(2) * alpha()) * L2 - (spread * hb2 * alpha()) * one;
      sys.identities.push_back({"sum S_i^2 = H^2 - 2 alpha L^2 - (N-1)^2/2 hbar^2 alpha", sum_sq - rhs});
    } else {
      // sum S_i^2 = 2 L^2 (H - alpha) + eta^2 H^2 + (N-1)^2/2 hbar^2 (H - alpha)
      const WeylOperator shifted = h - alpha() * one;
      WeylOperator rhs = Expr(2) * (L2 * shifted) + (eta() * eta()) * (h * h) + (spread * hb2) * shifted;
      sys.identities.push_back(
          {"sum S_i^2 = 2 L^2 (H - alpha) + eta^2 H^2 + (N-1)^2/2 hbar^2 (H - alpha)", sum_sq - rhs});
    }
  }
  return sys;
}

struct QuantumVerdict {
  std::string name;
  bool pass = false;
  double max_normalized = 0.0;
  std::size_t terms = 0;
};

/// [H, S] = 0 for every symmetry, then every sum identity, each decided by
/// randomized zero-testing with the given seed.
inline std::vector<QuantumVerdict> quantum_verdicts(const QuantumSystem& sys, int confidence_points,
                                                    std::uint64_t seed) {
  std::vector<QuantumVerdict> out;
  for (const auto& s : sys.symmetries) {
    const auto res = zero_test(commutator(sys.h, s.op), confidence_points, seed);
    out.push_back({"[H," + s.name + "]", res.zero, res.max_normalized, res.terms});
  }
  for (const auto& id : sys.identities) {
    const auto res = zero_test(id.op, confidence_points, seed);
    out.push_back({id.name, res.zero, res.max_normalized, res.terms});
  }
  return out;
}

}  // namespace staeckel
