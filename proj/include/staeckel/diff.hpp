#pragma once

// Phase-space observables with exact forward-mode gradients, and a central
// finite-difference gradient used as an independent oracle.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "staeckel/core.hpp"

namespace staeckel {

/// A scalar function on phase space. The rule is evaluated on dual numbers so
/// one code path yields both values and directional derivatives.
class Observable {
 public:
  using Rule = std::function<Dual(const DualState&)>;

  Observable() = default;
  Observable(int arity, std::string label, Rule rule)
      : arity_(arity), label_(std::move(label)), rule_(std::move(rule)) {}

  int arity() const { return arity_; }
  const std::string& label() const { return label_; }

  double operator()(const PhaseState& x) const { return rule_(lift(x)).value(); }
  Dual operator()(const DualState& x) const { return rule_(x); }

  Observable relabeled(std::string label) const { return {arity_, std::move(label), rule_}; }

 private:
  int arity_ = 0;
  std::string label_;
  Rule rule_;
};

/// An observable that returns a constant; handy for drift baselines.
inline Observable constant_observable(int arity, double c, std::string label = "const") {
  return {arity, std::move(label), [c](const DualState&) { return Dual(c); }};
}

struct Gradient {
  std::vector<double> dq;
  std::vector<double> dp;

  double max_abs() const {
    double m = 0.0;
    for (double v : dq) m = std::max(m, std::fabs(v));
    for (double v : dp) m = std::max(m, std::fabs(v));
    return m;
  }
};

namespace detail {
inline void check_arity(const Observable& obs, const PhaseState& x) {
  if (obs.arity() != x.dim())
    throw Error(ErrorKind::InvalidParameter,
                "observable '" + obs.label() + "' has arity " + std::to_string(obs.arity()) +
                    " but the state has N = " + std::to_string(x.dim()));
}
}  // namespace detail

/// Exact gradient: one dual sweep per phase-space coordinate.
inline Gradient gradient(const Observable& obs, const PhaseState& x) {
  detail::check_arity(obs, x);
  const auto n = x.q.size();
  Gradient g{std::vector<double>(n), std::vector<double>(n)};
  DualState seed = lift(x);
  for (std::size_t i = 0; i < n; ++i) {
    seed.q[i] = Dual::variable(x.q[i]);
    g.dq[i] = obs(seed).derivative();
    seed.q[i] = Dual(x.q[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    seed.p[i] = Dual::variable(x.p[i]);
    g.dp[i] = obs(seed).derivative();
    seed.p[i] = Dual(x.p[i]);
  }
  return g;
}

inline constexpr double kDefaultFdStep = 1e-5;

/// Central-difference gradient, O(h^2). Evaluates only plain values of the
/// observable, never its dual tangents.
inline Gradient fd_gradient(const Observable& obs, const PhaseState& x, double h = kDefaultFdStep) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParameter, "finite-difference step must be positive");
  detail::check_arity(obs, x);
  const auto n = x.q.size();
  Gradient g{std::vector<double>(n), std::vector<double>(n)};
  PhaseState probe = x;
  auto central = [&](double& slot) {
    const double saved = slot;
    slot = saved + h;
    const double fp = obs(probe);
    slot = saved - h;
    const double fm = obs(probe);
    slot = saved;
    return (fp - fm) / (2.0 * h);
  };
  for (std::size_t i = 0; i < n; ++i) g.dq[i] = central(probe.q[i]);
  for (std::size_t i = 0; i < n; ++i) g.dp[i] = central(probe.p[i]);
  return g;
}

}  // namespace staeckel
