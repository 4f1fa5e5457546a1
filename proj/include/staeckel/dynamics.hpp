#pragma once

// Trajectories of the catalog Hamiltonians. Hamilton's equations
//   dq/dt = dH/dp,  dp/dt = -dH/dq
// are integrated with the Dormand-Prince 5(4) embedded pair, right-hand side
// from exact gradients. The kinetic term is position dependent, so the flow is
// not separable; conservation is monitored rather than built in. An implicit
// midpoint integrator (symplectic, fixed step) is provided for long horizons.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "staeckel/core.hpp"
#include "staeckel/diff.hpp"
#include "staeckel/observables.hpp"

namespace staeckel {

/// Abort when |q| comes this close to an open end of the radial domain.
inline constexpr double kBoundarySafetyMargin = 1e-3;

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> series;  // series[k][step] for observable k

  bool empty() const { return states.empty(); }
  std::size_t size() const { return states.size(); }
};

struct IntegrationOutcome {
  Trajectory trajectory;
  std::optional<ErrorKind> failure;
  std::string message;
};

struct IntegratorOptions {
  double initial_step = 1e-2;
  double min_step = 1e-14;
  long max_steps = 10'000'000;
};

namespace detail {

using StateVector = std::vector<double>;

inline StateVector pack(const PhaseState& x) {
  StateVector y(x.q);
  y.insert(y.end(), x.p.begin(), x.p.end());
  return y;
}

inline PhaseState unpack(const StateVector& y) {
  const auto n = y.size() / 2;
  return PhaseState(StateVector(y.begin(), y.begin() + static_cast<long>(n)),
                    StateVector(y.begin() + static_cast<long>(n), y.end()));
}

inline StateVector hamilton_rhs(const Observable& h, const StateVector& y) {
  const Gradient g = gradient(h, unpack(y));
  const auto n = g.dq.size();
  StateVector dy(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    dy[i] = g.dp[i];
    dy[n + i] = -g.dq[i];
  }
  return dy;
}

/// True when |q| is within `margin` of an open end of the domain.
inline bool near_boundary(const RadialDomain& d, double r, double margin) {
  if (!d.contains(r)) return true;
  if (!d.lower_closed && r - d.lower < margin) return true;
  if (d.bounded_above() && d.upper - r < margin) return true;
  return false;
}

inline void record(Trajectory& traj, const std::vector<Observable>& obs, double t, PhaseState x) {
  traj.times.push_back(t);
  for (std::size_t k = 0; k < obs.size(); ++k) traj.series[k].push_back(obs[k](x));
  traj.states.push_back(std::move(x));
}

inline Trajectory start_trajectory(const std::vector<Observable>& obs, const PhaseState& x0) {
  Trajectory traj;
  for (const auto& o : obs) traj.labels.push_back(o.label());
  traj.series.resize(obs.size());
  record(traj, obs, 0.0, x0);
  return traj;
}

inline void check_start(const SystemSpec& spec, const PhaseState& x0, double t_end, double tol) {
  if (x0.dim() != spec.dim) throw Error(ErrorKind::InvalidParameter, "x0 dimension mismatch");
  if (!(t_end >= 0.0)) throw Error(ErrorKind::InvalidParameter, "t_end must be >= 0");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "tolerance must be positive");
  require_in_domain(spec, radius(x0));
}

// Dormand-Prince 5(4) tableau.
inline constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr std::array<double, 7> kB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                           -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr std::array<double, 7> kB4{5179.0 / 57600,    0.0,          7571.0 / 16695,
                                           393.0 / 640,       -92097.0 / 339200, 187.0 / 2100,
                                           1.0 / 40};

}  // namespace detail

/// Adaptive Dormand-Prince integration up to t_end with local tolerance `tol`
/// (absolute and relative). Observables in `monitor` are sampled at every
/// accepted step. Failures are reported in the outcome together with the
/// trajectory computed so far.
inline IntegrationOutcome integrate_with_outcome(const SystemSpec& spec, const PhaseState& x0,
                                                 double t_end, double tol,
                                                 const std::vector<Observable>& monitor = {},
                                                 const IntegratorOptions& opts = {}) {
  detail::check_start(spec, x0, t_end, tol);
  IntegrationOutcome out{detail::start_trajectory(monitor, x0), std::nullopt, {}};
  if (t_end == 0.0) return out;
  if (detail::near_boundary(spec.domain, radius(x0), kBoundarySafetyMargin)) {
    out.failure = ErrorKind::BoundaryHit;
    out.message = "initial state within the boundary safety margin";
    return out;
  }

  const Observable h_obs = hamiltonian_observable(spec);
  const auto rhs = [&](const detail::StateVector& y) { return detail::hamilton_rhs(h_obs, y); };

  detail::StateVector y = detail::pack(x0);
  const std::size_t dim = y.size();
  double t = 0.0;
  double h = std::min(opts.initial_step, t_end);
  std::array<detail::StateVector, 7> k;
  k[0] = rhs(y);
  long steps = 0;

  while (t < t_end) {
    if (++steps > opts.max_steps) {
      out.failure = ErrorKind::StepFailure;
      out.message = "step budget exhausted";
      return out;
    }
    h = std::min(h, t_end - t);
    detail::StateVector y5(dim), err(dim), stage(dim);
    bool stage_failed = false;
    try {
      for (int s = 1; s < 7; ++s) {
        for (std::size_t i = 0; i < dim; ++i) {
          double acc = y[i];
          for (int j = 0; j < s; ++j) acc += h * detail::kA[s][j] * k[static_cast<std::size_t>(j)][i];
          stage[i] = acc;
        }
        k[static_cast<std::size_t>(s)] = rhs(stage);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DomainViolation && e.kind() != ErrorKind::InvalidParameter) throw;
      stage_failed = true;
    }

    double err_norm = 0.0;
    if (!stage_failed) {
      y5 = stage;  // FSAL: the last stage is the order-5 solution
      for (std::size_t i = 0; i < dim; ++i) {
        double e = 0.0;
        for (std::size_t s = 0; s < 7; ++s) e += h * (detail::kB5[s] - detail::kB4[s]) * k[s][i];
        const double sc = tol * (1.0 + std::max(std::fabs(y[i]), std::fabs(y5[i])));
        err_norm = std::max(err_norm, std::fabs(e) / sc);
      }
      if (!std::isfinite(err_norm)) stage_failed = true;
    }

    if (stage_failed || err_norm > 1.0) {
      const double factor =
          stage_failed ? 0.25 : std::max(0.1, 0.9 * std::pow(err_norm, -0.2));
      h *= factor;
      if (h < opts.min_step * std::max(1.0, t)) {
        out.failure = stage_failed ? ErrorKind::BoundaryHit : ErrorKind::StepFailure;
        out.message = stage_failed ? "trajectory left the admissible domain"
                                   : "tolerance unreachable: step size underflow";
        return out;
      }
      continue;
    }

    t += h;
    y = std::move(y5);
    k[0] = k[6];
    PhaseState x = detail::unpack(y);
    const double r = radius(x);
    if (detail::near_boundary(spec.domain, r, kBoundarySafetyMargin)) {
      out.failure = ErrorKind::BoundaryHit;
      out.message = "trajectory reached |q| = " + std::to_string(r) + " near the domain boundary";
      return out;
    }
    detail::record(out.trajectory, monitor, t, std::move(x));
    const double grow = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  return out;
}

inline Trajectory integrate(const SystemSpec& spec, const PhaseState& x0, double t_end, double tol,
                            const std::vector<Observable>& monitor = {},
                            const IntegratorOptions& opts = {}) {
  auto out = integrate_with_outcome(spec, x0, t_end, tol, monitor, opts);
  if (out.failure) throw Error(*out.failure, out.message);
  return std::move(out.trajectory);
}

/// Implicit midpoint rule with fixed step `dt`; the stage equation is solved by
/// fixed-point iteration to `solve_tol`.
inline Trajectory integrate_implicit_midpoint(const SystemSpec& spec, const PhaseState& x0,
                                              double t_end, double dt,
                                              const std::vector<Observable>& monitor = {},
                                              double solve_tol = 1e-14) {
  detail::check_start(spec, x0, t_end, dt);
  Trajectory traj = detail::start_trajectory(monitor, x0);
  const Observable h_obs = hamiltonian_observable(spec);
  detail::StateVector y = detail::pack(x0);
  const std::size_t dim = y.size();
  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    const double h = std::min(dt, t_end - t);
    detail::StateVector y1 = y, mid(dim);
    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
      for (std::size_t i = 0; i < dim; ++i) mid[i] = 0.5 * (y[i] + y1[i]);
      const auto f = detail::hamilton_rhs(h_obs, mid);
      double change = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double next = y[i] + h * f[i];
        change = std::max(change, std::fabs(next - y1[i]) / (1.0 + std::fabs(next)));
        y1[i] = next;
      }
      converged = change <= solve_tol;
    }
    if (!converged) throw Error(ErrorKind::StepFailure, "implicit midpoint iteration did not converge");
    y = std::move(y1);
    t += h;
    PhaseState x = detail::unpack(y);
    if (detail::near_boundary(spec.domain, radius(x), kBoundarySafetyMargin))
      throw Error(ErrorKind::BoundaryHit, "trajectory reached the domain boundary");
    detail::record(traj, monitor, t, std::move(x));
  }
  return traj;
}

struct DriftEntry {
  std::string label;
  double max_relative_drift = 0.0;
};

/// max_t |S(t) - S(0)| / (1 + |S(0)|) for each observable.
inline std::vector<DriftEntry> drift_report(const Trajectory& traj, const std::vector<Observable>& obs) {
  if (traj.empty()) throw Error(ErrorKind::InvalidParameter, "empty trajectory");
  std::vector<DriftEntry> out;
  for (const auto& o : obs) {
    const double s0 = o(traj.states.front());
    double worst = 0.0;
    for (const auto& x : traj.states) worst = std::max(worst, std::fabs(o(x) - s0) / (1.0 + std::fabs(s0)));
    out.push_back({o.label(), worst});
  }
  return out;
}

/// Flips the momenta: the time-reversed state for Hamiltonians even in p.
inline PhaseState reverse_momenta(PhaseState x) {
  for (auto& v : x.p) v = -v;
  return x;
}

}  // namespace staeckel
