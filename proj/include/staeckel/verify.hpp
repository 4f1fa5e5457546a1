#pragma once

// Numerical verification engine: Poisson brackets from exact gradients,
// commutation suites, trace/sum identities and functional-independence rank
// tests. Every check samples seeded admissible phase-space points.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "staeckel/core.hpp"
#include "staeckel/diff.hpp"
#include "staeckel/observables.hpp"

namespace staeckel {

inline constexpr double kCommutationTol = 1e-9;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kRankThreshold = 1e-8;
inline constexpr double kOracleTol = 1e-5;
inline constexpr double kRankPassFraction = 0.95;
inline constexpr double kSampleMargin = 0.1;

struct BracketValue {
  double value = 0.0;
  /// 1 + sum_i (|da/dq_i||db/dp_i| + |da/dp_i||db/dq_i|): the magnitude of the
  /// products summed by the bracket, which sets its roundoff floor.
  double scale = 1.0;
};

inline BracketValue bracket_from_gradients(const Gradient& ga, const Gradient& gb) {
  BracketValue out;
  for (std::size_t i = 0; i < ga.dq.size(); ++i) {
    out.value += ga.dq[i] * gb.dp[i] - ga.dp[i] * gb.dq[i];
    out.scale += std::fabs(ga.dq[i] * gb.dp[i]) + std::fabs(ga.dp[i] * gb.dq[i]);
  }
  return out;
}

/// {a, b} = sum_i (da/dq_i db/dp_i - da/dp_i db/dq_i), exact gradients.
inline double poisson_bracket(const Observable& a, const Observable& b, const PhaseState& x) {
  return bracket_from_gradients(gradient(a, x), gradient(b, x)).value;
}

inline BracketValue poisson_bracket_scaled(const Observable& a, const Observable& b,
                                           const PhaseState& x) {
  return bracket_from_gradients(gradient(a, x), gradient(b, x));
}

/// Same bracket with central-difference gradients (oracle path).
inline BracketValue fd_poisson_bracket(const Observable& a, const Observable& b, const PhaseState& x,
                                       double h = kDefaultFdStep) {
  return bracket_from_gradients(fd_gradient(a, x, h), fd_gradient(b, x, h));
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct BracketReport {
  std::string name;
  std::string a_label;
  std::string b_label;
  int samples = 0;
  double max_abs = 0.0;         // max |residual| over samples
  double scale = 1.0;           // normalization at the worst normalized sample
  double max_normalized = 0.0;  // max |residual| / scale
  double tol = kCommutationTol;
  double max_oracle_deviation = 0.0;  // max |exact - fd| / scale
  bool pass = true;
};

struct IdentityReport {
  std::string name;
  int samples = 0;
  double max_relative_deviation = 0.0;
  double tol = kTraceTol;
  bool pass = true;
};

struct RankReport {
  std::vector<std::string> labels;
  int expected_rank = 0;
  std::vector<std::vector<double>> singular_values;  // per sample, descending
  std::vector<int> ranks;
  double min_relative_sigma = 0.0;  // min over samples of sigma_last / sigma_max
  double full_rank_fraction = 0.0;
  double threshold = kRankThreshold;
  bool pass = false;
};

namespace detail {

inline std::vector<PhaseState> sample_points(const SystemSpec& spec, int trials, std::uint64_t seed,
                                             double margin = kSampleMargin) {
  std::mt19937_64 rng(seed);
  std::vector<PhaseState> pts;
  pts.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) pts.push_back(sample_phase_point(spec, rng, margin));
  return pts;
}

/// Residual r(x) = {a, b}(x) - rhs(x) with scale = bracket scale + |rhs|.
/// `rhs` may be empty (pure commutation).
inline BracketReport bracket_check(std::string name, const Observable& a, const Observable& b,
                                   const std::function<double(const PhaseState&)>& rhs,
                                   const std::vector<PhaseState>& pts, double tol) {
  BracketReport rep;
  rep.name = std::move(name);
  rep.a_label = a.label();
  rep.b_label = b.label();
  rep.tol = tol;
  for (const auto& x : pts) {
    const BracketValue exact = poisson_bracket_scaled(a, b, x);
    const BracketValue fd = fd_poisson_bracket(a, b, x);
    const double target = rhs ? rhs(x) : 0.0;
    const double residual = std::fabs(exact.value - target);
    const double scale = exact.scale + std::fabs(target);
    const double normalized = residual / scale;
    rep.max_abs = std::max(rep.max_abs, residual);
    if (normalized >= rep.max_normalized) {
      rep.max_normalized = normalized;
      rep.scale = scale;
    }
    rep.max_oracle_deviation =
        std::max(rep.max_oracle_deviation, std::fabs(exact.value - fd.value) / exact.scale);
    ++rep.samples;
  }
  rep.pass = rep.max_normalized <= tol;
  return rep;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commutation
// ---------------------------------------------------------------------------

/// {H, S} = 0 for every catalog symmetry; involution within each angular
/// tower; {S_ii, S_jj} = 0 for Fradkin systems; the so(N) vector law for LRL
/// systems.
inline std::vector<BracketReport> commutation_suite(const SystemSpec& spec, double tol, int trials,
                                                    std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::InvalidParameter, "trials must be >= 1");
  const auto pts = detail::sample_points(spec, trials, seed);
  const int n = spec.dim;
  std::vector<BracketReport> out;

  const Observable h = hamiltonian_observable(spec);
  for (const auto& s : catalog_symmetries(spec))
    out.push_back(detail::bracket_check("{H," + s.label() + "}", h, s, {}, pts, tol));

  for (bool left : {true, false}) {
    for (int m = 2; m <= n; ++m)
      for (int k = m + 1; k <= n; ++k) {
        const auto a = build_observable(
            spec, left ? ObservableKind::angular_left(m) : ObservableKind::angular_right(m));
        const auto b = build_observable(
            spec, left ? ObservableKind::angular_left(k) : ObservableKind::angular_right(k));
        out.push_back(
            detail::bracket_check("{" + a.label() + "," + b.label() + "}", a, b, {}, pts, tol));
      }
  }

  auto diag = [&](int i) -> Observable {
    switch (spec.id) {
      case SystemId::FreeEuclidean: return build_observable(spec, ObservableKind::fradkin_seed(i, i));
      case SystemId::FlatOscillator: return build_observable(spec, ObservableKind::flat_fradkin(i, i));
      default: return build_observable(spec, ObservableKind::curved_fradkin(i, i));
    }
  };
  if (has_fradkin_tensor(spec.id)) {
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        const auto a = diag(i), b = diag(j);
        out.push_back(
            detail::bracket_check("{" + a.label() + "," + b.label() + "}", a, b, {}, pts, tol));
      }
  }

  auto lrl = [&](int k) -> Observable {
    switch (spec.id) {
      case SystemId::FreeEuclidean: return build_observable(spec, ObservableKind::lrl_seed(k));
      case SystemId::FlatKC: return build_observable(spec, ObservableKind::flat_lrl(k));
      default: return build_observable(spec, ObservableKind::curved_lrl(k));
    }
  };
  if (has_lrl_vector(spec.id)) {
    std::vector<Observable> vec;
    for (int k = 1; k <= n; ++k) vec.push_back(lrl(k));
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        const auto J = build_observable(spec, ObservableKind::so_generator(i, j));
        for (int k = 1; k <= n; ++k) {
          auto rhs = [&vec, i, j, k](const PhaseState& x) {
            double v = 0.0;
            if (i == k) v += vec[j - 1](x);
            if (j == k) v -= vec[i - 1](x);
            return v;
          };
          out.push_back(detail::bracket_check("{" + J.label() + "," + vec[k - 1].label() + "} vector law",
                                              J, vec[k - 1], rhs, pts, tol));
        }
      }
  }
  return out;
}

/// so(N) Lie-Poisson relations among the J_ij and the sl(2,R) relations of
/// J- = q^2, J+ = p^2, J3 = q.p, checked at points admissible for `spec`.
inline std::vector<BracketReport> algebra_suite(const SystemSpec& spec, double tol, int trials,
                                                std::uint64_t seed) {
  const auto pts = detail::sample_points(spec, trials, seed);
  const int n = spec.dim;
  std::vector<BracketReport> out;
  auto J = [&](int i, int j) { return build_observable(spec, ObservableKind::so_generator(i, j)); };
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) {
        const auto jij = J(i, j), jik = J(i, k), jjk = J(j, k);
        auto as_rhs = [](Observable o, double sign) {
          return [o = std::move(o), sign](const PhaseState& x) { return sign * o(x); };
        };
        out.push_back(detail::bracket_check("{J_ij,J_ik}=J_jk", jij, jik, as_rhs(jjk, 1.0), pts, tol));
        out.push_back(detail::bracket_check("{J_ij,J_jk}=-J_ik", jij, jjk, as_rhs(jik, -1.0), pts, tol));
        out.push_back(detail::bracket_check("{J_ik,J_jk}=J_ij", jik, jjk, as_rhs(jij, 1.0), pts, tol));
      }
  const auto jm = build_observable(spec, ObservableKind::sl2_minus());
  const auto jp = build_observable(spec, ObservableKind::sl2_plus());
  const auto j3 = build_observable(spec, ObservableKind::sl2_three());
  auto times = [](const Observable& o, double c) {
    return [o, c](const PhaseState& x) { return c * o(x); };
  };
  out.push_back(detail::bracket_check("{J3,J+}=2J+", j3, jp, times(jp, 2.0), pts, tol));
  out.push_back(detail::bracket_check("{J3,J-}=-2J-", j3, jm, times(jm, -2.0), pts, tol));
  out.push_back(detail::bracket_check("{J-,J+}=4J3", jm, jp, times(j3, 4.0), pts, tol));
  return out;
}

// ---------------------------------------------------------------------------
// Trace and sum identities
// ---------------------------------------------------------------------------

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Named sum identities of a system as (lhs, rhs) evaluators.
inline std::vector<std::pair<std::string, std::function<IdentitySides(const PhaseState&)>>>
trace_identities(const SystemSpec& spec) {
  const int n = spec.dim;
  const auto a = spec.params;
  const Observable h = hamiltonian_observable(spec);
  const Observable l2 = build_observable(spec, ObservableKind::total_l2());
  std::vector<Observable> diag, vec;
  for (int i = 1; i <= n; ++i) {
    switch (spec.id) {
      case SystemId::FreeEuclidean:
        diag.push_back(build_observable(spec, ObservableKind::fradkin_seed(i, i)));
        vec.push_back(build_observable(spec, ObservableKind::lrl_seed(i)));
        break;
      case SystemId::FlatOscillator:
        diag.push_back(build_observable(spec, ObservableKind::flat_fradkin(i, i)));
        break;
      case SystemId::FlatKC:
        vec.push_back(build_observable(spec, ObservableKind::flat_lrl(i)));
        break;
      case SystemId::CurvedKC:
      case SystemId::DarbouxIII:
        diag.push_back(build_observable(spec, ObservableKind::curved_fradkin(i, i)));
        break;
      case SystemId::SphericalOscillator:
      case SystemId::TaubNut:
        vec.push_back(build_observable(spec, ObservableKind::curved_lrl(i)));
        break;
    }
  }
  auto trace = [diag](const PhaseState& x) {
    double s = 0.0;
    for (const auto& o : diag) s += o(x);
    return s;
  };
  auto sum_sq = [vec](const PhaseState& x) {
    double s = 0.0;
    for (const auto& o : vec) {
      const double v = o(x);
      s += v * v;
    }
    return s;
  };

  using Fn = std::function<IdentitySides(const PhaseState&)>;
  std::vector<std::pair<std::string, Fn>> out;
  switch (spec.id) {
    case SystemId::FreeEuclidean:
      out.emplace_back("sum S_ii = 2(H - alpha)", [=](const PhaseState& x) {
        return IdentitySides{trace(x), 2.0 * (h(x) - a.alpha)};
      });
      out.emplace_back("sum S_i^2 = 2 L^2 (H - alpha)", [=](const PhaseState& x) {
        return IdentitySides{sum_sq(x), 2.0 * l2(x) * (h(x) - a.alpha)};
      });
      break;
    case SystemId::FlatOscillator:
      out.emplace_back("sum SU_ii = 2(H_U - gamma)", [=](const PhaseState& x) {
        return IdentitySides{trace(x), 2.0 * (h(x) - a.gamma)};
      });
      break;
    case SystemId::FlatKC:
      out.emplace_back("sum SU_i^2 = 2 L^2 (H_U - xi) + delta^2", [=](const PhaseState& x) {
        return IdentitySides{sum_sq(x), 2.0 * l2(x) * (h(x) - a.xi) + a.delta * a.delta};
      });
      break;
    case SystemId::CurvedKC:
      out.emplace_back("sum St_ii = -2 alpha", [=](const PhaseState& x) {
        return IdentitySides{trace(x), -2.0 * a.alpha};
      });
      break;
    case SystemId::DarbouxIII:
      out.emplace_back("sum St_ii = 2 H", [=](const PhaseState& x) {
        return IdentitySides{trace(x), 2.0 * h(x)};
      });
      break;
    case SystemId::SphericalOscillator:
      out.emplace_back("sum St_i^2 = H^2 - 2 alpha L^2", [=](const PhaseState& x) {
        const double hv = h(x);
        return IdentitySides{sum_sq(x), hv * hv - 2.0 * a.alpha * l2(x)};
      });
      break;
    case SystemId::TaubNut:
      out.emplace_back("sum St_i^2 = 2 L^2 (H - alpha) + eta^2 H^2", [=](const PhaseState& x) {
        const double hv = h(x);
        return IdentitySides{sum_sq(x), 2.0 * l2(x) * (hv - a.alpha) + a.eta * a.eta * hv * hv};
      });
      break;
  }
  return out;
}

/// Relative deviation |lhs - rhs| / (1 + |lhs| + |rhs|), maximized over samples.
inline std::vector<IdentityReport> trace_identity_check(const SystemSpec& spec, int trials,
                                                        std::uint64_t seed, double tol = kTraceTol) {
  if (trials < 1) throw Error(ErrorKind::InvalidParameter, "trials must be >= 1");
  const auto pts = detail::sample_points(spec, trials, seed);
  std::vector<IdentityReport> out;
  for (const auto& [name, fn] : trace_identities(spec)) {
    IdentityReport rep;
    rep.name = name;
    rep.tol = tol;
    for (const auto& x : pts) {
      const auto s = fn(x);
      const double dev = std::fabs(s.lhs - s.rhs) / (1.0 + std::fabs(s.lhs) + std::fabs(s.rhs));
      rep.max_relative_deviation = std::max(rep.max_relative_deviation, dev);
      ++rep.samples;
    }
    rep.pass = rep.max_relative_deviation <= tol;
    out.push_back(rep);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Functional independence
// ---------------------------------------------------------------------------

/// Jacobian rows are the exact gradients (dq, dp) of each observable.
inline Eigen::MatrixXd jacobian(const std::vector<Observable>& obs, const PhaseState& x) {
  const int n = x.dim();
  Eigen::MatrixXd J(static_cast<Eigen::Index>(obs.size()), 2 * n);
  for (std::size_t r = 0; r < obs.size(); ++r) {
    const Gradient g = gradient(obs[r], x);
    for (int i = 0; i < n; ++i) {
      J(static_cast<Eigen::Index>(r), i) = g.dq[static_cast<std::size_t>(i)];
      J(static_cast<Eigen::Index>(r), n + i) = g.dp[static_cast<std::size_t>(i)];
    }
  }
  return J;
}

/// Empirical rank of the Jacobian of `obs`: singular values above
/// threshold * sigma_max count. Passes when the rank equals `expected_rank`
/// (default: number of observables) at >= 95% of samples.
inline RankReport independence_rank(const SystemSpec& spec, const std::vector<Observable>& obs,
                                    int trials, std::uint64_t seed, int expected_rank = -1,
                                    double threshold = kRankThreshold) {
  if (trials < 1) throw Error(ErrorKind::InvalidParameter, "trials must be >= 1");
  RankReport rep;
  for (const auto& o : obs) rep.labels.push_back(o.label());
  rep.expected_rank = expected_rank < 0 ? static_cast<int>(obs.size()) : expected_rank;
  rep.threshold = threshold;
  rep.min_relative_sigma = std::numeric_limits<double>::infinity();
  int full = 0;
  for (const auto& x : detail::sample_points(spec, trials, seed)) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian(obs, x));
    const Eigen::VectorXd sv = svd.singularValues();
    std::vector<double> s(sv.data(), sv.data() + sv.size());
    const double smax = s.empty() ? 0.0 : s.front();
    int rank = 0;
    for (double v : s)
      if (v > threshold * smax) ++rank;
    const auto last = static_cast<std::size_t>(std::max(rep.expected_rank, 1) - 1);
    const double rel = (smax > 0.0 && last < s.size()) ? s[last] / smax : 0.0;
    rep.min_relative_sigma = std::min(rep.min_relative_sigma, rel);
    if (rank == rep.expected_rank) ++full;
    rep.ranks.push_back(rank);
    rep.singular_values.push_back(std::move(s));
  }
  rep.full_rank_fraction = static_cast<double>(full) / trials;
  rep.pass = rep.full_rank_fraction >= kRankPassFraction;
  return rep;
}

inline RankReport independence_rank(const SystemSpec& spec, int fixed_i, int trials,
                                    std::uint64_t seed) {
  if (trials < 10) throw Error(ErrorKind::InvalidParameter, "rank test needs trials >= 10");
  return independence_rank(spec, independent_set(spec, fixed_i), trials, seed);
}

}  // namespace staeckel
