#pragma once

// Phase-space primitives and the catalog of flat and curved Hamiltonians.
//
// Every Hamiltonian in the catalog has the form
//
//     H(q, p) = p^2 / mu(q) + V(q)
//
// with mu and V depending on q only through q^2 and |q|. The formulas are
// written once as templates so the same code path serves plain evaluation and
// dual-number differentiation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "staeckel/dual.hpp"

namespace staeckel {

enum class ErrorKind {
  InvalidParameter,
  UnsupportedDimension,
  DomainViolation,
  EmptyDomain,
  IncompatibleKind,
  IndexOutOfRange,
  DivisionByZero,
  NotCurved,
  BoundaryHit,
  StepFailure,
  OriginSingularity,
  BranchViolation,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::DomainViolation: return "domain-violation";
    case ErrorKind::EmptyDomain: return "empty-domain";
    case ErrorKind::IncompatibleKind: return "incompatible-kind";
    case ErrorKind::IndexOutOfRange: return "index-out-of-range";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::NotCurved: return "not-curved";
    case ErrorKind::BoundaryHit: return "boundary-hit";
    case ErrorKind::StepFailure: return "step-failure";
    case ErrorKind::OriginSingularity: return "origin-singularity";
    case ErrorKind::BranchViolation: return "branch-violation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Phase space
// ---------------------------------------------------------------------------

template <typename T>
struct BasicPhaseState {
  std::vector<T> q;
  std::vector<T> p;

  BasicPhaseState() = default;
  BasicPhaseState(std::vector<T> q_in, std::vector<T> p_in) : q(std::move(q_in)), p(std::move(p_in)) {
    if (q.size() != p.size())
      throw Error(ErrorKind::InvalidParameter, "q and p must have equal length");
    if (q.size() < 2)
      throw Error(ErrorKind::UnsupportedDimension, "phase space needs N >= 2");
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (!std::isfinite(value_of(q[i])) || !std::isfinite(value_of(p[i])))
        throw Error(ErrorKind::InvalidParameter, "non-finite phase-space component");
    }
  }

  int dim() const { return static_cast<int>(q.size()); }
};

using PhaseState = BasicPhaseState<double>;
using DualState = BasicPhaseState<Dual>;

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  T acc(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
T square_norm(std::span<const T> a) {
  return dot<T>(a, a);
}

inline double radius(const PhaseState& x) { return std::sqrt(square_norm<double>(x.q)); }

/// Promotes a plain state to duals with zero tangent.
inline DualState lift(const PhaseState& x) {
  DualState out;
  out.q.assign(x.q.begin(), x.q.end());
  out.p.assign(x.p.begin(), x.p.end());
  return out;
}

inline PhaseState lower(const DualState& x) {
  PhaseState out;
  out.q.reserve(x.q.size());
  out.p.reserve(x.p.size());
  for (const auto& v : x.q) out.q.push_back(v.value());
  for (const auto& v : x.p) out.p.push_back(v.value());
  return out;
}

// ---------------------------------------------------------------------------
// System catalog
// ---------------------------------------------------------------------------

enum class SystemId {
  FreeEuclidean,
  FlatOscillator,
  FlatKC,
  CurvedKC,
  DarbouxIII,
  SphericalOscillator,
  TaubNut,
};

inline constexpr SystemId kAllSystems[] = {
    SystemId::FreeEuclidean, SystemId::FlatOscillator, SystemId::FlatKC,
    SystemId::CurvedKC,      SystemId::DarbouxIII,     SystemId::SphericalOscillator,
    SystemId::TaubNut,
};

inline constexpr SystemId kCurvedSystems[] = {
    SystemId::CurvedKC, SystemId::DarbouxIII, SystemId::SphericalOscillator, SystemId::TaubNut};

inline std::string_view to_string(SystemId id) {
  switch (id) {
    case SystemId::FreeEuclidean: return "free";
    case SystemId::FlatOscillator: return "flat-oscillator";
    case SystemId::FlatKC: return "flat-kc";
    case SystemId::CurvedKC: return "curved-kc";
    case SystemId::DarbouxIII: return "darboux3";
    case SystemId::SphericalOscillator: return "spherical-osc";
    case SystemId::TaubNut: return "taubnut";
  }
  return "unknown";
}

inline SystemId parse_system_id(std::string_view name) {
  for (SystemId id : kAllSystems)
    if (to_string(id) == name) return id;
  throw Error(ErrorKind::InvalidParameter, "unknown system '" + std::string(name) + "'");
}

inline bool is_curved(SystemId id) {
  return id == SystemId::CurvedKC || id == SystemId::DarbouxIII ||
         id == SystemId::SphericalOscillator || id == SystemId::TaubNut;
}

/// Systems whose extra integrals form a (flat or curved) Fradkin tensor.
inline bool has_fradkin_tensor(SystemId id) {
  return id == SystemId::FreeEuclidean || id == SystemId::FlatOscillator ||
         id == SystemId::CurvedKC || id == SystemId::DarbouxIII;
}

/// Systems whose extra integrals form a (flat or curved) LRL vector.
inline bool has_lrl_vector(SystemId id) {
  return id == SystemId::FreeEuclidean || id == SystemId::FlatKC ||
         id == SystemId::SphericalOscillator || id == SystemId::TaubNut;
}

/// One record for every coupling so flat and curved systems share names.
/// Each system reads only the subset it needs.
struct SystemParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double xi = 0.0;
  double lambda = 0.0;
  double eta = 0.0;

  /// Darboux III oscillator frequency squared.
  double omega2() const { return -2.0 * lambda * alpha; }
};

/// Admissible values of r = |q|. The upper end is always open; the lower end
/// is closed only for r = 0 when nothing in the system is singular there.
struct RadialDomain {
  double lower = 0.0;
  bool lower_closed = true;
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double r) const {
    if (!std::isfinite(r)) return false;
    if (lower_closed ? r < lower : r <= lower) return false;
    return r < upper;
  }
  bool bounded_above() const { return std::isfinite(upper); }
};

struct SystemSpec {
  SystemId id = SystemId::FreeEuclidean;
  int dim = 2;
  SystemParams params;
  RadialDomain domain;

  std::string name() const { return std::string(to_string(id)); }
};

inline RadialDomain radial_domain_for(SystemId id, const SystemParams& prm) {
  RadialDomain d;
  switch (id) {
    case SystemId::FreeEuclidean:
    case SystemId::FlatOscillator:
      break;
    case SystemId::FlatKC:
    case SystemId::CurvedKC:
    case SystemId::SphericalOscillator:
      d.lower_closed = false;
      break;
    case SystemId::DarbouxIII:
      if (prm.lambda < 0.0) d.upper = 1.0 / std::sqrt(-prm.lambda);
      break;
    case SystemId::TaubNut:
      d.lower_closed = false;
      if (prm.eta < 0.0) d.lower = -prm.eta;
      break;
  }
  return d;
}

inline SystemSpec make_system(SystemId id, int dim, const SystemParams& params) {
  if (dim < 2) throw Error(ErrorKind::UnsupportedDimension, "dim must be >= 2");
  auto require_nonzero = [](double v, const char* name) {
    if (v == 0.0 || !std::isfinite(v))
      throw Error(ErrorKind::InvalidParameter, std::string(name) + " must be finite and nonzero");
  };
  switch (id) {
    case SystemId::FlatOscillator: require_nonzero(params.beta, "beta"); break;
    case SystemId::FlatKC: require_nonzero(params.delta, "delta"); break;
    case SystemId::DarbouxIII: require_nonzero(params.lambda, "lambda"); break;
    case SystemId::TaubNut: require_nonzero(params.eta, "eta"); break;
    default: break;
  }
  for (double v : {params.alpha, params.beta, params.gamma, params.delta, params.xi,
                   params.lambda, params.eta}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidParameter, "non-finite parameter");
  }
  return SystemSpec{id, dim, params, radial_domain_for(id, params)};
}

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

inline bool needs_radius(SystemId id) {
  return id == SystemId::FlatKC || id == SystemId::SphericalOscillator || id == SystemId::TaubNut;
}

/// Kinetic denominator mu(q) in H = p^2/mu + V, for the displayed (scaled)
/// form of each Hamiltonian. `r` is only meaningful when needs_radius(id).
template <typename T>
T kinetic_denominator(const SystemSpec& spec, const T& q2, const T& r) {
  const auto& a = spec.params;
  switch (spec.id) {
    case SystemId::FreeEuclidean:
    case SystemId::FlatOscillator:
    case SystemId::FlatKC:
      return T(2.0);
    case SystemId::CurvedKC:
      return 2.0 * q2;
    case SystemId::DarbouxIII:
      return 2.0 * (1.0 + a.lambda * q2);
    case SystemId::SphericalOscillator:
      return 2.0 / r;
    case SystemId::TaubNut:
      return 2.0 * (a.eta + r) / r;
  }
  return T(2.0);
}

template <typename T>
T potential(const SystemSpec& spec, const T& q2, const T& r) {
  const auto& a = spec.params;
  switch (spec.id) {
    case SystemId::FreeEuclidean:
      return T(a.alpha);
    case SystemId::FlatOscillator:
      return a.beta * q2 + a.gamma;
    case SystemId::FlatKC:
      return a.delta / r + a.xi;
    case SystemId::CurvedKC:
      return a.alpha / q2;
    case SystemId::DarbouxIII:
      return -a.lambda * a.alpha * q2 / (1.0 + a.lambda * q2);
    case SystemId::SphericalOscillator:
      return a.alpha * r;
    case SystemId::TaubNut:
      return a.alpha * r / (a.eta + r);
  }
  return T(0.0);
}

inline void require_in_domain(const SystemSpec& spec, double r) {
  if (!spec.domain.contains(r))
    throw Error(ErrorKind::DomainViolation,
                "|q| = " + std::to_string(r) + " outside the radial domain of " + spec.name());
}

template <typename T>
T hamiltonian(const SystemSpec& spec, std::span<const T> q, std::span<const T> p) {
  const T q2 = square_norm<T>(q);
  require_in_domain(spec, std::sqrt(value_of(q2)));
  const T r = needs_radius(spec.id) ? sqrt(q2) : T(0.0);
  return square_norm<T>(p) / kinetic_denominator<T>(spec, q2, r) + potential<T>(spec, q2, r);
}

inline double eval_hamiltonian(const SystemSpec& spec, const PhaseState& x) {
  if (x.dim() != spec.dim)
    throw Error(ErrorKind::InvalidParameter, "state dimension does not match the system");
  return hamiltonian<double>(spec, x.q, x.p);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

inline constexpr double kSampleRadiusCap = 5.0;
inline constexpr double kSampleMomentumBound = 2.0;

/// Radius interval used for sampling: the domain shrunk by `margin` at each
/// open end. Unbounded domains are capped at r = 5, or at twice the lower
/// bound when that already exceeds the cap.
inline std::pair<double, double> sampling_interval(const RadialDomain& d, double margin) {
  const double lo = d.lower_closed ? d.lower : d.lower + margin;
  const double hi = d.bounded_above() ? d.upper - margin : std::max(kSampleRadiusCap, 2.0 * lo);
  return {lo, hi};
}

inline PhaseState sample_phase_point(const SystemSpec& spec, std::mt19937_64& rng,
                                     double r_min_margin) {
  if (!(r_min_margin > 0.0)) throw Error(ErrorKind::InvalidParameter, "margin must be positive");
  const auto [lo, hi] = sampling_interval(spec.domain, r_min_margin);
  if (!(lo < hi)) throw Error(ErrorKind::EmptyDomain, "shrunk radial domain is empty");

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radial(lo, hi);
  std::uniform_real_distribution<double> momentum(-kSampleMomentumBound, kSampleMomentumBound);

  const auto n = static_cast<std::size_t>(spec.dim);
  std::vector<double> q(n), p(n);
  double norm = 0.0;
  do {
    for (auto& v : q) v = gauss(rng);
    norm = std::sqrt(square_norm<double>(q));
  } while (norm < 1e-12);
  double r = radial(rng);
  if (!spec.domain.contains(r)) r = lo;  // only reachable when lo itself is a closed end
  for (auto& v : q) v *= r / norm;
  for (auto& v : p) v = momentum(rng);
  return PhaseState(std::move(q), std::move(p));
}

inline PhaseState sample_phase_point(const SystemSpec& spec, std::uint64_t rng_seed,
                                     double r_min_margin) {
  std::mt19937_64 rng(rng_seed);
  return sample_phase_point(spec, rng, r_min_margin);
}

}  // namespace staeckel
