#pragma once

// The Staeckel transform (coupling constant metamorphosis).
//
// Given H = p^2/mu + V and an intermediate H_U = p^2/mu + U, the final system
// is H~ = H/U = p^2/(mu U) + V/U. A second-order symmetry S = S0 + W of H whose
// quadratic part S0 also appears in a symmetry S_U = S0 + W_U of H_U carries
// over to the symmetry S~ = S0 - W_U H~ of H~.
//
// The curved catalog entries are scaled versions of H~:
//
//   curved-kc      H_KC     = beta H~           (gamma = 0)
//   darboux3       H_lambda = gamma H~ - alpha  (lambda = beta/gamma)
//   spherical-osc  H_O      = delta H~          (xi = 0)
//   taubnut        H_eta    = xi H~             (eta = delta/xi)

#include <cctype>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>

#include "staeckel/core.hpp"
#include "staeckel/diff.hpp"
#include "staeckel/observables.hpp"

namespace staeckel {

/// A function of position only, evaluated on dual numbers.
using PositionRule = std::function<Dual(std::span<const Dual>)>;

struct PotentialForm {
  PositionRule mu;
  PositionRule v;
};

struct SymmetryDecomposition {
  Observable s0;     // purely quadratic in the momenta
  PositionRule w;    // scalar part in the symmetry of H
  PositionRule w_u;  // scalar part in the symmetry of H_U
};

inline PositionRule constant_rule(double c) {
  return [c](std::span<const Dual>) { return Dual(c); };
}

/// mu~ = mu U, V~ = V / U.
inline PotentialForm transform_hamiltonian(const PotentialForm& h, PositionRule u) {
  auto guarded_u = [u = std::move(u)](std::span<const Dual> q) {
    const Dual value = u(q);
    if (value.value() == 0.0 || !std::isfinite(value.value()))
      throw Error(ErrorKind::DivisionByZero, "intermediate potential U vanishes");
    return value;
  };
  return {[mu = h.mu, guarded_u](std::span<const Dual> q) { return mu(q) * guarded_u(q); },
          [v = h.v, guarded_u](std::span<const Dual> q) { return v(q) / guarded_u(q); }};
}

/// H = p^2 / mu(q) + V(q) as an observable.
inline Observable form_hamiltonian(const PotentialForm& form, int dim, std::string label = "H") {
  return {dim, std::move(label), [form](const DualState& x) {
            return square_norm<Dual>(x.p) / form.mu(x.q) + form.v(x.q);
          }};
}

// ---------------------------------------------------------------------------
// Built-in initial and intermediate Hamiltonians
// ---------------------------------------------------------------------------

/// Free motion plus the constant alpha: mu = 2, V = alpha.
inline PotentialForm free_motion_form(double alpha) {
  return {constant_rule(2.0), constant_rule(alpha)};
}

/// Harmonic oscillator intermediate potential U = gamma + beta q^2.
inline PositionRule oscillator_potential(double beta, double gamma) {
  return [beta, gamma](std::span<const Dual> q) { return gamma + beta * square_norm<Dual>(q); };
}

/// Kepler-Coulomb intermediate potential U = (delta + xi |q|) / |q|.
inline PositionRule kepler_potential(double delta, double xi) {
  return [delta, xi](std::span<const Dual> q) {
    const Dual r = sqrt(square_norm<Dual>(q));
    return (delta + xi * r) / r;
  };
}

// ---------------------------------------------------------------------------
// Scaled catalog forms
// ---------------------------------------------------------------------------

/// The catalog Hamiltonian equals scale * H~ - shift.
struct StaeckelScaling {
  double scale = 1.0;
  double shift = 0.0;
};

inline StaeckelScaling staeckel_scaling(const SystemSpec& spec) {
  const auto& a = spec.params;
  auto nonzero = [](double v, const char* name) {
    if (v == 0.0)
      throw Error(ErrorKind::InvalidParameter,
                  std::string(name) + " must be set to relate the system to its flat origin");
    return v;
  };
  switch (spec.id) {
    case SystemId::CurvedKC: return {nonzero(a.beta, "beta"), 0.0};
    case SystemId::DarbouxIII: return {nonzero(a.gamma, "gamma"), a.alpha};
    case SystemId::SphericalOscillator: return {nonzero(a.delta, "delta"), 0.0};
    case SystemId::TaubNut: return {nonzero(a.xi, "xi"), 0.0};
    default: break;
  }
  throw Error(ErrorKind::NotCurved, spec.name() + " is not a Staeckel-transformed system");
}

/// Curved system obtained from free motion through the oscillator
/// U = gamma + beta q^2: curved KC when gamma = 0, Darboux III otherwise.
inline SystemSpec curved_from_oscillator(int dim, double alpha, double beta, double gamma) {
  if (beta == 0.0) throw Error(ErrorKind::InvalidParameter, "beta must be nonzero");
  SystemParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  if (gamma == 0.0) return make_system(SystemId::CurvedKC, dim, p);
  p.lambda = beta / gamma;
  return make_system(SystemId::DarbouxIII, dim, p);
}

/// Curved system obtained from free motion through the Kepler potential
/// U = (delta + xi |q|)/|q|: spherical oscillator when xi = 0, Taub-NUT otherwise.
inline SystemSpec curved_from_kepler(int dim, double alpha, double delta, double xi) {
  if (delta == 0.0) throw Error(ErrorKind::InvalidParameter, "delta must be nonzero");
  SystemParams p;
  p.alpha = alpha;
  p.delta = delta;
  p.xi = xi;
  if (xi == 0.0) return make_system(SystemId::SphericalOscillator, dim, p);
  p.eta = delta / xi;
  return make_system(SystemId::TaubNut, dim, p);
}

/// The intermediate potential U that produces a curved catalog spec.
inline PositionRule intermediate_potential(const SystemSpec& spec) {
  const auto& a = spec.params;
  switch (spec.id) {
    case SystemId::CurvedKC:
    case SystemId::DarbouxIII: return oscillator_potential(a.beta, a.gamma);
    case SystemId::SphericalOscillator:
    case SystemId::TaubNut: return kepler_potential(a.delta, a.xi);
    default: break;
  }
  throw Error(ErrorKind::NotCurved, spec.name() + " is not a Staeckel-transformed system");
}

/// H~ recovered from the scaled catalog Hamiltonian: (H + shift) / scale.
inline Observable unscaled_hamiltonian(const SystemSpec& spec) {
  const StaeckelScaling s = staeckel_scaling(spec);
  return {spec.dim, "H~", [spec, s](const DualState& x) {
            return (hamiltonian<Dual>(spec, x.q, x.p) + s.shift) / s.scale;
          }};
}

// ---------------------------------------------------------------------------
// Symmetry decompositions of the free-motion integrals
// ---------------------------------------------------------------------------

/// S^(m) or S_(m): W = W_U = 0.
inline SymmetryDecomposition angular_decomposition(int dim, int m, bool left) {
  const SystemSpec free = make_system(SystemId::FreeEuclidean, dim, {});
  const auto kind = left ? ObservableKind::angular_left(m) : ObservableKind::angular_right(m);
  return {build_observable(free, kind), constant_rule(0.0), constant_rule(0.0)};
}

/// Fradkin seed p_i p_j with W = 0 and W_U = 2 beta q_i q_j.
inline SymmetryDecomposition fradkin_decomposition(int dim, int i, int j, double beta) {
  const SystemSpec free = make_system(SystemId::FreeEuclidean, dim, {});
  return {build_observable(free, ObservableKind::fradkin_seed(i, j)), constant_rule(0.0),
          [beta, i, j](std::span<const Dual> q) { return 2.0 * beta * q[i - 1] * q[j - 1]; }};
}

/// LRL seed with W = 0 and W_U = -delta q_i / |q|.
inline SymmetryDecomposition lrl_decomposition(int dim, int i, double delta) {
  const SystemSpec free = make_system(SystemId::FreeEuclidean, dim, {});
  return {build_observable(free, ObservableKind::lrl_seed(i)), constant_rule(0.0),
          [delta, i](std::span<const Dual> q) {
            return -delta * q[i - 1] / sqrt(square_norm<Dual>(q));
          }};
}

/// S~ = S0 - W_U H~, with H~ taken from the scaled catalog Hamiltonian of
/// `h_tilde` and evaluated at the same point.
inline Observable transform_symmetry(const SymmetryDecomposition& dec, const SystemSpec& h_tilde) {
  const Observable unscaled = unscaled_hamiltonian(h_tilde);
  std::string label = dec.s0.label();
  if (label.size() > 2 && label.rfind("S_", 0) == 0 && std::isdigit(static_cast<unsigned char>(label[2])))
    label = "St_" + label.substr(2);
  return {h_tilde.dim, std::move(label), [s0 = dec.s0, w_u = dec.w_u, unscaled](const DualState& x) {
            const Dual h = unscaled(x);
            return s0(x) - w_u(x.q) * h;
          }};
}

}  // namespace staeckel
