#pragma once

// The planar Kustaanheimo-Stiefel map and its inverse. At N = 2 the curved KC
// and curved spherical oscillator live on flat space, and these canonical maps
// carry them to the Euclidean Kepler problem and the isotropic oscillator.
//
// The inverse needs sqrt(q1^2 + q2^2) - q1 > 0, which excludes the ray
// {q2 = 0, q1 >= 0}. It inverts ks_forward on the half plane q2 > 0.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "staeckel/core.hpp"
#include "staeckel/diff.hpp"

namespace staeckel {

namespace detail {
inline void require_planar(int dim) {
  if (dim != 2) throw Error(ErrorKind::UnsupportedDimension, "KS maps act on N = 2 only");
}
}  // namespace detail

template <typename T>
BasicPhaseState<T> ks_forward(const BasicPhaseState<T>& x) {
  detail::require_planar(x.dim());
  const T& q1 = x.q[0];
  const T& q2 = x.q[1];
  const T& p1 = x.p[0];
  const T& p2 = x.p[1];
  const T rho2 = q1 * q1 + q2 * q2;
  if (value_of(rho2) == 0.0) throw Error(ErrorKind::OriginSingularity, "KS map is singular at q = 0");
  BasicPhaseState<T> out;
  out.q = {0.5 * (q1 * q1 - q2 * q2), q1 * q2};
  out.p = {(p1 * q1 - p2 * q2) / rho2, (p2 * q1 + p1 * q2) / rho2};
  return out;
}

template <typename T>
BasicPhaseState<T> ks_inverse(const BasicPhaseState<T>& x) {
  detail::require_planar(x.dim());
  const T& q1 = x.q[0];
  const T& q2 = x.q[1];
  const T& p1 = x.p[0];
  const T& p2 = x.p[1];
  // sqrt(q1^2 + q2^2) - q1, rewritten as q2^2 / (sqrt(q1^2 + q2^2) + q1) for
  // q1 > 0 to avoid cancellation next to the excluded ray.
  const T rho = sqrt(q1 * q1 + q2 * q2);
  const T s = value_of(q1) > 0.0 ? q2 * q2 / (rho + q1) : rho - q1;
  if (!(value_of(s) > 0.0))
    throw Error(ErrorKind::BranchViolation, "KS inverse needs sqrt(q1^2 + q2^2) - q1 > 0");
  const T rs = sqrt(s);
  BasicPhaseState<T> out;
  out.q = {q2 / rs, rs};
  out.p = {((p1 * q2 - 2.0 * p2 * q1) * s + p2 * q2 * q2) / (s * rs), (p2 * q2 - p1 * s) / rs};
  return out;
}

inline PhaseState ks_forward(const PhaseState& x) { return ks_forward<double>(x); }
inline PhaseState ks_inverse(const PhaseState& x) { return ks_inverse<double>(x); }

/// A planar phase-space map, evaluated on duals so composed observables keep
/// exact gradients.
struct CanonicalMap2D {
  std::function<DualState(const DualState&)> forward;
  std::string label;

  PhaseState operator()(const PhaseState& x) const { return lower(forward(lift(x))); }
};

inline CanonicalMap2D ks_forward_map() {
  return {[](const DualState& x) { return ks_forward<Dual>(x); }, "KS"};
}

inline CanonicalMap2D ks_inverse_map() {
  return {[](const DualState& x) { return ks_inverse<Dual>(x); }, "KS^-1"};
}

inline CanonicalMap2D identity_map() {
  return {[](const DualState& x) { return x; }, "id"};
}

/// obs o m.
inline Observable map_observable(const CanonicalMap2D& m, const Observable& obs) {
  return {2, obs.label() + " o " + m.label,
          [fwd = m.forward, obs](const DualState& x) { return obs(fwd(x)); }};
}

/// Jacobian d(q~, p~)/d(q, p) of the map at x, columns ordered (q1, q2, p1, p2).
inline Eigen::Matrix4d map_jacobian(const CanonicalMap2D& m, const PhaseState& x) {
  detail::require_planar(x.dim());
  Eigen::Matrix4d J;
  for (int c = 0; c < 4; ++c) {
    DualState seed = lift(x);
    Dual& slot = c < 2 ? seed.q[static_cast<std::size_t>(c)] : seed.p[static_cast<std::size_t>(c - 2)];
    slot = Dual::variable(slot.value());
    const DualState y = m.forward(seed);
    J(0, c) = y.q[0].derivative();
    J(1, c) = y.q[1].derivative();
    J(2, c) = y.p[0].derivative();
    J(3, c) = y.p[1].derivative();
  }
  return J;
}

inline Eigen::Matrix4d canonical_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 2) = omega(1, 3) = 1.0;
  omega(2, 0) = omega(3, 1) = -1.0;
  return omega;
}

/// max |J^T Omega J - Omega| entrywise.
inline double symplectic_defect(const CanonicalMap2D& m, const PhaseState& x) {
  const Eigen::Matrix4d J = map_jacobian(m, x);
  const Eigen::Matrix4d omega = canonical_form();
  return (J.transpose() * omega * J - omega).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Flat-space images of the N = 2 curved systems, in the KS variables.
// ---------------------------------------------------------------------------

namespace planar {

template <typename T>
T angular(const BasicPhaseState<T>& x) {
  return x.q[0] * x.p[1] - x.q[1] * x.p[0];
}

template <typename T>
T norm_q(const BasicPhaseState<T>& x) {
  return sqrt(x.q[0] * x.q[0] + x.q[1] * x.q[1]);
}

}  // namespace planar

/// 1/2 p^2 + alpha / (2 |q|).
inline Observable kepler_image(double alpha) {
  return {2, "H_kepler", [alpha](const DualState& x) {
            return 0.5 * square_norm<Dual>(x.p) + alpha / (2.0 * planar::norm_q(x));
          }};
}

/// 1/4 p^2 + 1/2 alpha q^2.
inline Observable oscillator_image(double alpha) {
  return {2, "H_osc", [alpha](const DualState& x) {
            return 0.25 * square_norm<Dual>(x.p) + 0.5 * alpha * square_norm<Dual>(x.q);
          }};
}

/// Images of the curved KC integrals under ks_forward:
/// S~_11 -> 2 p2 (q2 p1 - q1 p2) - alpha q1/|q| - alpha,
/// S~_12 -> 2 p1 (q1 p2 - q2 p1) - alpha q2/|q|,
/// L^2   -> 4 (q1 p2 - q2 p1)^2.
inline Observable kepler_lrl_image(double alpha, int component) {
  if (component == 1) {
    return {2, "KC S~_11 image", [alpha](const DualState& x) {
              return 2.0 * x.p[1] * (x.q[1] * x.p[0] - x.q[0] * x.p[1]) -
                     alpha * x.q[0] / planar::norm_q(x) - alpha;
            }};
  }
  return {2, "KC S~_12 image", [alpha](const DualState& x) {
            return 2.0 * x.p[0] * (x.q[0] * x.p[1] - x.q[1] * x.p[0]) - alpha * x.q[1] / planar::norm_q(x);
          }};
}

inline Observable scaled_l2_image(double factor) {
  return {2, "L^2 image", [factor](const DualState& x) {
            const Dual l = planar::angular(x);
            return factor * l * l;
          }};
}

/// Images of the curved spherical-oscillator LRL components under ks_inverse:
/// S~_1 -> 1/4 (p1^2 - p2^2) + 1/2 alpha (q1^2 - q2^2), S~_2 -> 1/2 p1 p2 + alpha q1 q2.
inline Observable oscillator_lrl_image(double alpha, int component) {
  if (component == 1) {
    return {2, "O S~_1 image", [alpha](const DualState& x) {
              return 0.25 * (x.p[0] * x.p[0] - x.p[1] * x.p[1]) +
                     0.5 * alpha * (x.q[0] * x.q[0] - x.q[1] * x.q[1]);
            }};
  }
  return {2, "O S~_2 image", [alpha](const DualState& x) {
            return 0.5 * x.p[0] * x.p[1] + alpha * x.q[0] * x.q[1];
          }};
}

/// Flat Fradkin component p_i p_j + 2 alpha q_i q_j in the oscillator variables.
inline Observable oscillator_fradkin_image(double alpha, int i, int j) {
  return {2, "O Fradkin image", [alpha, i, j](const DualState& x) {
            return x.p[i - 1] * x.p[j - 1] + 2.0 * alpha * x.q[i - 1] * x.q[j - 1];
          }};
}

}  // namespace staeckel
