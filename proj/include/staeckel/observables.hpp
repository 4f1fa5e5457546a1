#pragma once

// Integrals of motion of the catalog systems, flat and curved, together with
// the so(N) rotation generators and the sl(2,R) triple q^2, p^2, q.p.
//
// Indices are 1-based throughout. Curved symmetries embed the Hamiltonian by
// value, re-evaluated at the same phase-space point, so that {H, S} = 0 is an
// identity on all of phase space rather than on an energy shell.

#include <set>
#include <string>
#include <vector>

#include "staeckel/core.hpp"
#include "staeckel/diff.hpp"

namespace staeckel {

struct ObservableKind {
  enum class Tag {
    AngularLeft,    // S^(m), m = 2..N
    AngularRight,   // S_(m), m = 2..N
    TotalL2,
    FradkinSeed,    // p_i p_j
    LrlSeed,        // sum_k p_k (q_k p_i - q_i p_k)
    FlatFradkin,    // p_i p_j + 2 beta q_i q_j
    FlatLrl,        // seed - delta q_i / |q|
    CurvedFradkin,  // p_i p_j - W(q) (H + shift)
    CurvedLrl,      // seed + c q_i / |q| H
    SoGenerator,    // J_ij = q_i p_j - q_j p_i, i < j
    Sl2Minus,       // q^2
    Sl2Plus,        // p^2
    Sl2Three,       // q.p
    Hamiltonian,
  };

  Tag tag = Tag::Hamiltonian;
  int i = 0;
  int j = 0;
  int m = 0;

  static ObservableKind angular_left(int m) { return {Tag::AngularLeft, 0, 0, m}; }
  static ObservableKind angular_right(int m) { return {Tag::AngularRight, 0, 0, m}; }
  static ObservableKind total_l2() { return {Tag::TotalL2}; }
  static ObservableKind fradkin_seed(int i, int j) { return {Tag::FradkinSeed, i, j}; }
  static ObservableKind lrl_seed(int i) { return {Tag::LrlSeed, i}; }
  static ObservableKind flat_fradkin(int i, int j) { return {Tag::FlatFradkin, i, j}; }
  static ObservableKind flat_lrl(int i) { return {Tag::FlatLrl, i}; }
  static ObservableKind curved_fradkin(int i, int j) { return {Tag::CurvedFradkin, i, j}; }
  static ObservableKind curved_lrl(int i) { return {Tag::CurvedLrl, i}; }
  static ObservableKind so_generator(int i, int j) { return {Tag::SoGenerator, i, j}; }
  static ObservableKind sl2_minus() { return {Tag::Sl2Minus}; }
  static ObservableKind sl2_plus() { return {Tag::Sl2Plus}; }
  static ObservableKind sl2_three() { return {Tag::Sl2Three}; }
  static ObservableKind hamiltonian() { return {Tag::Hamiltonian}; }
};

// ---------------------------------------------------------------------------
// Formula kernels, shared with the Staeckel module and the tests' second
// evaluation path.
// ---------------------------------------------------------------------------

namespace formulas {

/// J_ij with 1-based indices.
template <typename T>
T rotation(const BasicPhaseState<T>& x, int i, int j) {
  return x.q[i - 1] * x.p[j - 1] - x.q[j - 1] * x.p[i - 1];
}

/// Sum of J_ij^2 over first < i < j <= last (1-based, inclusive last).
template <typename T>
T angular_casimir(const BasicPhaseState<T>& x, int first, int last) {
  T acc(0.0);
  for (int i = first; i <= last; ++i)
    for (int j = i + 1; j <= last; ++j) {
      const T J = rotation(x, i, j);
      acc += J * J;
    }
  return acc;
}

template <typename T>
T angular_left(const BasicPhaseState<T>& x, int m) {
  return angular_casimir(x, 1, m);
}

template <typename T>
T angular_right(const BasicPhaseState<T>& x, int m) {
  return angular_casimir(x, x.dim() - m + 1, x.dim());
}

/// sum_k p_k (q_k p_i - q_i p_k) = p_i (q.p) - q_i p^2.
template <typename T>
T lrl_seed(const BasicPhaseState<T>& x, int i) {
  T acc(0.0);
  for (int k = 1; k <= x.dim(); ++k) acc += x.p[k - 1] * rotation(x, k, i);
  return acc;
}

template <typename T>
T radius(const BasicPhaseState<T>& x) {
  return sqrt(square_norm<T>(x.q));
}

}  // namespace formulas

namespace detail {

inline void check_index(int v, int lo, int hi, const char* what) {
  if (v < lo || v > hi)
    throw Error(ErrorKind::IndexOutOfRange, std::string(what) + " = " + std::to_string(v) +
                                                " outside [" + std::to_string(lo) + ", " +
                                                std::to_string(hi) + "]");
}

inline std::string idx(int i) { return std::to_string(i); }
inline std::string idx(int i, int j) { return std::to_string(i) + std::to_string(j); }

/// Radial domain guard for observables that do not go through the Hamiltonian.
inline void guard(const SystemSpec& spec, const DualState& x) {
  require_in_domain(spec, std::sqrt(square_norm<double>(lower(x).q)));
}

}  // namespace detail

inline std::string angular_label(int m, int n, bool left) {
  if (m == n) return "L^2";
  return left ? "S^(" + std::to_string(m) + ")" : "S_(" + std::to_string(m) + ")";
}

/// The system's Hamiltonian as an observable.
inline Observable hamiltonian_observable(const SystemSpec& spec) {
  return {spec.dim, "H", [spec](const DualState& x) {
            return hamiltonian<Dual>(spec, x.q, x.p);
          }};
}

inline Observable build_observable(const SystemSpec& spec, const ObservableKind& kind) {
  using Tag = ObservableKind::Tag;
  const int n = spec.dim;
  const auto incompatible = [&](const char* what) {
    return Error(ErrorKind::IncompatibleKind,
                 std::string(what) + " is not an integral of " + spec.name());
  };

  switch (kind.tag) {
    case Tag::Hamiltonian:
      return hamiltonian_observable(spec);

    case Tag::AngularLeft:
    case Tag::AngularRight: {
      detail::check_index(kind.m, 2, n, "m");
      const bool left = kind.tag == Tag::AngularLeft;
      const int m = kind.m;
      return {n, angular_label(m, n, left), [spec, m, left](const DualState& x) {
                detail::guard(spec, x);
                return left ? formulas::angular_left(x, m) : formulas::angular_right(x, m);
              }};
    }

    case Tag::TotalL2:
      return {n, "L^2", [spec](const DualState& x) {
                detail::guard(spec, x);
                return formulas::angular_left(x, x.dim());
              }};

    case Tag::FradkinSeed:
    case Tag::LrlSeed:
      if (spec.id != SystemId::FreeEuclidean) throw incompatible("a free-motion seed");
      break;
    case Tag::FlatFradkin:
      if (spec.id != SystemId::FlatOscillator) throw incompatible("the flat Fradkin tensor");
      break;
    case Tag::FlatLrl:
      if (spec.id != SystemId::FlatKC) throw incompatible("the flat LRL vector");
      break;
    case Tag::CurvedFradkin:
      if (spec.id != SystemId::CurvedKC && spec.id != SystemId::DarbouxIII)
        throw incompatible("the curved Fradkin tensor");
      break;
    case Tag::CurvedLrl:
      if (spec.id != SystemId::SphericalOscillator && spec.id != SystemId::TaubNut)
        throw incompatible("the curved LRL vector");
      break;

    case Tag::SoGenerator: {
      detail::check_index(kind.i, 1, n, "i");
      detail::check_index(kind.j, 1, n, "j");
      if (kind.i >= kind.j)
        throw Error(ErrorKind::IndexOutOfRange, "so(N) generator needs i < j");
      const int i = kind.i, j = kind.j;
      return {n, "J_" + detail::idx(i, j), [spec, i, j](const DualState& x) {
                detail::guard(spec, x);
                return formulas::rotation(x, i, j);
              }};
    }
    case Tag::Sl2Minus:
      return {n, "J-", [spec](const DualState& x) {
                detail::guard(spec, x);
                return square_norm<Dual>(x.q);
              }};
    case Tag::Sl2Plus:
      return {n, "J+", [spec](const DualState& x) {
                detail::guard(spec, x);
                return square_norm<Dual>(x.p);
              }};
    case Tag::Sl2Three:
      return {n, "J3", [spec](const DualState& x) {
                detail::guard(spec, x);
                return dot<Dual>(x.q, x.p);
              }};
  }

  // Remaining kinds carry vector/tensor indices.
  detail::check_index(kind.i, 1, n, "i");
  const bool tensor = kind.tag == Tag::FradkinSeed || kind.tag == Tag::FlatFradkin ||
                      kind.tag == Tag::CurvedFradkin;
  if (tensor) detail::check_index(kind.j, 1, n, "j");
  const int i = kind.i, j = kind.j;
  const SystemParams a = spec.params;

  switch (kind.tag) {
    case Tag::FradkinSeed:
      return {n, "S_" + detail::idx(i, j), [spec, i, j](const DualState& x) {
                detail::guard(spec, x);
                return x.p[i - 1] * x.p[j - 1];
              }};
    case Tag::LrlSeed:
      return {n, "S_" + detail::idx(i), [spec, i](const DualState& x) {
                detail::guard(spec, x);
                return formulas::lrl_seed(x, i);
              }};
    case Tag::FlatFradkin:
      return {n, "SU_" + detail::idx(i, j), [spec, a, i, j](const DualState& x) {
                detail::guard(spec, x);
                return x.p[i - 1] * x.p[j - 1] + 2.0 * a.beta * x.q[i - 1] * x.q[j - 1];
              }};
    case Tag::FlatLrl:
      return {n, "SU_" + detail::idx(i), [spec, a, i](const DualState& x) {
                detail::guard(spec, x);
                return formulas::lrl_seed(x, i) - a.delta * x.q[i - 1] / formulas::radius(x);
              }};
    case Tag::CurvedFradkin:
      if (spec.id == SystemId::CurvedKC) {
        return {n, "St_" + detail::idx(i, j), [spec, i, j](const DualState& x) {
                  const Dual h = hamiltonian<Dual>(spec, x.q, x.p);
                  return x.p[i - 1] * x.p[j - 1] - 2.0 * x.q[i - 1] * x.q[j - 1] * h;
                }};
      }
      return {n, "St_" + detail::idx(i, j), [spec, a, i, j](const DualState& x) {
                const Dual h = hamiltonian<Dual>(spec, x.q, x.p);
                return x.p[i - 1] * x.p[j - 1] -
                       2.0 * a.lambda * x.q[i - 1] * x.q[j - 1] * (h + a.alpha);
              }};
    case Tag::CurvedLrl: {
      const double c = spec.id == SystemId::TaubNut ? a.eta : 1.0;
      return {n, "St_" + detail::idx(i), [spec, c, i](const DualState& x) {
                const Dual h = hamiltonian<Dual>(spec, x.q, x.p);
                return formulas::lrl_seed(x, i) + c * x.q[i - 1] / formulas::radius(x) * h;
              }};
    }
    default:
      break;
  }
  throw Error(ErrorKind::IncompatibleKind, "unhandled observable kind");
}

/// The extra (non-angular) integral used to complete an independent set.
inline ObservableKind extra_integral_kind(const SystemSpec& spec, int fixed_i) {
  switch (spec.id) {
    case SystemId::FlatOscillator: return ObservableKind::flat_fradkin(fixed_i, fixed_i);
    case SystemId::FlatKC: return ObservableKind::flat_lrl(fixed_i);
    case SystemId::CurvedKC:
    case SystemId::DarbouxIII: return ObservableKind::curved_fradkin(fixed_i, fixed_i);
    case SystemId::SphericalOscillator:
    case SystemId::TaubNut: return ObservableKind::curved_lrl(fixed_i);
    case SystemId::FreeEuclidean: break;
  }
  throw Error(ErrorKind::IncompatibleKind,
              "free motion has two independent sets; use free_independent_sets");
}

namespace detail {
inline std::vector<Observable> assemble_set(const SystemSpec& spec, const ObservableKind& extra) {
  std::vector<Observable> out;
  std::set<std::string> seen;
  auto push = [&](Observable obs) {
    if (seen.insert(obs.label()).second) out.push_back(std::move(obs));
  };
  push(hamiltonian_observable(spec));
  for (int m = 2; m <= spec.dim; ++m) push(build_observable(spec, ObservableKind::angular_left(m)));
  for (int m = 2; m <= spec.dim; ++m) push(build_observable(spec, ObservableKind::angular_right(m)));
  push(build_observable(spec, extra));
  return out;
}
}  // namespace detail

/// {H, S^(m), S_(m), extra_i}: 2N - 1 functionally independent integrals,
/// with S^(N) = S_(N) = L^2 counted once.
inline std::vector<Observable> independent_set(const SystemSpec& spec, int fixed_i) {
  detail::check_index(fixed_i, 1, spec.dim, "fixed_i");
  return detail::assemble_set(spec, extra_integral_kind(spec, fixed_i));
}

/// Free motion: the Fradkin-seed set and the LRL-seed set.
inline std::pair<std::vector<Observable>, std::vector<Observable>> free_independent_sets(
    const SystemSpec& spec, int fixed_i) {
  if (spec.id != SystemId::FreeEuclidean)
    throw Error(ErrorKind::IncompatibleKind, "free_independent_sets needs free motion");
  detail::check_index(fixed_i, 1, spec.dim, "fixed_i");
  return {detail::assemble_set(spec, ObservableKind::fradkin_seed(fixed_i, fixed_i)),
          detail::assemble_set(spec, ObservableKind::lrl_seed(fixed_i))};
}

/// Every catalog symmetry of the system: angular towers plus the full Fradkin
/// tensor and/or LRL vector.
inline std::vector<Observable> catalog_symmetries(const SystemSpec& spec) {
  std::vector<Observable> out;
  std::set<std::string> seen;
  auto push = [&](Observable obs) {
    if (seen.insert(obs.label()).second) out.push_back(std::move(obs));
  };
  for (int m = 2; m <= spec.dim; ++m) push(build_observable(spec, ObservableKind::angular_left(m)));
  for (int m = 2; m <= spec.dim; ++m) push(build_observable(spec, ObservableKind::angular_right(m)));
  for (int i = 1; i <= spec.dim; ++i) {
    switch (spec.id) {
      case SystemId::FreeEuclidean:
        for (int j = 1; j <= spec.dim; ++j) push(build_observable(spec, ObservableKind::fradkin_seed(i, j)));
        push(build_observable(spec, ObservableKind::lrl_seed(i)));
        break;
      case SystemId::FlatOscillator:
        for (int j = 1; j <= spec.dim; ++j) push(build_observable(spec, ObservableKind::flat_fradkin(i, j)));
        break;
      case SystemId::FlatKC:
        push(build_observable(spec, ObservableKind::flat_lrl(i)));
        break;
      case SystemId::CurvedKC:
      case SystemId::DarbouxIII:
        for (int j = 1; j <= spec.dim; ++j) push(build_observable(spec, ObservableKind::curved_fradkin(i, j)));
        break;
      case SystemId::SphericalOscillator:
      case SystemId::TaubNut:
        push(build_observable(spec, ObservableKind::curved_lrl(i)));
        break;
    }
  }
  return out;
}

}  // namespace staeckel
