#pragma once

// Conformally flat, spherically symmetric metrics ds^2 = f(|q|)^2 dq^2:
// conformal factors of the curved catalog systems, their scalar curvature in
// closed form and through the general R[f] formula, and the intrinsic
// Kepler-Coulomb and oscillator potentials.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "staeckel/core.hpp"

namespace staeckel {

struct MetricProfile {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  RadialDomain domain;
};

inline MetricProfile flat_profile() {
  return {[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }, {}};
}

inline MetricProfile conformal_factor(const SystemSpec& spec) {
  const auto& a = spec.params;
  switch (spec.id) {
    case SystemId::CurvedKC:
      return {[](double r) { return r; }, [](double) { return 1.0; }, [](double) { return 0.0; },
              spec.domain};
    case SystemId::DarbouxIII: {
      const double lam = a.lambda;
      return {[lam](double r) { return std::sqrt(1.0 + lam * r * r); },
              [lam](double r) { return lam * r / std::sqrt(1.0 + lam * r * r); },
              [lam](double r) { return lam / std::pow(1.0 + lam * r * r, 1.5); }, spec.domain};
    }
    case SystemId::SphericalOscillator:
      return {[](double r) { return 1.0 / std::sqrt(r); },
              [](double r) { return -0.5 * std::pow(r, -1.5); },
              [](double r) { return 0.75 * std::pow(r, -2.5); }, spec.domain};
    case SystemId::TaubNut: {
      const double eta = a.eta;
      auto f = [eta](double r) { return std::sqrt((eta + r) / r); };
      auto df = [eta, f](double r) { return -eta / (2.0 * r * r * f(r)); };
      auto d2f = [eta, f, df](double r) {
        const double fr = f(r);
        return eta / (r * r * r * fr) + eta * df(r) / (2.0 * r * r * fr * fr);
      };
      return {f, df, d2f, spec.domain};
    }
    default:
      break;
  }
  throw Error(ErrorKind::NotCurved, spec.name() + " lives on flat Euclidean space");
}

/// R[f] = -(N-1) [(N-4) f'^2 + f (2 f'' + 2 (N-1) f'/r)] / f^4.
inline double curvature_from_derivatives(int n, double r, double f, double df, double d2f) {
  const double nm1 = n - 1.0;
  return -nm1 * ((n - 4.0) * df * df + f * (2.0 * d2f + 2.0 * nm1 * df / r)) / std::pow(f, 4);
}

/// R[f] with the profile's exact radial derivatives.
inline double scalar_curvature_exact(const MetricProfile& profile, int n, double r) {
  if (!profile.domain.contains(r) || r == 0.0)
    throw Error(ErrorKind::DomainViolation, "r outside the metric's radial domain");
  return curvature_from_derivatives(n, r, profile.f(r), profile.df(r), profile.d2f(r));
}

inline constexpr double kCurvatureFdStep = 0.02;

/// R[f] with f' and f'' taken by central differences of f alone, so it shares
/// nothing with the closed forms it checks. The step is a fraction of the
/// distance to the nearest singular point (r = 0 or a finite domain edge);
/// five-point stencils at h and h/2 are combined by one Richardson step.
inline double scalar_curvature_oracle(const MetricProfile& profile, int n, double r,
                                      double rel_step = kCurvatureFdStep) {
  if (!(r > 0.0) || !profile.domain.contains(r))
    throw Error(ErrorKind::DomainViolation, "r outside the metric's radial domain");
  if (!(rel_step > 0.0 && rel_step < 0.25))
    throw Error(ErrorKind::InvalidParameter, "relative step must lie in (0, 0.25)");
  double scale = r;
  if (profile.domain.lower > 0.0) scale = std::min(scale, r - profile.domain.lower);
  if (profile.domain.bounded_above()) scale = std::min(scale, profile.domain.upper - r);
  const auto& f = profile.f;
  auto stencil = [&](double h, double& d1, double& d2) {
    const double f2m = f(r - 2 * h), fm = f(r - h), f0 = f(r), fp = f(r + h), f2p = f(r + 2 * h);
    d1 = (f2m - 8 * fm + 8 * fp - f2p) / (12 * h);
    d2 = (-f2m + 16 * fm - 30 * f0 + 16 * fp - f2p) / (12 * h * h);
  };
  const double h = rel_step * scale;
  double a1, a2, b1, b2;
  stencil(h, a1, a2);
  stencil(h / 2, b1, b2);
  const double df = b1 + (b1 - a1) / 15.0;
  const double d2f = b2 + (b2 - a2) / 15.0;
  return curvature_from_derivatives(n, r, f(r), df, d2f);
}

inline double scalar_curvature_closed(const SystemSpec& spec, double r) {
  require_in_domain(spec, r);
  const double n = spec.dim;
  const auto& a = spec.params;
  switch (spec.id) {
    case SystemId::CurvedKC:
      return -3.0 * (n - 1.0) * (n - 2.0) / std::pow(r, 4);
    case SystemId::DarbouxIII: {
      const double s = 1.0 + a.lambda * r * r;
      return -a.lambda * (n - 1.0) * (2.0 * n + 3.0 * (n - 2.0) * a.lambda * r * r) / (s * s * s);
    }
    case SystemId::SphericalOscillator:
      return 3.0 * (n - 1.0) * (n - 2.0) / (4.0 * r);
    case SystemId::TaubNut: {
      const double s = a.eta + r;
      return a.eta * (n - 1.0) * (4.0 * (n - 3.0) * r + 3.0 * (n - 2.0) * a.eta) /
             (4.0 * r * s * s * s);
    }
    default:
      break;
  }
  throw Error(ErrorKind::NotCurved, spec.name() + " lives on flat Euclidean space");
}

struct IntrinsicPotentials {
  double u_kc = 0.0;
  double u_o = 0.0;
};

/// Intrinsic KC potential u_kc (an antiderivative of 1/(r^2 f)) and oscillator
/// potential u_o = 1/u_kc^2, in the displayed normalization.
inline IntrinsicPotentials intrinsic_potentials(const SystemSpec& spec, double r) {
  require_in_domain(spec, r);
  if (r == 0.0) throw Error(ErrorKind::DomainViolation, "intrinsic KC potential is singular at r = 0");
  const auto& a = spec.params;
  switch (spec.id) {
    case SystemId::CurvedKC:
      return {-1.0 / (2.0 * r * r), 4.0 * std::pow(r, 4)};
    case SystemId::DarbouxIII: {
      const double s = 1.0 + a.lambda * r * r;
      return {-std::sqrt(s) / r, r * r / s};
    }
    case SystemId::SphericalOscillator:
      return {-2.0 / std::sqrt(r), r / 4.0};
    case SystemId::TaubNut:
      return {-(2.0 / a.eta) * std::sqrt((a.eta + r) / r), a.eta * a.eta * r / (4.0 * (a.eta + r))};
    default:
      break;
  }
  throw Error(ErrorKind::NotCurved, spec.name() + " lives on flat Euclidean space");
}

}  // namespace staeckel
