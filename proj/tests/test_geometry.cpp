#include <catch_amalgamated.hpp>

#include <cmath>

#include "staeckel/geometry.hpp"

using namespace staeckel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemSpec curved(SystemId id, int n, double lambda = 0.0, double eta = 0.0) {
  SystemParams p;
  p.alpha = 1.0;
  p.lambda = lambda;
  p.eta = eta;
  return make_system(id, n, p);
}

std::vector<SystemSpec> curved_catalog(int n) {
  return {curved(SystemId::CurvedKC, n),          curved(SystemId::DarbouxIII, n, 0.5),
          curved(SystemId::DarbouxIII, n, -0.2),  curved(SystemId::SphericalOscillator, n),
          curved(SystemId::TaubNut, n, 0.0, 1.0), curved(SystemId::TaubNut, n, 0.0, -1.0)};
}

// 50 radii strictly inside the domain with room for the curvature stencil.
std::vector<double> radii(const SystemSpec& s) {
  const double lo = s.domain.lower + 0.05;
  const double hi = s.domain.bounded_above() ? s.domain.upper - 0.05 : s.domain.lower + 6.0;
  std::vector<double> out;
  for (int k = 0; k < 50; ++k) out.push_back(lo + (hi - lo) * k / 49.0);
  return out;
}

}  // namespace

TEST_CASE("conformal factor examples") {
  CHECK(conformal_factor(curved(SystemId::CurvedKC, 3)).f(2.0) == 2.0);
  CHECK_THAT(conformal_factor(curved(SystemId::DarbouxIII, 3, 1.0)).f(1.0), WithinRel(std::sqrt(2.0), 1e-15));
  CHECK_THAT(conformal_factor(curved(SystemId::TaubNut, 3, 0.0, 1.0)).f(1.0), WithinRel(std::sqrt(2.0), 1e-15));
  SystemParams fo;
  fo.beta = 1.0;
  try {
    conformal_factor(make_system(SystemId::FlatOscillator, 3, fo));
    FAIL("expected not-curved");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotCurved);
  }
}

TEST_CASE("profile derivatives match finite differences") {
  for (const auto& s : curved_catalog(3)) {
    const auto prof = conformal_factor(s);
    for (double r : radii(s)) {
      const double h = 1e-5;
      CHECK_THAT(prof.df(r), WithinAbs((prof.f(r + h) - prof.f(r - h)) / (2 * h), 1e-6 * (1 + std::fabs(prof.df(r)))));
      CHECK_THAT(prof.d2f(r), WithinAbs((prof.df(r + h) - prof.df(r - h)) / (2 * h), 1e-5 * (1 + std::fabs(prof.d2f(r)))));
    }
  }
}

TEST_CASE("closed curvature examples") {
  CHECK_THAT(scalar_curvature_closed(curved(SystemId::CurvedKC, 3), 1.0), WithinAbs(-6.0, 1e-15));
  CHECK_THAT(scalar_curvature_closed(curved(SystemId::DarbouxIII, 3, 0.5), 0.0), WithinAbs(-6.0, 1e-15));
  CHECK_THAT(scalar_curvature_closed(curved(SystemId::SphericalOscillator, 3), 1.0), WithinAbs(1.5, 1e-15));
  CHECK_THAT(scalar_curvature_closed(curved(SystemId::TaubNut, 3, 0.0, 1.0), 1.0), WithinAbs(0.1875, 1e-15));
  CHECK_THROWS_AS(scalar_curvature_closed(curved(SystemId::CurvedKC, 3), 0.0), Error);
}

TEST_CASE("curvature oracle examples") {
  CHECK_THAT(scalar_curvature_oracle(conformal_factor(curved(SystemId::CurvedKC, 3)), 3, 1.0), WithinAbs(-6.0, 1e-5));
  for (int n : {2, 3, 6})
    for (double r : {0.3, 1.0, 4.0}) CHECK_THAT(scalar_curvature_oracle(flat_profile(), n, r), WithinAbs(0.0, 1e-7));
  for (double r : {0.3, 1.0, 4.0})
    CHECK_THAT(scalar_curvature_oracle(conformal_factor(curved(SystemId::CurvedKC, 2)), 2, r), WithinAbs(0.0, 1e-7));
  // The stencil shrinks toward singular points but r itself must be admissible.
  CHECK_THROWS_AS(scalar_curvature_oracle(conformal_factor(curved(SystemId::CurvedKC, 3)), 3, 0.0), Error);
  CHECK_THROWS_AS(scalar_curvature_oracle(conformal_factor(curved(SystemId::TaubNut, 3, 0.0, -1.0)), 3, 1.0), Error);
  const auto tn = curved(SystemId::TaubNut, 3, 0.0, -1.0);
  CHECK(std::fabs(scalar_curvature_oracle(conformal_factor(tn), 3, 1.001) - scalar_curvature_closed(tn, 1.001)) <=
        1e-4 * (1.0 + std::fabs(scalar_curvature_closed(tn, 1.001))));
}

TEST_CASE("closed forms agree with the general formula") {
  for (int n : {2, 3, 4, 5}) {
    for (const auto& s : curved_catalog(n)) {
      const auto prof = conformal_factor(s);
      for (double r : radii(s)) {
        const double closed = scalar_curvature_closed(s, r);
        INFO(s.name() << " N=" << n << " r=" << r);
        CHECK(std::fabs(closed - scalar_curvature_oracle(prof, n, r)) <= 1e-4 * (1.0 + std::fabs(closed)));
        CHECK(std::fabs(closed - scalar_curvature_exact(prof, n, r)) <= 1e-11 * (1.0 + std::fabs(closed)));
      }
    }
  }
}

TEST_CASE("two-dimensional flatness and the Darboux origin") {
  for (double r : {0.1, 0.7, 3.0, 40.0}) {
    CHECK(scalar_curvature_closed(curved(SystemId::CurvedKC, 2), r) == 0.0);
    CHECK(scalar_curvature_closed(curved(SystemId::SphericalOscillator, 2), r) == 0.0);
  }
  for (int n : {2, 3, 4, 5})
    for (double lam : {0.5, -0.3, 2.0}) {
      const double r0 = scalar_curvature_closed(curved(SystemId::DarbouxIII, n, lam), 0.0);
      CHECK(r0 == -2.0 * lam * n * (n - 1));
      if (lam < 0) CHECK(r0 > 0.0);
    }
}

TEST_CASE("Taub-NUT at N = 3 loses the linear term") {
  const double eta = 0.7;
  const auto s = curved(SystemId::TaubNut, 3, 0.0, eta);
  for (double r : {0.2, 1.0, 5.0})
    CHECK_THAT(scalar_curvature_closed(s, r), WithinRel(3.0 * eta * eta * 2.0 * 1.0 / (4.0 * r * std::pow(eta + r, 3)), 1e-14));
}

TEST_CASE("intrinsic potential examples") {
  const auto kc = intrinsic_potentials(curved(SystemId::CurvedKC, 3), 1.0);
  CHECK(kc.u_kc == -0.5);
  CHECK(kc.u_o == 4.0);
  const auto tn = intrinsic_potentials(curved(SystemId::TaubNut, 3, 0.0, 1.0), 1.0);
  CHECK_THAT(tn.u_kc, WithinRel(-2.0 * std::sqrt(2.0), 1e-15));
  CHECK_THAT(tn.u_o, WithinRel(0.125, 1e-15));
  // make_system rejects lambda = 0, so a vanishing lambda stands in for the
  // Euclidean limit -1/r, r^2.
  const auto small = intrinsic_potentials(curved(SystemId::DarbouxIII, 3, 1e-300), 2.0);
  CHECK_THAT(small.u_kc, WithinRel(-0.5, 1e-15));
  CHECK_THAT(small.u_o, WithinRel(4.0, 1e-15));
  CHECK_THROWS_AS(intrinsic_potentials(curved(SystemId::DarbouxIII, 3, 0.5), 0.0), Error);
}

TEST_CASE("intrinsic potentials: u_o u_kc^2 = 1 and du_kc/dr = 1/(r^2 f)") {
  for (const auto& s : curved_catalog(3)) {
    const auto prof = conformal_factor(s);
    for (double r : radii(s)) {
      const auto u = intrinsic_potentials(s, r);
      CHECK_THAT(u.u_o * u.u_kc * u.u_kc, WithinAbs(1.0, 1e-12));
      const double h = 1e-5;
      const double du = (intrinsic_potentials(s, r + h).u_kc - intrinsic_potentials(s, r - h).u_kc) / (2 * h);
      const double expect = 1.0 / (r * r * prof.f(r));
      CHECK(std::fabs(du - expect) <= 1e-6 * (1.0 + std::fabs(expect)));
    }
  }
}
