#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "staeckel/verify.hpp"

using namespace staeckel;
using Catch::Matchers::WithinAbs;

namespace {

SystemParams generic() {
  SystemParams p;
  p.alpha = 0.7;
  p.beta = 1.3;
  p.gamma = 0.2;
  p.delta = -1.1;
  p.xi = 0.4;
  p.lambda = 0.3;
  p.eta = 0.9;
  return p;
}

bool all_pass(const std::vector<BracketReport>& reps) {
  bool ok = true;
  for (const auto& r : reps) {
    if (!r.pass) {
      UNSCOPED_INFO(r.name << " residual " << r.max_normalized);
      ok = false;
    }
  }
  return ok;
}

// Poisson bracket of two generic phase-space functions, differentiated with
// nested duals so the result can itself be differentiated. Used only for the
// Jacobi identity, which needs second derivatives.
template <typename T, typename F, typename G>
T nested_bracket(const F& f, const G& g, const BasicPhaseState<T>& x) {
  using N = DualNumber<T>;
  const std::size_t n = x.q.size();
  auto partial = [&](const auto& fn, bool momentum, std::size_t k) {
    BasicPhaseState<N> y;
    for (std::size_t i = 0; i < n; ++i) {
      y.q.push_back(N(x.q[i]));
      y.p.push_back(N(x.p[i]));
    }
    (momentum ? y.p[k] : y.q[k]) = N::variable(momentum ? x.p[k] : x.q[k]);
    return fn(y).derivative();
  };
  T acc(0.0);
  for (std::size_t k = 0; k < n; ++k)
    acc += partial(f, false, k) * partial(g, true, k) - partial(f, true, k) * partial(g, false, k);
  return acc;
}

template <typename F>
Observable as_observable(int n, F f) {
  return {n, "f", [f](const DualState& x) { return f(x); }};
}

template <typename F, typename G>
Observable bracket_observable(int n, F f, G g) {
  return {n, "{f,g}", [f, g](const DualState& x) { return nested_bracket<Dual>(f, g, x); }};
}

template <typename A, typename B, typename C>
double jacobi_sum(int n, A a, B b, C c, const PhaseState& x) {
  return poisson_bracket(as_observable(n, a), bracket_observable(n, b, c), x) +
         poisson_bracket(as_observable(n, b), bracket_observable(n, c, a), x) +
         poisson_bracket(as_observable(n, c), bracket_observable(n, a, b), x);
}

}  // namespace

TEST_CASE("bracket worked examples") {
  const Observable q1{2, "q1", [](const DualState& x) { return x.q[0]; }};
  const Observable p1{2, "p1", [](const DualState& x) { return x.p[0]; }};
  CHECK(poisson_bracket(q1, p1, PhaseState({0.3, -2}, {5, 1})) == 1.0);

  const auto free2 = make_system(SystemId::FreeEuclidean, 2, SystemParams{});
  const auto jm = build_observable(free2, ObservableKind::sl2_minus());
  const auto jp = build_observable(free2, ObservableKind::sl2_plus());
  CHECK_THAT(poisson_bracket(jm, jp, PhaseState({1, 2}, {3, 4})), WithinAbs(44.0, 1e-13));

  SystemParams d;
  d.lambda = 1.0;
  d.alpha = 1.0;
  const auto dx = make_system(SystemId::DarbouxIII, 3, d);
  const auto h = hamiltonian_observable(dx);
  const auto s11 = build_observable(dx, ObservableKind::curved_fradkin(1, 1));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto x = sample_phase_point(dx, rng, kSampleMargin);
    const auto b = poisson_bracket_scaled(h, s11, x);
    CHECK(std::fabs(b.value) <= kCommutationTol * b.scale);
  }
}

TEST_CASE("commutation suite examples") {
  SystemParams kc;
  kc.alpha = 1.0;
  CHECK(all_pass(commutation_suite(make_system(SystemId::CurvedKC, 3, kc), kCommutationTol, 100, 7)));

  SystemParams tn;
  tn.eta = -1.0;
  tn.alpha = 0.3;
  const auto taub = make_system(SystemId::TaubNut, 5, tn);
  const auto reps = commutation_suite(taub, kCommutationTol, 100, 7);
  CHECK(all_pass(reps));
  CHECK(reps.size() > 20);

  SystemParams fo;
  fo.beta = 0.5;
  CHECK(all_pass(commutation_suite(make_system(SystemId::FlatOscillator, 3, fo), kCommutationTol, 100, 7)));
}

TEST_CASE("commutation suite covers all catalog systems and oracle agreement") {
  for (SystemId id : kAllSystems) {
    for (int n : {2, 3, 4}) {
      const auto reps = commutation_suite(make_system(id, n, generic()), kCommutationTol, 30, 99);
      CHECK(all_pass(reps));
      for (const auto& r : reps) CHECK(r.max_oracle_deviation <= kOracleTol);
    }
  }
}

TEST_CASE("a wrong symmetry is caught") {
  // p_1^2 alone is not conserved by the Darboux III flow.
  const auto dx = make_system(SystemId::DarbouxIII, 3, generic());
  const auto h = hamiltonian_observable(dx);
  const Observable wrong{3, "p1^2", [](const DualState& x) { return x.p[0] * x.p[0]; }};
  const auto rep = detail::bracket_check("wrong", h, wrong, {}, detail::sample_points(dx, 20, 3), kCommutationTol);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_normalized > 1e-3);
}

TEST_CASE("algebra suite") {
  for (int n : {2, 3, 5}) CHECK(all_pass(algebra_suite(make_system(SystemId::TaubNut, n, generic()), kCommutationTol, 50, 5)));
}

TEST_CASE("bracket antisymmetry") {
  for (SystemId id : kAllSystems) {
    const auto spec = make_system(id, 3, generic());
    auto obs = catalog_symmetries(spec);
    obs.push_back(hamiltonian_observable(spec));
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
      const auto x = sample_phase_point(spec, rng, kSampleMargin);
      for (std::size_t a = 0; a < obs.size(); ++a)
        for (std::size_t b = a + 1; b < obs.size(); ++b)
          CHECK(std::fabs(poisson_bracket(obs[a], obs[b], x) + poisson_bracket(obs[b], obs[a], x)) <= 1e-13);
    }
  }
}

TEST_CASE("Jacobi identity on sl(2) and so(3) triples") {
  auto jm = [](const auto& x) { return x.q[0] * x.q[0] + x.q[1] * x.q[1] + x.q[2] * x.q[2]; };
  auto jp = [](const auto& x) { return x.p[0] * x.p[0] + x.p[1] * x.p[1] + x.p[2] * x.p[2]; };
  auto j3 = [](const auto& x) { return x.q[0] * x.p[0] + x.q[1] * x.p[1] + x.q[2] * x.p[2]; };
  auto j12 = [](const auto& x) { return x.q[0] * x.p[1] - x.q[1] * x.p[0]; };
  auto j13 = [](const auto& x) { return x.q[0] * x.p[2] - x.q[2] * x.p[0]; };
  auto j23 = [](const auto& x) { return x.q[1] * x.p[2] - x.q[2] * x.p[1]; };
  const auto spec = make_system(SystemId::FreeEuclidean, 3, SystemParams{});
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto x = sample_phase_point(spec, rng, kSampleMargin);
    CHECK(std::fabs(jacobi_sum(3, jm, jp, j3, x)) <= 1e-10);
    CHECK(std::fabs(jacobi_sum(3, j12, j13, j23, x)) <= 1e-10);
  }
  // The nested bracket itself must be right for the check to mean anything.
  const auto x = sample_phase_point(spec, rng, kSampleMargin);
  CHECK_THAT(bracket_observable(3, jm, jp)(x), WithinAbs(4.0 * j3(x), 1e-12));
}

TEST_CASE("trace identity examples") {
  SystemParams kc;
  kc.alpha = 1.0;
  for (const auto& r : trace_identity_check(make_system(SystemId::CurvedKC, 3, kc), 100, 3)) CHECK(r.pass);

  const auto so = make_system(SystemId::SphericalOscillator, 3, SystemParams{});
  const auto ids = trace_identities(so);
  REQUIRE(ids.size() == 1);
  const auto sides = ids.front().second(PhaseState({1, 0, 0}, {1, 0, 0}));
  CHECK_THAT(sides.lhs, WithinAbs(0.25, 1e-15));
  CHECK_THAT(sides.rhs, WithinAbs(0.25, 1e-15));

  SystemParams fk;
  fk.delta = -1.0;
  for (const auto& r : trace_identity_check(make_system(SystemId::FlatKC, 3, fk), 100, 3)) CHECK(r.pass);
}

TEST_CASE("trace identities hold for every system") {
  for (SystemId id : kAllSystems)
    for (int n : {2, 3, 5})
      for (const auto& r : trace_identity_check(make_system(id, n, generic()), 100, 12)) {
        INFO(r.name);
        CHECK(r.pass);
        CHECK(r.samples == 100);
      }
}

TEST_CASE("rank examples") {
  SystemParams kc;
  kc.alpha = 1.0;
  const auto r1 = independence_rank(make_system(SystemId::CurvedKC, 3, kc), 1, 50, 3);
  CHECK(r1.pass);
  CHECK(r1.expected_rank == 5);

  SystemParams d;
  d.lambda = 0.5;
  d.alpha = 1.0;
  const auto dx = make_system(SystemId::DarbouxIII, 4, d);
  const auto r2 = independence_rank(dx, 1, 50, 3);
  CHECK(r2.pass);
  CHECK(r2.expected_rank == 7);

  auto set = independent_set(dx, 1);
  set.push_back(build_observable(dx, ObservableKind::total_l2()).relabeled("L^2 again"));
  const auto degenerate = independence_rank(dx, set, 50, 3, 7);
  CHECK(degenerate.pass);  // rank stays 7 with 8 rows
  set.erase(set.begin() + 1);  // drop S^(2): now 7 rows, one duplicated
  const auto dropped = independence_rank(dx, set, 50, 3);
  CHECK_FALSE(dropped.pass);
  for (int rk : dropped.ranks) CHECK(rk == 6);

  CHECK_THROWS_AS(independence_rank(dx, 1, 5, 3), Error);
}

TEST_CASE("reports are seed-reproducible") {
  const auto spec = make_system(SystemId::SphericalOscillator, 3, generic());
  const auto a = commutation_suite(spec, kCommutationTol, 20, 5);
  const auto b = commutation_suite(spec, kCommutationTol, 20, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].max_abs == b[i].max_abs);
}
