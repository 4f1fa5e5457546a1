// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "staeckel.hpp"

using namespace staeckel;

namespace {

// Pinned acceptance tolerances and budgets.
constexpr double kCommutation = 1e-9;
constexpr double kTrace = 1e-10;
constexpr double kRankSigma = 1e-8;
constexpr double kRankFraction = 0.95;
constexpr double kCurvatureRel = 1e-4;
constexpr double kFlatCurvature = 1e-7;
constexpr double kPotentialProduct = 1e-12;
constexpr double kKs = 1e-10;
constexpr double kDynamicsTol = 1e-10;
constexpr double kDrift = 1e-6;
constexpr double kReversal = 1e-5;
constexpr double kOracle = 1e-5;
constexpr double kCommutationBudget = 30.0;
constexpr double kDynamicsBudget = 60.0;
constexpr double kQuantumBudget = 120.0;
constexpr std::uint64_t kSeed = 20240611;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int id, std::string title, bool pass, std::string detail) {
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  lines.push_back({id, std::move(title), pass, std::move(detail)});
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SystemParams positive_params() {
  SystemParams p;
  p.alpha = 0.7;
  p.beta = 1.3;
  p.gamma = 0.4;
  p.delta = -1.1;
  p.xi = 0.6;
  p.lambda = 0.3;
  p.eta = 0.9;
  return p;
}

SystemParams negative_params() {
  SystemParams p = positive_params();
  p.alpha = -0.45;
  p.beta = -0.8;
  p.delta = 1.7;
  p.lambda = -0.2;
  p.eta = -0.8;
  return p;
}

std::vector<int> suite_dims(SystemId id) {
  if (is_curved(id)) return {3, 5};
  return {2, 3, 5};
}

// Criteria 1 and 8 share the bracket reports.
double worst_oracle = 0.0;

void commutation() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t count = 0;
  bool pass = true;
  for (const auto& prm : {positive_params(), negative_params()})
    for (SystemId id : kAllSystems)
      for (int n : suite_dims(id)) {
        const auto spec = make_system(id, n, prm);
        auto reps = commutation_suite(spec, kCommutation, 100, kSeed);
        const auto alg = algebra_suite(spec, kCommutation, 100, kSeed);
        reps.insert(reps.end(), alg.begin(), alg.end());
        for (const auto& r : reps) {
          ++count;
          worst = std::max(worst, r.max_normalized);
          worst_oracle = std::max(worst_oracle, r.max_oracle_deviation);
          if (!r.pass) {
            pass = false;
            std::printf("    failing: %s N=%d %s (%.3e)\n", spec.name().c_str(), n, r.name.c_str(), r.max_normalized);
          }
        }
      }
  const double t = seconds_since(t0);
  report(1, "commutation suites", pass && t <= kCommutationBudget,
         std::to_string(count) + " bracket families x 100 points, max residual/scale " + fmt("%.2e", worst) +
             " (tol 1e-9), " + fmt("%.1f", t) + " s (budget 30 s)");
}

void traces() {
  double worst = 0.0;
  bool pass = true;
  std::size_t count = 0;
  for (const auto& prm : {positive_params(), negative_params()})
    for (SystemId id : kAllSystems)
      for (int n : {2, 3, 5})
        for (const auto& r : trace_identity_check(make_system(id, n, prm), 100, kSeed, kTrace)) {
          ++count;
          worst = std::max(worst, r.max_relative_deviation);
          pass = pass && r.pass;
        }
  report(2, "trace and sum identities", pass,
         std::to_string(count) + " identities x 100 points, max relative deviation " + fmt("%.2e", worst) +
             " (tol 1e-10)");
}

void rank() {
  bool pass = true;
  double worst_fraction = 1.0, worst_sigma = INFINITY;
  for (const auto& prm : {positive_params(), negative_params()})
    for (SystemId id : kCurvedSystems)
      for (int n : {3, 4}) {
        const auto spec = make_system(id, n, prm);
        const auto rep = independence_rank(spec, independent_set(spec, 1), 50, kSeed, 2 * n - 1, kRankSigma);
        worst_fraction = std::min(worst_fraction, rep.full_rank_fraction);
        worst_sigma = std::min(worst_sigma, rep.min_relative_sigma);
        pass = pass && rep.expected_rank == 2 * n - 1 && rep.full_rank_fraction >= kRankFraction;
      }
  report(3, "functional independence", pass,
         "rank 2N-1 at " + fmt("%.0f%%", 100 * worst_fraction) + " of 50 points (worst case, need 95%), min sigma_{2N-1}/sigma_max " +
             fmt("%.2e", worst_sigma));
}

void geometry() {
  bool pass = true;
  double worst_rel = 0.0, worst_flat = 0.0, worst_origin = 0.0, worst_product = 0.0;
  std::vector<SystemParams> variants{positive_params(), negative_params()};
  for (const auto& prm : variants)
    for (SystemId id : kCurvedSystems)
      for (int n : {3, 4, 5}) {
        const auto spec = make_system(id, n, prm);
        const auto prof = conformal_factor(spec);
        const double lo = spec.domain.lower + 0.05;
        const double hi = spec.domain.bounded_above() ? spec.domain.upper - 0.05 : spec.domain.lower + 6.0;
        for (int k = 0; k < 50; ++k) {
          const double r = lo + (hi - lo) * k / 49.0;
          const double closed = scalar_curvature_closed(spec, r);
          const double rel = std::fabs(closed - scalar_curvature_oracle(prof, n, r)) / (1.0 + std::fabs(closed));
          worst_rel = std::max(worst_rel, rel);
          const auto u = intrinsic_potentials(spec, r);
          worst_product = std::max(worst_product, std::fabs(u.u_o * u.u_kc * u.u_kc - 1.0));
        }
        if (id == SystemId::DarbouxIII) {
          const double r0 = scalar_curvature_closed(spec, 0.0);
          worst_origin = std::max(worst_origin, std::fabs(r0 + 2.0 * prm.lambda * n * (n - 1)));
        }
      }
  for (SystemId id : {SystemId::CurvedKC, SystemId::SphericalOscillator}) {
    const auto spec = make_system(id, 2, positive_params());
    const auto prof = conformal_factor(spec);
    for (int k = 0; k < 50; ++k) {
      const double r = 0.1 + 0.1 * k;
      worst_flat = std::max({worst_flat, std::fabs(scalar_curvature_closed(spec, r)),
                             std::fabs(scalar_curvature_oracle(prof, 2, r))});
    }
  }
  pass = worst_rel <= kCurvatureRel && worst_flat <= kFlatCurvature && worst_origin == 0.0 &&
         worst_product <= kPotentialProduct;
  report(4, "geometry", pass,
         "closed vs oracle " + fmt("%.2e", worst_rel) + " (tol 1e-4), N=2 flatness " + fmt("%.2e", worst_flat) +
             " (tol 1e-7), Darboux R(0) error " + fmt("%.1e", worst_origin) + " (exact), |u_o u_kc^2 - 1| " +
             fmt("%.2e", worst_product) + " (tol 1e-12)");
}

void ks() {
  SystemParams prm;
  prm.alpha = 0.7;
  const auto kc = make_system(SystemId::CurvedKC, 2, prm);
  const auto so = make_system(SystemId::SphericalOscillator, 2, prm);
  const auto hk = hamiltonian_observable(kc), ho = hamiltonian_observable(so);
  const auto kep = kepler_image(prm.alpha), osc = oscillator_image(prm.alpha);
  std::mt19937_64 rng(kSeed);
  double symp = 0.0, kepler = 0.0, oscillator = 0.0, inverse = 0.0;
  int valid = 0;
  while (valid < 100) {
    auto x = sample_phase_point(kc, rng, 0.1);
    if (x.q[1] == 0.0) continue;
    x.q[1] = std::fabs(x.q[1]);  // the half plane where ks_inverse undoes ks_forward
    ++valid;
    symp = std::max({symp, symplectic_defect(ks_forward_map(), x), symplectic_defect(ks_inverse_map(), x)});
    const auto y = ks_forward(x);
    kepler = std::max(kepler, std::fabs(hk(x) - kep(y)) / (1.0 + std::fabs(hk(x))));
    const auto back = ks_inverse(y);
    for (std::size_t i = 0; i < 2; ++i)
      inverse = std::max({inverse, std::fabs(back.q[i] - x.q[i]), std::fabs(back.p[i] - x.p[i])});
    const auto w = sample_phase_point(so, rng, 0.1);
    if (w.q[1] == 0.0 && w.q[0] >= 0.0) continue;
    const auto z = ks_inverse(w);
    oscillator = std::max(oscillator, std::fabs(ho(w) - osc(z)) / (1.0 + std::fabs(ho(w))));
  }
  const bool pass = symp <= kKs && kepler <= kKs && oscillator <= kKs && inverse <= kKs;
  report(5, "Kustaanheimo-Stiefel equivalences", pass,
         "symplectic defect " + fmt("%.2e", symp) + ", KC image " + fmt("%.2e", kepler) + ", oscillator image " +
             fmt("%.2e", oscillator) + ", inverse composition " + fmt("%.2e", inverse) + " (tol 1e-10, 100 points)");
}

void dynamics() {
  const auto t0 = Clock::now();
  struct Run {
    SystemId id;
    SystemParams prm;
    PhaseState x0;
  };
  SystemParams kc, dx, so, tn;
  kc.alpha = 1.0;
  dx.alpha = -5.0;
  dx.lambda = 0.1;
  so.alpha = 1.0;
  tn.alpha = 1.0;
  tn.eta = 1.0;
  const PhaseState x0({1.0, 0.3, -0.2}, {0.2, 0.9, 0.4});
  const std::vector<Run> runs{{SystemId::CurvedKC, kc, x0},
                              {SystemId::DarbouxIII, dx, x0},
                              {SystemId::SphericalOscillator, so, x0},
                              {SystemId::TaubNut, tn, x0}};
  bool pass = true;
  double worst_drift = 0.0, worst_back = 0.0;
  for (const auto& run : runs) {
    const auto spec = make_system(run.id, 3, run.prm);
    const auto set = independent_set(spec, 1);
    const auto out = integrate_with_outcome(spec, run.x0, 50.0, kDynamicsTol, set);
    if (out.failure) {
      pass = false;
      std::printf("    %s: %s\n", spec.name().c_str(), out.message.c_str());
      continue;
    }
    for (const auto& d : drift_report(out.trajectory, set)) worst_drift = std::max(worst_drift, d.max_relative_drift);
    const auto back = integrate(spec, reverse_momenta(out.trajectory.states.back()), 50.0, kDynamicsTol);
    const auto end = reverse_momenta(back.states.back());
    for (std::size_t i = 0; i < 3; ++i)
      worst_back = std::max({worst_back, std::fabs(end.q[i] - run.x0.q[i]), std::fabs(end.p[i] - run.x0.p[i])});
  }
  const double t = seconds_since(t0);
  pass = pass && worst_drift <= kDrift && worst_back <= kReversal && t <= kDynamicsBudget;
  report(6, "dynamics", pass,
         "t=50 at tol 1e-10: max drift over the 2N-1 set " + fmt("%.2e", worst_drift) + " (tol 1e-6), reversal error " +
             fmt("%.2e", worst_back) + " (tol 1e-5), " + fmt("%.2f", t) + " s (budget 60 s)");
}

void quantum_checks() {
  const auto t0 = Clock::now();
  SystemParams prm;
  prm.alpha = 1.0;
  prm.lambda = 0.5;
  prm.eta = 1.0;
  bool pass = true, reproducible = true, hbar_identities = true;
  std::size_t verdicts = 0;
  double worst = 0.0;
  for (SystemId id : kCurvedSystems)
    for (int n : {2, 3}) {
      const auto sys = build_quantum_system(make_system(id, n, prm));
      const auto a = quantum_verdicts(sys, kMinConfidencePoints, kSeed);
      const auto b = quantum_verdicts(sys, kMinConfidencePoints, kSeed);
      for (std::size_t k = 0; k < a.size(); ++k) {
        ++verdicts;
        worst = std::max(worst, a[k].max_normalized);
        reproducible = reproducible && a[k].pass == b[k].pass && a[k].max_normalized == b[k].max_normalized;
        if (!a[k].pass) {
          pass = false;
          std::printf("    failing: %s N=%d %s\n", std::string(to_string(id)).c_str(), n, a[k].name.c_str());
        }
      }
      if (id == SystemId::SphericalOscillator || id == SystemId::TaubNut)
        hbar_identities = hbar_identities && a.back().pass;
    }
  const double t = seconds_since(t0);
  pass = pass && reproducible && hbar_identities && t <= kQuantumBudget;
  report(7, "quantum commutators and identities", pass,
         std::to_string(verdicts) + " verdicts at N=2,3 with 20 points, max normalized coefficient " + fmt("%.2e", worst) +
             ", hbar^2 identities (coefficients 1/2 and 2) " + (hbar_identities ? "hold" : "fail") + ", " +
             (reproducible ? "reproducible" : "NOT reproducible") + ", " + fmt("%.2f", t) + " s (budget 120 s)");
}

void oracle() {
  report(8, "finite-difference cross-validation", worst_oracle <= kOracle,
         "max |exact - fd| / scale over all bracket suites " + fmt("%.2e", worst_oracle) + " (tol 1e-5)");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> steps{commutation, traces, rank, geometry, ks, dynamics, quantum_checks, oracle};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      report(static_cast<int>(lines.size()) + 1, "criterion", false, std::string("exception: ") + e.what());
    }
  }
  int failed = 0;
  for (const auto& l : lines) failed += l.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(lines.size()) - failed, lines.size());
  return failed == 0 ? 0 : 1;
}
