#include <doctest.h>

#include <cmath>
#include <numbers>

#include "heatctl/config.hpp"
#include "heatctl/experiments.hpp"

using namespace heatctl;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("fit_decay recovers exact slopes") {
  std::vector<double> t, v;
  for (int k = 0; k <= 200; ++k) {
    t.push_back(0.01 * k);
    v.push_back(std::exp(-2.0 * 0.01 * k));
  }
  CHECK(std::abs(fit_decay(t, v, 0.5, 2.0) - (-2.0)) <= 1e-9);

  std::vector<double> c(t.size(), 3.7);
  CHECK(std::abs(fit_decay(t, c, 0.5, 2.0)) <= 1e-12);

  v[120] = 0.0;
  CHECK_THROWS_AS((void)fit_decay(t, v, 0.5, 2.0), ValidationError);
  CHECK_THROWS_AS((void)fit_decay(t, c, 5.0, 6.0), ValidationError);
}

TEST_CASE("presets carry the reference parameters") {
  const Scenario s4 = scenario_preset("section4");
  CHECK(s4.mode == SimMode::closed);
  CHECK(s4.c == 1.02);
  CHECK(s4.sigma == 0.1);
  CHECK(s4.m == 129);
  CHECK(s4.dt == 1e-4);
  CHECK(s4.horizon == 3.0);
  CHECK(s4.A(0, 1) == 2.0);
  CHECK(s4.A(1, 0) == -2.0);
  CHECK(s4.C(0) == 1.0);
  CHECK(s4.L(0) == -5.0);
  CHECK(s4.L(1) == -1.0);
  CHECK(s4.xi0(0) == 1.0);
  CHECK(s4.a_samples[0] == doctest::Approx(4.0 * kPi * kPi + 1.005).epsilon(1e-14));
  CHECK(s4.y0[0] == doctest::Approx(1.0));
  CHECK(s4.y0[64] == doctest::Approx(-1.0));  // cos(2 pi x) at x = 1/2
  CHECK(s4.y0[128] == doctest::Approx(1.0));
  const Scenario r2 = scenario_preset("remark2");
  CHECK(r2.mode == SimMode::open);
  CHECK(r2.xi0.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r2.horizon == 1.0);
  const Scenario cz = scenario_preset("coupledZeta");
  CHECK(cz.mode == SimMode::coupled);
  CHECK(cz.Z0 == 0.0);
  CHECK(cz.eta0(0) == -1.0);
  CHECK(cz.dt == 1e-3);
  CHECK_THROWS_AS((void)scenario_preset("section5"), ValidationError);
}

TEST_CASE("ensembles are deterministic and zero data gives zero statistics") {
  Scenario cz = scenario_preset("coupledZeta");
  cz.horizon = 0.3;
  const Ensemble a = run_ensemble(cz, 6, 99);
  const Ensemble b = run_ensemble(cz, 6, 99);
  CHECK(a.mean == b.mean);
  CHECK(a.se == b.se);
  CHECK(a.tail_slopes == b.tail_slopes);

  Scenario zero = cz;
  zero.Z0 = 0.0;
  zero.eta0 = Vector{{0.0, 0.0}};
  zero.xi0 = Vector{{0.0, 0.0}};
  const Ensemble z = run_ensemble(zero, 3, 1);
  for (double m : z.mean) CHECK(m == 0.0);
  for (double s : z.se) CHECK(s == 0.0);

  CHECK_THROWS_AS((void)run_ensemble(cz, 1, 1), ValidationError);
}

TEST_CASE("coupled ensemble satisfies the certified mean-square envelope") {
  Scenario cz = scenario_preset("coupledZeta");
  const Ensemble ens = run_ensemble(cz, 200, 31);
  const Simulator sim(cz);
  REQUIRE(sim.certificate() != nullptr);
  const double E0 = cz.Z0 * cz.Z0 + cz.eta0.squaredNorm();
  const BoundReport rep = check_coupled_bound(ens, *sim.certificate(), E0);
  CHECK(rep.certified);
  CHECK(rep.pass);
  CHECK(rep.max_margin <= 3.0);
  CHECK(rep.as_pass_fraction >= 0.95);
  CHECK_THROWS_AS((void)check_bound(ens, *sim.certificate(), GammaConstants{}), ValidationError);
}

TEST_CASE("noise beyond tolerance reports uncertified instead of checking silently") {
  Scenario cz = scenario_preset("coupledZeta");
  cz.sigma = 0.15;  // above min(1/sqrt(mu), sqrt(2(c-1)/3)) = 0.11547
  const Simulator sim(cz);
  CHECK(sim.certificate() == nullptr);
  const BoundReport rep = uncertified_report();
  CHECK_FALSE(rep.certified);
  const auto kv = bound_report_kv(rep);
  CHECK(kv.back().second == "uncertified");
  // the violating run itself still produces statistics
  cz.horizon = 0.5;
  const Ensemble ens = run_ensemble(cz, 10, 7);
  CHECK(ens.mean.front() > 0.0);
}

TEST_CASE("uncontrolled single path grows with a positive log slope") {
  Scenario sc = scenario_preset("remark2");
  sc.m = 65;
  sc.dt = 1e-3;
  resolve_scenario_fields(sc);
  const Trajectory tr = simulate_open_loop(sc, 21);
  CHECK(fit_decay(tr.t, tr.norm_sq, 0.5, 1.0) > 0.0);
  CHECK(tr.norm_sq.back() > tr.norm_sq.front());
}

TEST_CASE("open versus closed contrast on common random numbers") {
  Scenario closed = scenario_preset("section4");
  closed.m = 65;
  closed.dt = 5e-4;
  resolve_scenario_fields(closed);
  Scenario open = closed;
  open.mode = SimMode::open;
  open.horizon = 1.0;

  const std::uint64_t master = 12345;
  const Ensemble oe = run_ensemble(open, 20, master);
  CHECK(oe.mean.back() > oe.initial_mean);  // anti-stable growth by t = 1

  const Ensemble ce = run_ensemble(closed, 20, master);
  CHECK(ce.mean.back() <= 0.05 * ce.initial_mean);  // stabilized by t = 3
  CHECK(fit_decay(ce.t, ce.mean, 1.0, 3.0) <= -0.5);
  // common random numbers: path 0 of both ensembles shares one increment stream
  CHECK(derive_stream_seed(master, 0) == derive_stream_seed(master, 0));
}

TEST_CASE("closed-loop tail slopes certify the almost-sure rate") {
  Scenario sc = scenario_preset("section4");
  sc.m = 65;
  sc.dt = 1e-3;
  sc.horizon = 1.5;
  resolve_scenario_fields(sc);
  const Simulator sim(sc);
  const Ensemble ens = run_ensemble(sc, 24, 77);
  const GammaConstants g = scenario_gammas(sim);
  const BoundReport rep = check_bound(ens, *sim.certificate(), g);
  CHECK(rep.certified);
  CHECK(rep.pass);
  CHECK(rep.as_pass_fraction >= 0.95);
  CHECK(rep.gamma_star > 0.0);
}

TEST_CASE("target-system energy estimate holds with the recorded mismatch flux") {
  // closed-loop run provides the w-tilde series, then an independent target
  // ensemble must respect E||z||^2 <= (E||z0||^2 + (1/eps) int w~^2) with
  // eps = 0.5 (the growth factor is capped at 1 here since sigma^2 - 2c + 2eps < 0)
  Scenario sc = scenario_preset("section4");
  sc.m = 65;
  sc.dt = 5e-4;
  sc.horizon = 1.0;
  resolve_scenario_fields(sc);
  const Simulator sim(sc);
  const Trajectory closed = sim.run(2);
  std::vector<double> wt(closed.t.size() - 1);
  for (std::size_t k = 0; k < wt.size(); ++k) wt[k] = closed.w[k] - closed.w_hat[k];

  Scenario tsc = sc;
  tsc.mode = SimMode::target;
  tsc.y0 = apply_forward(*sim.transform(), sc.y0);
  const Ensemble ens = run_ensemble(tsc, 60, 404, 0, 0, wt);

  const double eps = 0.5;
  const double z0sq = ens.initial_mean;
  double cum = 0.0;
  std::size_t j = 0;
  for (std::size_t k = 0; k < ens.t.size(); ++k) {
    while (j + 1 < wt.size() && double(j + 1) * sc.dt <= ens.t[k] + 1e-12) {
      cum += 0.5 * sc.dt * (wt[j] * wt[j] + wt[j + 1] * wt[j + 1]);
      ++j;
    }
    const double bound = z0sq + cum / eps;
    CHECK(ens.mean[k] <= bound + 3.0 * ens.se[k] + 1e-12);
  }
}

TEST_CASE("ensembles fail when too many paths abort") {
  Scenario sc;
  sc.mode = SimMode::open;
  sc.m = 5;
  sc.dt = 1e-3;
  sc.horizon = 2.0;
  sc.c = 1.02;
  sc.sigma = 0.0;
  sc.A = Matrix(0, 0);
  sc.C = RowVector(0);
  sc.L = Vector(0);
  sc.xi0 = Vector(0);
  sc.a_form = "const 1500";
  sc.y0_form = "const 1";
  resolve_scenario_fields(sc);
  CHECK_THROWS_AS((void)run_ensemble(sc, 4, 1), NumericalAbort);
}
