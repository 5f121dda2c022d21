#include "heatctl/spde.hpp"

#include <cmath>
#include <numbers>

#include "heatctl/dynamics.hpp"
#include "heatctl/errors.hpp"
#include "heatctl/grid.hpp"

namespace heatctl {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(SimMode m) {
  switch (m) {
    case SimMode::open: return "open";
    case SimMode::closed: return "closed";
    case SimMode::target: return "target";
    case SimMode::coupled: return "coupled";
  }
  return "open";
}

SimMode sim_mode_from_string(const std::string& s) {
  if (s == "open") return SimMode::open;
  if (s == "closed") return SimMode::closed;
  if (s == "target") return SimMode::target;
  if (s == "coupled") return SimMode::coupled;
  throw ValidationError("unknown simulation mode: " + s);
}

void Scenario::validate() const {
  if (!(dt > 0.0)) throw ValidationError("Scenario: dt must be positive");
  if (!(horizon > 0.0)) throw ValidationError("Scenario: horizon must be positive");
  // noise accuracy bound; deterministic runs may use coarser steps
  if (sigma != 0.0 && dt > 1e-3 * (1.0 + 1e-12))
    throw ValidationError("Scenario: dt must not exceed 1e-3 when sigma != 0");
  const int n = exo_dim();
  if (A.cols() != n || C.cols() != n || L.rows() != n || xi0.rows() != n)
    throw ValidationError("Scenario: inconsistent exogenous dimensions");
  if (mode == SimMode::coupled) {
    if (eta0.rows() != n) throw ValidationError("Scenario: eta0 dimension mismatch");
    return;
  }
  if (m < 3) throw ValidationError("Scenario: need at least 3 spatial nodes");
  if (int(a_samples.size()) != m) throw ValidationError("Scenario: a_samples size != nodes");
  if (int(y0.size()) != m) throw ValidationError("Scenario: y0 size != nodes");
}

FieldStepper::FieldStepper(std::span<const double> a_samples, double c_shift, double sigma,
                           double dt, int m)
    : m_(m), dt_(dt), sigma_(sigma) {
  if (m < 3) throw ValidationError("FieldStepper: need at least 3 nodes");
  if (int(a_samples.size()) != m) throw ValidationError("FieldStepper: a_samples size != m");
  h_ = 1.0 / (m - 1);
  flux_coef_ = dt * 2.0 / h_;
  const double r = dt / (h_ * h_);

  std::vector<double> lo(m, -r), di(m), up(m, -r);
  up[0] = -2.0 * r;
  lo[m - 1] = -2.0 * r;
  for (int i = 0; i < m; ++i) di[i] = 1.0 + 2.0 * r - dt * (a_samples[i] - c_shift);

  mult_.assign(m, 0.0);
  dinv_.assign(m, 0.0);
  up_ = up;
  double d = di[0];
  if (d == 0.0) throw std::runtime_error("FieldStepper: singular tridiagonal system");
  dinv_[0] = 1.0 / d;
  for (int i = 1; i < m; ++i) {
    mult_[i] = lo[i] * dinv_[i - 1];
    d = di[i] - mult_[i] * up_[i - 1];
    if (d == 0.0) throw std::runtime_error("FieldStepper: singular tridiagonal system");
    dinv_[i] = 1.0 / d;
  }
}

void FieldStepper::step(std::vector<double>& y, double flux, double dB) const {
  const double scale = 1.0 + sigma_ * dB;
  double* v = y.data();
  for (int i = 0; i < m_; ++i) v[i] *= scale;
  v[m_ - 1] += flux_coef_ * flux;
  for (int i = 1; i < m_; ++i) v[i] -= mult_[i] * v[i - 1];
  v[m_ - 1] *= dinv_[m_ - 1];
  for (int i = m_ - 2; i >= 0; --i) v[i] = (v[i] - up_[i] * v[i + 1]) * dinv_[i];
}

std::vector<double> step_field(std::span<const double> y, double flux,
                               std::span<const double> a_samples, double c_shift, double sigma,
                               double dB, double dt) {
  if (!std::isfinite(dB)) throw ValidationError("step_field: non-finite increment");
  FieldStepper st(a_samples, c_shift, sigma, dt, int(y.size()));
  std::vector<double> out(y.begin(), y.end());
  st.step(out, flux, dB);
  return out;
}

Measurements measure(std::span<const double> y, const TransformPair& tp) {
  if (int(y.size()) != tp.n) throw ValidationError("measure: grid mismatch");
  const int n = tp.n;
  const double h = tp.h;
  Measurements m;
  m.y1 = y[n - 1];
  const std::vector<double> z = apply_forward(tp, y);
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = std::cos(kPi * i * h) * z[i];
  m.Z = trapezoid(f, h);
  for (int i = 0; i < n; ++i) f[i] = tp.kx1_trace[i] * y[i];
  m.avg_kx = trapezoid(f, h);
  return m;
}

Simulator::Simulator(const Scenario& sc, std::vector<double> w_tilde_series)
    : sc_(sc), w_tilde_(std::move(w_tilde_series)) {
  sc_.validate();
  steps_ = std::size_t(std::llround(sc_.horizon / sc_.dt));
  if (steps_ == 0) throw ValidationError("Simulator: horizon shorter than one step");

  const int n = sc_.exo_dim();
  // exogenous signal is deterministic: precompute w(t_k) once for all paths
  if (n > 0) {
    const ExoSeries exo = exo_series(sc_.xi0, sc_.dt, steps_, sc_.A, sc_.C);
    exo_w_ = exo.w;
    exo_xi_.resize((steps_ + 1) * std::size_t(n));
    for (std::size_t k = 0; k <= steps_; ++k)
      for (int i = 0; i < n; ++i) exo_xi_[k * std::size_t(n) + i] = exo.xi(Eigen::Index(k), i);
  } else {
    exo_w_.assign(steps_ + 1, 0.0);
  }
  Lrow_.assign(sc_.L.data(), sc_.L.data() + n);
  Crow_.assign(sc_.C.data(), sc_.C.data() + n);

  if (sc_.mode == SimMode::coupled) {
    Z0_ = sc_.Z0;
    eta0_.assign(sc_.eta0.data(), sc_.eta0.data() + n);
    PlantSpec ps{sc_.c, sc_.sigma, sc_.A, sc_.C, sc_.L, sc_.a_samples};
    ps.validate();  // structural hypotheses are not negotiable
    try {
      cert_ = std::make_unique<GainCertificate>(certify_gains(ps));
    } catch (const CertificationError&) {
      // noise beyond tolerance: the coupled system may still be simulated
      // for falsification studies, but the run is reported as uncertified
    }
    return;
  }

  trapw_ = trapezoid_weights(sc_.m);
  y0_ = sc_.y0;

  if (sc_.mode == SimMode::open) {
    stepper_ = std::make_unique<FieldStepper>(sc_.a_samples, 0.0, sc_.sigma, sc_.dt, sc_.m);
    return;
  }
  if (sc_.mode == SimMode::target) {
    const std::vector<double> zero_a(sc_.m, 0.0);
    stepper_ = std::make_unique<FieldStepper>(zero_a, sc_.c, sc_.sigma, sc_.dt, sc_.m);
    if (!w_tilde_.empty() && w_tilde_.size() < steps_)
      throw ValidationError("Simulator: w_tilde series shorter than the horizon");
    // measurement against cos(pi x) directly; the target state is already z
    zrow_.resize(sc_.m);
    for (int i = 0; i < sc_.m; ++i) zrow_[i] = trapw_[i] * std::cos(kPi * i / (sc_.m - 1));
    return;
  }

  // closed loop
  PlantSpec ps{sc_.c, sc_.sigma, sc_.A, sc_.C, sc_.L, sc_.a_samples};
  cert_ = std::make_unique<GainCertificate>(certify_gains(ps));
  kernel_ = std::make_unique<Kernel>(solve_kernel(sc_.a_samples, sc_.c, sc_.m));
  tp_ = std::make_unique<TransformPair>(build_transform(*kernel_));
  stepper_ = std::make_unique<FieldStepper>(sc_.a_samples, 0.0, sc_.sigma, sc_.dt, sc_.m);

  // Z functional collapsed to one row: trapz(cos(pi x) . (T y)) = (T^t q) . y
  std::vector<double> q(sc_.m);
  for (int i = 0; i < sc_.m; ++i) q[i] = trapw_[i] * std::cos(kPi * i / (sc_.m - 1));
  zrow_ = apply_forward_transpose(*tp_, q);
  kxrow_.resize(sc_.m);
  for (int i = 0; i < sc_.m; ++i) kxrow_[i] = trapw_[i] * kernel_->kx1_trace[i];

  {
    const Matrix alc = sc_.A + sc_.L * sc_.C;
    auto [phi, psi] = zoh_propagators(alc, sc_.dt);
    obs_phi_.resize(std::size_t(n) * n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) obs_phi_[std::size_t(r) * n + c] = phi(r, c);
    const Vector gz = alc * sc_.L + (sc_.c + kPi * kPi) * sc_.L;
    const Vector pg = psi * gz;
    const Vector pl = psi * sc_.L;
    obs_psi_gz_.assign(pg.data(), pg.data() + n);
    obs_psi_L_.assign(pl.data(), pl.data() + n);
  }

  // the observer starts from a zero disturbance estimate: theta0 = -L Z(0)
  Z0_ = dot(zrow_, y0_);
  theta0_.resize(n);
  for (int i = 0; i < n; ++i) theta0_[i] = -Lrow_[i] * Z0_;
  eta0_.resize(n);
  for (int i = 0; i < n; ++i) eta0_[i] = -sc_.xi0(i);
}

std::vector<double> Simulator::record_times(int stride) const {
  std::vector<double> t;
  for (std::size_t k = 0; k <= steps_; k += stride) t.push_back(double(k) * sc_.dt);
  if ((steps_ % stride) != 0) t.push_back(double(steps_) * sc_.dt);
  return t;
}

void Simulator::run_impl(std::uint64_t seed, Trajectory* traj, PathSeries* series,
                         int stride) const {
  const int n = sc_.exo_dim();
  const double dt = sc_.dt;
  const BrownianPath path = brownian_path(seed, dt, steps_);

  auto want_record = [&](std::size_t k) {
    return (k % std::size_t(stride)) == 0 || k == steps_;
  };

  if (sc_.mode == SimMode::coupled) {
    std::vector<double> Zeta(std::size_t(n) + 1), next(std::size_t(n) + 1);
    Zeta[0] = Z0_;
    for (int i = 0; i < n; ++i) Zeta[std::size_t(i) + 1] = eta0_[i];
    const Matrix M = build_M(sc_.c, sc_.A, sc_.L, sc_.C);
    for (std::size_t k = 0; k <= steps_; ++k) {
      if (want_record(k)) {
        double nrm = 0.0;
        for (double v : Zeta) nrm += v * v;
        double ceta = 0.0;
        for (int i = 0; i < n; ++i) ceta += Crow_[i] * Zeta[std::size_t(i) + 1];
        if (traj) {
          traj->t.push_back(double(k) * dt);
          traj->norm_sq.push_back(nrm);
          traj->Z.push_back(Zeta[0]);
          traj->w.push_back(exo_w_[k]);
          traj->w_hat.push_back(exo_w_[k] + ceta);
          traj->y1.push_back(0.0);
          traj->u.push_back(0.0);
          traj->exo_dim = n;
          for (int i = 0; i < n; ++i) traj->eta.push_back(Zeta[std::size_t(i) + 1]);
        }
        if (series) {
          series->value.push_back(nrm);
          series->west.push_back(std::abs(ceta));
        }
        if (!std::isfinite(nrm)) throw NumericalAbort("coupled path diverged", long(k));
      }
      if (k == steps_) break;
      const double dB = path.increments[k];
      for (int r = 0; r <= n; ++r) {
        double s = 0.0;
        for (int c = 0; c <= n; ++c) s += M(r, c) * Zeta[std::size_t(c)];
        next[std::size_t(r)] = Zeta[std::size_t(r)] + dt * s;
      }
      next[0] += sc_.sigma * Zeta[0] * dB;
      for (int i = 0; i < n; ++i) next[std::size_t(i) + 1] += sc_.sigma * Lrow_[i] * Zeta[0] * dB;
      Zeta.swap(next);
    }
    return;
  }

  const int m = sc_.m;
  std::vector<double> y = y0_;
  std::vector<double> theta = theta0_, theta_next(theta0_.size());
  std::vector<double> sq(m);
  double B = 0.0;

  const bool closed = sc_.mode == SimMode::closed;
  const bool target = sc_.mode == SimMode::target;
  const double k11 = closed ? kernel_->k11 : 0.0;

  for (std::size_t k = 0; k <= steps_; ++k) {
    const double wt = exo_w_[k];
    double Z = 0.0, w_hat = 0.0, u = 0.0;
    if (closed) {
      Z = dot(zrow_, y);
      if (!std::isfinite(Z)) throw NumericalAbort("closed-loop path diverged", long(k));
      for (int i = 0; i < n; ++i) w_hat += Crow_[i] * (theta[std::size_t(i)] + Lrow_[i] * Z);
      u = dobc_control(y[std::size_t(m) - 1], dot(kxrow_, y), k11, w_hat);
    } else if (target) {
      Z = dot(zrow_, y);
    }

    const bool rec = want_record(k);
    double nrm = 0.0;
    if (rec) {
      for (int i = 0; i < m; ++i) sq[std::size_t(i)] = y[std::size_t(i)] * y[std::size_t(i)];
      nrm = trapezoid(sq, stepper_->h());
      if (!std::isfinite(nrm)) throw NumericalAbort("path diverged", long(k));
      if (traj) {
        traj->t.push_back(double(k) * dt);
        traj->norm_sq.push_back(nrm);
        traj->y1.push_back(y[std::size_t(m) - 1]);
        traj->Z.push_back(Z);
        traj->w.push_back(target ? 0.0 : wt);
        traj->w_hat.push_back(w_hat);
        traj->u.push_back(u);
        traj->brownian.push_back(B);
        if (closed) {
          traj->exo_dim = n;
          for (int i = 0; i < n; ++i)
            traj->eta.push_back(theta[std::size_t(i)] + Lrow_[i] * Z -
                                exo_xi_[k * std::size_t(n) + i]);
        }
      }
      if (series) {
        series->value.push_back(nrm);
        series->west.push_back(std::abs(w_hat - (target ? 0.0 : wt)));
      }
    }
    if (traj && sc_.snapshot_stride > 0 &&
        (k % std::size_t(sc_.snapshot_stride) == 0 || k == steps_)) {
      traj->snapshot_t.push_back(double(k) * dt);
      traj->snapshot_y.push_back(y);
    }
    if (k == steps_) break;

    double flux = 0.0;
    if (closed)
      flux = u + wt;
    else if (target)
      flux = w_tilde_.empty() ? 0.0 : w_tilde_[k];
    else
      flux = wt;

    const double dB = path.increments[k];
    stepper_->step(y, flux, dB);
    B += dB;

    if (closed && n > 0) {
      const double u0 = -w_hat;
      for (int r = 0; r < n; ++r) {
        double s = obs_psi_gz_[std::size_t(r)] * Z + obs_psi_L_[std::size_t(r)] * u0;
        for (int c = 0; c < n; ++c)
          s += obs_phi_[std::size_t(r) * n + c] * theta[std::size_t(c)];
        theta_next[std::size_t(r)] = s;
      }
      theta.swap(theta_next);
    }
  }
}

Trajectory Simulator::run(std::uint64_t seed) const {
  Trajectory traj;
  run_impl(seed, &traj, nullptr, 1);
  return traj;
}

PathSeries Simulator::run_series(std::uint64_t seed, int record_stride) const {
  if (record_stride < 1) throw ValidationError("run_series: stride must be >= 1");
  PathSeries s;
  run_impl(seed, nullptr, &s, record_stride);
  return s;
}

Trajectory simulate_closed_loop(const Scenario& sc, std::uint64_t seed) {
  Scenario s = sc;
  s.mode = SimMode::closed;
  return Simulator(s).run(seed);
}

Trajectory simulate_open_loop(const Scenario& sc, std::uint64_t seed) {
  Scenario s = sc;
  s.mode = SimMode::open;
  return Simulator(s).run(seed);
}

Trajectory simulate_target(const Scenario& sc, std::uint64_t seed,
                           std::span<const double> w_tilde_series) {
  Scenario s = sc;
  s.mode = SimMode::target;
  return Simulator(s, std::vector<double>(w_tilde_series.begin(), w_tilde_series.end())).run(seed);
}

}  // namespace heatctl
