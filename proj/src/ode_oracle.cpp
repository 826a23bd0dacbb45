#include "lpmk/ode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lpmk/sphere_function.hpp"
#include "lpmk/sphere_geometry.hpp"

namespace lpmk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTargetPeriod = 2.0 * kPi / 3.0;
constexpr double kTol = 1e-12;
constexpr int kLiftModes = 72;
constexpr int kLiftNodes = 2048;

struct State {
  double h = 0.0;
  double dh = 0.0;
};

State rhs(double p, const State& y) { return {y.dh, std::pow(y.h, p - 1.0) - y.h}; }

double energy(double p, const State& y) {
  return 0.5 * y.dh * y.dh + 0.5 * y.h * y.h - std::pow(y.h, p) / p;
}

/// One accepted step with its fourth-order dense-output polynomial.
struct Step {
  double t0 = 0.0;
  double dt = 0.0;
  State y0{};
  State y1{};
  double r1[2], r2[2], r3[2], r4[2], r5[2];

  State eval(double t) const {
    const double s = (t - t0) / dt;
    const double s1 = 1.0 - s;
    State out;
    out.h = r1[0] + s * (r2[0] + s1 * (r3[0] + s * (r4[0] + s1 * r5[0])));
    out.dh = r1[1] + s * (r2[1] + s1 * (r3[1] + s * (r4[1] + s1 * r5[1])));
    return out;
  }
};

/// Adaptive Dormand-Prince (5th order, FSAL) integrator for the orbit ODE.
class Integrator {
 public:
  Integrator(double p, State y) : p_(p), y_(y), k1_(rhs(p, y)) {}

  double t() const { return t_; }
  const State& y() const { return y_; }

  /// Advance by one accepted step no longer than max_dt.
  Step step(double max_dt) {
    for (;;) {
      if (++attempts_ > 4000000) {
        throw std::runtime_error("orbit integration exceeded its step budget");
      }
      const double dt = std::min(dt_, max_dt);
      const State k1 = k1_;
      const State k2 = rhs(p_, advance(dt, {0.2}, {&k1}));
      const State k3 = rhs(p_, advance(dt, {3.0 / 40, 9.0 / 40}, {&k1, &k2}));
      const State k4 = rhs(p_, advance(dt, {44.0 / 45, -56.0 / 15, 32.0 / 9}, {&k1, &k2, &k3}));
      const State k5 = rhs(p_, advance(dt, {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
                                       {&k1, &k2, &k3, &k4}));
      const State k6 =
          rhs(p_, advance(dt, {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
                          {&k1, &k2, &k3, &k4, &k5}));
      const State y1 = advance(dt, {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
                               {&k1, &k2, &k3, &k4, &k5, &k6});
      const State k7 = rhs(p_, y1);

      const double eh = dt * (71.0 / 57600 * k1.h - 71.0 / 16695 * k3.h + 71.0 / 1920 * k4.h -
                              17253.0 / 339200 * k5.h + 22.0 / 525 * k6.h - 1.0 / 40 * k7.h);
      const double edh = dt * (71.0 / 57600 * k1.dh - 71.0 / 16695 * k3.dh + 71.0 / 1920 * k4.dh -
                               17253.0 / 339200 * k5.dh + 22.0 / 525 * k6.dh - 1.0 / 40 * k7.dh);
      const double sk_h = kTol + kTol * std::max(std::abs(y_.h), std::abs(y1.h));
      const double sk_dh = kTol + kTol * std::max(std::abs(y_.dh), std::abs(y1.dh));
      const double err = std::sqrt(0.5 * ((eh / sk_h) * (eh / sk_h) + (edh / sk_dh) * (edh / sk_dh)));

      if (err <= 1.0) {
        Step st;
        st.t0 = t_;
        st.dt = dt;
        st.y0 = y_;
        st.y1 = y1;
        build_dense(st, dt, k1, k3, k4, k5, k6, k7);
        t_ += dt;
        y_ = y1;
        k1_ = k7;
        dt_ = dt * std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        return st;
      }
      dt_ = dt * std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }

 private:
  State advance(double dt, std::initializer_list<double> coef, std::initializer_list<const State*> ks) const {
    State out = y_;
    auto c = coef.begin();
    for (const State* k : ks) {
      out.h += dt * *c * k->h;
      out.dh += dt * *c * k->dh;
      ++c;
    }
    return out;
  }

  void build_dense(Step& st, double dt, const State& k1, const State& k3, const State& k4,
                   const State& k5, const State& k6, const State& k7) const {
    constexpr double d1 = -12715105075.0 / 11282082432.0;
    constexpr double d3 = 87487479700.0 / 32700410799.0;
    constexpr double d4 = -10690763975.0 / 1880347072.0;
    constexpr double d5 = 701980252875.0 / 199316789632.0;
    constexpr double d6 = -1453857185.0 / 822651844.0;
    constexpr double d7 = 69997945.0 / 29380423.0;
    const double y0c[2] = {st.y0.h, st.y0.dh};
    const double y1c[2] = {st.y1.h, st.y1.dh};
    const double k1c[2] = {k1.h, k1.dh};
    const double k7c[2] = {k7.h, k7.dh};
    const double kd[2] = {d1 * k1.h + d3 * k3.h + d4 * k4.h + d5 * k5.h + d6 * k6.h + d7 * k7.h,
                          d1 * k1.dh + d3 * k3.dh + d4 * k4.dh + d5 * k5.dh + d6 * k6.dh + d7 * k7.dh};
    for (int c = 0; c < 2; ++c) {
      const double dy = y1c[c] - y0c[c];
      st.r1[c] = y0c[c];
      st.r2[c] = dy;
      st.r3[c] = dt * k1c[c] - dy;
      st.r4[c] = dy - dt * k7c[c] - st.r3[c];
      st.r5[c] = dt * kd[c];
    }
  }

  double p_;
  double t_ = 0.0;
  State y_;
  State k1_;
  double dt_ = 1e-3;
  std::size_t attempts_ = 0;
};

void check_orbit_start(double p, double h0) {
  if (!(p < 2.0)) throw std::invalid_argument("orbit ODE: requires p < 2");
  if (!(h0 > 0.0)) throw std::invalid_argument("orbit ODE: h0 must be positive");
  if (std::abs(h0 - 1.0) < 1e-13) {
    throw std::invalid_argument("orbit ODE: h0 = 1 is the equilibrium; no turning points");
  }
}

/// Times and heights of the first `count` upward turning points (dh crossing
/// zero from below). The initial stationary point has dh = 0, not dh < 0, so
/// it never registers.
std::vector<std::pair<double, double>> rising_events(double p, double h0, int count) {
  check_orbit_start(p, h0);
  Integrator integ(p, {h0, 0.0});
  std::vector<std::pair<double, double>> events;
  const double t_cap = 1e4;
  while (static_cast<int>(events.size()) < count) {
    if (integ.t() > t_cap) {
      throw std::runtime_error("orbit integration exceeded the time horizon without enough turning points");
    }
    const Step st = integ.step(1e300);
    if (st.y0.dh < 0.0 && st.y1.dh >= 0.0) {
      double a = st.t0;
      double b = st.t0 + st.dt;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (a + b);
        if (st.eval(mid).dh < 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      const double te = 0.5 * (a + b);
      events.emplace_back(te, st.eval(te).h);
    }
  }
  return events;
}

}  // namespace

double period_limit(double p) {
  if (!(p < 2.0)) throw std::invalid_argument("orbit ODE: requires p < 2");
  return 2.0 * kPi / std::sqrt(2.0 - p);
}

double period_map(double p, double h0) {
  const auto events = rising_events(p, h0, 2);
  return events[1].first - events[0].first;
}

double max_energy_drift(double p, double h0, double duration) {
  check_orbit_start(p, h0);
  Integrator integ(p, {h0, 0.0});
  const double e0 = energy(p, {h0, 0.0});
  double drift = 0.0;
  while (integ.t() < duration - 1e-13) {
    integ.step(duration - integ.t());
    drift = std::max(drift, std::abs(energy(p, integ.y()) - e0));
  }
  return drift;
}

bool symmetric_solution_exists(double p) { return period_map(p, 1.0 + 1e-4) < kTargetPeriod; }

std::optional<SymmetricSolution> find_symmetric_solution(double p) {
  if (!symmetric_solution_exists(p)) return std::nullopt;
  const auto gap = [&](double a) { return period_map(p, a) - kTargetPeriod; };

  double lo = 1.0 + 1e-4;
  double hi = 1.1;
  while (gap(hi) <= 0.0) {
    lo = hi;
    hi *= 1.5;
    if (hi > 1e3) throw std::runtime_error("three-fold orbit: no amplitude bracket found");
  }
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double h0 = 0.5 * (lo + hi);

  // Sample one period densely at the wrapped positions of the projection
  // grid, then project onto Fourier modes.
  std::vector<double> theta(kLiftNodes), tau(kLiftNodes), samples(kLiftNodes);
  std::vector<int> order(kLiftNodes);
  for (int j = 0; j < kLiftNodes; ++j) {
    theta[static_cast<std::size_t>(j)] = 2.0 * kPi * (j + 0.5) / kLiftNodes;
    tau[static_cast<std::size_t>(j)] = std::fmod(theta[static_cast<std::size_t>(j)], kTargetPeriod);
    order[static_cast<std::size_t>(j)] = j;
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return tau[static_cast<std::size_t>(a)] < tau[static_cast<std::size_t>(b)]; });

  Integrator integ(p, {h0, 0.0});
  std::size_t cursor = 0;
  double h_min = h0;
  while (integ.t() < kTargetPeriod - 1e-13) {
    const Step st = integ.step(kTargetPeriod - integ.t());
    const double t1 = st.t0 + st.dt;
    while (cursor < order.size() && tau[static_cast<std::size_t>(order[cursor])] <= t1 + 1e-15) {
      const double tq = tau[static_cast<std::size_t>(order[cursor])];
      samples[static_cast<std::size_t>(order[cursor])] = st.eval(tq).h;
      ++cursor;
    }
    h_min = std::min(h_min, st.y1.h);
  }
  if (cursor != order.size()) throw std::runtime_error("three-fold orbit: sampling did not cover the period");

  std::vector<double> coeffs(2 * kLiftModes + 1, 0.0);
  for (int j = 0; j < kLiftNodes; ++j) coeffs[0] += samples[static_cast<std::size_t>(j)];
  coeffs[0] /= kLiftNodes;
  for (int k = 1; k <= kLiftModes; ++k) {
    double ak = 0.0;
    double bk = 0.0;
    for (int j = 0; j < kLiftNodes; ++j) {
      ak += samples[static_cast<std::size_t>(j)] * std::cos(k * theta[static_cast<std::size_t>(j)]);
      bk += samples[static_cast<std::size_t>(j)] * std::sin(k * theta[static_cast<std::size_t>(j)]);
    }
    coeffs[static_cast<std::size_t>(2 * k - 1)] = 2.0 * ak / kLiftNodes;
    coeffs[static_cast<std::size_t>(2 * k)] = 2.0 * bk / kLiftNodes;
  }

  // Refine h_min with the exact turning point and the objective with the
  // Parseval form of V = (1/2) integral (h^2 - h'^2).
  const auto events = rising_events(p, h0, 1);
  h_min = events[0].second;
  double vol = 2.0 * kPi * coeffs[0] * coeffs[0];
  for (int k = 1; k <= kLiftModes; ++k) {
    const double ak = coeffs[static_cast<std::size_t>(2 * k - 1)];
    const double bk = coeffs[static_cast<std::size_t>(2 * k)];
    vol += kPi * (1.0 - static_cast<double>(k) * k) * (ak * ak + bk * bk);
  }
  vol *= 0.5;

  SupportFunction lift = SupportFunction::fourier(coeffs);
  const SphereGrid grid(1, kLiftNodes);
  const ConstantFunction one(1, 1.0);
  const double residual = ma_residual(lift, one, p, grid);

  SymmetricSolution sol{p, h0, kTargetPeriod, h_min, h0, -2.0 * vol, residual, std::move(lift)};
  return sol;
}

double bifurcation_point(double p_exists, double p_absent, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bifurcation: tolerance must be positive");
  if (!symmetric_solution_exists(p_exists)) {
    throw std::invalid_argument("bifurcation: no three-fold orbit at the supposed existence endpoint");
  }
  if (symmetric_solution_exists(p_absent)) {
    throw std::invalid_argument("bifurcation: a three-fold orbit exists at the supposed absence endpoint");
  }
  double lo = p_exists;
  double hi = p_absent;
  while (std::abs(hi - lo) > tol) {
    const double mid = 0.5 * (lo + hi);
    if (symmetric_solution_exists(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CrossValidation cross_validate(const SupportFunction& reference, double p_ref,
                               const SupportFunction& candidate, double p_cand, double lambda) {
  if (reference.n() != 1 || candidate.n() != 1) {
    throw std::invalid_argument("cross_validate: the orbit oracle is planar (n = 1)");
  }
  if (p_ref != p_cand) {
    throw std::invalid_argument("cross_validate: exponent mismatch between reference and candidate");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("cross_validate: lambda must be positive");

  CrossValidation out;
  out.scale = std::pow(lambda, 1.0 / (p_ref - 2.0));
  SupportFunction scaled = candidate.scaled(out.scale);

  const auto mode3 = [](const SupportFunction& u) {
    const std::vector<double>& c = u.coefficients();
    double a3 = c.size() > 5 ? c[5] : 0.0;
    double b3 = c.size() > 6 ? c[6] : 0.0;
    return std::pair<double, double>(a3, b3);
  };
  const auto [ra3, rb3] = mode3(reference);
  const auto [ca3, cb3] = mode3(scaled);
  if (std::hypot(ra3, rb3) > 1e-10 && std::hypot(ca3, cb3) > 1e-10) {
    out.rotation = (std::atan2(cb3, ca3) - std::atan2(rb3, ra3)) / 3.0;
    const double cr = std::cos(out.rotation);
    const double sr = std::sin(out.rotation);
    scaled = scaled.rotated({{cr, -sr}, {sr, cr}});
  }

  double dist = 0.0;
  constexpr int kProbe = 4096;
  for (int j = 0; j < kProbe; ++j) {
    const double th = 2.0 * kPi * (j + 0.5) / kProbe;
    dist = std::max(dist, std::abs(reference.value_angle(th) - scaled.value_angle(th)));
  }
  out.distance = dist;
  return out;
}

}  // namespace lpmk
