#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "lpmk/parallel.hpp"
#include "lpmk/pohozaev.hpp"
#include "lpmk/sphere_function.hpp"
#include "lpmk/sphere_geometry.hpp"
#include "lpmk/support_function.hpp"
#include "lpmk/variational.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Run fn repeatedly for at least min_seconds and report seconds per call.
template <class F>
double time_call(F&& fn, double min_seconds = 0.5) {
  // Warm-up call keeps one-time allocation out of the measurement.
  fn();
  int reps = 0;
  const auto t0 = Clock::now();
  double elapsed = 0.0;
  do {
    fn();
    ++reps;
    elapsed = seconds_since(t0);
  } while (elapsed < min_seconds);
  return elapsed / reps;
}

void report(const std::string& name, double serial, double parallel) {
  std::printf("%-34s serial %9.4f ms   parallel %9.4f ms   speedup %.2fx\n",
              name.c_str(), 1e3 * serial, 1e3 * parallel, serial / parallel);
}

void bench_identity_integral(int workers) {
  const lpmk::SphereGrid grid(2, 192);
  const lpmk::ConstantFunction f(2, 1.0);
  const lpmk::SupportFunction h = lpmk::SupportFunction::constant(2, 1.0);
  const lpmk::ProjectiveField pf = lpmk::random_projective_field(2, 7);
  double sink = 0.0;
  const double serial = time_call(
      [&] { sink += lpmk::identity_integral(f, h, -4.0, pf, grid, 1); });
  const double parallel = time_call(
      [&] { sink += lpmk::identity_integral(f, h, -4.0, pf, grid, workers); });
  report("identity integral (n=2, res 192)", serial, parallel);
  if (sink == 0.12345) std::printf("unreachable\n");
}

void bench_gradient(int workers) {
  lpmk::OptimizerSettings serial_settings;
  serial_settings.workers = 1;
  lpmk::OptimizerSettings parallel_settings;
  parallel_settings.workers = workers;
  const lpmk::VariationalProblem serial_prob(2, -10.0, 10, 48, serial_settings);
  const lpmk::VariationalProblem parallel_prob(2, -10.0, 10, 48, parallel_settings);
  std::vector<double> c = serial_prob.seed_coefficients(0.05);
  serial_prob.normalize_in_place(c);
  double sink = 0.0;
  const double serial = time_call([&] { sink += serial_prob.composite_gradient(c, 1.0)[1]; });
  const double parallel =
      time_call([&] { sink += parallel_prob.composite_gradient(c, 1.0)[1]; });
  report("objective gradient (n=2, L=10)", serial, parallel);
  if (sink == 0.12345) std::printf("unreachable\n");
}

void bench_sum_terms(int workers) {
  constexpr std::size_t kCount = 1 << 22;
  const auto term = [](std::size_t i) {
    const double x = 1e-6 * static_cast<double>(i);
    return std::sin(x) / (1.0 + x * x);
  };
  double sink = 0.0;
  const double serial = time_call([&] { sink += lpmk::sum_terms_serial(kCount, term); });
  const double parallel =
      time_call([&] { sink += lpmk::sum_terms(kCount, workers, term); });
  report("map-reduce sum (4M terms)", serial, parallel);
  if (sink == 0.12345) std::printf("unreachable\n");
}

}  // namespace

int main(int argc, char** argv) {
  const int workers = argc > 1 ? std::atoi(argv[1]) : 0;
  std::printf("workers: %d (0 = all cores)\n", workers);
  bench_sum_terms(workers);
  bench_identity_integral(workers);
  bench_gradient(workers);
  return 0;
}
