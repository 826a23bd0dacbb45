#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

/// Deterministic parallel primitives.
///
/// Every quadrature sum in this project follows the same discipline: workers
/// fill a per-element buffer (element i is written by exactly one worker, so
/// the stored values are identical for any worker count), and the reduction is
/// a serial pairwise tree over that buffer. The tree shape depends only on the
/// element count, never on scheduling, so results are bit-identical across
/// runs and across worker counts -- and the pairwise tree keeps the rounding
/// error at O(log N) rather than the O(N) of a left-to-right sum.
namespace lpmk {

/// Resolve a requested worker count: values <= 0 mean "all available".
inline int resolve_workers(int requested) {
#ifdef _OPENMP
  if (requested <= 0) return omp_get_max_threads();
  return requested;
#else
  (void)requested;
  return 1;
#endif
}

/// Run body(i) for i in [0, count) on `workers` threads (static schedule).
template <class F>
void parallel_for(std::size_t count, int workers, F&& body) {
  const int nw = resolve_workers(workers);
#ifdef _OPENMP
  if (nw > 1) {
#pragma omp parallel for schedule(static) num_threads(nw)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  (void)nw;
  for (std::size_t i = 0; i < count; ++i) body(i);
}

/// Serial reference loop with the same signature as parallel_for.
template <class F>
void serial_for(std::size_t count, F&& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

/// Pairwise (cascade) sum of data[0..count). The recursion splits at fixed
/// midpoints, so the association tree is a pure function of count.
inline double pairwise_sum(const double* data, std::size_t count) {
  constexpr std::size_t kBase = 32;
  if (count <= kBase) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

inline double pairwise_sum(const std::vector<double>& data) {
  return pairwise_sum(data.data(), data.size());
}

/// Deterministic map-reduce: sum of term(i) over i in [0, count).
/// The map runs on `workers` threads; the reduction is the serial pairwise
/// tree, so the result does not depend on the worker count.
template <class F>
double sum_terms(std::size_t count, int workers, F&& term) {
  std::vector<double> buf(count);
  parallel_for(count, workers, [&](std::size_t i) { buf[i] = term(i); });
  return pairwise_sum(buf.data(), buf.size());
}

/// Serial reference implementation of sum_terms (identical tree, one thread).
template <class F>
double sum_terms_serial(std::size_t count, F&& term) {
  std::vector<double> buf(count);
  for (std::size_t i = 0; i < count; ++i) buf[i] = term(i);
  return pairwise_sum(buf.data(), buf.size());
}

/// Deterministic max-reduce (max is associative/commutative, so ordering is
/// harmless; kept parallel-buffered for symmetry with sum_terms).
template <class F>
double max_terms(std::size_t count, int workers, F&& term) {
  if (count == 0) throw std::invalid_argument("max_terms: empty range");
  std::vector<double> buf(count);
  parallel_for(count, workers, [&](std::size_t i) { buf[i] = term(i); });
  double best = buf[0];
  for (std::size_t i = 1; i < count; ++i)
    if (buf[i] > best) best = buf[i];
  return best;
}

}  // namespace lpmk
