#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sense/errors.hpp"

namespace sense {

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool log = false;
};

inline std::vector<double> make_grid(const GridSpec& g) {
  if (g.count < 2) fail(errc::config_error, "grid count must be >= 2");
  if (!(g.start < g.stop)) fail(errc::config_error, "grid start must be < stop");
  if (g.log && !(g.start > 0.0)) fail(errc::config_error, "log grid requires start > 0");
  std::vector<double> xs(g.count);
  if (g.log) {
    const double la = std::log(g.start), lb = std::log(g.stop);
    for (int i = 0; i < g.count; ++i) xs[i] = std::exp(la + (lb - la) * i / (g.count - 1));
  } else {
    for (int i = 0; i < g.count; ++i) xs[i] = g.start + (g.stop - g.start) * i / (g.count - 1);
  }
  xs.front() = g.start;
  xs.back() = g.stop;
  return xs;
}

/// Chunked worker pool over [0, n). Results must be written into
/// preassigned slots; assembly order never depends on scheduling.
template <typename F>
inline void parallel_for(std::size_t n, F&& f, unsigned jobs = 0) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += jobs) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Insert 10x-density points around each strict interior local minimum of
/// `values`, up to `rounds` times, re-evaluating through `eval`. Returns the
/// merged sorted grid and values.
inline void refine_around_minima(std::vector<double>& xs, std::vector<double>& values,
                                 const std::function<double(double)>& eval, int rounds = 1,
                                 std::size_t max_points = 1 << 20) {
  for (int round = 0; round < rounds; ++round) {
    std::set<double> extra;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      if (values[i] < values[i - 1] && values[i] < values[i + 1]) {
        for (int k = 1; k < 10; ++k) {
          extra.insert(xs[i - 1] + (xs[i] - xs[i - 1]) * k / 10.0);
          extra.insert(xs[i] + (xs[i + 1] - xs[i]) * k / 10.0);
        }
      }
    }
    if (extra.empty() || xs.size() + extra.size() > max_points) return;
    std::vector<double> nx(extra.begin(), extra.end());
    std::vector<double> nv(nx.size());
    parallel_for(nx.size(), [&](std::size_t i) { nv[i] = eval(nx[i]); });
    std::vector<double> mx, mv;
    mx.reserve(xs.size() + nx.size());
    mv.reserve(xs.size() + nx.size());
    std::size_t a = 0, b = 0;
    while (a < xs.size() || b < nx.size()) {
      if (b == nx.size() || (a < xs.size() && xs[a] <= nx[b])) {
        mx.push_back(xs[a]);
        mv.push_back(values[a]);
        ++a;
      } else {
        mx.push_back(nx[b]);
        mv.push_back(nv[b]);
        ++b;
      }
    }
    xs = std::move(mx);
    values = std::move(mv);
  }
}

struct MinimumReport {
  double omega_star = 0.0;
  double S_star = 0.0;
  int refinement_iterations = 0;
  double bracket_width = 0.0;
};

/// Coarse-grid scan over [lo, hi] followed by golden-section refinement of
/// the interior minimum. Converges far below the 1e-6 reporting threshold so
/// the result is insensitive to the coarse grid density.
inline MinimumReport minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                                     int coarse_count = 2001, double tol = 1e-10) {
  std::vector<double> xs = make_grid({lo, hi, coarse_count, false});
  std::vector<double> vs(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { vs[i] = f(xs[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (vs[i] < vs[best]) best = i;
  }
  if (best == 0 || best + 1 == xs.size()) {
    fail(errc::no_minimum_in_bracket,
         "coarse minimum sits on the bracket edge; no interior minimum in [" +
             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  double a = xs[best - 1], b = xs[best + 1];
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int it = 0;
  while (b - a > tol && it < 200) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    ++it;
  }
  MinimumReport r;
  r.omega_star = f1 < f2 ? x1 : x2;
  r.S_star = std::min(f1, f2);
  r.refinement_iterations = it;
  r.bracket_width = b - a;
  return r;
}

}  // namespace sense
