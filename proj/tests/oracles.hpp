#pragma once

// Independent reference computations the tests check the library against.
// Everything here is deliberately brute force and shares no code with the
// implementation paths under test.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "wakegate/linalg.hpp"

namespace oracle {

// O(n^2) DFT of a real signal.
inline std::vector<std::complex<double>> direct_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) /
                         static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Time-domain cross-correlation argmax: lag maximizing sum_t y[t] * x[t-l].
inline int xcorr_argmax(std::span<const double> x, std::span<const double> y, int max_lag) {
  int best_lag = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int l = -max_lag; l <= max_lag; ++l) {
    double acc = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      const long long src = static_cast<long long>(t) - l;
      if (src >= 0 && src < static_cast<long long>(x.size()))
        acc += y[t] * x[static_cast<std::size_t>(src)];
    }
    if (acc > best) {
      best = acc;
      best_lag = l;
    }
  }
  return best_lag;
}

// Exhaustive DTW: minimum summed frame cost over all monotone paths with
// steps {(1,0),(0,1),(1,1)}, normalized by n + m.
inline double dtw_brute_force(const std::vector<std::vector<double>>& a,
                              const std::vector<std::vector<double>>& b) {
  const std::size_t n = a.size(), m = b.size();
  auto cost = [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t d = 0; d < a[i].size(); ++d) {
      const double diff = a[i][d] - b[j][d];
      acc += diff * diff;
    }
    return std::sqrt(acc);
  };
  double best = std::numeric_limits<double>::infinity();
  // depth-first over every path from (0,0) to (n-1,m-1)
  struct Walker {
    std::size_t n, m;
    double best = std::numeric_limits<double>::infinity();
    std::function<double(std::size_t, std::size_t)> c;
    void walk(std::size_t i, std::size_t j, double acc) {
      acc += c(i, j);
      if (acc >= best) return;  // prune; costs are non-negative
      if (i == n - 1 && j == m - 1) {
        best = acc;
        return;
      }
      if (i + 1 < n) walk(i + 1, j, acc);
      if (j + 1 < m) walk(i, j + 1, acc);
      if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
    }
  } w{n, m, best, cost};
  w.walk(0, 0, 0.0);
  return w.best / static_cast<double>(n + m);
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(std::max(saa * sbb, 1e-300));
}

inline double energy(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

inline double db_ratio(double num, double den) {
  return 10.0 * std::log10(std::max(num, 1e-300) / std::max(den, 1e-300));
}

// Least-squares FIR fit of `ref` onto `out`: out[t] ~= sum_k h[k] ref[t-k+pre].
// Returns the fitted component; the caller splits out into fit + residual.
// This is how the harness decomposes a processed signal into "came from the
// reference" and "everything else" without assuming sample alignment.
inline std::vector<double> fir_fit(std::span<const double> ref, std::span<const double> out,
                                   int pre_taps, int post_taps) {
  const int taps = pre_taps + post_taps + 1;
  const std::size_t n = std::min(ref.size(), out.size());
  std::vector<double> gram(static_cast<std::size_t>(taps) * taps, 0.0);
  std::vector<double> rhs(static_cast<std::size_t>(taps), 0.0);

  auto ref_at = [&](long long idx) -> double {
    return idx >= 0 && idx < static_cast<long long>(n) ? ref[static_cast<std::size_t>(idx)] : 0.0;
  };

  for (std::size_t t = 0; t < n; ++t) {
    for (int i = 0; i < taps; ++i) {
      const double xi = ref_at(static_cast<long long>(t) - (i - pre_taps));
      if (xi == 0.0) continue;
      rhs[static_cast<std::size_t>(i)] += xi * out[t];
      for (int j = i; j < taps; ++j) {
        const double xj = ref_at(static_cast<long long>(t) - (j - pre_taps));
        gram[static_cast<std::size_t>(i) * taps + j] += xi * xj;
      }
    }
  }
  for (int i = 0; i < taps; ++i)
    for (int j = 0; j < i; ++j)
      gram[static_cast<std::size_t>(i) * taps + j] = gram[static_cast<std::size_t>(j) * taps + i];

  const auto h = wakegate::solve_spd(gram, rhs, static_cast<std::size_t>(taps), 1e-9);

  std::vector<double> fit(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int i = 0; i < taps; ++i)
      acc += h[static_cast<std::size_t>(i)] * ref_at(static_cast<long long>(t) - (i - pre_taps));
    fit[t] = acc;
  }
  return fit;
}

// Signal-to-residual ratio in dB after FIR-projecting `ref` out of `out`.
inline double snr_vs_reference(std::span<const double> ref, std::span<const double> out,
                               int pre_taps = 8, int post_taps = 8) {
  const auto fit = fir_fit(ref, out, pre_taps, post_taps);
  const std::size_t n = fit.size();
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = out[i] - fit[i];
  return db_ratio(energy(fit), energy(resid));
}

// Segmental SNR of `test` against aligned clean `ref` (32 ms segments).
inline double segmental_snr(std::span<const double> ref, std::span<const double> test,
                            int sample_rate, std::size_t skip_edges = 512) {
  const auto seg = static_cast<std::size_t>(0.032 * sample_rate);
  const std::size_t n = std::min(ref.size(), test.size());
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t off = skip_edges; off + seg < n - std::min(n, skip_edges); off += seg) {
    double se = 0.0, ne = 0.0;
    for (std::size_t i = off; i < off + seg; ++i) {
      se += ref[i] * ref[i];
      const double d = test[i] - ref[i];
      ne += d * d;
    }
    if (se < 1e-12) continue;  // skip silent segments
    acc += db_ratio(se, ne);
    ++count;
  }
  return count ? acc / static_cast<double>(count) : 0.0;
}

// ERLE in dB between the echo-bearing mic and the canceller output over a
// trailing window.
inline double erle_db(std::span<const double> mic, std::span<const double> out,
                      std::size_t tail_start) {
  double em = 0.0, eo = 0.0;
  for (std::size_t i = tail_start; i < mic.size(); ++i) {
    em += mic[i] * mic[i];
    eo += out[i] * out[i];
  }
  return db_ratio(em, eo);
}

}  // namespace oracle
