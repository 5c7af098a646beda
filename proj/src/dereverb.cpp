#include "wakegate/dereverb.hpp"

#include <cmath>

#include "wakegate/errors.hpp"
#include "wakegate/linalg.hpp"

namespace wakegate {

Spectrogram dereverberate(const Spectrogram& spec, std::size_t delay, std::size_t order,
                          int iterations, double regularization) {
  if (delay == 0 || order == 0) throw InvalidArgument("dereverb delay and order must be positive");
  if (iterations < 1) throw InvalidArgument("dereverb needs at least one iteration");
  const std::size_t t_frames = spec.frame_count();
  if (t_frames <= delay + order) throw InvalidArgument("too few frames for dereverberation");

  const std::size_t bins = spec.bins();
  const std::size_t k_ord = order;
  const std::size_t t0 = delay + order;  // first frame with a full history window

  Spectrogram out = spec;

  std::vector<std::complex<double>> y(t_frames);
  std::vector<double> lambda(t_frames);
  std::vector<std::complex<double>> gram(k_ord * k_ord);
  std::vector<std::complex<double>> rhs(k_ord);

  for (std::size_t b = 0; b < bins; ++b) {
    for (std::size_t t = 0; t < t_frames; ++t) y[t] = spec.frames[t][b];

    double mean_power = 0.0;
    for (const auto& v : y) mean_power += std::norm(v);
    mean_power /= static_cast<double>(t_frames);
    if (mean_power < 1e-24) continue;  // dead bin, leave untouched
    const double lambda_floor = 1e-6 * mean_power + 1e-30;

    for (std::size_t t = 0; t < t_frames; ++t) lambda[t] = std::max(std::norm(y[t]), lambda_floor);

    std::vector<std::complex<double>> coeffs(k_ord, {0.0, 0.0});
    for (int it = 0; it < iterations; ++it) {
      std::fill(gram.begin(), gram.end(), std::complex<double>(0.0, 0.0));
      std::fill(rhs.begin(), rhs.end(), std::complex<double>(0.0, 0.0));

      for (std::size_t t = t0; t < t_frames; ++t) {
        const double w = 1.0 / lambda[t];
        for (std::size_t i = 0; i < k_ord; ++i) {
          const std::complex<double> xi = y[t - delay - i];
          rhs[i] += w * std::conj(xi) * y[t];
          for (std::size_t j = i; j < k_ord; ++j)
            gram[i * k_ord + j] += w * std::conj(xi) * y[t - delay - j];
        }
      }
      for (std::size_t i = 0; i < k_ord; ++i)
        for (std::size_t j = 0; j < i; ++j) gram[i * k_ord + j] = std::conj(gram[j * k_ord + i]);

      coeffs = solve_hpd(gram, rhs, k_ord, regularization);

      // residual becomes both the output and next iteration's weights
      for (std::size_t t = t0; t < t_frames; ++t) {
        std::complex<double> pred(0.0, 0.0);
        for (std::size_t i = 0; i < k_ord; ++i) pred += coeffs[i] * y[t - delay - i];
        lambda[t] = std::max(std::norm(spec.frames[t][b] - pred), lambda_floor);
      }
    }

    for (std::size_t t = t0; t < t_frames; ++t) {
      std::complex<double> pred(0.0, 0.0);
      for (std::size_t i = 0; i < k_ord; ++i) pred += coeffs[i] * y[t - delay - i];
      out.frames[t][b] = y[t] - pred;
    }
  }

  return out;
}

}  // namespace wakegate
