#include "wakegate/linalg.hpp"

#include <cmath>

#include "wakegate/errors.hpp"

namespace wakegate {

std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n,
                              double jitter) {
  if (a.size() != n * n || b.size() != n) throw InvalidArgument("solve_spd shape mismatch");

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += a[i * n + i];
  const double eps = jitter * std::max(trace / static_cast<double>(n), 1.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += eps;

  // in-place lower Cholesky
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (s <= 0.0) throw InvalidArgument("solve_spd: matrix not positive definite");
        a[i * n + j] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }

  // forward then back substitution
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
    b[ii] = s / a[ii * n + ii];
  }
  return b;
}

std::vector<std::complex<double>> solve_hpd(std::vector<std::complex<double>> a,
                                            std::vector<std::complex<double>> b, std::size_t n,
                                            double jitter) {
  if (a.size() != n * n || b.size() != n) throw InvalidArgument("solve_hpd shape mismatch");

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += a[i * n + i].real();
  const double eps = jitter * std::max(trace / static_cast<double>(n), 1.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += eps;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      std::complex<double> s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * std::conj(a[j * n + k]);
      if (i == j) {
        const double d = s.real();
        if (d <= 0.0) throw InvalidArgument("solve_hpd: matrix not positive definite");
        a[i * n + j] = std::sqrt(d);
      } else {
        a[i * n + j] = s / a[j * n + j].real();
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i].real();
  }
  for (std::size_t ii = n; ii-- > 0;) {
    std::complex<double> s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(a[k * n + ii]) * b[k];
    b[ii] = s / a[ii * n + ii].real();
  }
  return b;
}

}  // namespace wakegate
