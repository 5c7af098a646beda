#include "wakegate/dtw.hpp"

#include <cmath>
#include <limits>

#include "wakegate/errors.hpp"

namespace wakegate {

namespace {

double frame_cost(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

void check_inputs(const MfccMatrix& a, const MfccMatrix& b) {
  if (a.empty() || b.empty()) throw InvalidArgument("dtw on empty sequence");
  const std::size_t dim = a[0].size();
  if (dim == 0) throw InvalidArgument("dtw frames must have coefficients");
  for (const auto& f : a)
    if (f.size() != dim) throw InvalidArgument("dtw coefficient dimension mismatch");
  for (const auto& f : b)
    if (f.size() != dim) throw InvalidArgument("dtw coefficient dimension mismatch");
}

}  // namespace

double dtw_distance(const MfccMatrix& a, const MfccMatrix& b) {
  return dtw_distance_banded(a, b, 1.0);
}

double dtw_distance_banded(const MfccMatrix& a, const MfccMatrix& b, double band_frac) {
  check_inputs(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const double inf = std::numeric_limits<double>::infinity();

  const auto band = static_cast<std::size_t>(std::max(
      static_cast<double>(n > m ? n - m : m - n),
      band_frac * static_cast<double>(std::max(n, m))));

  std::vector<double> prev(m, inf), curr(m, inf);
  for (std::size_t i = 0; i < n; ++i) {
    // j range follows the diagonal within the band
    const double center = static_cast<double>(i) * static_cast<double>(m) / static_cast<double>(n);
    const std::size_t jlo =
        center > static_cast<double>(band) ? static_cast<std::size_t>(center) - band : 0;
    const std::size_t jhi = std::min(m, static_cast<std::size_t>(center) + band + 1);
    std::fill(curr.begin(), curr.end(), inf);
    for (std::size_t j = jlo; j < jhi; ++j) {
      const double c = frame_cost(a[i], b[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = inf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, curr[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      }
      curr[j] = c + best;
    }
    std::swap(prev, curr);
  }

  const double total = prev[m - 1];
  if (!std::isfinite(total)) throw InvalidArgument("dtw band too narrow to connect corners");
  return total / static_cast<double>(n + m);
}

}  // namespace wakegate
