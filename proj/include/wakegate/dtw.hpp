#pragma once

#include "wakegate/mfcc.hpp"

namespace wakegate {

// Dynamic time warping with Euclidean frame cost and steps
// {(1,0),(0,1),(1,1)}, normalized by n + m so sequences of different
// lengths compare on one scale. Symmetric; zero iff the inputs are equal.
double dtw_distance(const MfccMatrix& a, const MfccMatrix& b);

// Same metric restricted to a Sakoe-Chiba band of half-width
// max(|n - m|, band_frac * max(n, m)). Cells outside the band are
// unreachable; the band is always wide enough to connect the corners.
double dtw_distance_banded(const MfccMatrix& a, const MfccMatrix& b, double band_frac);

}  // namespace wakegate
