#pragma once

#include <complex>
#include <vector>

namespace wakegate {

// Solves A x = b for symmetric positive definite A (row-major n*n) via
// Cholesky. A small diagonal jitter keeps near-singular systems solvable.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n,
                              double jitter = 1e-12);

// Hermitian positive definite complex solve, same contract.
std::vector<std::complex<double>> solve_hpd(std::vector<std::complex<double>> a,
                                            std::vector<std::complex<double>> b, std::size_t n,
                                            double jitter = 1e-12);

}  // namespace wakegate
