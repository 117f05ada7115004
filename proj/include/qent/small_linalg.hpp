// Small dense real solvers (LU with partial pivoting) used by the Fisher
// matrix inversion and the 16x16 tomographic design system.
#pragma once

#include <vector>

#include "qent/quantum_core.hpp"

namespace qent {

/// Solves A x = b for square row-major A (n x n). Raises numeric_error on a
/// singular system.
std::vector<double> lu_solve(std::vector<double> a, std::vector<double> b, int n);

/// Inverse of a square row-major matrix.
std::vector<double> invert(const std::vector<double>& a, int n);

/// Determinant via LU.
double determinant(std::vector<double> a, int n);

}  // namespace qent
