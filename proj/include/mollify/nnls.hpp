#pragma once

#include "mollify/types.hpp"

namespace mollify {

struct NnlsResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active set solve of min ||A x - y||_2 subject to x >= 0.
NnlsResult nnls(const Matrix& A, const Vector& y, int max_iterations = 0, double tolerance = 0.0);

/// min ||Phi theta - y||_2 subject to ||theta||_1 <= budget.
/// theta = budget (p+ - p-) with p >= 0, sum p + s = 1, s >= 0; the equality row is
/// appended with a large weight and the result is rescaled onto the L1 ball if the
/// weighted row leaves a residual violation.
Vector l1_constrained_least_squares(const Matrix& Phi, const Vector& y, double budget,
                                    int max_iterations = 0);

}  // namespace mollify
