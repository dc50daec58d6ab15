#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tapmein/learn/standardizer.hpp"

namespace tapmein {

enum class KernelKind { kLinear, kRbf };

struct Kernel {
  KernelKind kind = KernelKind::kRbf;
  double gamma = 0.1;  // RBF only

  double operator()(std::span<const double> a, std::span<const double> b) const;
  bool operator==(const Kernel&) const = default;
};

struct SvmParams {
  double c = 1.0;
  Kernel kernel;
  double tolerance = 1e-3;
  // 0 selects the default cap, see DefaultIterationCap().
  std::size_t max_iterations = 0;
};

std::size_t DefaultIterationCap(std::size_t rows);

/// Raw dual solution, kept separately from the model so that optimality
/// conditions can be audited after training.
struct SvmDualSolution {
  std::vector<double> alpha;  // one per training row, in [0, C]
  double bias = 0.0;          // f(x) = sum alpha_i y_i K(x_i, x) + bias
  std::size_t iterations = 0;
  bool converged = false;
};

struct SvmModel {
  Matrix support_vectors;
  std::vector<double> dual_coef;  // alpha_i * y_i
  double bias = 0.0;
  Kernel kernel;
  double c = 1.0;
  bool converged = true;

  // Throws Error(kDimensionMismatch).
  double Score(std::span<const double> x) const;
  std::size_t dimension() const {
    return support_vectors.empty() ? 0 : support_vectors.front().size();
  }
};

// Labels are -1 / +1. Throws kSingleClassTraining, kDimensionMismatch,
// kInvalidArgument.
SvmDualSolution SolveSvmDual(const Matrix& x, std::span<const int> y,
                             const SvmParams& params);

// Non-converged solutions are returned with converged = false.
SvmModel TrainSvm(const Matrix& x, std::span<const int> y, const SvmParams& params);

}  // namespace tapmein
