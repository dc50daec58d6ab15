#include "tapmein/learn/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tapmein/error.hpp"

namespace tapmein {

namespace {

constexpr double kTau = 1e-12;

void CheckTrainingInput(const Matrix& x, std::span<const int> y,
                        const SvmParams& params) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "row/label count mismatch");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kSingleClassTraining, "need at least two rows");
  }
  const std::size_t m = x.front().size();
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != m) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged feature matrix");
    }
    if (y[i] == 1) {
      has_pos = true;
    } else if (y[i] == -1) {
      has_neg = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "labels must be -1 or +1");
    }
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kSingleClassTraining, "training set has one class");
  }
  if (!(params.c > 0.0) || !std::isfinite(params.c)) {
    throw Error(ErrorCode::kInvalidArgument, "C must be positive");
  }
  if (params.kernel.kind == KernelKind::kRbf && !(params.kernel.gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "RBF gamma must be positive");
  }
}

}  // namespace

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  if (kind == KernelKind::kLinear) {
    double dot = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) dot += a[j] * b[j];
    return dot;
  }
  double d2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

std::size_t DefaultIterationCap(std::size_t rows) {
  return std::max<std::size_t>(100000, 100 * rows * rows);
}

// SMO with maximal-violating-pair working set selection. Minimizes
// 0.5 a'Qa - e'a subject to y'a = 0, 0 <= a <= C, with Q_ij = y_i y_j K_ij.
SvmDualSolution SolveSvmDual(const Matrix& x, std::span<const int> y,
                             const SvmParams& params) {
  CheckTrainingInput(x, y, params);
  const std::size_t n = x.size();
  const double c = params.c;

  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = y[i] * y[j] * params.kernel(x[i], x[j]);
      q[i * n + j] = v;
      q[j * n + i] = v;
    }
  }
  auto qij = [&](std::size_t i, std::size_t j) { return q[i * n + j]; };

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto in_up = [&](std::size_t t) {
    return (y[t] == 1 && alpha[t] < c) || (y[t] == -1 && alpha[t] > 0.0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < c);
  };

  const std::size_t cap =
      params.max_iterations > 0 ? params.max_iterations : DefaultIterationCap(n);
  SvmDualSolution sol;
  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < params.tolerance) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= cap) break;
    ++sol.iterations;

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = qij(i, i) + qij(j, j) + 2.0 * qij(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = qij(i, i) + qij(j, j) - 2.0 * qij(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += qij(t, i) * dai + qij(t, j) * daj;
  }

  // Offset from free vectors; midpoint of the feasible interval otherwise.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count)
                                    : (ub + lb) / 2.0;
  sol.alpha = std::move(alpha);
  sol.bias = -rho;
  return sol;
}

SvmModel TrainSvm(const Matrix& x, std::span<const int> y, const SvmParams& params) {
  const SvmDualSolution sol = SolveSvmDual(x, y, params);
  SvmModel model;
  model.kernel = params.kernel;
  model.c = params.c;
  model.bias = sol.bias;
  model.converged = sol.converged;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sol.alpha[i] > 0.0) {
      model.support_vectors.push_back(x[i]);
      model.dual_coef.push_back(sol.alpha[i] * y[i]);
    }
  }
  return model;
}

double SvmModel::Score(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(dimension()) + " features, got " +
                    std::to_string(x.size()));
  }
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i)
    f += dual_coef[i] * kernel(support_vectors[i], x);
  return f;
}

}  // namespace tapmein
