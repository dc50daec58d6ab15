#include "tapmein/learn/standardizer.hpp"

#include <cmath>
#include <string>

#include "tapmein/error.hpp"

namespace tapmein {

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "mean/scale size mismatch");
  }
  for (double s : scale_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidArgument, "standardizer scale must be > 0");
    }
  }
}

Standardizer Standardizer::Fit(const Matrix& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorCode::kEmptyMatrix, "cannot fit standardizer on empty matrix");
  }
  const std::size_t m = rows.front().size();
  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(m, 0.0), scale(m, 0.0);
  for (const auto& r : rows) {
    if (r.size() != m) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged feature matrix");
    }
    for (std::size_t j = 0; j < m; ++j) mean[j] += r[j];
  }
  for (double& v : mean) v /= n;
  for (const auto& r : rows)
    for (std::size_t j = 0; j < m; ++j) scale[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
  for (double& s : scale) {
    s = std::sqrt(s / n);
    if (!(s > 0.0)) s = 1.0;
  }
  return Standardizer(std::move(mean), std::move(scale));
}

std::vector<double> Standardizer::Apply(std::span<const double> x) const {
  if (x.size() != mean_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(mean_.size()) + " features, got " +
                    std::to_string(x.size()));
  }
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean_[j]) / scale_[j];
  return z;
}

std::vector<double> Standardizer::Inverse(std::span<const double> z) const {
  if (z.size() != mean_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch in inverse");
  }
  std::vector<double> x(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) x[j] = z[j] * scale_[j] + mean_[j];
  return x;
}

Matrix Standardizer::ApplyAll(const Matrix& rows) const {
  Matrix out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(Apply(r));
  return out;
}

}  // namespace tapmein
