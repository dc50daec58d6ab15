#pragma once

#include <span>
#include <vector>

namespace tapmein {

using Matrix = std::vector<std::vector<double>>;

// Column-wise z-scoring. Zero-variance columns keep scale 1.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> mean, std::vector<double> scale);

  // Throws Error(kEmptyMatrix) on an empty matrix, kDimensionMismatch on
  // ragged rows.
  static Standardizer Fit(const Matrix& rows);

  std::vector<double> Apply(std::span<const double> x) const;
  std::vector<double> Inverse(std::span<const double> z) const;
  Matrix ApplyAll(const Matrix& rows) const;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }
  std::size_t dimension() const { return mean_.size(); }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace tapmein
