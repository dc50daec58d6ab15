#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "tapmein/learn/forest.hpp"
#include "tapmein/learn/svm.hpp"

namespace tapmein {

enum class ClassifierKind { kSvm, kForest };

std::string_view ClassifierKindName(ClassifierKind kind);
std::optional<ClassifierKind> ParseClassifierKind(std::string_view name);

/// SVM candidate. gamma <= 0 stands for 1/m, resolved against the feature
/// count at training time.
struct SvmCandidate {
  double c = 1.0;
  double gamma = 0.0;
  KernelKind kernel = KernelKind::kRbf;

  bool operator==(const SvmCandidate&) const = default;
};

struct ForestCandidate {
  std::size_t tree_count = 100;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_leaf = 1;

  bool operator==(const ForestCandidate&) const = default;
};

using Candidate = std::variant<SvmCandidate, ForestCandidate>;

struct HyperGrid {
  std::vector<SvmCandidate> svm;
  std::vector<ForestCandidate> forest;

  // C in {0.1, 1, 10, 100} x gamma in {1/m, 0.01, 0.1, 1};
  // trees in {50, 100} x depth in {unlimited, 8}.
  static HyperGrid Default();
};

double ResolveGamma(const SvmCandidate& c, std::size_t features);

// Ascending C then ascending resolved gamma (linear kernels sort first).
std::vector<SvmCandidate> CanonicalOrder(std::vector<SvmCandidate> grid,
                                         std::size_t features);
// Ascending tree_count then depth, unlimited depth last.
std::vector<ForestCandidate> CanonicalOrder(std::vector<ForestCandidate> grid);

using Model = std::variant<SvmModel, ForestModel>;

// `seed` feeds forest bootstraps; SVM training is deterministic.
Model TrainCandidate(const Matrix& x, std::span<const int> y,
                     const Candidate& candidate, std::uint64_t seed);

double ScoreModel(const Model& model, std::span<const double> x);

// Decision threshold used for accuracy during model selection.
double NativeThreshold(ClassifierKind kind);
ClassifierKind KindOf(const Model& model);

}  // namespace tapmein
