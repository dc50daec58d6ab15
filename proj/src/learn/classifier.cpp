#include "tapmein/learn/classifier.hpp"

#include <algorithm>
#include <limits>

#include "tapmein/error.hpp"

namespace tapmein {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view ClassifierKindName(ClassifierKind kind) {
  return kind == ClassifierKind::kSvm ? "svm" : "forest";
}

std::optional<ClassifierKind> ParseClassifierKind(std::string_view name) {
  if (name == "svm") return ClassifierKind::kSvm;
  if (name == "forest") return ClassifierKind::kForest;
  return std::nullopt;
}

HyperGrid HyperGrid::Default() {
  HyperGrid grid;
  for (double c : {0.1, 1.0, 10.0, 100.0})
    for (double g : {0.0, 0.01, 0.1, 1.0}) grid.svm.push_back({c, g, KernelKind::kRbf});
  for (std::size_t trees : {50, 100})
    for (std::size_t depth : {0, 8}) grid.forest.push_back({trees, depth, 1});
  return grid;
}

double ResolveGamma(const SvmCandidate& c, std::size_t features) {
  if (c.gamma > 0.0) return c.gamma;
  return features > 0 ? 1.0 / static_cast<double>(features) : 1.0;
}

std::vector<SvmCandidate> CanonicalOrder(std::vector<SvmCandidate> grid,
                                         std::size_t features) {
  auto key_gamma = [features](const SvmCandidate& c) {
    return c.kernel == KernelKind::kLinear ? -1.0 : ResolveGamma(c, features);
  };
  std::stable_sort(grid.begin(), grid.end(),
                   [&](const SvmCandidate& a, const SvmCandidate& b) {
                     if (a.c != b.c) return a.c < b.c;
                     return key_gamma(a) < key_gamma(b);
                   });
  return grid;
}

std::vector<ForestCandidate> CanonicalOrder(std::vector<ForestCandidate> grid) {
  auto depth_key = [](const ForestCandidate& c) {
    return c.max_depth == 0 ? std::numeric_limits<std::size_t>::max() : c.max_depth;
  };
  std::stable_sort(grid.begin(), grid.end(),
                   [&](const ForestCandidate& a, const ForestCandidate& b) {
                     if (a.tree_count != b.tree_count) return a.tree_count < b.tree_count;
                     return depth_key(a) < depth_key(b);
                   });
  return grid;
}

Model TrainCandidate(const Matrix& x, std::span<const int> y,
                     const Candidate& candidate, std::uint64_t seed) {
  const std::size_t m = x.empty() ? 0 : x.front().size();
  return std::visit(
      Overloaded{
          [&](const SvmCandidate& c) -> Model {
            SvmParams p;
            p.c = c.c;
            p.kernel = {c.kernel, ResolveGamma(c, m)};
            return TrainSvm(x, y, p);
          },
          [&](const ForestCandidate& c) -> Model {
            ForestParams p;
            p.tree_count = c.tree_count;
            p.max_depth = c.max_depth;
            p.min_leaf = c.min_leaf;
            p.seed = seed;
            return TrainForest(x, y, p);
          },
      },
      candidate);
}

double ScoreModel(const Model& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.Score(x); }, model);
}

double NativeThreshold(ClassifierKind kind) {
  return kind == ClassifierKind::kSvm ? 0.0 : 0.5;
}

ClassifierKind KindOf(const Model& model) {
  return std::holds_alternative<SvmModel>(model) ? ClassifierKind::kSvm
                                                 : ClassifierKind::kForest;
}

}  // namespace tapmein
