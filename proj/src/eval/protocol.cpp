#include "tapmein/eval/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "tapmein/error.hpp"
#include "tapmein/features.hpp"
#include "tapmein/random.hpp"

namespace tapmein {

namespace {

constexpr double kRejected = -std::numeric_limits<double>::infinity();

RateReport Evaluate(const std::vector<double>& genuine, const std::vector<double>& impostor,
                    double threshold) {
  RateReport r;
  if (!genuine.empty() && !impostor.empty()) r = ComputeEer(genuine, impostor);
  const RatePair op = ComputeRates(genuine, impostor, threshold);
  r.fpr = op.fpr;
  r.fnr = op.fnr;
  r.genuine_count = genuine.size();
  r.impostor_count = impostor.size();
  return r;
}

// Running mean of RateReports. Counts keep the first observation since they
// do not vary across repetitions.
struct RateAccumulator {
  RateReport sum;
  std::size_t count = 0;

  void Add(const RateReport& r) {
    if (count == 0) {
      sum.genuine_count = r.genuine_count;
      sum.impostor_count = r.impostor_count;
    }
    sum.fpr += r.fpr;
    sum.fnr += r.fnr;
    sum.eer += r.eer;
    sum.eer_threshold += r.eer_threshold;
    ++count;
  }

  RateReport Mean() const {
    RateReport m = sum;
    if (count == 0) return m;
    const double n = static_cast<double>(count);
    m.fpr /= n;
    m.fnr /= n;
    m.eer /= n;
    m.eer_threshold /= n;
    return m;
  }
};

void ParallelFor(std::size_t count, std::size_t threads,
                 const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::size_t> EnrollmentPool(const UserSamples& user) {
  std::vector<std::size_t> sitting, genuine;
  for (std::size_t i = 0; i < user.samples.size(); ++i) {
    const SequenceMeta& m = user.samples[i].meta;
    if (m.kind != SampleKind::kGenuine) continue;
    genuine.push_back(i);
    if (m.condition == Condition::kSitting) sitting.push_back(i);
  }
  return sitting.empty() ? genuine : sitting;
}

std::size_t GenuineCount(const UserSamples& user) {
  return static_cast<std::size_t>(
      std::count_if(user.samples.begin(), user.samples.end(),
                    [](const RawTapSequence& s) { return s.meta.kind == SampleKind::kGenuine; }));
}

void CheckProtocolInput(const LabeledDataset& ds, const TrainingConfig& cfg,
                        const ProtocolOptions& options) {
  cfg.Check();
  if (options.repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  }
  if (ds.users.empty()) throw Error(ErrorCode::kInsufficientGenuine, "dataset has no users");
  for (const UserSamples& u : ds.users) {
    if (GenuineCount(u) <= cfg.n || EnrollmentPool(u).size() < cfg.n) {
      throw Error(ErrorCode::kInsufficientGenuine,
                  "user " + u.user_id + " needs more than " + std::to_string(cfg.n) +
                      " genuine samples");
    }
  }
}

// Draws n enrollment indices for one (user, repetition).
std::vector<std::size_t> DrawEnrollment(std::vector<std::size_t> pool, std::size_t n,
                                        Rng& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<RawTapSequence> Pick(const UserSamples& user,
                                 const std::vector<std::size_t>& idx) {
  std::vector<RawTapSequence> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(user.samples[i]);
  return out;
}

std::uint64_t TaskSeed(std::uint64_t master, std::size_t user, std::size_t rep) {
  return StreamSeed(master, {user, rep});
}

UserReport EvaluateUser(const LabeledDataset& ds, std::size_t user_index,
                        const PopulationStats& stats, const TrainingConfig& cfg,
                        const ProtocolOptions& options, std::mutex& observer_mu) {
  const UserSamples& user = ds.users[user_index];
  const std::vector<std::size_t> pool = EnrollmentPool(user);

  RateAccumulator overall;
  std::map<std::string, RateAccumulator> attacks, conditions;
  UserReport report;
  report.user_id = user.user_id;

  for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
    const std::uint64_t seed = TaskSeed(cfg.master_seed, user_index, rep);
    Rng rng(seed);
    TaskTrace trace{user_index, rep, DrawEnrollment(pool, cfg.n, rng), {}};

    TrainingConfig task_cfg = cfg;
    task_cfg.master_seed = MixSeed(seed);
    const std::vector<RawTapSequence> enroll_set = Pick(user, trace.enrolled);
    const UserProfile profile = Enroll(user.user_id, enroll_set, stats, task_cfg);
    report.length = profile.length;

    std::vector<double> genuine_all, impostor_all;
    std::map<std::string, std::vector<double>> genuine_by_cond, impostor_by_kind;
    for (std::size_t i = 0; i < user.samples.size(); ++i) {
      if (std::binary_search(trace.enrolled.begin(), trace.enrolled.end(), i)) continue;
      const RawTapSequence& s = user.samples[i];
      trace.scored.push_back(i);
      const Decision d = Verify(profile, s);
      const double score = d.score.value_or(kRejected);
      if (s.meta.kind == SampleKind::kGenuine) {
        genuine_all.push_back(score);
        genuine_by_cond[std::string(ConditionName(s.meta.condition))].push_back(score);
      } else {
        impostor_all.push_back(score);
        impostor_by_kind[std::string(SampleKindName(s.meta.kind))].push_back(score);
      }
    }

    const double t = profile.threshold;
    overall.Add(Evaluate(genuine_all, impostor_all, t));
    for (const auto& [kind, scores] : impostor_by_kind)
      attacks[kind].Add(Evaluate(genuine_all, scores, t));
    for (const auto& [cond, scores] : genuine_by_cond)
      conditions[cond].Add(Evaluate(scores, impostor_all, t));

    if (options.observer) {
      std::lock_guard lock(observer_mu);
      options.observer(trace);
    }
  }

  report.overall = overall.Mean();
  for (const auto& [k, acc] : attacks) report.attacks[k] = acc.Mean();
  for (const auto& [k, acc] : conditions) report.conditions[k] = acc.Mean();
  return report;
}

AggregateReport Aggregate(const std::vector<UserReport>& users) {
  RateAccumulator overall;
  std::map<std::string, RateAccumulator> attacks, conditions;
  for (const UserReport& u : users) {
    overall.Add(u.overall);
    for (const auto& [k, r] : u.attacks) attacks[k].Add(r);
    for (const auto& [k, r] : u.conditions) conditions[k].Add(r);
  }
  AggregateReport agg;
  agg.overall = overall.Mean();
  // Counts in the aggregate are totals over users.
  agg.overall.genuine_count = 0;
  agg.overall.impostor_count = 0;
  for (const UserReport& u : users) {
    agg.overall.genuine_count += u.overall.genuine_count;
    agg.overall.impostor_count += u.overall.impostor_count;
  }
  for (const auto& [k, acc] : attacks) agg.attacks[k] = acc.Mean();
  for (const auto& [k, acc] : conditions) agg.conditions[k] = acc.Mean();
  for (auto* group : {&agg.attacks, &agg.conditions}) {
    for (auto& [k, r] : *group) {
      r.genuine_count = 0;
      r.impostor_count = 0;
      for (const UserReport& u : users) {
        const auto& src = group == &agg.attacks ? u.attacks : u.conditions;
        if (auto it = src.find(k); it != src.end()) {
          r.genuine_count += it->second.genuine_count;
          r.impostor_count += it->second.impostor_count;
        }
      }
    }
  }
  agg.balanced_accuracy = 1.0 - (agg.overall.fpr + agg.overall.fnr) / 2.0;
  return agg;
}

}  // namespace

ProtocolReport RunProtocol(const LabeledDataset& ds, const PopulationStats& stats,
                           const TrainingConfig& cfg, const ProtocolOptions& options) {
  CheckProtocolInput(ds, cfg, options);
  ProtocolReport report;
  report.repetitions = options.repetitions;
  report.n = cfg.n;
  report.negative_multiplier = cfg.negative_multiplier;
  report.classifier = cfg.classifier;
  report.master_seed = cfg.master_seed;
  report.users.resize(ds.users.size());

  std::mutex observer_mu;
  ParallelFor(ds.users.size(), options.threads, [&](std::size_t u) {
    report.users[u] = EvaluateUser(ds, u, stats, cfg, options, observer_mu);
  });
  report.aggregate = Aggregate(report.users);
  return report;
}

std::vector<SweepRow> SweepEnrollmentSize(const LabeledDataset& ds,
                                          const PopulationStats& stats,
                                          const TrainingConfig& cfg,
                                          const std::vector<std::size_t>& n_values,
                                          const std::vector<ClassifierKind>& classifiers,
                                          const ProtocolOptions& options) {
  if (n_values.empty() || classifiers.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs n values and classifiers");
  }
  std::vector<SweepRow> rows;
  for (ClassifierKind kind : classifiers) {
    for (std::size_t n : n_values) {
      TrainingConfig run_cfg = cfg;
      run_cfg.classifier = kind;
      run_cfg.n = n;
      const ProtocolReport rep = RunProtocol(ds, stats, run_cfg, options);
      rows.push_back({kind, n, rep.aggregate.overall.eer});
    }
  }
  return rows;
}

FeatureRanking RankFeatures(const LabeledDataset& ds, const PopulationStats& stats,
                            const TrainingConfig& cfg, std::size_t top_k,
                            const ProtocolOptions& options) {
  TrainingConfig forest_cfg = cfg;
  forest_cfg.classifier = ClassifierKind::kForest;
  forest_cfg.threshold_policy = ThresholdPolicy::Native();
  CheckProtocolInput(ds, forest_cfg, options);

  struct UserImportance {
    std::map<std::string, double> sums;
    std::vector<double> run_sums;
  };
  std::vector<UserImportance> per_user(ds.users.size());

  ParallelFor(ds.users.size(), options.threads, [&](std::size_t u) {
    const UserSamples& user = ds.users[u];
    const std::vector<std::size_t> pool = EnrollmentPool(user);
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
      const std::uint64_t seed = TaskSeed(cfg.master_seed, u, rep);
      Rng rng(seed);
      const std::vector<std::size_t> idx = DrawEnrollment(pool, forest_cfg.n, rng);
      TrainingConfig task_cfg = forest_cfg;
      task_cfg.master_seed = MixSeed(seed);
      const UserProfile profile = Enroll(user.user_id, Pick(user, idx), stats, task_cfg);
      const auto& forest = std::get<ForestModel>(profile.model);
      const std::vector<std::string> names = FeatureNames(profile.length);
      double total = 0.0;
      for (std::size_t j = 0; j < names.size(); ++j) {
        per_user[u].sums[names[j]] += forest.importance[j];
        total += forest.importance[j];
      }
      per_user[u].run_sums.push_back(total);
    }
  });

  FeatureRanking ranking;
  std::map<std::string, double> totals;
  for (const UserImportance& ui : per_user) {
    for (const auto& [name, v] : ui.sums) totals[name] += v;
    ranking.run_sums.insert(ranking.run_sums.end(), ui.run_sums.begin(), ui.run_sums.end());
  }
  ranking.runs = ranking.run_sums.size();
  for (const auto& [name, v] : totals)
    ranking.top.push_back({name, v / static_cast<double>(ranking.runs)});
  std::stable_sort(ranking.top.begin(), ranking.top.end(),
                   [](const RankedFeature& a, const RankedFeature& b) {
                     return a.importance > b.importance;
                   });
  if (ranking.top.size() > top_k) ranking.top.resize(top_k);
  return ranking;
}

}  // namespace tapmein
