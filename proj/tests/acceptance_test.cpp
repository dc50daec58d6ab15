// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. argv[1] is the path of the tapmein binary.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "tapmein/authflow.hpp"
#include "tapmein/error.hpp"
#include "tapmein/eval/dataset.hpp"
#include "tapmein/eval/protocol.hpp"
#include "tapmein/eval/rates.hpp"
#include "tapmein/features.hpp"
#include "tapmein/gateway/profile_store.hpp"
#include "tapmein/learn/svm.hpp"

namespace {

using namespace tapmein;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t Threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string Fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

Outcome DftOracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> len(1, 64);
  std::uniform_real_distribution<double> val(-1e4, 1e4);
  long double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(len(rng));
    for (auto& v : x) v = val(rng);
    const auto got = DftMagnitudes(x);
    const auto ref = oracle::Dft(x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      worst = std::max(worst, std::abs(static_cast<long double>(got[k]) - ref[k]));
    }
  }
  return {worst <= 1e-9L, "max abs error " + Fmt(static_cast<double>(worst) * 1e12, 3) + "e-12"};
}

// Textbook double-precision statistics, recomputed without the library.
std::array<double, 4> PlainStats(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {*std::min_element(x.begin(), x.end()), *std::max_element(x.begin(), x.end()), mean, ss / n};
}

Outcome FeatureLayout() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0, 1), ms(0, 900);
  std::size_t vectors = 0, mismatches = 0;
  for (std::size_t l = 4; l <= 20; ++l) {
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> d(l), u(l - 1);
      for (auto& v : d) v = ms(rng);
      for (auto& v : u) v = ms(rng);
      RawTapSequence raw = testutil::Taps(d, u);
      for (auto& t : raw.taps) {
        t.pressure = unit(rng);
        t.size = unit(rng);
      }
      const ProcessedSequence p = ExtractDurations(ValidateSequence(raw));
      const auto v = ExtractFeatures(p).values;
      ++vectors;
      if (v.size() != 4 * l + 35) {
        ++mismatches;
        continue;
      }
      std::vector<double> expect;
      const std::vector<const std::vector<double>*> series{&p.pressures, &p.sizes, &p.down_durations,
                                                           &p.up_durations};
      for (const auto* s : series) {
        for (double x : PlainStats(*s)) expect.push_back(x);
      }
      std::vector<std::vector<double>> spectra;
      for (const auto* s : series) {
        std::vector<double> mags;
        for (long double m : oracle::Dft(*s)) mags.push_back(static_cast<double>(m));
        // Spectral slots are compared on the library's own magnitudes so the
        // comparison can be exact; the magnitudes themselves are checked
        // against the oracle to 1e-9.
        const auto lib = DftMagnitudes(*s);
        for (std::size_t k = 0; k < lib.size(); ++k) {
          if (std::abs(lib[k] - mags[k]) > 1e-9) ++mismatches;
        }
        spectra.push_back(lib);
      }
      for (const auto& m : spectra) {
        for (double x : PlainStats(m)) expect.push_back(x);
      }
      for (const auto& m : spectra) expect.push_back(std::accumulate(m.begin(), m.end(), 0.0));
      if (!std::equal(expect.begin(), expect.end(), v.end() - 36)) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(vectors) + " vectors, " + std::to_string(mismatches) + " mismatches"};
}

Outcome EerOracle() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> size(3, 50), coarse(0, 15);
  std::normal_distribution<double> noise(0, 1);
  std::uniform_real_distribution<double> shift(-1, 3);
  std::size_t bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> g(size(rng)), i(size(rng));
    const double s = shift(rng);
    const bool ties = trial % 3 == 0;
    for (auto& v : g) v = ties ? coarse(rng) * 0.1 + s * 0.2 : noise(rng) + s;
    for (auto& v : i) v = ties ? coarse(rng) * 0.1 : noise(rng);
    if (!oracle::EerConsistent(g, i, ComputeEer(g, i).eer)) ++bad;
  }
  const double worked = ComputeEer(std::vector<double>{0.9, 0.8, 0.7, 0.6},
                                   std::vector<double>{0.65, 0.3, 0.2, 0.1}).eer;
  return {bad == 0 && worked == 0.25,
          std::to_string(bad) + "/500 outside band, worked example eer " + Fmt(worked)};
}

Outcome SvmCorrectness() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> coord(-3, 3), angle(0, 2 * 3.141592653589793), off(-1, 1);
  std::size_t failures = 0;
  double worst_kkt = 0, worst_sum = 0;
  for (int problem = 0; problem < 100; ++problem) {
    // Points at least 0.3 from a random line, labelled by side.
    const double a = angle(rng), w0 = std::cos(a), w1 = std::sin(a), b = off(rng);
    Matrix x;
    std::vector<int> y;
    while (x.size() < 40) {
      const double p0 = coord(rng), p1 = coord(rng), side = w0 * p0 + w1 * p1 + b;
      if (std::abs(side) < 0.3) continue;
      x.push_back({p0, p1});
      y.push_back(side > 0 ? 1 : -1);
    }
    if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), -1) == 0) {
      x.back() = {-x.back()[0], -x.back()[1]};
      y.back() = -y.back();
      if (std::count(y.begin(), y.end(), y.back()) == 40) continue;
    }
    SvmParams params;
    params.c = 100;
    params.kernel = problem % 2 == 0 ? Kernel{KernelKind::kLinear, 0} : Kernel{KernelKind::kRbf, 0.5};
    const SvmDualSolution sol = SolveSvmDual(x, y, params);
    const auto audit = oracle::AuditSvm(x, y, sol, params.c, params.kernel);
    worst_kkt = std::max(worst_kkt, audit.worst_violation);
    worst_sum = std::max(worst_sum, std::abs(audit.dual_sum));
    const SvmModel model = TrainSvm(x, y, params);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < x.size(); ++i) wrong += (model.Score(x[i]) > 0) != (y[i] > 0);
    if (!sol.converged || audit.worst_violation > params.tolerance ||
        std::abs(audit.dual_sum) > 1e-6 || wrong > 0) {
      ++failures;
    }
  }
  return {failures == 0, std::to_string(failures) + "/100 failed, worst KKT violation " +
                             Fmt(worst_kkt, 6) + ", worst |sum a*y| " + Fmt(worst_sum, 9)};
}

Outcome LengthGate() {
  SynthParams sp;
  sp.users = 3;
  sp.attackers = 1;
  sp.attempts_per_attacker = 1;
  sp.seed = 55;
  const SynthResult corpus = SynthDataset(sp);
  std::vector<UserProfile> profiles;
  for (const auto& u : corpus.dataset.users) {
    std::vector<RawTapSequence> enroll;
    for (const auto& s : u.samples) {
      if (s.meta.kind == SampleKind::kGenuine && enroll.size() < 5) enroll.push_back(s);
    }
    TrainingConfig cfg;
    cfg.classifier = profiles.size() % 2 == 0 ? ClassifierKind::kSvm : ClassifierKind::kForest;
    profiles.push_back(Enroll(u.user_id, enroll, corpus.stats, cfg));
  }
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> len(0, 80), ms(-50, 900);
  std::uniform_real_distribution<double> chan(-0.2, 1.2);
  std::size_t bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const UserProfile& p = profiles[i % profiles.size()];
    std::size_t l = len(rng);
    if (l == p.length) ++l;
    RawTapSequence c;
    double t = ms(rng);
    for (std::size_t k = 0; k < l; ++k) {
      const double down = t, up = t + ms(rng);
      c.taps.push_back({down, up, chan(rng), chan(rng)});
      t = up + ms(rng);
    }
    const Decision d = Verify(p, c);
    if (d.accepted || d.reason != DecisionReason::kLengthMismatch || d.score) ++bad;
  }
  return {bad == 0, std::to_string(bad) + "/10000 not gated"};
}

SynthResult& DefaultCorpus() {
  static SynthResult r = SynthDataset(SynthParams{});
  return r;
}

constexpr std::uint64_t kBenchSeed = 1;

Outcome SyntheticBehavior() {
  TrainingConfig cfg;
  cfg.master_seed = kBenchSeed;
  ProtocolOptions o;
  o.repetitions = 10;
  o.threads = Threads();
  const ProtocolReport rep = RunProtocol(DefaultCorpus().dataset, DefaultCorpus().stats, cfg, o);
  const auto& a = rep.aggregate.attacks;
  const double r = a.at("random").eer, a1 = a.at("attack1").eer, a2 = a.at("attack2").eer,
               a3 = a.at("attack3").eer;
  const double slack = 0.01;
  const bool ok = r < a3 && r < 0.10 && r <= a1 + slack && a1 <= a2 + slack && a2 <= a3 + slack;
  return {ok, "eer random " + Fmt(r) + ", attack1 " + Fmt(a1) + ", attack2 " + Fmt(a2) +
                  ", attack3 " + Fmt(a3) + "; fnr sitting " +
                  Fmt(rep.aggregate.conditions.at("sitting").fnr) + ", walking " +
                  Fmt(rep.aggregate.conditions.at("walking").fnr)};
}

Outcome EnrollmentTrend() {
  TrainingConfig cfg;
  cfg.master_seed = kBenchSeed;
  ProtocolOptions o;
  o.repetitions = 10;
  o.threads = Threads();
  const auto rows = SweepEnrollmentSize(DefaultCorpus().dataset, DefaultCorpus().stats, cfg,
                                        {2, 3, 4, 5, 6, 7}, {ClassifierKind::kSvm}, o);
  std::size_t inversions = 0;
  double largest = 0;
  std::string curve;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    curve += (i ? " " : "") + Fmt(rows[i].mean_eer);
    if (i > 0 && rows[i].mean_eer > rows[i - 1].mean_eer) {
      ++inversions;
      largest = std::max(largest, rows[i].mean_eer - rows[i - 1].mean_eer);
    }
  }
  const bool ok = rows.back().mean_eer <= rows.front().mean_eer && inversions <= 1 && largest <= 0.01;
  return {ok, "svm eer n=2..7: " + curve + "; " + std::to_string(inversions) + " inversion(s)"};
}

Outcome VerifyLatency() {
  const auto& user = DefaultCorpus().dataset.users[0];
  std::vector<RawTapSequence> enroll, probes;
  for (const auto& s : user.samples) {
    if (s.meta.kind == SampleKind::kGenuine && enroll.size() < 5) {
      enroll.push_back(s);
    } else {
      probes.push_back(s);
    }
  }
  const UserProfile p = Enroll(user.user_id, enroll, DefaultCorpus().stats, TrainingConfig{});
  std::vector<double> ms;
  std::size_t accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto start = Clock::now();
    accepted += Verify(p, probes[i % probes.size()]).accepted;
    ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
  }
  std::nth_element(ms.begin(), ms.begin() + ms.size() / 2, ms.end());
  const double median = ms[ms.size() / 2];
  return {median < 50.0, "median " + Fmt(median, 3) + " ms over 1000 verifications"};
}

int Run(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome CliDeterminism(const std::string& binary) {
  const fs::path dir = fs::temp_directory_path() / ("tapmein_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string ds = (dir / "ds.json").string();
  if (Run(binary + " synth --users 20 --seed 1 --out " + ds) != 0) return {false, "synth failed"};
  std::string reports[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("report" + std::to_string(i) + ".json");
    const fs::path csv = dir / ("report" + std::to_string(i) + ".csv");
    if (Run(binary + " eval " + ds + " --seed 7 --threads " + std::to_string(Threads()) + " --report " +
            out.string() + " --csv " + csv.string()) != 0) {
      return {false, "eval failed"};
    }
    reports[i] = Slurp(out) + Slurp(csv);
  }
  fs::remove_all(dir);
  const bool same = reports[0] == reports[1] && !reports[0].empty();
  return {same, same ? "reports byte-identical (" + std::to_string(reports[0].size()) + " bytes)"
                     : "reports differ"};
}

Outcome Persistence() {
  SynthParams sp;
  sp.users = 100;
  sp.genuine_per_condition = 4;
  sp.attackers = 2;
  sp.attempts_per_attacker = 3;
  sp.seed = 77;
  const SynthResult corpus = SynthDataset(sp);
  const fs::path dir = fs::temp_directory_path() / ("tapmein_persist_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  gateway::ProfileStore store(dir);
  std::mt19937_64 rng(606);
  std::size_t mismatched = 0, undetected = 0, compared = 0;
  for (std::size_t u = 0; u < corpus.dataset.users.size(); ++u) {
    const auto& user = corpus.dataset.users[u];
    std::vector<RawTapSequence> enroll;
    for (const auto& s : user.samples) {
      if (s.meta.kind == SampleKind::kGenuine && enroll.size() < 5) enroll.push_back(s);
    }
    TrainingConfig cfg;
    cfg.classifier = u % 2 == 0 ? ClassifierKind::kSvm : ClassifierKind::kForest;
    cfg.grid.forest = {{25, 0, 1}};
    cfg.master_seed = u;
    if (u % 3 == 0) cfg.threshold_policy = ThresholdPolicy::Calibrated(0.05, 50);
    const UserProfile before = Enroll(user.user_id, enroll, corpus.stats, cfg);
    store.Save(before);
    const UserProfile after = store.Load(user.user_id);

    // Candidates: every sample stored against this user, topped up with
    // samples from other users and mangled copies.
    std::vector<RawTapSequence> candidates(user.samples.begin(), user.samples.end());
    std::uniform_int_distribution<std::size_t> pick_user(0, corpus.dataset.users.size() - 1);
    while (candidates.size() < 100) {
      const auto& other = corpus.dataset.users[pick_user(rng)].samples;
      RawTapSequence c = other[rng() % other.size()];
      if (rng() % 4 == 0 && c.taps.size() > 1) std::swap(c.taps[0], c.taps[1]);
      candidates.push_back(c);
    }
    for (const auto& c : candidates) {
      ++compared;
      if (!(Verify(before, c) == Verify(after, c))) ++mismatched;
    }

    const fs::path path = store.PathFor(user.user_id);
    std::string bytes = Slurp(path);
    const std::size_t pos = rng() % bytes.size();
    bytes[pos] = static_cast<char>(bytes[pos] ^ static_cast<char>(1 + rng() % 255));
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
    try {
      store.Load(user.user_id);
      ++undetected;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kCorruptRecord) ++undetected;
    }
  }
  fs::remove_all(dir);
  return {mismatched == 0 && undetected == 0 && compared == 10000,
          std::to_string(compared) + " decisions compared, " + std::to_string(mismatched) +
              " differed; " + std::to_string(undetected) + "/100 corruptions undetected"};
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance_test <path-to-tapmein>\n";
    return 2;
  }
  const std::string binary = argv[1];
  const std::vector<Criterion> criteria{
      {1, "DFT oracle", 5, DftOracle},
      {2, "feature layout", 1, FeatureLayout},
      {3, "EER oracle", 5, EerOracle},
      {4, "SVM correctness", 30, SvmCorrectness},
      {5, "length-gate totality", 5, LengthGate},
      {6, "synthetic-corpus behavior", 300, SyntheticBehavior},
      {7, "enrollment-size trend", 600, EnrollmentTrend},
      {8, "verification latency", 10, VerifyLatency},
      {9, "determinism", 600, [&] { return CliDeterminism(binary); }},
      {10, "persistence round-trip", 30, Persistence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = o.pass && in_budget;
    failed += !pass;
    std::printf("criterion %2d %s: %s (%s; %.2fs of %.0fs budget%s)\n", c.id,
                pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs, c.budget_s,
                in_budget ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
