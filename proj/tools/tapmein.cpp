// tapmein: command-line front end for enrollment, verification, the
// evaluation bench and the HTTP service.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tapmein/authflow.hpp"
#include "tapmein/error.hpp"
#include "tapmein/eval/dataset.hpp"
#include "tapmein/eval/protocol.hpp"
#include "tapmein/gateway/json_io.hpp"
#include "tapmein/gateway/profile_store.hpp"
#include "tapmein/gateway/service.hpp"

namespace {

using namespace tapmein;
using gateway::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRejected = 3;

struct TrainingFlags {
  std::size_t n = 5;
  std::size_t negative_multiplier = 5;
  std::string classifier = "svm";
  std::uint64_t seed = 0;
  double target_fpr = 0.0;  // 0 = native threshold
};

void AddTrainingFlags(CLI::App* cmd, TrainingFlags& f) {
  cmd->add_option("--n", f.n, "Enrollment samples per user")->check(CLI::Range(2, 1000));
  cmd->add_option("--neg-multiplier", f.negative_multiplier, "Negatives per enrollment sample")
      ->check(CLI::Range(1, 1000));
  cmd->add_option("--classifier", f.classifier, "svm or forest")
      ->check(CLI::IsMember({"svm", "forest"}));
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--target-fpr", f.target_fpr,
                  "Calibrate the threshold to this FPR instead of the native one")
      ->check(CLI::Range(0.0, 1.0));
}

TrainingConfig ToConfig(const TrainingFlags& f) {
  TrainingConfig cfg;
  cfg.n = f.n;
  cfg.negative_multiplier = f.negative_multiplier;
  cfg.classifier = *ParseClassifierKind(f.classifier);
  cfg.master_seed = f.seed;
  if (f.target_fpr > 0.0) cfg.threshold_policy = ThresholdPolicy::Calibrated(f.target_fpr);
  return cfg;
}

PopulationStats LoadStatsOr(const std::string& path, const LabeledDataset* fallback) {
  if (!path.empty()) return gateway::PopulationStatsFromJson(gateway::ParseJsonFile(path));
  if (fallback) {
    PopulationStats s = FitPopulationStats(GenuineCorpus(*fallback));
    s.provenance = "fitted from evaluation dataset";
    return s;
  }
  return DefaultPopulationStats();
}

void Emit(const json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    gateway::WriteTextFile(out, text);
  }
}

gateway::HttpServer* g_server = nullptr;

extern "C" void HandleSignal(int) {
  if (g_server) g_server->Stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tap-rhythm two-factor authentication engine"};
  app.require_subcommand(1);

  // synth
  SynthParams synth;
  std::string synth_out, synth_pop_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  synth_cmd->add_option("--users", synth.users, "Simulated users")->check(CLI::Range(2, 100000));
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--genuine-per-condition", synth.genuine_per_condition);
  synth_cmd->add_option("--attackers", synth.attackers, "Attackers per victim");
  synth_cmd->add_option("--attempts", synth.attempts_per_attacker, "Attempts per attacker and attack");
  synth_cmd->add_option("--duration-jitter", synth.duration_jitter);
  synth_cmd->add_option("--walking-jitter-scale", synth.walking_jitter_scale);
  synth_cmd->add_option("--out", synth_out, "Dataset document")->required();
  synth_cmd->add_option("--pop-out", synth_pop_out, "Also write fitted population statistics");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Population statistics");
  stats_cmd->require_subcommand(1);
  std::string fit_in, fit_out;
  auto* fit_cmd = stats_cmd->add_subcommand("fit", "Fit statistics from a dataset's genuine samples");
  fit_cmd->add_option("dataset", fit_in)->required();
  fit_cmd->add_option("--out", fit_out);
  std::string default_out;
  auto* default_cmd = stats_cmd->add_subcommand("default", "Write the bundled default statistics");
  default_cmd->add_option("--out", default_out);

  // enroll
  std::string user, samples_path, store_dir, pop_path;
  TrainingFlags train;
  auto* enroll_cmd = app.add_subcommand("enroll", "Enroll a user from sample file");
  enroll_cmd->add_option("--user", user)->required();
  enroll_cmd->add_option("--samples", samples_path, "{\"samples\": [{\"taps\": [...]}, ...]}")->required();
  enroll_cmd->add_option("--store", store_dir)->required();
  enroll_cmd->add_option("--pop", pop_path, "Population statistics (default: bundled)");
  AddTrainingFlags(enroll_cmd, train);

  // verify
  std::string sample_path;
  auto* verify_cmd = app.add_subcommand("verify", "Verify one candidate; exit 0 accepted, 3 rejected");
  verify_cmd->add_option("--user", user)->required();
  verify_cmd->add_option("--sample", sample_path, "{\"taps\": [...]}")->required();
  verify_cmd->add_option("--store", store_dir)->required();

  // eval / sweep-n / rank-features share dataset + protocol flags
  std::string dataset_path, report_out, csv_out;
  std::size_t reps = 30, threads = 1, top_k = 20;
  std::vector<std::size_t> n_values{2, 3, 4, 5, 6, 7};
  std::vector<std::string> classifiers{"svm", "forest"};
  auto add_bench_flags = [&](CLI::App* cmd) {
    cmd->add_option("dataset", dataset_path)->required();
    cmd->add_option("--pop", pop_path, "Population statistics (default: fitted from dataset)");
    cmd->add_option("--reps", reps)->check(CLI::Range(1, 100000));
    cmd->add_option("--threads", threads)->check(CLI::Range(1, 1024));
    AddTrainingFlags(cmd, train);
  };
  auto* eval_cmd = app.add_subcommand("eval", "Run the per-user repetition protocol");
  add_bench_flags(eval_cmd);
  eval_cmd->add_option("--report", report_out, "Report document (default: stdout)");
  eval_cmd->add_option("--csv", csv_out, "Flat table for plotting");

  auto* sweep_cmd = app.add_subcommand("sweep-n", "Enrollment-size sweep");
  add_bench_flags(sweep_cmd);
  sweep_cmd->add_option("--n-values", n_values)->delimiter(',');
  sweep_cmd->add_option("--classifiers", classifiers)->delimiter(',')
      ->check(CLI::IsMember({"svm", "forest"}));
  sweep_cmd->add_option("--out", report_out);

  auto* rank_cmd = app.add_subcommand("rank-features", "Forest feature-importance ranking");
  add_bench_flags(rank_cmd);
  rank_cmd->add_option("--top-k", top_k)->check(CLI::Range(1, 10000));
  rank_cmd->add_option("--out", report_out);

  // serve
  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP authentication service");
  serve_cmd->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--store", store_dir)->required();
  serve_cmd->add_option("--pop", pop_path, "Population statistics (default: bundled)");
  AddTrainingFlags(serve_cmd, train);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) {
      const SynthResult r = SynthDataset(synth);
      gateway::ExportDataset(r.dataset, synth_out);
      if (!synth_pop_out.empty()) Emit(gateway::PopulationStatsToJson(r.stats), synth_pop_out);
      return kExitOk;
    }
    if (*fit_cmd) {
      const LabeledDataset ds = gateway::ImportDataset(fit_in);
      PopulationStats s = FitPopulationStats(GenuineCorpus(ds));
      s.provenance = "fitted from " + fit_in;
      Emit(gateway::PopulationStatsToJson(s), fit_out);
      return kExitOk;
    }
    if (*default_cmd) {
      Emit(gateway::PopulationStatsToJson(DefaultPopulationStats()), default_out);
      return kExitOk;
    }
    if (*enroll_cmd) {
      gateway::ProfileStore store(store_dir);
      const auto samples = gateway::SamplesFromJson(gateway::ParseJsonFile(samples_path));
      const UserProfile profile = Enroll(user, samples, LoadStatsOr(pop_path, nullptr), ToConfig(train));
      store.Save(profile);
      Emit({{"user_id", profile.user_id}, {"length", profile.length}, {"threshold", profile.threshold}}, "");
      return kExitOk;
    }
    if (*verify_cmd) {
      const gateway::ProfileStore store(store_dir);
      const RawTapSequence candidate = gateway::CandidateFromJson(gateway::ParseJsonFile(sample_path));
      const Decision d = Verify(store.Load(user), candidate);
      Emit(gateway::DecisionToJson(d), "");
      return d.accepted ? kExitOk : kExitRejected;
    }
    if (*eval_cmd || *sweep_cmd || *rank_cmd) {
      const LabeledDataset ds = gateway::ImportDataset(dataset_path);
      const PopulationStats stats = LoadStatsOr(pop_path, &ds);
      const TrainingConfig cfg = ToConfig(train);
      ProtocolOptions options;
      options.repetitions = reps;
      options.threads = threads;
      if (*eval_cmd) {
        const ProtocolReport report = RunProtocol(ds, stats, cfg, options);
        Emit(gateway::ReportToJson(report), report_out);
        if (!csv_out.empty()) gateway::WriteTextFile(csv_out, gateway::ReportToCsv(report));
      } else if (*sweep_cmd) {
        std::vector<ClassifierKind> kinds;
        for (const auto& c : classifiers) kinds.push_back(*ParseClassifierKind(c));
        Emit(gateway::SweepToJson(SweepEnrollmentSize(ds, stats, cfg, n_values, kinds, options)),
             report_out);
      } else {
        Emit(gateway::RankingToJson(RankFeatures(ds, stats, cfg, top_k, options)), report_out);
      }
      return kExitOk;
    }
    if (*serve_cmd) {
      gateway::AuthService service(gateway::ProfileStore(store_dir), LoadStatsOr(pop_path, nullptr),
                                   ToConfig(train));
      gateway::HttpServer server(service);
      g_server = &server;
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      std::cerr << "listening on " << host << ":" << port << "\n";
      server.ListenBlocking(host, port);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
