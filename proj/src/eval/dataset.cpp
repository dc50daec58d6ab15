#include "tapmein/eval/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "tapmein/error.hpp"
#include "tapmein/random.hpp"

namespace tapmein {

namespace {

constexpr double kMinDurationMs = 1.0;

struct Melody {
  std::vector<double> down;
  std::vector<double> up;
};

struct Persona {
  double pressure = 0.5;
  double size = 0.5;
};

Melody RandomMelody(const SynthParams& p, Rng& rng) {
  std::uniform_int_distribution<std::size_t> len(p.min_length, p.max_length);
  std::uniform_real_distribution<double> down(60.0, 400.0);
  std::uniform_real_distribution<double> up(60.0, 700.0);
  Melody m;
  const std::size_t l = len(rng);
  for (std::size_t i = 0; i < l; ++i) m.down.push_back(down(rng));
  for (std::size_t i = 0; i + 1 < l; ++i) m.up.push_back(up(rng));
  return m;
}

double Jittered(double base, double rel_sigma, Rng& rng) {
  if (rel_sigma <= 0.0) return base;
  std::normal_distribution<double> noise(0.0, rel_sigma);
  return std::max(kMinDurationMs, base * (1.0 + noise(rng)));
}

double Channel(double mean, double sigma, Rng& rng) {
  if (sigma <= 0.0) return std::clamp(mean, 0.0, 1.0);
  std::normal_distribution<double> noise(mean, sigma);
  return std::clamp(noise(rng), 0.0, 1.0);
}

RawTapSequence Render(const Melody& m, const Persona& persona, double rel_sigma,
                      double channel_sigma, Rng& rng) {
  ProcessedSequence ps;
  for (std::size_t i = 0; i < m.down.size(); ++i) {
    ps.pressures.push_back(Channel(persona.pressure, channel_sigma, rng));
    ps.sizes.push_back(Channel(persona.size, channel_sigma, rng));
    ps.down_durations.push_back(Jittered(m.down[i], rel_sigma, rng));
    if (i + 1 < m.down.size()) ps.up_durations.push_back(Jittered(m.up[i], rel_sigma, rng));
  }
  return Materialize(ps);
}

std::string UserId(std::size_t i) {
  std::string digits = std::to_string(i);
  return "u" + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') + digits;
}

}  // namespace

void CheckDataset(const LabeledDataset& ds) {
  for (const UserSamples& u : ds.users) {
    std::size_t l = 0;
    for (const RawTapSequence& s : u.samples) {
      ValidateSequence(s);
      if (s.meta.kind != SampleKind::kGenuine) continue;
      if (l == 0) l = s.length();
      if (s.length() != l) {
        throw Error(ErrorCode::kInconsistentLength,
                    "user " + u.user_id + " has genuine samples of different lengths");
      }
    }
  }
}

std::vector<ProcessedSequence> GenuineCorpus(const LabeledDataset& ds) {
  std::vector<ProcessedSequence> corpus;
  for (const UserSamples& u : ds.users)
    for (const RawTapSequence& s : u.samples)
      if (s.meta.kind == SampleKind::kGenuine) corpus.push_back(ExtractDurations(s));
  return corpus;
}

SynthResult SynthDataset(const SynthParams& p) {
  if (p.users < 2) throw Error(ErrorCode::kInvalidArgument, "synth needs >= 2 users");
  if (p.min_length < kMinTaps || p.max_length > kMaxTaps || p.min_length > p.max_length) {
    throw Error(ErrorCode::kInvalidArgument, "synth length range out of bounds");
  }
  if (p.persona_min < 0.0 || p.persona_max > 1.0 || p.persona_min > p.persona_max) {
    throw Error(ErrorCode::kInvalidArgument, "persona range must lie in [0, 1]");
  }

  std::vector<Melody> melodies(p.users);
  std::vector<Persona> personas(p.users);
  for (std::size_t u = 0; u < p.users; ++u) {
    Rng rng = MakeStream(p.seed, {0, u});
    melodies[u] = RandomMelody(p, rng);
    std::uniform_real_distribution<double> persona(p.persona_min, p.persona_max);
    personas[u].pressure = persona(rng);
    personas[u].size = persona(rng);
  }

  const std::array<std::pair<SampleKind, double>, 3> imitation{{
      {SampleKind::kAttack1, p.attack1_jitter},
      {SampleKind::kAttack2, p.attack2_jitter},
      {SampleKind::kAttack3, p.attack3_jitter},
  }};

  SynthResult out;
  for (std::size_t u = 0; u < p.users; ++u) {
    Rng rng = MakeStream(p.seed, {1, u});
    UserSamples user;
    user.user_id = UserId(u);
    for (Condition cond : {Condition::kSitting, Condition::kWalking}) {
      const double sigma = p.duration_jitter *
                           (cond == Condition::kWalking ? p.walking_jitter_scale : 1.0);
      for (std::size_t k = 0; k < p.genuine_per_condition; ++k) {
        RawTapSequence s = Render(melodies[u], personas[u], sigma, p.channel_jitter, rng);
        s.meta = {user.user_id, cond, SampleKind::kGenuine, std::nullopt};
        user.samples.push_back(std::move(s));
      }
    }

    // Attackers are the next users in ring order.
    const std::size_t attacker_count = std::min(p.attackers, p.users - 1);
    for (std::size_t a = 0; a < attacker_count; ++a) {
      const std::size_t attacker = (u + 1 + a) % p.users;
      const Persona persona =
          p.attacker_uses_victim_persona ? personas[u] : personas[attacker];
      for (std::size_t k = 0; k < p.attempts_per_attacker; ++k) {
        const Melody fresh = RandomMelody(p, rng);
        RawTapSequence s = Render(fresh, persona, p.duration_jitter, p.channel_jitter, rng);
        s.meta = {user.user_id, Condition::kSitting, SampleKind::kRandom, UserId(attacker)};
        user.samples.push_back(std::move(s));
      }
      for (const auto& [kind, jitter] : imitation) {
        // Imitation error compounds with the attacker's own motor noise.
        const double sigma = std::hypot(p.duration_jitter, jitter);
        for (std::size_t k = 0; k < p.attempts_per_attacker; ++k) {
          RawTapSequence s = Render(melodies[u], persona, sigma, p.channel_jitter, rng);
          s.meta = {user.user_id, Condition::kSitting, kind, UserId(attacker)};
          user.samples.push_back(std::move(s));
        }
      }
    }
    out.dataset.users.push_back(std::move(user));
  }
  const std::vector<ProcessedSequence> corpus = GenuineCorpus(out.dataset);
  out.stats = FitPopulationStats(corpus);
  out.stats.provenance = "synth_dataset(users=" + std::to_string(p.users) +
                         ", genuine_per_condition=" +
                         std::to_string(p.genuine_per_condition) +
                         ", seed=" + std::to_string(p.seed) + ")";
  return out;
}

PopulationStats DefaultPopulationStats() {
  SynthParams p;
  p.users = 40;
  p.attackers = 0;
  p.seed = 20190601;
  return SynthDataset(p).stats;
}

}  // namespace tapmein
