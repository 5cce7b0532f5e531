#include "tdagait/synthgait.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "tdagait/error.hpp"

namespace tdagait {
namespace {

// Per-variable offsets and scales so the six channels do not coincide.
struct Channel {
  double offset;
  double scale;
  double phase;
};

Channel channel_of(Variable v) {
  switch (v) {
    case Variable::kLiftOffAngle: return {40.0, 1.0, 0.0};
    case Variable::kMaxHC: return {25.0, 1.0, 0.7};
    case Variable::kMaxTESW: return {12.0, 1.0, 1.3};
    case Variable::kMinTC: return {1.5, 1.0, 2.1};
    case Variable::kMaxTLSW: return {15.0, 1.0, 2.9};
    case Variable::kStrikeAngle: return {20.0, 1.0, 3.7};
  }
  return {0.0, 1.0, 0.0};
}

std::string subject_name(Group g, std::size_t index) {
  std::ostringstream os;
  os << to_string(g) << std::setw(2) << std::setfill('0') << index + 1;
  return os.str();
}

}  // namespace

SynthConfig SynthConfig::two_class(std::size_t ipd, std::size_t vap, double vap_noise,
                                   std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  ClassRecipe a;
  a.group = Group::kIPD;
  a.subjects = ipd;
  a.amplitude = 1.0;
  ClassRecipe b = a;
  b.group = Group::kVaP;
  b.subjects = vap;
  b.amplitude = 2.0;
  b.noise = vap_noise;
  b.medication_gain = 0.5;
  cfg.classes = {a, b};
  return cfg;
}

SynthConfig SynthConfig::three_class(std::size_t co, std::size_t ipd, std::size_t vap,
                                     std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  ClassRecipe control;
  control.group = Group::kCO;
  control.subjects = co;
  control.amplitude = 1.0;
  ClassRecipe mid = control;
  mid.group = Group::kIPD;
  mid.subjects = ipd;
  mid.amplitude = 1.5;
  mid.noise = 0.1;
  mid.medication_gain = 0.5;
  ClassRecipe degraded = mid;
  degraded.group = Group::kVaP;
  degraded.subjects = vap;
  degraded.amplitude = 2.0;
  degraded.noise = 0.3;
  degraded.medication_gain = 0.3;
  cfg.classes = {control, mid, degraded};
  return cfg;
}

void SynthConfig::validate() const {
  if (classes.empty()) throw Error(ErrorCode::kConfig, "no class recipes");
  if (series_length < 8) throw Error(ErrorCode::kConfig, "series_length must be >= 8");
  if (variables.empty()) throw Error(ErrorCode::kConfig, "no variables to generate");
  std::set<Group> groups;
  for (const auto& c : classes) {
    if (!groups.insert(c.group).second) throw Error(ErrorCode::kConfig, "group listed twice");
    if (c.subjects == 0) throw Error(ErrorCode::kConfig, "class with zero subjects");
    if (c.noise < 0.0 || c.amplitude_jitter < 0.0) {
      throw Error(ErrorCode::kConfig, "noise and jitter must be >= 0");
    }
    if (!(c.period > 0.0)) throw Error(ErrorCode::kConfig, "period must be positive");
    if (c.medication_gain < 0.0 || c.medication_gain > 1.0) {
      throw Error(ErrorCode::kConfig, "medication_gain must lie in [0, 1]");
    }
  }
}

GaitDataset generate_cohort(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  std::vector<GaitSeries> series;
  for (const ClassRecipe& recipe : cfg.classes) {
    for (std::size_t s = 0; s < recipe.subjects; ++s) {
      const std::string id = subject_name(recipe.group, s);
      const double amp =
          recipe.amplitude * (1.0 + recipe.amplitude_jitter * (2.0 * unit(rng) - 1.0));
      const double subject_phase = kTwoPi * unit(rng);
      std::vector<State> states = recipe.group == Group::kCO
                                      ? std::vector<State>{State::kNone}
                                      : std::vector<State>{State::kOff, State::kOn};
      for (Variable v : cfg.variables) {
        const Channel ch = channel_of(v);
        for (State st : states) {
          const double noise =
              st == State::kOn ? recipe.noise * (1.0 - recipe.medication_gain) : recipe.noise;
          const double w = kTwoPi / recipe.period;
          const double w_mod = w / 5.0;
          GaitSeries g{id, recipe.group, st, v, {}};
          g.values.reserve(cfg.series_length);
          for (std::size_t i = 0; i < cfg.series_length; ++i) {
            const double t = static_cast<double>(i);
            const double phi = subject_phase + ch.phase;
            double x = ch.offset + ch.scale * amp * std::sin(w * t + phi);
            x += ch.scale * recipe.harmonic * amp * std::sin(2.0 * w * t + 2.0 * phi);
            x += recipe.trend * t;
            const double z = gauss(rng);
            if (noise > 0.0) {
              x += noise * (1.0 + recipe.noise_modulation * std::sin(w_mod * t)) * z;
            }
            g.values.push_back(x);
          }
          series.push_back(std::move(g));
        }
      }
    }
  }
  return GaitDataset(std::move(series));
}

}  // namespace tdagait
