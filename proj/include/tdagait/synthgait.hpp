#pragma once
// Synthetic gait-like cohorts with a tunable loop in delay space.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tdagait/ingest.hpp"

namespace tdagait {

/// Per-class signal recipe: offset + A sin(w i + phi) + h A sin(2 w i + phi2)
/// + trend i + noise * (1 + mod sin(w_mod i)) * N(0, 1).
struct ClassRecipe {
  Group group = Group::kIPD;
  std::size_t subjects = 15;
  double amplitude = 1.0;
  double period = 36.0 / 7.0;  // samples per cycle; 36/7 visits 36 distinct phases
  double harmonic = 0.0;       // relative amplitude of the second harmonic
  double noise = 0.0;          // standard deviation of the Gaussian term
  double noise_modulation = 0.5;
  double trend = 0.0;
  double amplitude_jitter = 0.05;  // per-subject relative amplitude spread
  /// Fraction by which the On state reduces `noise` (0 = no effect).
  double medication_gain = 0.0;
};

struct SynthConfig {
  std::vector<ClassRecipe> classes;
  std::size_t series_length = 36;
  std::vector<Variable> variables{kAllVariables.begin(), kAllVariables.end()};
  std::uint64_t seed = 0;

  /// Two patient classes: IPD with a clean limit cycle, VaP with the same
  /// cycle plus amplitude-modulated noise.
  static SynthConfig two_class(std::size_t ipd, std::size_t vap, double vap_noise,
                               std::uint64_t seed);
  /// CO / IPD / VaP with IPD as the intermediate recipe.
  static SynthConfig three_class(std::size_t co, std::size_t ipd, std::size_t vap,
                                 std::uint64_t seed);

  /// Throws ConfigError.
  void validate() const;
};

/// Deterministic for a given config. CO subjects get one None series per
/// variable; patients get Off and On series.
GaitDataset generate_cohort(const SynthConfig& cfg);

}  // namespace tdagait
