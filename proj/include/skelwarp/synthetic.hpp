#pragma once

#include <cstdint>

#include "skelwarp/dataset.hpp"

namespace skelwarp {

/// Parametric action generator on the 15-joint OpenNI skeleton. Each class
/// drives the hands, spine and legs with its own mixture of sinusoids, ramps
/// and arcs; samples vary by subject style, playback speed, sensor noise and
/// camera placement.
struct SyntheticSpec {
  int n_classes = 3;
  int n_subjects = 4;
  int reps = 5;
  double noise = 0.02;      // Gaussian sigma per coordinate, meters
  double speed_min = 0.7;   // playback speed factor range
  double speed_max = 1.4;
  int base_length = 60;     // frames at speed 1
  double style = 0.02;      // per-subject joint offset sigma, meters
  /// Odd-numbered subjects perform every action left-handed.
  bool balanced_handedness = false;
};

void validate(const SyntheticSpec& spec);

/// Deterministic in (spec, seed). Exactly n_subjects * reps samples per class.
Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Resamples a sequence in time by linear interpolation to
/// round(|frames| / speed_factor) frames (at least 2).
RawSequence reparameterize(const RawSequence& seq, double speed_factor);

}  // namespace skelwarp
