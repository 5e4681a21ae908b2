#pragma once

#include <cstddef>
#include <cstdint>

#include "sahg/graph/dataset.hpp"

namespace sahg::analysis {

/// Anisotropic toy population. Bots sit in tight angular clusters around a
/// few random directions; humans spread over the whole sphere. Directions
/// are Gaussian-on-sphere: normalize(kappa * center + g) with g ~ N(0, I/D),
/// so larger kappa means tighter clusters and infinity collapses a cluster to
/// its center. Radii are log-normal around the per-class scale.
struct SynthConfig {
  std::size_t n = 2000;
  double bot_fraction = 0.5;
  std::size_t dim = 16;
  std::size_t clusters = 2;
  double bot_concentration = 2.0;
  double human_concentration = 0.0;
  double bot_radius = 2.0;
  double human_radius = 2.5;
  double radial_jitter = 0.25;  // sd of log radius
  double noise = 0.05;          // isotropic additive feature noise
  std::uint64_t seed = 0;

  void validate() const;
};

// Labels, features and a stratified 0.7/0.1/0.2 split drawn from the seed.
graph::Dataset generate_synthetic(const SynthConfig& cfg);

}  // namespace sahg::analysis
