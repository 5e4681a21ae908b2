#include "sahg/analysis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sahg/error.hpp"
#include "sahg/rng.hpp"

namespace sahg::analysis {

void SynthConfig::validate() const {
  if (n < 20) throw ParameterError("synthetic dataset needs n >= 20");
  if (!(bot_fraction > 0.0 && bot_fraction < 1.0)) throw ParameterError("bot fraction must be in (0, 1)");
  if (dim < 2) throw ParameterError("synthetic feature dimension must be >= 2");
  if (clusters < 1) throw ParameterError("need at least one bot cluster");
  if (!(bot_concentration >= 0.0) || !(human_concentration >= 0.0)) {
    throw ParameterError("concentrations must be >= 0");
  }
  if (!(bot_radius > 0.0) || !(human_radius > 0.0)) throw ParameterError("radial scales must be > 0");
  if (!(radial_jitter >= 0.0) || !(noise >= 0.0)) throw ParameterError("noise levels must be >= 0");
}

namespace {

std::vector<double> random_unit(std::size_t d, Rng& rng) {
  std::vector<double> v(d);
  double ss = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    ss += x * x;
  }
  for (auto& x : v) x /= std::sqrt(ss);
  return v;
}

std::vector<double> around(const std::vector<double>& center, double kappa, Rng& rng) {
  const std::size_t d = center.size();
  if (std::isinf(kappa)) return center;
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> v(d);
  double ss = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    v[j] = kappa * center[j] + rng.normal(0.0, sd);
    ss += v[j] * v[j];
  }
  const double inv = 1.0 / std::sqrt(ss);
  for (auto& x : v) x *= inv;
  return v;
}

}  // namespace

graph::Dataset generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed, "synthetic");
  const std::size_t n = cfg.n, d = cfg.dim;
  const auto n_bot = static_cast<std::size_t>(std::llround(cfg.bot_fraction * static_cast<double>(n)));
  if (n_bot < 3 || n - n_bot < 3) throw ParameterError("each class needs at least 3 members");

  std::vector<std::vector<double>> bot_centers;
  for (std::size_t c = 0; c < cfg.clusters; ++c) bot_centers.push_back(random_unit(d, rng));
  const auto human_center = random_unit(d, rng);

  // Node order is a seeded permutation so classes interleave.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());

  graph::Dataset ds;
  ds.name = "synthetic";
  ds.n = n;
  ds.d = d;
  ds.features.assign(n * d, 0.0f);
  ds.labels.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t node = perm[j];
    const bool bot = j < n_bot;
    const auto u = bot ? around(bot_centers[j % cfg.clusters], cfg.bot_concentration, rng)
                       : around(human_center, cfg.human_concentration, rng);
    const double scale = bot ? cfg.bot_radius : cfg.human_radius;
    const double r = scale * std::exp(cfg.radial_jitter * rng.normal());
    for (std::size_t k = 0; k < d; ++k) {
      const double eps = cfg.noise > 0.0 ? cfg.noise * rng.normal() : 0.0;
      ds.features[node * d + k] = static_cast<float>(r * u[k] + eps);
    }
    ds.labels[node] = bot ? 1 : 0;
  }
  ds.splits = graph::make_splits(ds.labels, {0.7, 0.1, 0.2}, cfg.seed);
  ds.splits_from_file = true;
  return ds;
}

}  // namespace sahg::analysis
