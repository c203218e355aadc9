#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfrw/env.hpp"

namespace dfrw {

enum class Model { LocalRules, Manhattan, SixVertex, SyntheticStream };

Model parse_model(std::string_view name);  // accepts local-rules / local_rules etc.
std::string model_name(Model model);

struct GeneratorConfig {
  Model model = Model::LocalRules;
  int dim = 2;
  int side = 16;
  std::uint64_t seed = 0;
  std::uint64_t sweeps = 0;  // six-vertex only
  double tail_index = 2.5;   // synthetic only; +inf gives bounded ±1 amplitudes
  bool walkable = true;      // synthetic only
};

struct LocalRulesSample {
  TorusEnv env;
  StreamTensor stream;
};

/// Independent ±1 orientation per 2-face with amplitude 1/(2(d-1)); the drift
/// is the curl of the resulting stream tensor, so |b| <= 1.
LocalRulesSample gen_local_rules(int dim, int side, std::uint64_t seed);

/// Each lattice line (a full cycle of the torus) gets an independent ±1
/// orientation; b_{+a} = s, b_{-a} = -s along a line of orientation s.
TorusEnv gen_manhattan(int dim, int side, std::uint64_t seed);

/// Manhattan environment from explicit orientations. orientations[a] lists
/// the ±1 sign of every line parallel to axis a, ordered by the site index of
/// the line's point with x_a = 0.
TorusEnv manhattan_from_orientations(const Torus& torus, const std::vector<std::vector<int>>& orientations,
                                     EnvMeta meta = {"manhattan", 0});

struct FlipStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double acceptance() const { return proposed == 0 ? 0.0 : static_cast<double>(accepted) / proposed; }
};

struct SixVertexSample {
  TorusEnv env;
  FlipStats flips;
};

/// Ice-rule edge orientations on the L×L torus, from the alternating
/// zero-slope state followed by `sweeps` sweeps (L² proposals each) of
/// directed-plaquette reversals. With check_each_sweep the ice rule is
/// re-verified after every sweep.
SixVertexSample gen_six_vertex(int side, std::uint64_t seed, std::uint64_t sweeps, bool check_each_sweep = false);

struct SyntheticSample {
  StreamTensor stream;
  TorusEnv env;
  double scale = 1.0;  // factor applied to the raw amplitudes (walkable rescaling)
};

/// I.i.d. symmetric two-sided Pareto plaquette amplitudes, P(|psi| > x) = x^-tail
/// for x >= 1, quantized to a 2^-24 grid. tail_index must exceed 2 (finite
/// second moment). walkable rescales by the largest power of two giving |b| <= 1.
SyntheticSample gen_synthetic_stream(int dim, int side, std::uint64_t seed, double tail_index, bool walkable);

struct GeneratedEnv {
  TorusEnv env;
  std::optional<StreamTensor> stream;
  std::optional<FlipStats> flips;
};

GeneratedEnv generate(const GeneratorConfig& config);

}  // namespace dfrw
