#include "dfrw/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "dfrw/error.hpp"
#include "dfrw/rng.hpp"

namespace dfrw {

Model parse_model(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "local-rules") return Model::LocalRules;
  if (n == "manhattan") return Model::Manhattan;
  if (n == "six-vertex") return Model::SixVertex;
  if (n == "synthetic" || n == "synthetic-stream") return Model::SyntheticStream;
  throw ValidationError("unknown model '" + std::string(name) + "'");
}

std::string model_name(Model model) {
  switch (model) {
    case Model::LocalRules: return "local_rules";
    case Model::Manhattan: return "manhattan";
    case Model::SixVertex: return "six_vertex";
    case Model::SyntheticStream: return "synthetic_stream";
  }
  return "unknown";
}

LocalRulesSample gen_local_rules(int dim, int side, std::uint64_t seed) {
  const Torus torus(dim, side);
  Rng rng = make_rng(seed, 0, rng_tag::kGenerator);
  // 1/(2(d-1)) rounded down to a 2^-48 grid: every multiple that occurs in the
  // curl is then exact, so the divergence vanishes identically in floating point.
  const double amplitude = std::ldexp(std::floor(std::ldexp(1.0 / (2.0 * (dim - 1)), 48)), -48);
  const auto pairs = axis_pairs(dim);
  std::vector<std::vector<double>> psi(pairs.size(), std::vector<double>(torus.sites()));
  for (auto& face : psi) {
    for (double& v : face) v = amplitude * random_sign(rng);
  }
  StreamTensor stream = StreamTensor::from_plaquettes(torus, psi);
  TorusEnv env(curl_of_stream(stream), {"local_rules", seed});
  return {std::move(env), std::move(stream)};
}

TorusEnv manhattan_from_orientations(const Torus& torus, const std::vector<std::vector<int>>& orientations,
                                     EnvMeta meta) {
  const int d = torus.dim();
  const std::size_t lines = torus.sites() / torus.side();
  if (orientations.size() != static_cast<std::size_t>(d)) throw ValidationError("one orientation list per axis");
  std::vector<double> b(torus.sites() * torus.directions(), 0.0);
  for (int a = 0; a < d; ++a) {
    if (orientations[a].size() != lines) throw ValidationError("wrong number of line orientations");
    // Lines parallel to axis a are enumerated by the sites with x_a = 0, in site order.
    std::size_t line = 0;
    for (std::size_t base = 0; base < torus.sites(); ++base) {
      if (torus.coords(base)[a] != 0) continue;
      const int s = orientations[a][line++];
      if (s != 1 && s != -1) throw ValidationError("line orientation must be +1 or -1");
      for (int step = 0; step < torus.side(); ++step) {
        const std::size_t x = base + static_cast<std::size_t>(step) * torus.stride(a);
        b[x * torus.directions() + 2 * a] = s;
        b[x * torus.directions() + 2 * a + 1] = -s;
      }
    }
  }
  return TorusEnv(torus, std::move(b), std::move(meta));
}

TorusEnv gen_manhattan(int dim, int side, std::uint64_t seed) {
  const Torus torus(dim, side);
  Rng rng = make_rng(seed, 0, rng_tag::kGenerator);
  const std::size_t lines = torus.sites() / torus.side();
  std::vector<std::vector<int>> orientations(dim, std::vector<int>(lines));
  for (auto& axis : orientations) {
    for (int& s : axis) s = random_sign(rng);
  }
  return manhattan_from_orientations(torus, orientations, {"manhattan", seed});
}

namespace {

// Edge orientation o_a(x) = +1 when the edge (x, x+e_a) points from x to x+e_a.
struct IceState {
  Torus torus;
  std::vector<std::int8_t> horizontal;  // axis 0
  std::vector<std::int8_t> vertical;    // axis 1

  explicit IceState(int side) : torus(2, side), horizontal(torus.sites()), vertical(torus.sites()) {
    for (std::size_t x = 0; x < torus.sites(); ++x) {
      const Coords c = torus.coords(x);
      horizontal[x] = (c[1] % 2 == 0) ? 1 : -1;
      vertical[x] = (c[0] % 2 == 0) ? 1 : -1;
    }
  }

  bool ice_rule_holds() const {
    for (std::size_t x = 0; x < torus.sites(); ++x) {
      const int out = (horizontal[x] > 0) + (horizontal[torus.neighbor(x, 1)] < 0) + (vertical[x] > 0) +
                      (vertical[torus.neighbor(x, 3)] < 0);
      if (out != 2) return false;
    }
    return true;
  }

  // Reverses the face with lower-left corner x when its boundary is a directed cycle.
  bool try_flip(std::size_t x) {
    const std::size_t right = torus.neighbor(x, 0);
    const std::size_t up = torus.neighbor(x, 2);
    const int bottom = horizontal[x];
    const int east = vertical[right];
    const int top = horizontal[up];
    const int west = vertical[x];
    if (bottom != east || top != west || bottom != -top) return false;
    horizontal[x] = static_cast<std::int8_t>(-bottom);
    vertical[right] = static_cast<std::int8_t>(-east);
    horizontal[up] = static_cast<std::int8_t>(-top);
    vertical[x] = static_cast<std::int8_t>(-west);
    return true;
  }

  TorusEnv to_env(std::uint64_t seed) const {
    std::vector<double> b(torus.sites() * 4);
    for (std::size_t x = 0; x < torus.sites(); ++x) {
      b[x * 4 + 0] = horizontal[x];
      b[x * 4 + 1] = -horizontal[torus.neighbor(x, 1)];
      b[x * 4 + 2] = vertical[x];
      b[x * 4 + 3] = -vertical[torus.neighbor(x, 3)];
    }
    return TorusEnv(torus, std::move(b), {"six_vertex", seed});
  }
};

}  // namespace

SixVertexSample gen_six_vertex(int side, std::uint64_t seed, std::uint64_t sweeps, bool check_each_sweep) {
  IceState state(side);
  Rng rng = make_rng(seed, 0, rng_tag::kGenerator);
  FlipStats flips;
  const std::uint64_t faces = state.torus.sites();
  for (std::uint64_t sweep = 0; sweep < sweeps; ++sweep) {
    for (std::uint64_t i = 0; i < faces; ++i) {
      ++flips.proposed;
      if (state.try_flip(uniform_below(rng, faces))) ++flips.accepted;
    }
    if (check_each_sweep && !state.ice_rule_holds()) {
      throw NumericalError("ice rule broken after sweep " + std::to_string(sweep));
    }
  }
  return {state.to_env(seed), flips};
}

SyntheticSample gen_synthetic_stream(int dim, int side, std::uint64_t seed, double tail_index, bool walkable) {
  if (!(tail_index > 2.0)) throw ValidationError("tail_index must exceed 2 for a square-integrable stream tensor");
  const Torus torus(dim, side);
  Rng rng = make_rng(seed, 0, rng_tag::kGenerator);
  const auto pairs = axis_pairs(dim);
  std::vector<std::vector<double>> psi(pairs.size(), std::vector<double>(torus.sites()));
  const bool bounded = std::isinf(tail_index);
  for (auto& face : psi) {
    for (double& v : face) {
      const double u = 1.0 - uniform01(rng);  // (0, 1]
      // Quantized to 2^-24 so that curl sums are exact.
      const double magnitude = bounded ? 1.0 : std::ldexp(std::round(std::ldexp(std::pow(u, -1.0 / tail_index), 24)), -24);
      v = random_sign(rng) * magnitude;
    }
  }
  StreamTensor stream = StreamTensor::from_plaquettes(torus, psi);
  VectorField drift = curl_of_stream(stream);
  double scale = 1.0;
  if (walkable) {
    const double peak = max_abs(drift.values());
    if (peak > 1.0) {
      int e = 0;
      const double f = std::frexp(peak, &e);
      scale = std::ldexp(1.0, f == 0.5 ? 1 - e : -e);
      stream = stream.scaled(scale);
      drift = curl_of_stream(stream);
    }
  }
  return {std::move(stream), TorusEnv(drift, {"synthetic_stream", seed}), scale};
}

GeneratedEnv generate(const GeneratorConfig& config) {
  switch (config.model) {
    case Model::LocalRules: {
      auto s = gen_local_rules(config.dim, config.side, config.seed);
      return {std::move(s.env), std::move(s.stream), std::nullopt};
    }
    case Model::Manhattan:
      return {gen_manhattan(config.dim, config.side, config.seed), std::nullopt, std::nullopt};
    case Model::SixVertex: {
      if (config.dim != 2) throw ValidationError("six-vertex sampling requires d = 2");
      auto s = gen_six_vertex(config.side, config.seed, config.sweeps);
      return {std::move(s.env), std::nullopt, s.flips};
    }
    case Model::SyntheticStream: {
      auto s = gen_synthetic_stream(config.dim, config.side, config.seed, config.tail_index, config.walkable);
      return {std::move(s.env), std::move(s.stream), std::nullopt};
    }
  }
  throw ValidationError("unknown model");
}

}  // namespace dfrw
