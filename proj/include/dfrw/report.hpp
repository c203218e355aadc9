#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"

#include "dfrw/diffusivity.hpp"
#include "dfrw/h1.hpp"
#include "dfrw/kv.hpp"
#include "dfrw/walk.hpp"

namespace dfrw {

using Json = nlohmann::ordered_json;

/// Walk statistics CSV. Leading columns: t, mean_a, cov_ab (row-major),
/// covY_ab, n. Trailing columns carry meanY, covI, covYI, the raw second
/// moment and the per-batch msd/cov/covY values, so the file round-trips.
/// covY columns are nan when the compensator was not tracked.
void write_stats_csv(const WalkEnsembleStats& stats, const std::filesystem::path& path);
WalkEnsembleStats read_stats_csv(const std::filesystem::path& path);

/// Endpoint samples: header t,x_1..x_d and one row per walker.
void write_endpoints_csv(const WalkEnsembleStats& stats, const std::filesystem::path& path);
struct Endpoints {
  int dim = 0;
  double t = 0.0;
  std::vector<double> positions;
};
Endpoints read_endpoints_csv(const std::filesystem::path& path);

Json sigma_to_json(const DiffusivityEstimate& est, const std::vector<ScanRow>& scan = {});
DiffusivityEstimate sigma_from_json(const Json& j);

Json kv_report(const StreamTensor& h, KvOperator op, std::size_t pairs, const std::vector<double>& Ks,
               std::uint64_t seed);

void write_h1_csv(const std::vector<H1Statistic>& table, const std::filesystem::path& path);

/// Post-processing summary of one walk run: MSD exponent over the upper two
/// decades, Monte Carlo σ² against the reference, martingale diagnostics and
/// (with endpoints) Gaussianity at the last time.
Json stats_report(const WalkEnsembleStats& stats, const DiffusivityEstimate& reference,
                  const std::optional<Endpoints>& endpoints);

/// t, msd, msd_se, trcov_over_t, trcovY_over_t.
void write_curves_csv(const WalkEnsembleStats& stats, const std::filesystem::path& path);

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace dfrw
