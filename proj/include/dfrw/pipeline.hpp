#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dfrw/config.hpp"

namespace dfrw {

struct Artifact {
  std::string name;
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::vector<Artifact> artifacts;
  std::vector<std::string> stages;
  bool complete = false;
  std::string error;
};

/// Stage selection and seeds validated up front; throws ValidationError on
/// a bad config before anything is written.
void validate_pipeline_config(const Config& config);

/// Runs gen -> walk -> sigma -> h1 -> kv -> stats (those listed in
/// pipeline.stages) into `out_dir` and writes manifest.json there. A failing
/// stage stops the run; the manifest written so far is kept and the error rethrown.
Manifest run_pipeline(const Config& config, const std::filesystem::path& out_dir);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace dfrw
