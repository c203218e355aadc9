#pragma once

#include <filesystem>

#include "dfrw/env.hpp"

namespace dfrw {

// Snapshot layout (all integers little-endian):
//   magic "DFRW1" | d u8 | L u32 | name_len u8 | name | seed u64 | payload f64...
// Environments store b in site order with directions innermost (axis asc, + before -).
// Stream tensors use magic "DFST1" and store h_kl for direction pairs k < l in
// (k, l, site) order; the remaining entries follow from antisymmetry.

void write_env(const std::filesystem::path& path, const TorusEnv& env);
TorusEnv read_env(const std::filesystem::path& path);

void write_stream(const std::filesystem::path& path, const StreamTensor& h, const EnvMeta& meta);
StreamTensor read_stream(const std::filesystem::path& path, EnvMeta* meta = nullptr);

}  // namespace dfrw
