#include "dfrw/env_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "dfrw/error.hpp"

namespace dfrw {

namespace {

constexpr char kEnvMagic[5] = {'D', 'F', 'R', 'W', '1'};
constexpr char kStreamMagic[5] = {'D', 'F', 'S', 'T', '1'};

template <typename T>
void put_le(std::ofstream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("truncated snapshot");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void put_f64(std::ofstream& out, double v) { put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::ifstream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

void write_header(std::ofstream& out, const char (&magic)[5], const Torus& t, const EnvMeta& meta) {
  if (meta.generator.size() > 255) throw ValidationError("generator name longer than 255 bytes");
  out.write(magic, 5);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.side()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(meta.generator.size()));
  out.write(meta.generator.data(), static_cast<std::streamsize>(meta.generator.size()));
  put_le<std::uint64_t>(out, meta.seed);
}

Torus read_header(std::ifstream& in, const char (&magic)[5], EnvMeta& meta) {
  char got[5];
  if (!in.read(got, 5) || std::memcmp(got, magic, 5) != 0) {
    throw IoError(std::string("bad magic, expected ") + std::string(magic, 5));
  }
  const int dim = get_le<std::uint8_t>(in);
  const auto side = get_le<std::uint32_t>(in);
  const auto name_len = get_le<std::uint8_t>(in);
  meta.generator.assign(name_len, '\0');
  if (name_len > 0 && !in.read(meta.generator.data(), name_len)) throw IoError("truncated snapshot");
  meta.seed = get_le<std::uint64_t>(in);
  return Torus(dim, static_cast<int>(side));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void expect_eof(std::ifstream& in) {
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after snapshot payload");
}

}  // namespace

void write_env(const std::filesystem::path& path, const TorusEnv& env) {
  auto out = open_out(path);
  write_header(out, kEnvMagic, env.torus(), env.meta());
  for (double v : env.drift()) put_f64(out, v);
  if (!out) throw IoError("write failed: " + path.string());
}

TorusEnv read_env(const std::filesystem::path& path) {
  auto in = open_in(path);
  EnvMeta meta;
  Torus t = read_header(in, kEnvMagic, meta);
  std::vector<double> b(t.sites() * t.directions());
  for (double& v : b) v = get_f64(in);
  expect_eof(in);
  return TorusEnv(t, std::move(b), std::move(meta));
}

void write_stream(const std::filesystem::path& path, const StreamTensor& h, const EnvMeta& meta) {
  auto out = open_out(path);
  const Torus& t = h.torus();
  write_header(out, kStreamMagic, t, meta);
  const int n = t.directions();
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      for (std::size_t x = 0; x < t.sites(); ++x) put_f64(out, h.h(x, k, l));
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

StreamTensor read_stream(const std::filesystem::path& path, EnvMeta* meta_out) {
  auto in = open_in(path);
  EnvMeta meta;
  Torus t = read_header(in, kStreamMagic, meta);
  const auto n = static_cast<std::size_t>(t.directions());
  std::vector<double> h(t.sites() * n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      for (std::size_t x = 0; x < t.sites(); ++x) {
        const double v = get_f64(in);
        h[(x * n + k) * n + l] = v;
        h[(x * n + l) * n + k] = -v;
      }
    }
  }
  expect_eof(in);
  StreamTensor tensor(t, std::move(h));
  if (!validate_stream(tensor).passed()) throw ValidationError("stream tensor file violates shift symmetries");
  if (meta_out) *meta_out = std::move(meta);
  return tensor;
}

}  // namespace dfrw
