#include "dfrw/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "dfrw/error.hpp"

namespace dfrw {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (d, L, sign) under a lock and kept
// for the lifetime of the process.
class PlanCache {
 public:
  fftw_plan get(const Torus& torus, int sign) {
    const auto key = std::make_tuple(torus.dim(), torus.side(), sign);
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    int n[kMaxDim];
    for (int a = 0; a < torus.dim(); ++a) n[a] = torus.side();
    fftw_complex* scratch = fftw_alloc_complex(torus.sites());
    fftw_plan plan = fftw_plan_dft(torus.dim(), n, scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw NumericalError("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void execute(const Torus& torus, std::span<Complex> data, int sign) {
  if (data.size() != torus.sites()) throw ValidationError("transform size does not match torus");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_cache().get(torus, sign), ptr, ptr);
}

}  // namespace

void fft_forward(const Torus& torus, std::span<Complex> data) { execute(torus, data, FFTW_FORWARD); }

void fft_inverse(const Torus& torus, std::span<Complex> data) {
  execute(torus, data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(torus.sites());
  for (auto& z : data) z *= scale;
}

std::vector<Complex> transform(const ScalarField& f) {
  std::vector<Complex> data(f.values().begin(), f.values().end());
  fft_forward(f.torus(), data);
  return data;
}

std::vector<double> cosine_deficit(const Torus& torus) {
  std::vector<double> one_minus_cos(torus.side());
  for (int n = 0; n < torus.side(); ++n) {
    one_minus_cos[n] = 1.0 - std::cos(2.0 * std::numbers::pi * n / torus.side());
  }
  std::vector<double> out(torus.sites());
  for (std::size_t p = 0; p < torus.sites(); ++p) {
    double s = 0.0;
    for (int a = 0; a < torus.dim(); ++a) s += one_minus_cos[(p / torus.stride(a)) % torus.side()];
    out[p] = s;
  }
  return out;
}

double symbol_value(Symbol symbol, double deficit) {
  if (deficit == 0.0) return 0.0;
  switch (symbol) {
    case Symbol::Green: return 1.0 / deficit;
    case Symbol::InvSqrt: return 1.0 / std::sqrt(2.0 * deficit);
    case Symbol::Sqrt: return std::sqrt(2.0 * deficit);
  }
  return 0.0;
}

namespace {

template <typename SymbolFn>
ScalarField apply_symbol(const ScalarField& f, SymbolFn&& symbol) {
  const Torus& t = f.torus();
  std::vector<Complex> data = transform(f);
  const std::vector<double> deficit = cosine_deficit(t);
  for (std::size_t p = 0; p < t.sites(); ++p) data[p] *= symbol(p, deficit[p]);
  fft_inverse(t, data);
  ScalarField out(t);
  for (std::size_t x = 0; x < t.sites(); ++x) out[x] = data[x].real();
  return out;
}

}  // namespace

ScalarField apply_multiplier(const MultiplierSpec& spec, const ScalarField& f) {
  return apply_symbol(f, [&](std::size_t p, double deficit) { return p == 0 ? 0.0 : symbol_value(spec.symbol, deficit); });
}

ScalarField apply_shifted_inverse(double lambda, const ScalarField& f) {
  if (lambda < 0.0) throw ValidationError("shift must be non-negative");
  return apply_symbol(f, [&](std::size_t p, double deficit) {
    if (p == 0) return lambda > 0.0 ? 1.0 / lambda : 0.0;
    return 1.0 / (lambda + 2.0 * deficit);
  });
}

}  // namespace dfrw
