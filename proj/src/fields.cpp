#include "dfrw/fields.hpp"

#include <algorithm>
#include <cmath>

#include "dfrw/error.hpp"

namespace dfrw {

namespace {

void require_same(const Torus& a, const Torus& b) {
  if (!(a == b)) throw ValidationError("field shapes differ");
}

}  // namespace

ScalarField::ScalarField(Torus torus) : torus_(std::move(torus)), values_(torus_.sites(), 0.0) {}

ScalarField::ScalarField(Torus torus, std::vector<double> values)
    : torus_(std::move(torus)), values_(std::move(values)) {
  if (values_.size() != torus_.sites()) throw ValidationError("scalar field size does not match torus");
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

bool ScalarField::is_mean_zero(double tol) const { return std::abs(mean()) <= tol; }

ScalarField ScalarField::centered() const {
  ScalarField out(*this);
  const double m = mean();
  for (double& v : out.values_) v -= m;
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same(torus_, other.torus_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same(torus_, other.torus_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double inner(const ScalarField& f, const ScalarField& g) {
  require_same(f.torus(), g.torus());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s / static_cast<double>(f.size());
}

double norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

VectorField::VectorField(Torus torus)
    : torus_(std::move(torus)), values_(torus_.sites() * torus_.directions(), 0.0) {}

VectorField::VectorField(Torus torus, std::vector<double> values)
    : torus_(std::move(torus)), values_(std::move(values)) {
  if (values_.size() != torus_.sites() * torus_.directions()) {
    throw ValidationError("vector field size does not match torus");
  }
}

VectorField& VectorField::operator+=(const VectorField& other) {
  require_same(torus_, other.torus_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  require_same(torus_, other.torus_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

double inner(const VectorField& u, const VectorField& v) {
  require_same(u.torus(), v.torus());
  const auto a = u.values();
  const auto b = v.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return 0.5 * s / static_cast<double>(u.torus().sites());
}

double norm(const VectorField& u) { return std::sqrt(inner(u, u)); }

double antisymmetry_residual(const VectorField& u) {
  const Torus& t = u.torus();
  double worst = 0.0;
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < t.directions(); ++k) {
      worst = std::max(worst, std::abs(u.at(x, k) + u.at(t.neighbor(x, k), opposite(k))));
    }
  }
  return worst;
}

double gradient_residual(const VectorField& u) {
  const Torus& t = u.torus();
  double worst = 0.0;
  for (std::size_t x = 0; x < t.sites(); ++x) {
    for (int k = 0; k < t.directions(); ++k) {
      const std::size_t xk = t.neighbor(x, k);
      for (int l = 0; l < t.directions(); ++l) {
        const std::size_t xl = t.neighbor(x, l);
        const double r = u.at(x, k) + u.at(xk, l) - u.at(x, l) - u.at(xl, k);
        worst = std::max(worst, std::abs(r));
      }
    }
  }
  return worst;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace dfrw
