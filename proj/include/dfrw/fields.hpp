#pragma once

#include <span>
#include <vector>

#include "dfrw/lattice.hpp"

namespace dfrw {

/// Real function of the sites. Inner products are normalized by the number
/// of sites so that they estimate expectations under the uniform measure.
class ScalarField {
 public:
  explicit ScalarField(Torus torus);
  ScalarField(Torus torus, std::vector<double> values);

  const Torus& torus() const { return torus_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t site) { return values_[site]; }
  double operator[](std::size_t site) const { return values_[site]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double mean() const;
  bool is_mean_zero(double tol = 1e-12) const;
  ScalarField centered() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

 private:
  Torus torus_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

double inner(const ScalarField& f, const ScalarField& g);
double norm(const ScalarField& f);

/// Edge field u_k(x), stored site-major with the 2d directions innermost.
/// Members of the space V satisfy u_k(x) + u_{-k}(x+k) = 0.
class VectorField {
 public:
  explicit VectorField(Torus torus);
  VectorField(Torus torus, std::vector<double> values);

  const Torus& torus() const { return torus_; }
  int directions() const { return torus_.directions(); }
  double& at(std::size_t site, int dir) { return values_[site * torus_.directions() + dir]; }
  double at(std::size_t site, int dir) const { return values_[site * torus_.directions() + dir]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double s);

 private:
  Torus torus_;
  std::vector<double> values_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// <u, v> = (1/2) sum_k <u_k, v_k>.
double inner(const VectorField& u, const VectorField& v);
double norm(const VectorField& u);

/// max |u_k(x) + u_{-k}(x+k)|.
double antisymmetry_residual(const VectorField& u);

/// max |u_k(x) + u_l(x+k) - u_l(x) - u_k(x+l)|; zero exactly on gradients.
double gradient_residual(const VectorField& u);

double max_abs(std::span<const double> v);

}  // namespace dfrw
