#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rroff/delay_line.hpp"

namespace rroff {

// c_1 q^-1 + ... + c_n q^-n. Monic denominators A = 1 - A* are stored as A*.
class DelayPolynomial {
 public:
  DelayPolynomial() = default;
  explicit DelayPolynomial(std::vector<double> coeffs);

  std::size_t order() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  std::span<const double> coeffs() const { return coeffs_; }
  // 1-based tap access, tap(j) multiplies q^-j.
  double tap(std::size_t j) const { return coeffs_[j - 1]; }

  friend bool operator==(const DelayPolynomial&, const DelayPolynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

// Sum_j c_j e^{-j omega j}.
std::complex<double> evaluate(std::span<const double> coeffs, double omega);
inline std::complex<double> evaluate(const DelayPolynomial& p, double omega) {
  return evaluate(p.coeffs(), omega);
}

// 1 - A*(e^{-j omega}).
std::complex<double> evaluate_monic(const DelayPolynomial& a_star, double omega);

struct FrequencyPoint {
  double omega = 0.0;
  double magnitude = 0.0;
  double phase = 0.0;  // (-pi, pi]
};

// Magnitude and phase of the polynomial at omega; omega must lie in [0, pi].
FrequencyPoint freq_response(const DelayPolynomial& poly, double omega);

// 2x2 rotation-scaling block m*[[cos psi, sin psi], [-sin psi, cos psi]] for a
// complex gain m*e^{j psi}. Maps the (cos, sin) coefficient pair of a settled
// sinusoid to the pair of the filtered sinusoid.
struct Block2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // [[a, b], [c, d]]

  static Block2 from_gain(std::complex<double> g) {
    return {g.real(), g.imag(), -g.imag(), g.real()};
  }
  static Block2 from_polar(double magnitude, double phase);
  static Block2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double determinant() const { return a * d - b * c; }
  Block2 inverse() const;
  Block2 transpose() const { return {a, c, b, d}; }
  Block2 operator*(const Block2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  // y = M x for x = (x0, x1).
  void apply(double x0, double x1, double& y0, double& y1) const {
    y0 = a * x0 + b * x1;
    y1 = c * x0 + d * x1;
  }
};

// Monic product (1 - A1*)(1 - A2*) returned as its A* form.
DelayPolynomial monic_product(const DelayPolynomial& a1_star, const DelayPolynomial& a2_star);

// B * (1 - A*), both strictly proper / monic, result strictly proper.
DelayPolynomial numerator_times_monic(const DelayPolynomial& num, const DelayPolynomial& a_star);

// Strictly proper SISO system y = B(q^-1)/A(q^-1) u with A = 1 - A*.
class RationalSystem {
 public:
  RationalSystem() = default;
  RationalSystem(DelayPolynomial num, DelayPolynomial den_star);

  // y(k) = sum_i a_i y(k-i) + sum_j b_j u(k-j); then records u(k), y(k).
  double step(double u);
  void reset();

  const DelayPolynomial& num() const { return num_; }
  const DelayPolynomial& den_star() const { return den_star_; }

  // Magnitudes of the poles (roots of z^n - a_1 z^{n-1} - ... - a_n). Diagnostic only.
  std::vector<double> pole_magnitudes() const;
  bool is_stable() const;

 private:
  DelayPolynomial num_;
  DelayPolynomial den_star_;
  TappedDelayLine inputs_;
  TappedDelayLine outputs_;
};

}  // namespace rroff
