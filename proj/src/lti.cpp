#include "rroff/lti.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rroff {

DelayPolynomial::DelayPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw std::invalid_argument("DelayPolynomial: non-finite coefficient");
  }
}

std::complex<double> evaluate(std::span<const double> coeffs, double omega) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double angle = -omega * static_cast<double>(j + 1);
    acc += coeffs[j] * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return acc;
}

std::complex<double> evaluate_monic(const DelayPolynomial& a_star, double omega) {
  return 1.0 - evaluate(a_star, omega);
}

FrequencyPoint freq_response(const DelayPolynomial& poly, double omega) {
  if (!(omega >= 0.0 && omega <= std::numbers::pi)) {
    throw std::invalid_argument("freq_response: omega outside [0, pi]");
  }
  const auto g = evaluate(poly, omega);
  FrequencyPoint fp;
  fp.omega = omega;
  fp.magnitude = std::abs(g);
  fp.phase = std::arg(g);
  if (fp.phase <= -std::numbers::pi) fp.phase = std::numbers::pi;
  return fp;
}

Block2 Block2::from_polar(double magnitude, double phase) {
  const double cs = magnitude * std::cos(phase);
  const double sn = magnitude * std::sin(phase);
  return {cs, sn, -sn, cs};
}

Block2 Block2::inverse() const {
  const double det = determinant();
  if (det == 0.0) throw std::domain_error("Block2::inverse: singular block");
  return {d / det, -b / det, -c / det, a / det};
}

namespace {

// Full coefficient vector p_0 + p_1 q^-1 + ...
std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

std::vector<double> monic_full(const DelayPolynomial& a_star) {
  std::vector<double> full(a_star.order() + 1);
  full[0] = 1.0;
  for (std::size_t j = 1; j <= a_star.order(); ++j) full[j] = -a_star.tap(j);
  return full;
}

}  // namespace

DelayPolynomial monic_product(const DelayPolynomial& a1_star, const DelayPolynomial& a2_star) {
  const auto prod = convolve(monic_full(a1_star), monic_full(a2_star));
  std::vector<double> star(prod.size() - 1);
  for (std::size_t j = 1; j < prod.size(); ++j) star[j - 1] = -prod[j];
  return DelayPolynomial(std::move(star));
}

DelayPolynomial numerator_times_monic(const DelayPolynomial& num, const DelayPolynomial& a_star) {
  std::vector<double> full(num.order() + 1, 0.0);
  for (std::size_t j = 1; j <= num.order(); ++j) full[j] = num.tap(j);
  const auto prod = convolve(full, monic_full(a_star));
  return DelayPolynomial(std::vector<double>(prod.begin() + 1, prod.end()));
}

RationalSystem::RationalSystem(DelayPolynomial num, DelayPolynomial den_star)
    : num_(std::move(num)),
      den_star_(std::move(den_star)),
      inputs_(num_.order()),
      outputs_(den_star_.order()) {
  if (num_.empty()) throw std::invalid_argument("RationalSystem: numerator order must be >= 1");
}

double RationalSystem::step(double u) {
  if (!std::isfinite(u)) throw std::invalid_argument("RationalSystem::step: non-finite input");
  double y = 0.0;
  for (std::size_t i = 1; i <= den_star_.order(); ++i) y += den_star_.tap(i) * outputs_.value(i - 1);
  for (std::size_t j = 1; j <= num_.order(); ++j) y += num_.tap(j) * inputs_.value(j - 1);
  inputs_.push(u);
  outputs_.push(y);
  return y;
}

void RationalSystem::reset() {
  inputs_.reset();
  outputs_.reset();
}

std::vector<double> RationalSystem::pole_magnitudes() const {
  const auto n = static_cast<Eigen::Index>(den_star_.order());
  if (n == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) companion(0, i) = den_star_.tap(static_cast<std::size_t>(i) + 1);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < n; ++i) mags.push_back(std::abs(solver.eigenvalues()(i)));
  return mags;
}

bool RationalSystem::is_stable() const {
  for (double m : pole_magnitudes())
    if (m >= 1.0) return false;
  return true;
}

}  // namespace rroff
