#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rroff/estimator.hpp"
#include "rroff/feedforward.hpp"
#include "support.hpp"

using namespace rroff;
using std::numbers::pi;

namespace {

FeedforwardConfig cfg(Variant v, double alpha, double beta = 0.0) {
  FeedforwardConfig c;
  c.variant = v;
  c.alpha = alpha;
  c.smoothing.beta = beta;
  return c;
}

// D^T phi built straight from complex evaluation, no Block2 involved.
std::vector<double> db_transpose_phi(const std::vector<double>& b, const HarmonicSet& h, std::int64_t k) {
  std::vector<double> out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::complex<long double> g = 0.0L;
    const long double w = 2.0L * std::numbers::pi_v<long double> * h.indices()[i] / h.samples_per_rev();
    for (std::size_t j = 0; j < b.size(); ++j) g += std::polar<long double>(b[j], -w * (j + 1));
    const long double c = std::cos(testutil::ref_angle(h.indices()[i], k, h.samples_per_rev()));
    const long double s = std::sin(testutil::ref_angle(h.indices()[i], k, h.samples_per_rev()));
    // B(q^-1) e^{jwk} = g e^{jwk}
    out.push_back(static_cast<double>(g.real() * c - g.imag() * s));
    out.push_back(static_cast<double>(g.imag() * c + g.real() * s));
  }
  return out;
}

}  // namespace

TEST_CASE("control is theta_D^T phi_r") {
  HarmonicSet h(120.0, 420, {1});
  FeedforwardState zero(h, 2, cfg(Variant::improved, 0.01));
  CHECK(control(zero, rro_regressor(h, 5)) == 0.0);

  FeedforwardState unit(h, 2, cfg(Variant::improved, 0.01), {1.0, 0.0});
  for (std::int64_t k = 0; k < 420; k += 13)
    CHECK(control(unit, rro_regressor(h, k)) == doctest::Approx(std::cos(2 * pi * k / 420)).epsilon(1e-14));

  std::mt19937_64 rng(3);
  HarmonicSet many(120.0, 420, parse_index_ranges("1-40"));
  FeedforwardState st(many, 2, cfg(Variant::improved, 0.01), testutil::random_vector(rng, 80));
  const auto phi = rro_regressor(many, 77);
  long double ref = 0.0L;
  for (std::size_t i = 0; i < phi.size(); ++i) ref += static_cast<long double>(st.theta_d()[i]) * phi[i];
  CHECK(std::abs(control(st, phi) - static_cast<double>(ref)) < 1e-12);
}

TEST_CASE("build_db examples") {
  SUBCASE("pure delay gives the rotation by -omega") {
    HarmonicSet h(120.0, 420, {7, 50});
    SmoothedResponse sm(h.size(), {0.0, 1e-4});
    const auto db = build_db(std::vector<double>{1.0}, h, sm);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double w = h.omega(i);
      CHECK(db.block(i).a == doctest::Approx(std::cos(w)).epsilon(1e-14));
      CHECK(db.block(i).b == doctest::Approx(-std::sin(w)).epsilon(1e-14));
      CHECK(db.block(i).c == doctest::Approx(std::sin(w)).epsilon(1e-14));
      CHECK(db.block(i).d == doctest::Approx(std::cos(w)).epsilon(1e-14));
    }
    CHECK(db.invertible());
  }
  SUBCASE("zero theta_B freezes every harmonic") {
    HarmonicSet h(120.0, 420, {1, 2, 3});
    SmoothedResponse sm(h.size(), {0.95, 1e-4});
    const auto db = build_db(std::vector<double>{0.0, 0.0}, h, sm);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(db.frozen(i));
    CHECK_FALSE(db.invertible());
  }
  SUBCASE("low-frequency limit of a positive-DC numerator is m I") {
    HarmonicSet h(1.0, 1'000'000, {1});
    SmoothedResponse sm(1, {0.0, 1e-4});
    const auto db = build_db(std::vector<double>{0.5, 0.3}, h, sm);
    CHECK(db.block(0).a == doctest::Approx(0.8).epsilon(1e-5));
    CHECK(std::abs(db.block(0).b) < 1e-5);
    CHECK(std::abs(db.block(0).c) < 1e-5);
  }
}

TEST_CASE("block times inverse is the identity for unfrozen harmonics") {
  std::mt19937_64 rng(8);
  HarmonicSet h(120.0, 420, parse_index_ranges("1-173"));
  for (int t = 0; t < 10; ++t) {
    SmoothedResponse sm(h.size(), {0.0, 1e-4});
    const auto db = build_db(testutil::random_vector(rng, 4), h, sm);
    const auto inv = db.inverse();
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (db.frozen(i)) continue;
      const auto p = db.block(i) * inv.block(i);
      CHECK(std::abs(p.a - 1.0) < 1e-12);
      CHECK(std::abs(p.b) < 1e-12);
      CHECK(std::abs(p.c) < 1e-12);
      CHECK(std::abs(p.d - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("update_basic examples") {
  HarmonicSet h(120.0, 420, {1});
  SUBCASE("zero residual leaves theta_D alone") {
    FeedforwardState st(h, 1, cfg(Variant::basic, 0.1), {0.3, -0.2});
    update_basic(st, DbMatrix({Block2::identity()}, {0}), std::vector<double>{0.0, 0.0});
    CHECK(st.theta_d()[0] == 0.3);
    CHECK(st.theta_d()[1] == -0.2);
  }
  SUBCASE("identity block") {
    FeedforwardState st(h, 1, cfg(Variant::basic, 0.1));
    update_basic(st, DbMatrix({Block2::identity()}, {0}), std::vector<double>{1.0, 0.0});
    CHECK(st.theta_d()[0] == doctest::Approx(-0.1));
    CHECK(st.theta_d()[1] == 0.0);
  }
  SUBCASE("pure delay at omega = pi/2") {
    HarmonicSet quarter(120.0, 4, {1});
    SmoothedResponse sm(1, {0.0, 1e-4});
    const auto db = build_db(std::vector<double>{1.0}, quarter, sm);
    FeedforwardState st(quarter, 1, cfg(Variant::basic, 1.0));
    update_basic(st, db.inverse(), std::vector<double>{1.0, 0.0});
    // decrement D^-1 [1, 0] = [0, -1]
    CHECK(std::abs(st.theta_d()[0]) < 1e-15);
    CHECK(st.theta_d()[1] == doctest::Approx(1.0));
  }
  SUBCASE("frozen pairs are skipped") {
    HarmonicSet two(120.0, 420, {1, 2});
    FeedforwardState st(two, 1, cfg(Variant::basic, 1.0));
    update_basic(st, DbMatrix({Block2::identity(), Block2::identity()}, {1, 0}),
                 std::vector<double>{1.0, 1.0, 1.0, 1.0});
    CHECK(st.theta_d()[0] == 0.0);
    CHECK(st.theta_d()[1] == 0.0);
    CHECK(st.theta_d()[2] == -1.0);
    CHECK(st.frozen_samples()[0] == 1);
  }
}

TEST_CASE("filter_regressor examples") {
  HarmonicSet h(120.0, 420, {3, 11});
  SUBCASE("zero numerator") {
    FeedforwardState st(h, 2, cfg(Variant::improved, 0.01));
    for (std::int64_t k = 0; k < 5; ++k)
      CHECK(testutil::max_abs(filter_regressor(st, std::vector<double>{0.0, 0.0}, rro_regressor(h, k))) == 0.0);
  }
  SUBCASE("pure delay returns the previous regressor") {
    FeedforwardState st(h, 1, cfg(Variant::improved, 0.01));
    std::vector<double> prev(h.dimension(), 0.0);
    for (std::int64_t k = 0; k < 10; ++k) {
      const auto phi = rro_regressor(h, k);
      CHECK(filter_regressor(st, std::vector<double>{1.0}, phi) == prev);
      prev = phi;
    }
  }
}

TEST_CASE("frozen theta_B: filtered regressor equals D^T phi_r after warm-up") {
  std::mt19937_64 rng(21);
  HarmonicSet h(120.0, 420, parse_index_ranges("1-10"));
  for (int t = 0; t < 10; ++t) {
    const auto b = testutil::random_vector(rng, 1 + t % 4);
    FeedforwardState st(h, b.size(), cfg(Variant::improved, 0.01));
    SmoothedResponse sm(h.size(), {0.0, 1e-12});
    const auto db = build_db(b, h, sm);
    double worst = 0.0, worst_oracle = 0.0;
    for (std::int64_t k = 0; k < 600; ++k) {
      const auto phi = rro_regressor(h, k);
      const auto f = filter_regressor(st, b, phi);
      if (k < static_cast<std::int64_t>(b.size())) continue;
      worst = std::max(worst, testutil::max_abs_diff(f, db.apply_transpose(phi)));
      worst_oracle = std::max(worst_oracle, testutil::max_abs_diff(f, db_transpose_phi(b, h, k)));
    }
    CHECK(worst < 1e-9);
    CHECK(worst_oracle < 1e-9);
  }
}

TEST_CASE("update_improved examples") {
  HarmonicSet h(120.0, 420, {2});
  FeedforwardState st(h, 2, cfg(Variant::improved, 0.5), {0.1, 0.2});
  update_improved(st, std::vector<double>{0.3, -0.4}, 0.0);
  CHECK(st.theta_d()[0] == 0.1);
  update_improved(st, std::vector<double>{0.0, 0.0}, 3.0);
  CHECK(st.theta_d()[1] == 0.2);
  update_improved(st, std::vector<double>{0.3, -0.4}, 2.0);
  CHECK(st.theta_d()[0] == doctest::Approx(0.1 - 0.5 * 0.3 * 2.0));
  CHECK(st.theta_d()[1] == doctest::Approx(0.2 + 0.5 * 0.4 * 2.0));
}

TEST_CASE("improved update averaged over one revolution equals (alpha/2) D^T theta_M") {
  const int n = 420;
  HarmonicSet h(120.0, n, {5});
  const std::vector<double> b = {0.5, 0.3};
  const std::vector<double> theta_m = {0.7, -0.4};
  const double alpha = 0.01;
  FeedforwardState st(h, b.size(), cfg(Variant::improved, alpha));
  // warm the history so every sample of the averaged revolution is settled
  for (std::int64_t k = 0; k < 10; ++k) filter_regressor(st, b, rro_regressor(h, k));
  std::vector<double> sum(2, 0.0);
  for (std::int64_t k = 10; k < 10 + n; ++k) {
    const auto phi = rro_regressor(h, k);
    const auto f = filter_regressor(st, b, phi);
    const double res = predict(theta_m, phi);
    sum[0] += alpha * f[0] * res;
    sum[1] += alpha * f[1] * res;
  }
  SmoothedResponse sm(1, {0.0, 1e-12});
  const auto expect = build_db(b, h, sm).apply_transpose(theta_m);
  CHECK(std::abs(sum[0] / n - alpha / 2 * expect[0]) < 1e-6);
  CHECK(std::abs(sum[1] / n - alpha / 2 * expect[1]) < 1e-6);
}

TEST_CASE("smoother: freeze, seed, EMA and phase unwrap") {
  SmoothedResponse sm(1, {0.5, 0.1});
  sm.update(0, {0.1, 0.01, 0.0});
  CHECK(sm.frozen(0));
  CHECK(sm.magnitude(0) == 0.1);  // floor while never seeded

  sm.update(0, {0.1, 2.0, 3.0});
  CHECK_FALSE(sm.frozen(0));
  CHECK(sm.magnitude(0) == 2.0);
  CHECK(sm.phase(0) == 3.0);

  sm.update(0, {0.1, 1.0, -3.0});  // -3 is 2 pi - 3 = 3.283 on the running branch
  CHECK(sm.magnitude(0) == doctest::Approx(1.5));
  CHECK(sm.phase(0) == doctest::Approx(0.5 * 3.0 + 0.5 * (-3.0 + 2 * pi)));

  sm.update(0, {0.1, 0.05, 0.0});
  CHECK(sm.frozen(0));
  CHECK(sm.magnitude(0) == doctest::Approx(1.5));
}

TEST_CASE("adapt dispatches on the configured variant") {
  HarmonicSet h(120.0, 420, {4});
  const std::vector<double> b = {1.0}, m = {0.2, 0.1};
  FeedforwardState basic(h, 1, cfg(Variant::basic, 0.1));
  FeedforwardState improved(h, 1, cfg(Variant::improved, 0.1));
  const auto phi = rro_regressor(h, 3);
  adapt(basic, b, m, phi);
  adapt(improved, b, m, phi);

  SmoothedResponse sm(1, {0.0, 1e-4});
  const auto step = build_db(b, h, sm).inverse().apply(m);
  CHECK(basic.theta_d()[0] == doctest::Approx(-0.1 * step[0]));
  CHECK(basic.theta_d()[1] == doctest::Approx(-0.1 * step[1]));
  // improved: the history starts at zero, so B(q^-1) phi at k = 0 of this state is zero
  CHECK(improved.theta_d()[0] == 0.0);
  CHECK(improved.theta_d()[1] == 0.0);
  CHECK(parse_variant("basic") == Variant::basic);
  CHECK(to_string(Variant::improved) == "improved");
  CHECK_THROWS(parse_variant("fast"));
}
