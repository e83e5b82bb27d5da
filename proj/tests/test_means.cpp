#include <cmath>
#include <cstdlib>

#include <doctest.h>

#include "meanfield/means.hpp"
#include "meanfield/parallel.hpp"
#include "oracles.hpp"

using namespace meanfield;
using oracle::Poly;

namespace {

/// Random polynomial of total degree <= deg in n variables.
Poly random_poly(oracle::Rng& rng, int n, int deg) {
  Poly u;
  for (int a = 0; a <= deg; ++a) {
    for (int b = 0; a + b <= deg; ++b) {
      for (int c = 0; a + b + c <= deg; ++c) {
        if ((n < 2 && b > 0) || (n < 3 && c > 0)) continue;
        u = u + Poly::monomial({a, b, c}, rng.uniform(-1.0, 1.0));
      }
    }
  }
  return u;
}

ScalarField poly_field(const Poly& u, int n) {
  class Impl : public detail::FieldImpl {
   public:
    Impl(Poly u, int n) : u_(std::move(u)), lap_(u_.laplacian(n)), n_(n) {}
    int dim() const override { return n_; }
    double eval(const Point& p) const override { return u_(p); }
    double laplacian(const Point& p) const override { return lap_(p); }
    std::string describe() const override { return "test_poly"; }

   private:
    Poly u_, lap_;
    int n_;
  };
  return ScalarField(std::make_shared<Impl>(u, n));
}

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  for (int m = 1; m <= 40; ++m) {
    const auto& g = gauss_legendre(m);
    REQUIRE(g.nodes.size() == static_cast<std::size_t>(m));
    double wsum = 0.0;
    for (double w : g.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int deg = 0; deg <= 2 * m - 1; deg += 2) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += g.weights[i] * std::pow(g.nodes[i], deg);
      CHECK(s == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("means of random polynomials agree with the Pizzetti series") {
  oracle::Rng rng(2024);
  const QuadratureSpec quad{40, 20};
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      const int deg = rng.integer(0, 8);
      const Poly u = random_poly(rng, n, deg);
      const auto f = poly_field(u, n);
      const BallSpec ball(rng.point_in_box(n, -1.0, 1.0), rng.uniform(0.05, 1.5));
      const double s_ref = oracle::sphere_mean(u, n, ball.center, ball.radius);
      const double b_ref = oracle::ball_mean(u, n, ball.center, ball.radius);
      const double scale = 1.0 + std::abs(s_ref) + std::abs(b_ref);
      CHECK(std::abs(sphere_average(f, ball, quad) - s_ref) < 1e-11 * scale);
      CHECK(std::abs(ball_average(f, ball, quad) - b_ref) < 1e-11 * scale);
    }
  }
}

TEST_CASE("harmonic fields have the mean-value property") {
  oracle::Rng rng(5);
  const std::vector<ScalarField> fields{harmonic_poly(2, "x2-y2"), harmonic_poly(2, "x3-3xy2"), harmonic_poly(2, "xy"),
                                        harmonic_poly(2, "re4"), exp_cos(2),
                                        fundamental_shift(Point{3.0, 0.5}, 1.0, 1.0, 0.0)};
  for (const auto& f : fields) {
    for (int i = 0; i < 20; ++i) {
      const BallSpec ball(rng.point_in_box(2, -1.0, 1.0), rng.uniform(0.1, 1.0));
      const double center = f(ball.center);
      const auto mp = mean_pair(f, ball);
      CHECK(mp.sphere_mean == doctest::Approx(center).epsilon(1e-10).scale(1.0));
      CHECK(mp.ball_mean == doctest::Approx(center).epsilon(1e-10).scale(1.0));
    }
  }
  const auto f3 = exp_cos(3);
  const BallSpec ball(Point{0.1, 0.2, 0.3}, 0.7);
  CHECK(sphere_average(f3, ball) == doctest::Approx(f3(ball.center)).epsilon(1e-12));
}

TEST_CASE("ball means of non-polynomial fields match a polar-grid oracle") {
  const std::vector<ScalarField> fields{
      affine_transform(exp_cos(2), 0.0, 1.0),
      max_combine({harmonic_poly(2, "x2-y2"), harmonic_poly(2, "xy")}),
      fundamental_shift(Point{0.0, 1.2}, 0.5, -2.0, 1.0),
  };
  const BallSpec ball(Point{0.1, -0.2}, 0.9);
  const double tol[] = {1e-9, 2e-4, 1e-9};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& f = fields[i];
    const double ref = oracle::polar_ball_mean([&](const Point& p) { return f(p); }, ball.center, ball.radius);
    CHECK(std::abs(ball_average(f, ball, {256, 64}) - ref) < tol[i]);
  }
}

TEST_CASE("sphere mean at a scaled radius") {
  const auto f = radial_power(Point{0.0, 0.0}, 1);
  const BallSpec ball(Point{0.5, 0.0}, 0.4);
  const auto mp = mean_pair(f, ball, {}, 0.5);
  REQUIRE(mp.sphere_mean_at_kappa.has_value());
  CHECK(*mp.sphere_mean_at_kappa == doctest::Approx(0.25 + 0.04));
  CHECK(mp.sphere_mean == doctest::Approx(0.25 + 0.16));
  CHECK(mp.ball_mean == doctest::Approx(0.25 + 0.08));
  CHECK_THROWS_AS(mean_pair(f, ball, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mean_pair(f, ball, {}, 1.5), std::invalid_argument);
}

TEST_CASE("quadrature validation and domain checks") {
  const auto f = constant(2, 1.0);
  CHECK_THROWS_AS(sphere_average(f, BallSpec(Point{0.0, 0.0}, 1.0), {1, 16}), std::invalid_argument);
  CHECK_THROWS_AS(ball_average(f, BallSpec(Point{0.0, 0.0}, 1.0), {32, 0}), std::invalid_argument);
  CHECK_THROWS_AS(sphere_average(f, BallSpec(Point{0.0}, 1.0)), std::invalid_argument);
  const auto g = fundamental_shift(Point{0.2, 0.0}, 1.0, 1.0, 0.0);
  CHECK_THROWS_AS(ball_average(g, BallSpec(Point{0.0, 0.0}, 0.5)), std::domain_error);
}

TEST_CASE("radial profile surface integrals") {
  const auto f = radial_power(Point{0.0, 0.0}, 2);
  const auto rows = radial_profile(f, Point{0.0, 0.0}, {0.5, 1.0, 2.0});
  REQUIRE(rows.size() == 3u);
  for (const auto& row : rows) {
    CHECK(row.sphere_mean == doctest::Approx(std::pow(row.radius, 4)));
    CHECK(row.surface_integral == doctest::Approx(2.0 * M_PI * row.radius * std::pow(row.radius, 4)));
  }
}

TEST_CASE("batched means follow input order and do not depend on the thread count") {
  oracle::Rng rng(99);
  std::vector<BallSpec> balls;
  for (int i = 0; i < 200; ++i) balls.emplace_back(rng.point_in_box(2, -1.0, 1.0), rng.uniform(0.01, 0.5));
  const auto f = exp_cos(2);
  const auto batch = mean_pairs(f, balls);
  REQUIRE(batch.size() == balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const auto single = mean_pair(f, balls[i]);
    CHECK(batch[i].ball_mean == single.ball_mean);
    CHECK(batch[i].sphere_mean == single.sphere_mean);
  }
  setenv("MEANFIELD_THREADS", "3", 1);
  const auto again = mean_pairs(f, balls);
  unsetenv("MEANFIELD_THREADS");
  for (std::size_t i = 0; i < balls.size(); ++i) CHECK(again[i].ball_mean == batch[i].ball_mean);
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw std::runtime_error("boom"); }),
                  std::runtime_error);
  parallel_for(0, [](std::size_t) { FAIL("no indices expected"); });
}
