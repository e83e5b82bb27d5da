#include <cmath>
#include <sstream>

#include <doctest.h>

#include "meanfield/classify.hpp"
#include "meanfield/constructions.hpp"
#include "meanfield/means.hpp"
#include "oracles.hpp"

using namespace meanfield;

namespace {

/// Mean of the tent over (0, 1): two triangles of height k - 1 and base (k - 1)/k^2 above 1.
double tent_mean(int k) { return 1.0 + (k - 1.0) * (k - 1.0) / (double(k) * k); }

const DomainSpec kDisk = DomainSpec::disk(Point{0.0, 0.0}, 1.0);

}  // namespace

TEST_CASE("one-dimensional blow-up closed forms") {
  for (int k : {2, 3, 5, 10, 100, 1000}) {
    CHECK(blowup_1d_surface_mean(k) == k);
    CHECK(blowup_1d_volume_mean(k) == doctest::Approx(tent_mean(k)).epsilon(1e-14));
    CHECK(blowup_1d_volume_mean(k) < 2.0);
  }
  CHECK(blowup_1d_volume_mean(3) == doctest::Approx(13.0 / 9.0));
  CHECK(blowup_1d_volume_mean(10) == doctest::Approx(1.81));
  const auto v = blowup_1d(5);
  CHECK(v(Point{0.0}) == doctest::Approx(5.0));
  CHECK(v(Point{0.5}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(blowup_1d(1), std::invalid_argument);
}

TEST_CASE("interval blow-up with delta = 1 is the tent") {
  for (int k : {3, 7, 20}) {
    const auto b = blowup_sequence(DomainSpec::interval(0.0, 1.0), k, 1.0);
    const auto tent = one_d_tent(k);
    for (int i = 0; i <= 200; ++i) {
      const Point x{i / 200.0};
      CHECK(b.field(x) == doctest::Approx(tent(x)).epsilon(1e-12));
    }
    CHECK(blowup_surface_mean(b) == doctest::Approx(k));
    CHECK(blowup_volume_mean(DomainSpec::interval(0.0, 1.0), b) == doctest::Approx(tent_mean(k)).epsilon(1e-12));
  }
}

TEST_CASE("interval verification table") {
  const auto table = verify_blowup(DomainSpec::interval(0.0, 1.0), {3, 10, 100});
  REQUIRE(table.rows.size() == 3u);
  CHECK(table.rows[0].volume_mean == doctest::Approx(13.0 / 9.0).epsilon(1e-12));
  CHECK(table.rows[1].volume_mean == doctest::Approx(1.81).epsilon(1e-12));
  CHECK(table.rows[2].volume_mean == doctest::Approx(1.9801).epsilon(1e-12));
  CHECK(table.rows[2].surface_mean == doctest::Approx(100.0));

  const auto scaled = verify_blowup(DomainSpec::interval(-1.0, 1.0), {10});
  CHECK(scaled.rows[0].volume_mean == doctest::Approx(1.81).epsilon(1e-12));
}

TEST_CASE("helper radii") {
  CHECK(psi_gain_radius(1, 0.5) == doctest::Approx(1.5));
  CHECK(psi_gain_radius(2, 0.5) == doctest::Approx(std::exp(M_PI)));
  CHECK(fundamental_solution(2, psi_gain_radius(2, 0.3)) - fundamental_solution(2, 1.0) == doctest::Approx(0.3));
  const int t = blowup_interior_threshold(2);
  CHECK(-t * t * std::log(2.0) / (2.0 * M_PI) + t < 1.0);
  CHECK(-(t - 1.0) * (t - 1.0) * std::log(2.0) / (2.0 * M_PI) + (t - 1.0) >= 1.0);
}

TEST_CASE("disk blow-up field") {
  const int k = 10;
  const double delta = 0.01;
  const auto b = blowup_sequence(kDisk, k, delta);
  const auto& p = b.params;
  CHECK(p.k == k);
  CHECK(p.anchors.size() == p.poles.size());
  CHECK(p.anchors.size() >= static_cast<std::size_t>(std::ceil(2.0 * M_PI / delta)));
  for (std::size_t j = 0; j < p.anchors.size(); j += 37) {
    CHECK(b.field(p.anchors[j]) == doctest::Approx(double(k)).epsilon(1e-12));
    CHECK(distance(p.anchors[j], p.poles[j]) == doctest::Approx(delta));
  }
  CHECK(p.achieved_floor >= k - 1.0);
  CHECK(b.field(Point{0.0, 0.0}) == 1.0);
  CHECK_FALSE(b.field.smooth());

  // Beyond the interior threshold the field is 1 at distance >= delta from the boundary.
  oracle::Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    const double r = rng.uniform(0.0, 1.0 - delta);
    const double t = rng.uniform(0.0, 2.0 * M_PI);
    CHECK(b.field(Point{r * std::cos(t), r * std::sin(t)}) == 1.0);
  }
  for (const auto& s : p.probes) CHECK(b.field(s.point) >= k - 1.0);
}

TEST_CASE("disk blow-up volume mean matches a polar integration of the boundary layer") {
  const auto b = blowup_sequence(kDisk, 10, 0.01);
  const double inner = 0.99;
  const int nr = 400;
  const int nt = 8192;
  double excess = 0.0;
  const double dr = (1.0 - inner) / nr;
  for (int i = 0; i <= nr; ++i) {
    const double r = inner + i * dr;
    const double w = (i == 0 || i == nr) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double ring = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double t = 2.0 * M_PI * j / nt;
      ring += b.field(Point{r * std::cos(t), r * std::sin(t)}) - 1.0;
    }
    excess += w * r * ring * (2.0 * M_PI / nt);
  }
  excess *= dr / 3.0 / M_PI;
  const double mean = blowup_volume_mean(kDisk, b);
  CHECK(mean - 1.0 == doctest::Approx(excess).epsilon(1e-2));
}

TEST_CASE("disk blow-up field is subharmonic") {
  const auto b = blowup_sequence(kDisk, 10, 0.01);
  const auto report = test_subharmonic(b.field, kDisk, {}, {}, 1e-4 * 9.0);
  CHECK(report.passed());
  CHECK(report.balls_tested > 100u);
}

TEST_CASE("blow-up tables on the disk and the square") {
  const auto disk = verify_blowup(kDisk, {10, 20});
  REQUIRE(disk.rows.size() == 2u);
  CHECK(disk.schedule_bounded);
  for (const auto& row : disk.rows) {
    CHECK(row.surface_mean >= row.k - 1.0);
    CHECK(row.volume_mean <= 1.4);
    CHECK(row.delta == doctest::Approx(1.0 / (row.k * row.k)));
  }
  CHECK(disk.rows[1].surface_mean > disk.rows[0].surface_mean);
  CHECK(disk.rows[1].volume_mean < disk.rows[0].volume_mean);

  const auto square = verify_blowup(DomainSpec::rectangle(Point{0.0, 0.0}, Point{1.0, 1.0}), {10});
  CHECK(square.rows[0].surface_mean >= 9.0);
  CHECK(square.rows[0].volume_mean <= 1.4);

  const auto constant_delta = verify_blowup(kDisk, {5, 10}, [](int) { return 0.02; });
  CHECK_FALSE(constant_delta.schedule_bounded);

  std::stringstream csv;
  write_blowup_csv(csv, disk);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "k,delta_k,surface_mean,volume_mean,anchors");
}

TEST_CASE("blow-up argument validation") {
  CHECK_THROWS_AS(blowup_sequence(kDisk, 2, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(blowup_sequence(kDisk, 10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(blowup_sequence(DomainSpec::disk(Point{0.0, 0.0, 0.0}, 1.0), 10, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(blowup_sequence(DomainSpec::annulus(Point{0.0, 0.0}, 0.5, 1.0), 10, 0.6), std::invalid_argument);
  BlowupOptions tiny;
  tiny.max_anchors = 16;
  CHECK_THROWS_WITH_AS(blowup_sequence(kDisk, 10, 0.01, tiny), doctest::Contains("densification"), std::runtime_error);
  CHECK_THROWS_AS(verify_blowup(kDisk, {}), std::invalid_argument);
}

TEST_CASE("power family closed forms agree with quadrature") {
  for (int n = 1; n <= 3; ++n) {
    for (int p = 1; p <= 4; ++p) {
      const auto fam = power_family(p, n);
      for (double r : {0.5, 1.0}) {
        const BallSpec ball(Point::zeros(n), r);
        CHECK(fam.ball_mean(r) == doctest::Approx(ball_average(fam.field, ball)).epsilon(1e-10));
        CHECK(fam.sphere_mean(r) == doctest::Approx(sphere_average(fam.field, ball)).epsilon(1e-10));
      }
      const double km = fam.kappa_min();
      CHECK(fam.sphere_mean(km) == doctest::Approx(fam.ball_mean(1.0)).epsilon(1e-12));
    }
  }
  CHECK(power_family(1, 2).kappa_min() == doctest::Approx(std::sqrt(0.5)));
  CHECK(power_family(4, 2).kappa_min() == doctest::Approx(0.81777).epsilon(1e-5));
  CHECK_THROWS_AS(power_family(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(power_family(1, 4), std::invalid_argument);
}

TEST_CASE("power family kappa_min increases towards 1") {
  for (int n = 1; n <= 3; ++n) {
    double prev = 0.0;
    for (int p = 1; p <= 20; ++p) {
      const double k = power_family(p, n).kappa_min();
      CHECK(k > prev);
      CHECK(k < 1.0);
      prev = k;
    }
  }
}
