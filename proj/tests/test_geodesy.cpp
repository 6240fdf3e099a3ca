#include <doctest.h>

#include <cmath>
#include <random>

#include "tcverify/errors.hpp"
#include "tcverify/geodesy.hpp"

using namespace tcverify;

namespace {

constexpr double kQuarterCircumference = M_PI * 6371.0 / 2.0; // 10007.5434 km

/// Independent forward-azimuth oracle: project the chord toward b onto the
/// local north/east basis at a.
double bearing_oracle_deg(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat() * M_PI / 180.0, lam1 = a.lon() * M_PI / 180.0;
    const double phi2 = b.lat() * M_PI / 180.0, lam2 = b.lon() * M_PI / 180.0;
    const double bx = std::cos(phi2) * std::cos(lam2);
    const double by = std::cos(phi2) * std::sin(lam2);
    const double bz = std::sin(phi2);
    // local basis at a
    const double nx = -std::sin(phi1) * std::cos(lam1), ny = -std::sin(phi1) * std::sin(lam1),
                 nz = std::cos(phi1);
    const double ex = -std::sin(lam1), ey = std::cos(lam1);
    const double north = bx * nx + by * ny + bz * nz;
    const double east = bx * ex + by * ey;
    double deg = std::atan2(east, north) * 180.0 / M_PI;
    if (deg < 0) deg += 360.0;
    return deg;
}

} // namespace

TEST_CASE("haversine analytic examples") {
    CHECK(haversine_km({0, 0}, {0, 0}) == 0.0);
    CHECK(haversine_km({0, 0}, {0, 90}) == doctest::Approx(kQuarterCircumference).epsilon(1e-7));
    CHECK(haversine_km({0, 0}, {90, 0}) == doctest::Approx(kQuarterCircumference).epsilon(1e-7));
    CHECK(std::abs(haversine_km({0, 0}, {0, 90}) - 10007.543) < 0.001);
    // custom radius scales linearly
    CHECK(haversine_km({0, 0}, {0, 90}, EarthModel{1.0}) == doctest::Approx(M_PI / 2));
}

TEST_CASE("haversine symmetry, wrap invariance and triangle inequality") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> lat(-90.0, 90.0), lon(-180.0, 180.0);
    for (int i = 0; i < 2000; ++i) {
        GeoPoint a(lat(rng), lon(rng)), b(lat(rng), lon(rng)), c(lat(rng), lon(rng));
        CHECK(haversine_km(a, b) == haversine_km(b, a));
        CHECK(haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-6);
    }
    // longitude given as -170 or 190 is the same meridian
    GeoPoint p1(10.0, -170.0), p2(10.0, 190.0), q(20.0, 60.0);
    CHECK(p1 == p2);
    CHECK(std::abs(haversine_km(p1, q) - haversine_km(p2, q)) <= 1e-9);
}

TEST_CASE("geopoint validation and wrapping") {
    CHECK(GeoPoint(0.0, -170.0).lon() == doctest::Approx(190.0));
    CHECK(GeoPoint(0.0, 360.0).lon() == 0.0);
    CHECK_THROWS_AS(GeoPoint(91.0, 0.0), Error);
    CHECK_THROWS_AS(GeoPoint(std::nan(""), 0.0), Error);
    CHECK_THROWS_AS(GeoPoint(0.0, std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("initial bearing examples and oracle") {
    CHECK(initial_bearing_deg({0, 0}, {0, 10}) == doctest::Approx(90.0));
    CHECK(initial_bearing_deg({0, 0}, {10, 0}) == doctest::Approx(0.0));
    CHECK(initial_bearing_deg({10, 10}, {10, 20}) ==
          doctest::Approx(bearing_oracle_deg({10, 10}, {10, 20})).epsilon(1e-9));
    CHECK_THROWS_AS(initial_bearing_deg({10, 10}, {10, 10}), DegenerateSegment);
    CHECK_THROWS_AS(initial_bearing_deg({10, -170}, {10, 190}), DegenerateSegment);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(0.0, 360.0);
    for (int i = 0; i < 500; ++i) {
        GeoPoint a(lat(rng), lon(rng)), b(lat(rng), lon(rng));
        if (a == b) continue;
        CHECK(initial_bearing_deg(a, b) ==
              doctest::Approx(bearing_oracle_deg(a, b)).epsilon(1e-8));
    }
}

TEST_CASE("track error decomposition examples") {
    SUBCASE("perfect forecast") {
        const auto d = decompose_track_error({0, 0}, {0, 1}, {0, 1});
        CHECK(d.dpe_km == 0.0);
        CHECK(d.cte_km.value() == 0.0);
        CHECK(d.ate_km.value() == 0.0);
    }
    SUBCASE("forecast north of eastward motion is left, negative CTE") {
        const auto d = decompose_track_error({0, 0}, {0, 1}, {0.5, 1});
        CHECK(std::abs(d.dpe_km - 55.597) < 0.5);
        CHECK(std::abs(d.cte_km.value() + 55.597) < 0.5);
        CHECK(std::abs(d.ate_km.value()) < 0.5);
    }
    SUBCASE("forecast further east is ahead, positive ATE") {
        const auto d = decompose_track_error({0, 0}, {0, 1}, {0, 1.5});
        CHECK(std::abs(d.dpe_km - 55.597) < 0.5);
        CHECK(std::abs(d.cte_km.value()) < 0.5);
        CHECK(std::abs(d.ate_km.value() - 55.597) < 0.5);
    }
    SUBCASE("forecast behind the motion has negative ATE") {
        const auto d = decompose_track_error({0, 0}, {0, 1}, {0, 0.25});
        CHECK(d.ate_km.value() < 0.0);
        CHECK(std::abs(d.ate_km.value() + 0.75 * 111.19) < 1.0);
    }
    SUBCASE("stationary observed segment leaves CTE/ATE undefined") {
        const auto d = decompose_track_error({5, 5}, {5, 5}, {5, 6});
        CHECK(d.dpe_km > 100.0);
        CHECK_FALSE(d.cte_km.has_value());
        CHECK_FALSE(d.ate_km.has_value());
    }
}

TEST_CASE("decomposition planar consistency and hemisphere reflection") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> lat(-60.0, 60.0), lon(0.0, 360.0);
    std::uniform_real_distribution<double> bearing(0.0, 360.0);
    std::uniform_real_distribution<double> seg_len(10.0, 50.0), err_len(2.0, 50.0);

    int accepted = 0;
    while (accepted < 1000) {
        GeoPoint prev(lat(rng), lon(rng));
        GeoPoint now = destination_point(prev, bearing(rng), seg_len(rng));
        GeoPoint fcst = destination_point(prev, bearing(rng), err_len(rng));
        const auto d = decompose_track_error(prev, now, fcst);
        if (d.dpe_km < 1.0) continue; // keep the relative check well-posed
        ++accepted;

        const double recomposed =
            std::sqrt(d.cte_km.value() * d.cte_km.value() + d.ate_km.value() * d.ate_km.value());
        CHECK(std::abs(recomposed - d.dpe_km) / d.dpe_km < 0.01);

        const auto r = decompose_track_error(GeoPoint(-prev.lat(), prev.lon()),
                                             GeoPoint(-now.lat(), now.lon()),
                                             GeoPoint(-fcst.lat(), fcst.lon()));
        CHECK(std::abs(r.cte_km.value() + d.cte_km.value()) <= 1e-9);
        CHECK(r.dpe_km == doctest::Approx(d.dpe_km).epsilon(1e-12));
        CHECK(std::abs(std::abs(r.ate_km.value()) - std::abs(d.ate_km.value())) <= 1e-9);
    }
}

namespace {

struct Vec3 {
    double x, y, z;
};

Vec3 to_unit(const GeoPoint& p) {
    const double phi = p.lat() * M_PI / 180.0, lam = p.lon() * M_PI / 180.0;
    return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

Vec3 normalized(const Vec3& v) {
    const double n = std::sqrt(dot(v, v));
    return {v.x / n, v.y / n, v.z / n};
}

/// Fully vector-based oracle for the decomposition: the motion great circle
/// is the plane through A and B; CTE is the arc from the forecast to that
/// plane (right of motion positive), ATE the signed arc from B to the foot
/// of the perpendicular along the motion direction.
TrackErrorDecomposition decompose_oracle(const GeoPoint& a, const GeoPoint& b,
                                         const GeoPoint& p, double radius) {
    const Vec3 av = to_unit(a), bv = to_unit(b), pv = to_unit(p);
    const Vec3 n = normalized(cross(av, bv)); // left-of-motion pole
    TrackErrorDecomposition out;
    out.dpe_km = std::acos(std::clamp(dot(pv, bv), -1.0, 1.0)) * radius;
    out.cte_km = -std::asin(std::clamp(dot(pv, n), -1.0, 1.0)) * radius;
    // foot of the perpendicular: project p off the pole axis
    Vec3 foot{pv.x - dot(pv, n) * n.x, pv.y - dot(pv, n) * n.y, pv.z - dot(pv, n) * n.z};
    foot = normalized(foot);
    const double arc = std::acos(std::clamp(dot(foot, bv), -1.0, 1.0)) * radius;
    // ahead when the foot lies on the forward side of B along the motion
    const Vec3 forward = cross(n, bv);
    out.ate_km = dot(foot, forward) >= 0.0 ? arc : -arc;
    return out;
}

} // namespace

TEST_CASE("decomposition agrees with an independent vector-geometry oracle") {
    std::mt19937 rng(314);
    std::uniform_real_distribution<double> lat(-75.0, 75.0), lon(0.0, 360.0);
    std::uniform_real_distribution<double> bearing(0.0, 360.0);
    std::uniform_real_distribution<double> seg(20.0, 400.0), err(5.0, 800.0);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint prev(lat(rng), lon(rng));
        const GeoPoint now = destination_point(prev, bearing(rng), seg(rng));
        const GeoPoint fcst = destination_point(now, bearing(rng), err(rng));
        const auto got = decompose_track_error(prev, now, fcst);
        const auto expected = decompose_oracle(prev, now, fcst, 6371.0);
        CHECK(got.dpe_km == doctest::Approx(expected.dpe_km).epsilon(1e-9));
        CHECK(got.cte_km.value() ==
              doctest::Approx(expected.cte_km.value()).epsilon(1e-6).scale(1.0));
        CHECK(got.ate_km.value() ==
              doctest::Approx(expected.ate_km.value()).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("forecast displaced along the motion circle has no cross-track error") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> lat(-60.0, 60.0), lon(0.0, 360.0);
    std::uniform_real_distribution<double> bearing(0.0, 360.0), dist(5.0, 80.0);
    for (int i = 0; i < 300; ++i) {
        GeoPoint prev(lat(rng), lon(rng));
        const double theta = bearing(rng);
        GeoPoint now = destination_point(prev, theta, 40.0);
        GeoPoint fcst = destination_point(prev, theta, dist(rng));
        const auto d = decompose_track_error(prev, now, fcst);
        CHECK(std::abs(d.cte_km.value()) < 1e-6);
    }
}

TEST_CASE("spherical mean") {
    const GeoPoint single = spherical_mean(std::vector<GeoPoint>{{10, 20}});
    CHECK(single.lat() == 10.0);
    CHECK(single.lon() == 20.0);

    const GeoPoint mid = spherical_mean(std::vector<GeoPoint>{{0, 0}, {0, 10}});
    CHECK(mid.lat() == doctest::Approx(0.0));
    CHECK(mid.lon() == doctest::Approx(5.0));

    CHECK_THROWS_AS(spherical_mean(std::vector<GeoPoint>{{0, 0}, {0, 180}}), DegenerateMean);
    CHECK_THROWS_AS(spherical_mean(std::vector<GeoPoint>{}), Error);
}

TEST_CASE("destination point round trip") {
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> lat(-70.0, 70.0), lon(0.0, 360.0);
    std::uniform_real_distribution<double> bearing(0.0, 360.0), dist(1.0, 500.0);
    for (int i = 0; i < 200; ++i) {
        GeoPoint start(lat(rng), lon(rng));
        const double d = dist(rng);
        GeoPoint end = destination_point(start, bearing(rng), d);
        CHECK(haversine_km(start, end) == doctest::Approx(d).epsilon(1e-9));
    }
}
