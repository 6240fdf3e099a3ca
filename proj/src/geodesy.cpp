#include "tcverify/geodesy.hpp"

#include <algorithm>
#include <cmath>

#include "tcverify/errors.hpp"

namespace tcverify {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;

double clamp_unit(double x) {
    return std::clamp(x, -1.0, 1.0);
}

/// Central angle between two points, radians.
double central_angle(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat() * kDegToRad;
    const double phi2 = b.lat() * kDegToRad;
    const double dphi = (b.lat() - a.lat()) * kDegToRad;
    const double dlam = (b.lon() - a.lon()) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlam / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Forward azimuth in radians, (-pi, pi]; atan2(0, 0) = 0 for coincident points.
double bearing_rad(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat() * kDegToRad;
    const double phi2 = b.lat() * kDegToRad;
    const double dlam = (b.lon() - a.lon()) * kDegToRad;
    const double y = std::sin(dlam) * std::cos(phi2);
    const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
    return std::atan2(y, x);
}

} // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg) {
    if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg))
        throw Error("GeoPoint requires finite coordinates");
    if (lat_deg < -90.0 || lat_deg > 90.0)
        throw Error("latitude out of [-90, 90]: " + std::to_string(lat_deg));
    lat_ = lat_deg;
    lon_ = wrap_lon_deg(lon_deg);
}

double wrap_lon_deg(double lon_deg) {
    double w = std::fmod(lon_deg, 360.0);
    if (w < 0.0) w += 360.0;
    if (w == 360.0) w = 0.0;
    return w;
}

double wrap_signed_lon_deg(double dlon_deg) {
    double w = std::fmod(dlon_deg, 360.0);
    if (w > 180.0) w -= 360.0;
    if (w <= -180.0) w += 360.0;
    return w;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b, const EarthModel& earth) {
    return central_angle(a, b) * earth.radius_km;
}

double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b) {
    if (a == b)
        throw DegenerateSegment("initial bearing undefined for coincident points");
    double deg = bearing_rad(a, b) * kRadToDeg;
    if (deg < 0.0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

TrackErrorDecomposition decompose_track_error(const GeoPoint& obs_prev, const GeoPoint& obs_now,
                                              const GeoPoint& fcst, const EarthModel& earth) {
    TrackErrorDecomposition out;
    out.dpe_km = haversine_km(fcst, obs_now, earth);
    if (obs_prev == obs_now)
        return out; // stationary segment: CTE/ATE undefined, DPE still valid
    if (fcst == obs_now) {
        out.cte_km = 0.0;
        out.ate_km = 0.0;
        return out;
    }

    const double delta13 = central_angle(obs_prev, fcst);
    const double theta12 = bearing_rad(obs_prev, obs_now);
    const double theta13 = bearing_rad(obs_prev, fcst);
    const double rel = theta13 - theta12;

    // Cross-track angle; positive when the forecast lies to the right of the
    // motion direction.
    const double dxt = std::asin(clamp_unit(std::sin(delta13) * std::sin(rel)));

    // Along-track angle from obs_prev to the foot of the perpendicular; the
    // acos form is unsigned, so flip when the foot lies behind obs_prev.
    double dat = std::acos(clamp_unit(std::cos(delta13) / std::cos(dxt)));
    if (std::cos(rel) < 0.0) dat = -dat;

    out.cte_km = dxt * earth.radius_km;
    out.ate_km = (dat - central_angle(obs_prev, obs_now)) * earth.radius_km;
    return out;
}

GeoPoint spherical_mean(std::span<const GeoPoint> points) {
    if (points.empty())
        throw Error("spherical_mean of empty list");
    if (std::all_of(points.begin(), points.end(),
                    [&](const GeoPoint& p) { return p == points.front(); }))
        return points.front(); // mean of identical points is exact
    double x = 0.0, y = 0.0, z = 0.0;
    for (const GeoPoint& p : points) {
        const double phi = p.lat() * kDegToRad;
        const double lam = p.lon() * kDegToRad;
        x += std::cos(phi) * std::cos(lam);
        y += std::cos(phi) * std::sin(lam);
        z += std::sin(phi);
    }
    const double n = static_cast<double>(points.size());
    x /= n;
    y /= n;
    z /= n;
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (norm < 1e-9)
        throw DegenerateMean("antipodal cancellation in spherical mean");
    const double lat = std::asin(clamp_unit(z / norm)) * kRadToDeg;
    const double lon = std::atan2(y, x) * kRadToDeg;
    return GeoPoint(std::clamp(lat, -90.0, 90.0), lon);
}

GeoPoint spherical_mean(const std::vector<GeoPoint>& points) {
    return spherical_mean(std::span<const GeoPoint>(points.data(), points.size()));
}

GeoPoint destination_point(const GeoPoint& start, double bearing_deg, double distance_km,
                           const EarthModel& earth) {
    const double delta = distance_km / earth.radius_km;
    const double theta = bearing_deg * kDegToRad;
    const double phi1 = start.lat() * kDegToRad;
    const double lam1 = start.lon() * kDegToRad;
    const double sinphi2 =
        std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
    const double phi2 = std::asin(clamp_unit(sinphi2));
    const double lam2 = lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                          std::cos(delta) - std::sin(phi1) * sinphi2);
    return GeoPoint(std::clamp(phi2 * kRadToDeg, -90.0, 90.0), lam2 * kRadToDeg);
}

} // namespace tcverify
