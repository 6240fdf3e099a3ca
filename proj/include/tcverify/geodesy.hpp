#pragma once

#include <optional>
#include <span>
#include <vector>

namespace tcverify {

struct EarthModel {
    double radius_km = 6371.0;
};

/// Point on the sphere. Latitude in [-90, 90] degrees; longitude stored
/// normalized to [0, 360) (any finite input is wrapped).
class GeoPoint {
public:
    GeoPoint() : lat_(0.0), lon_(0.0) {}
    GeoPoint(double lat_deg, double lon_deg);

    double lat() const { return lat_; }
    double lon() const { return lon_; }

    bool operator==(const GeoPoint& other) const {
        return lat_ == other.lat_ && lon_ == other.lon_;
    }

private:
    double lat_;
    double lon_;
};

/// Positional error split relative to the observed motion segment.
/// cte_km > 0 means the forecast lies to the right of the observed motion
/// direction (the conventional Northern Hemisphere reading; in the Southern
/// Hemisphere the meteorological interpretation of "right" reverses).
/// ate_km > 0 means the forecast is ahead of the observed position.
/// Both are empty when the observed segment is degenerate.
struct TrackErrorDecomposition {
    double dpe_km = 0.0;
    std::optional<double> cte_km;
    std::optional<double> ate_km;
};

/// Wrap a longitude into [0, 360).
double wrap_lon_deg(double lon_deg);

/// Wrap a longitude difference into (-180, 180].
double wrap_signed_lon_deg(double dlon_deg);

/// Great-circle distance via the haversine formula.
double haversine_km(const GeoPoint& a, const GeoPoint& b, const EarthModel& earth = {});

/// Forward azimuth from a toward b, degrees clockwise from north in [0, 360).
/// Throws DegenerateSegment when a == b.
double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b);

/// Decompose the error of a forecast position against the observed motion
/// segment obs_prev -> obs_now (the position 12 h before verification time
/// and the position at verification time).
TrackErrorDecomposition decompose_track_error(const GeoPoint& obs_prev, const GeoPoint& obs_now,
                                              const GeoPoint& fcst, const EarthModel& earth = {});

/// Chordal mean position: 3-D unit-vector average, renormalized.
/// Throws DegenerateMean when the mean vector norm is below 1e-9.
GeoPoint spherical_mean(std::span<const GeoPoint> points);
GeoPoint spherical_mean(const std::vector<GeoPoint>& points);

/// Point reached from start by travelling distance_km along bearing_deg.
GeoPoint destination_point(const GeoPoint& start, double bearing_deg, double distance_km,
                           const EarthModel& earth = {});

} // namespace tcverify
