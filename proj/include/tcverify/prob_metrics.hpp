#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcverify/track.hpp"

namespace tcverify {

/// Fair CRPS of a scalar ensemble against observation y:
///   (1/N) sum|x_i - y| - (1/(2N(N-1))) sum sum|x_i - x_j|
/// For N = 1 this degenerates to the absolute error |x_1 - y|, which is the
/// only consistent extension (single-member persistence fills are scored
/// with it under the FAIR protocol).
double fair_crps(std::span<const double> values, double y);
double fair_crps(const std::vector<double>& values, double y);

/// Same fair kernel with absolute differences replaced by haversine
/// distances between positions; N = 1 degenerates to DPE. The geodesic
/// kernel is only approximately negative definite at large separations, so
/// tiny negative values (> -1e-6 km) can occur; they are clamped to zero and
/// counted through clamp_count when provided.
double track_crps(std::span<const GeoPoint> positions, const GeoPoint& y,
                  const EarthModel& earth = {}, std::size_t* clamp_count = nullptr);
double track_crps(const std::vector<GeoPoint>& positions, const GeoPoint& y,
                  const EarthModel& earth = {}, std::size_t* clamp_count = nullptr);

/// Brier skill score 1 - BS_f/BS_r with BS the mean squared probability
/// error. Returns -inf when the reference is perfect and the forecast is
/// not; 0 when both are perfect.
double brier_skill(std::span<const double> forecast_probs, std::span<const int> outcomes,
                   std::span<const double> reference_probs);

enum class ThresholdDirection { GreaterEqual, LessEqual };

/// Fraction of members meeting the threshold.
double ensemble_event_prob(std::span<const double> values, double threshold,
                           ThresholdDirection direction = ThresholdDirection::GreaterEqual);

/// Probabilistic scores for one verification key.
struct ProbRecord {
    VerificationKey key;
    std::string model;
    double crps_track_km = 0.0;
    std::optional<double> crps_vmax_kt; // empty when obs or all members lack the variable
    std::optional<double> crps_pmin_hpa;
    int n_members = 1;
    bool filled = false;
};

ProbRecord score_key_prob(const std::vector<const ForecastRow*>& members, const TrackPoint& obs_now,
                          const EarthModel& earth = {});

} // namespace tcverify
