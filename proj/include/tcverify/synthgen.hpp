#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcverify/track.hpp"

namespace tcverify {

/// Synthetic world with fully controlled error statistics: observed storms
/// follow a deterministic great-circle motion and piecewise-linear intensity
/// profile; forecast members are truth plus independent noise of declared
/// sigma. Noise sigmas may grow linearly with lead.
struct SynthSpec {
    int n_storms = 1;
    int lifetime_steps = 20; // 6 h steps after the first point; >= 5
    double start_lat = 15.0;
    double start_lon = 300.0;
    UtcSeconds start_time = 0; // defaults to 2023-09-01T00Z when zero
    double bearing_deg = 300.0;
    double speed_kmh = 15.0;
    std::vector<std::pair<int, double>> vmax_profile{{0, 40.0}}; // (hour, kt), piecewise linear
    std::vector<std::pair<int, double>> pmin_profile{{0, 1005.0}}; // (hour, hPa)
    std::vector<std::pair<int, double>> ri_segments; // (start_h, gain_kt applied over 24 h)
    double track_noise_km = 0.0; // sigma of isotropic position error
    double track_noise_km_per_24h = 0.0; // linear growth of sigma with lead
    double intensity_noise_kt = 0.0;
    double intensity_noise_kt_per_24h = 0.0;
    double pressure_noise_hpa = 0.0;
    int ensemble_size = 1;
    std::uint64_t seed = 0;
    Basin basin = Basin::NA;
    std::string model_name = "SYNTH";
    int max_lead_h = 120;

    static SynthSpec from_json(const std::string& text);
    void validate() const;

    double vmax_at(int hour) const;
    double pmin_at(int hour) const;
};

struct SynthResult {
    ObservedStore obs;
    ForecastSet forecasts;
};

SynthResult generate(const SynthSpec& spec);

} // namespace tcverify
