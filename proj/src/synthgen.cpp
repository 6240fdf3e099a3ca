#include "tcverify/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "tcverify/errors.hpp"
#include "tcverify/geodesy.hpp"
#include "tcverify/rng.hpp"

namespace tcverify {

namespace {

double piecewise_linear(const std::vector<std::pair<int, double>>& profile, int hour) {
    if (profile.empty()) throw Error("synth profile must not be empty");
    if (hour <= profile.front().first) return profile.front().second;
    if (hour >= profile.back().first) return profile.back().second;
    for (std::size_t i = 1; i < profile.size(); ++i) {
        if (hour <= profile[i].first) {
            const auto& [h0, v0] = profile[i - 1];
            const auto& [h1, v1] = profile[i];
            if (h1 == h0) return v1;
            const double t = static_cast<double>(hour - h0) / static_cast<double>(h1 - h0);
            return v0 + t * (v1 - v0);
        }
    }
    return profile.back().second;
}

std::vector<std::pair<int, double>> profile_from_json(const nlohmann::json& j,
                                                      const char* name) {
    std::vector<std::pair<int, double>> out;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2)
            throw Error(std::string("synth spec: ") + name + " entries must be [hour, value]");
        out.emplace_back(pair[0].get<int>(), pair[1].get<double>());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

SynthSpec SynthSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("synth spec is not valid JSON: ") + e.what());
    }
    SynthSpec spec;
    if (j.contains("n_storms")) spec.n_storms = j["n_storms"].get<int>();
    if (j.contains("lifetime_steps")) spec.lifetime_steps = j["lifetime_steps"].get<int>();
    if (j.contains("start_lat")) spec.start_lat = j["start_lat"].get<double>();
    if (j.contains("start_lon")) spec.start_lon = j["start_lon"].get<double>();
    if (j.contains("start_time")) spec.start_time = parse_utc(j["start_time"].get<std::string>());
    if (j.contains("bearing_deg")) spec.bearing_deg = j["bearing_deg"].get<double>();
    if (j.contains("speed_kmh")) spec.speed_kmh = j["speed_kmh"].get<double>();
    if (j.contains("vmax_profile")) spec.vmax_profile = profile_from_json(j["vmax_profile"], "vmax_profile");
    if (j.contains("pmin_profile")) spec.pmin_profile = profile_from_json(j["pmin_profile"], "pmin_profile");
    if (j.contains("ri_segments")) spec.ri_segments = profile_from_json(j["ri_segments"], "ri_segments");
    if (j.contains("track_noise_km")) spec.track_noise_km = j["track_noise_km"].get<double>();
    if (j.contains("track_noise_km_per_24h"))
        spec.track_noise_km_per_24h = j["track_noise_km_per_24h"].get<double>();
    if (j.contains("intensity_noise_kt"))
        spec.intensity_noise_kt = j["intensity_noise_kt"].get<double>();
    if (j.contains("intensity_noise_kt_per_24h"))
        spec.intensity_noise_kt_per_24h = j["intensity_noise_kt_per_24h"].get<double>();
    if (j.contains("pressure_noise_hpa"))
        spec.pressure_noise_hpa = j["pressure_noise_hpa"].get<double>();
    if (j.contains("ensemble_size")) spec.ensemble_size = j["ensemble_size"].get<int>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("basin")) spec.basin = basin_from_string(j["basin"].get<std::string>());
    if (j.contains("model")) spec.model_name = j["model"].get<std::string>();
    if (j.contains("max_lead_h")) spec.max_lead_h = j["max_lead_h"].get<int>();
    spec.validate();
    return spec;
}

void SynthSpec::validate() const {
    if (n_storms < 1) throw Error("synth spec: n_storms must be >= 1");
    if (lifetime_steps < 5) throw Error("synth spec: lifetime_steps must be >= 5");
    if (track_noise_km < 0 || track_noise_km_per_24h < 0 || intensity_noise_kt < 0 ||
        intensity_noise_kt_per_24h < 0 || pressure_noise_hpa < 0)
        throw Error("synth spec: noise sigmas must be nonnegative");
    if (ensemble_size < 1) throw Error("synth spec: ensemble_size must be >= 1");
    if (speed_kmh < 0) throw Error("synth spec: speed_kmh must be nonnegative");
    if (max_lead_h < 6 || max_lead_h % 6 != 0)
        throw Error("synth spec: max_lead_h must be a positive multiple of 6");
}

double SynthSpec::vmax_at(int hour) const {
    double v = piecewise_linear(vmax_profile, hour);
    for (const auto& [start_h, gain_kt] : ri_segments) {
        const double t =
            std::clamp(static_cast<double>(hour - start_h) / 24.0, 0.0, 1.0);
        v += gain_kt * t;
    }
    return std::max(0.0, v);
}

double SynthSpec::pmin_at(int hour) const {
    return std::clamp(piecewise_linear(pmin_profile, hour), 800.0, 1100.0);
}

SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    const UtcSeconds start_time = spec.start_time != 0 ? spec.start_time : make_utc(2023, 9, 1);

    std::map<std::string, ObservedStorm> storms;
    ForecastSet forecasts(spec.model_name);

    for (int s = 0; s < spec.n_storms; ++s) {
        char sid_buf[16];
        std::snprintf(sid_buf, sizeof(sid_buf), "SYN%04d", s + 1);
        const std::string sid = sid_buf;

        const double lat0 = std::clamp(spec.start_lat + 2.0 * s, -85.0, 85.0);
        const GeoPoint origin(lat0, spec.start_lon + 5.0 * s);

        ObservedStorm storm;
        storm.sid = sid;
        storm.basin = spec.basin;
        for (int step = 0; step <= spec.lifetime_steps; ++step) {
            const int hour = 6 * step;
            const double travelled_km = spec.speed_kmh * hour;
            const GeoPoint pos = travelled_km > 0.0
                                     ? destination_point(origin, spec.bearing_deg, travelled_km)
                                     : origin;
            TrackPoint p{pos, spec.vmax_at(hour), spec.pmin_at(hour),
                         start_time + static_cast<UtcSeconds>(hour) * kHour};
            storm.points.push_back(std::move(p));
        }

        for (const TrackPoint& init_point : storm.points) {
            const int init_hour =
                static_cast<int>((init_point.valid_time - start_time) / kHour);
            const int h = utc_hour(init_point.valid_time);
            if (h != 0 && h != 12) continue;
            for (int lead = 6; lead <= spec.max_lead_h; lead += 6) {
                const int valid_hour = init_hour + lead;
                if (valid_hour > 6 * spec.lifetime_steps) break;
                const TrackPoint* truth = storm.at(init_point.valid_time +
                                                   static_cast<UtcSeconds>(lead) * kHour);
                const double sigma_track =
                    spec.track_noise_km + spec.track_noise_km_per_24h * lead / 24.0;
                const double sigma_vmax =
                    spec.intensity_noise_kt + spec.intensity_noise_kt_per_24h * lead / 24.0;

                for (int m = 0; m < spec.ensemble_size; ++m) {
                    CounterRng rng(spec.seed, sid, init_point.valid_time, lead, m);
                    const double noise_bearing = 360.0 * rng.uniform();
                    const double noise_radius = rng.rayleigh(sigma_track);
                    const double noise_vmax = rng.normal() * sigma_vmax;
                    const double noise_pmin = rng.normal() * spec.pressure_noise_hpa;

                    ForecastRow row;
                    row.key = RowKey{sid, init_point.valid_time, lead, m};
                    row.point.valid_time = truth->valid_time;
                    row.point.position =
                        noise_radius > 0.0
                            ? destination_point(truth->position, noise_bearing, noise_radius)
                            : truth->position;
                    row.point.vmax_kt =
                        noise_vmax != 0.0 ? std::max(0.0, *truth->vmax_kt + noise_vmax)
                                          : truth->vmax_kt;
                    row.point.pmin_hpa =
                        noise_pmin != 0.0
                            ? std::clamp(*truth->pmin_hpa + noise_pmin, 800.0, 1100.0)
                            : truth->pmin_hpa;
                    forecasts.upsert(std::move(row));
                }
            }
        }
        storms.emplace(sid, std::move(storm));
    }

    SynthResult result{ObservedStore(std::move(storms), LoadStats{}), std::move(forecasts)};
    return result;
}

} // namespace tcverify
