#include "tcverify/prob_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tcverify/errors.hpp"

namespace tcverify {

double fair_crps(std::span<const double> values, double y) {
    const std::size_t n = values.size();
    if (n == 0) throw Error("fair_crps requires at least one member");
    double acc = 0.0;
    for (double x : values) acc += std::abs(x - y);
    acc /= static_cast<double>(n);
    if (n == 1) return acc;

    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) spread += std::abs(values[i] - values[j]);
    spread *= 2.0; // ordered pairs
    return acc - spread / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double fair_crps(const std::vector<double>& values, double y) {
    return fair_crps(std::span<const double>(values.data(), values.size()), y);
}

double track_crps(std::span<const GeoPoint> positions, const GeoPoint& y, const EarthModel& earth,
                  std::size_t* clamp_count) {
    const std::size_t n = positions.size();
    if (n == 0) throw Error("track_crps requires at least one member");
    double acc = 0.0;
    for (const GeoPoint& p : positions) acc += haversine_km(p, y, earth);
    acc /= static_cast<double>(n);
    if (n == 1) return acc;

    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            spread += haversine_km(positions[i], positions[j], earth);
    spread *= 2.0;
    double score = acc - spread / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1));
    if (score < 0.0) {
        if (clamp_count) ++*clamp_count;
        score = 0.0;
    }
    return score;
}

double track_crps(const std::vector<GeoPoint>& positions, const GeoPoint& y,
                  const EarthModel& earth, std::size_t* clamp_count) {
    return track_crps(std::span<const GeoPoint>(positions.data(), positions.size()), y, earth,
                      clamp_count);
}

double brier_skill(std::span<const double> forecast_probs, std::span<const int> outcomes,
                   std::span<const double> reference_probs) {
    const std::size_t n = forecast_probs.size();
    if (n == 0 || outcomes.size() != n || reference_probs.size() != n)
        throw Error("brier_skill requires equal-length nonempty inputs");
    double bs_f = 0.0, bs_r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double o = static_cast<double>(outcomes[i]);
        bs_f += (forecast_probs[i] - o) * (forecast_probs[i] - o);
        bs_r += (reference_probs[i] - o) * (reference_probs[i] - o);
    }
    bs_f /= static_cast<double>(n);
    bs_r /= static_cast<double>(n);
    if (bs_r == 0.0)
        return bs_f == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return 1.0 - bs_f / bs_r;
}

double ensemble_event_prob(std::span<const double> values, double threshold,
                           ThresholdDirection direction) {
    if (values.empty()) throw Error("ensemble_event_prob requires at least one member");
    std::size_t hits = 0;
    for (double v : values) {
        const bool hit =
            direction == ThresholdDirection::GreaterEqual ? v >= threshold : v <= threshold;
        if (hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(values.size());
}

ProbRecord score_key_prob(const std::vector<const ForecastRow*>& members, const TrackPoint& obs_now,
                          const EarthModel& earth) {
    if (members.empty())
        throw Error("score_key_prob requires at least one forecast member");

    ProbRecord rec;
    rec.n_members = static_cast<int>(members.size());
    rec.filled = std::all_of(members.begin(), members.end(),
                             [](const ForecastRow* r) { return r->filled; });

    std::vector<GeoPoint> positions;
    positions.reserve(members.size());
    for (const ForecastRow* row : members) positions.push_back(row->point.position);
    rec.crps_track_km = track_crps(positions, obs_now.position, earth);

    if (obs_now.vmax_kt) {
        std::vector<double> vals;
        for (const ForecastRow* row : members)
            if (row->point.vmax_kt) vals.push_back(*row->point.vmax_kt);
        if (!vals.empty()) rec.crps_vmax_kt = fair_crps(vals, *obs_now.vmax_kt);
    }
    if (obs_now.pmin_hpa) {
        std::vector<double> vals;
        for (const ForecastRow* row : members)
            if (row->point.pmin_hpa) vals.push_back(*row->point.pmin_hpa);
        if (!vals.empty()) rec.crps_pmin_hpa = fair_crps(vals, *obs_now.pmin_hpa);
    }
    return rec;
}

} // namespace tcverify
