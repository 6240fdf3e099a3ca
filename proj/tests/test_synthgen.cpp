#include <doctest.h>

#include <cmath>

#include "tcverify/errors.hpp"
#include "tcverify/prob_metrics.hpp"
#include "tcverify/protocol.hpp"
#include "tcverify/ri_metrics.hpp"
#include "tcverify/synthgen.hpp"
#include "test_helpers.hpp"

using namespace tcverify;

TEST_CASE("noise-free forecasts replicate the truth bit for bit") {
    SynthSpec spec;
    spec.n_storms = 2;
    spec.lifetime_steps = 20;
    spec.ensemble_size = 3;
    SynthResult world = generate(spec);

    CHECK(world.obs.storms().size() == 2);
    CHECK(!world.forecasts.empty());
    for (const auto& [key, row] : world.forecasts.rows()) {
        const TrackPoint* truth = world.obs.point(key.sid, row.point.valid_time);
        REQUIRE(truth != nullptr);
        CHECK(row.point.position == truth->position);
        CHECK(*row.point.vmax_kt == *truth->vmax_kt);
        CHECK(*row.point.pmin_hpa == *truth->pmin_hpa);
    }
}

TEST_CASE("observed motion is uniform along the configured bearing") {
    SynthSpec spec;
    spec.speed_kmh = 20.0;
    SynthResult world = generate(spec);
    const ObservedStorm& storm = world.obs.storms().begin()->second;
    for (std::size_t i = 1; i < storm.points.size(); ++i) {
        const double step =
            haversine_km(storm.points[i - 1].position, storm.points[i].position);
        CHECK(step == doctest::Approx(120.0).epsilon(1e-6)); // 20 km/h * 6 h
    }
}

TEST_CASE("track noise has the configured Rayleigh mean") {
    SynthSpec spec;
    spec.n_storms = 12;
    spec.lifetime_steps = 21;
    spec.track_noise_km = 50.0;
    spec.ensemble_size = 8;
    spec.seed = 11;
    SynthResult world = generate(spec);

    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [key, row] : world.forecasts.rows()) {
        const TrackPoint* truth = world.obs.point(key.sid, row.point.valid_time);
        sum += haversine_km(row.point.position, truth->position);
        ++n;
    }
    REQUIRE(n > 10000);
    const double expected = 50.0 * std::sqrt(M_PI / 2.0); // ~62.67 km
    CHECK(std::abs(sum / n - expected) / expected < 0.03);
}

TEST_CASE("intensity noise reproduces the Gaussian CRPS closed form") {
    SynthSpec spec;
    spec.n_storms = 12;
    spec.lifetime_steps = 21;
    spec.intensity_noise_kt = 5.0;
    spec.vmax_profile = {{0, 60.0}}; // far from the clipping boundary
    spec.ensemble_size = 50;
    spec.seed = 23;
    SynthResult world = generate(spec);
    const auto keys = enumerate_keys(world.obs, EvalConfig::default_leads(), 2023);
    REQUIRE(keys.size() > 1000);

    double sum = 0.0;
    std::size_t n = 0;
    for (const VerificationKey& key : keys) {
        const auto members = world.forecasts.members_at(key.sid, key.init_time, key.lead_h);
        if (members.size() != 50) continue;
        std::vector<double> vals;
        for (const ForecastRow* m : members) vals.push_back(*m->point.vmax_kt);
        const TrackPoint* truth = world.obs.point(key.sid, key.valid_time());
        sum += fair_crps(vals, *truth->vmax_kt);
        ++n;
    }
    const double expected = 5.0 * (std::sqrt(2.0 / M_PI) - 1.0 / std::sqrt(M_PI));
    CHECK(std::abs(sum / n - expected) / expected < 0.04);
}

TEST_CASE("injected RI segment labels true in the truth series") {
    SynthSpec spec;
    spec.vmax_profile = {{0, 40.0}};
    spec.ri_segments = {{12, 35.0}}; // +35 kt starting 12 h in
    SynthResult world = generate(spec);
    const ObservedStorm& storm = world.obs.storms().begin()->second;

    std::vector<std::pair<UtcSeconds, double>> series;
    for (const TrackPoint& p : storm.points) series.emplace_back(p.valid_time, *p.vmax_kt);
    const auto events = label_ri(series);
    bool found = false;
    for (const RIEvent& e : events)
        if (e.label) found = true;
    CHECK(found);
    CHECK(spec.vmax_at(12) == 40.0);
    CHECK(spec.vmax_at(36) == 75.0);
    CHECK(spec.vmax_at(100) == 75.0); // gain saturates after 24 h
}

TEST_CASE("lead-proportional noise grows linearly") {
    SynthSpec spec;
    spec.n_storms = 4;
    spec.lifetime_steps = 21;
    spec.track_noise_km_per_24h = 20.0;
    spec.ensemble_size = 20;
    spec.seed = 3;
    SynthResult world = generate(spec);

    std::map<int, std::pair<double, std::size_t>> by_lead;
    for (const auto& [key, row] : world.forecasts.rows()) {
        const TrackPoint* truth = world.obs.point(key.sid, row.point.valid_time);
        auto& [sum, n] = by_lead[key.lead_h];
        sum += haversine_km(row.point.position, truth->position);
        ++n;
    }
    const double mean24 = by_lead.at(24).first / by_lead.at(24).second;
    const double mean96 = by_lead.at(96).first / by_lead.at(96).second;
    CHECK(mean96 / mean24 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("synth spec json parsing and validation") {
    const std::string json = R"({
        "n_storms": 3, "lifetime_steps": 12, "start_lat": 20.0, "start_lon": 140.0,
        "start_time": "2023-07-01T00:00:00Z", "bearing_deg": 320.0, "speed_kmh": 18.0,
        "vmax_profile": [[0, 35.0], [48, 90.0]], "track_noise_km": 25.0,
        "ensemble_size": 5, "seed": 7, "basin": "WP", "model": "TOY"
    })";
    SynthSpec spec = SynthSpec::from_json(json);
    CHECK(spec.n_storms == 3);
    CHECK(spec.basin == Basin::WP);
    CHECK(spec.model_name == "TOY");
    CHECK(spec.vmax_at(24) == doctest::Approx(62.5));

    CHECK_THROWS_AS(SynthSpec::from_json("not json"), SchemaError);
    CHECK_THROWS_AS(SynthSpec::from_json(R"({"lifetime_steps": 2})"), Error);
    CHECK_THROWS_AS(SynthSpec::from_json(R"({"track_noise_km": -1})"), Error);
}

TEST_CASE("same seed regenerates the identical world") {
    SynthSpec spec;
    spec.track_noise_km = 30.0;
    spec.intensity_noise_kt = 4.0;
    spec.ensemble_size = 4;
    spec.seed = 99;
    SynthResult a = generate(spec);
    SynthResult b = generate(spec);
    CHECK(a.forecasts == b.forecasts);

    spec.seed = 100;
    SynthResult c = generate(spec);
    CHECK_FALSE(a.forecasts == c.forecasts);
}
