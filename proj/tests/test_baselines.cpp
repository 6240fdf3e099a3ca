#include <doctest.h>

#include <cmath>

#include "tcverify/baselines.hpp"
#include "tcverify/errors.hpp"
#include "tcverify/geodesy.hpp"
#include "test_helpers.hpp"

using namespace tcverify;
namespace tt = tcverify::testing;

TEST_CASE("climatology single-sample arithmetic") {
    // one NA storm, vmax 50 -> 70 kt over 24 h
    ObservedStore obs = tt::make_store({tt::make_storm(
        "AL011990", Basin::NA, parse_utc("1990-09-01T00:00:00Z"), 5, 15.0, 310.0, 0.1, -0.2,
        50.0, 5.0)});
    ClimatologyTable table = build_climatology(obs, {1980, 2022}, {24});
    const ClimatologyCell* cell = table.cell(Basin::NA, 24);
    REQUIRE(cell != nullptr);
    CHECK(cell->count() == 1);
    CHECK(cell->mean_dvmax().value() == doctest::Approx(20.0));
    CHECK(cell->mean_dlat() == doctest::Approx(0.4));
    CHECK(cell->mean_dlon() == doctest::Approx(-0.8));
}

TEST_CASE("climatology wraps longitude deltas") {
    // storm crossing lon 359 -> 1 over 24 h: dlon sample must be +2, not -358
    ObservedStorm storm;
    storm.sid = "WP011990";
    storm.basin = Basin::WP;
    for (int i = 0; i < 5; ++i) {
        TrackPoint p;
        p.valid_time = parse_utc("1990-07-01T00:00:00Z") + i * kSixHours;
        p.position = GeoPoint(20.0, 359.0 + 0.5 * i); // wraps past 360
        p.vmax_kt = 60.0;
        p.pmin_hpa = 990.0;
        storm.points.push_back(p);
    }
    ObservedStore obs = tt::make_store({storm});
    ClimatologyTable table = build_climatology(obs, {1980, 2022}, {24});
    CHECK(table.cell(Basin::WP, 24)->samples[0].dlon_deg == doctest::Approx(2.0));
}

TEST_CASE("climatology of excluded years is empty") {
    ObservedStore obs = tt::make_store({tt::make_storm(
        "AL012023", Basin::NA, parse_utc("2023-09-01T00:00:00Z"), 5, 15.0, 310.0, 0.1, -0.2,
        50.0, 5.0)});
    CHECK_THROWS_AS(build_climatology(obs, {1980, 2022}, {24}), EmptyClimatology);
}

TEST_CASE("climatology csv round trip") {
    const auto dir = tt::temp_dir("clim_roundtrip");
    ObservedStore obs = tt::make_store(
        {tt::make_storm("AL011990", Basin::NA, parse_utc("1990-09-01T00:00:00Z"), 9, 15.0, 310.0,
                        0.1, -0.2, 50.0, 5.0),
         tt::make_storm("WP021991", Basin::WP, parse_utc("1991-07-01T00:00:00Z"), 9, 20.0, 130.0,
                        0.2, 0.3, 40.0, 3.0)});
    ClimatologyTable table = build_climatology(obs, {1980, 2022}, {6, 24});
    table.save(dir / "clim.csv");
    ClimatologyTable reloaded = ClimatologyTable::load(dir / "clim.csv");
    REQUIRE(reloaded.cells().size() == table.cells().size());
    for (const auto& [key, cell] : table.cells()) {
        const ClimatologyCell* other = reloaded.cell(key.first, key.second);
        REQUIRE(other != nullptr);
        REQUIRE(other->count() == cell.count());
        CHECK(other->mean_dvmax().value() == doctest::Approx(cell.mean_dvmax().value()));
        CHECK(other->mean_dlon() == doctest::Approx(cell.mean_dlon()).epsilon(1e-12));
    }
}

TEST_CASE("persistence holds the initial state") {
    ObservedStore obs = tt::make_store({tt::make_storm(
        "AL012023", Basin::NA, parse_utc("2023-09-01T00:00:00Z"), 21, 20.0, 280.0, 0.0, 0.5,
        50.0, 0.0, 990.0)});
    const auto keys = enumerate_keys(obs, {24, 120}, 2023);
    ForecastSet fs = persistence_forecast(obs, keys);
    CHECK(fs.model() == "PERSISTENCE");
    for (const VerificationKey& key : keys) {
        const auto members = fs.members_at(key.sid, key.init_time, key.lead_h);
        REQUIRE(members.size() == 1);
        const TrackPoint* init_state = obs.point(key.sid, key.init_time);
        CHECK(members[0]->point.position == init_state->position);
        CHECK(members[0]->point.vmax_kt == init_state->vmax_kt);
        CHECK(members[0]->point.pmin_hpa == init_state->pmin_hpa);
        CHECK(members[0]->point.valid_time == key.valid_time());
    }
}

TEST_CASE("persistence DPE equals the observed displacement") {
    // storm moving 100 km per 24 h due east along the equator
    ObservedStorm storm;
    storm.sid = "AL012023";
    storm.basin = Basin::NA;
    const GeoPoint origin(0.0, 300.0);
    for (int i = 0; i < 21; ++i) {
        TrackPoint p;
        p.valid_time = parse_utc("2023-09-01T00:00:00Z") + i * kSixHours;
        p.position = destination_point(origin, 90.0, 25.0 * i); // 25 km per 6 h
        p.vmax_kt = 50.0;
        p.pmin_hpa = 1000.0;
        storm.points.push_back(p);
    }
    ObservedStore obs = tt::make_store({storm});
    const auto keys = enumerate_keys(obs, {24}, 2023);
    ForecastSet fs = persistence_forecast(obs, keys);
    for (const VerificationKey& key : keys) {
        const auto members = fs.members_at(key.sid, key.init_time, key.lead_h);
        const TrackPoint* truth = obs.point(key.sid, key.valid_time());
        const double dpe = haversine_km(members[0]->point.position, truth->position);
        CHECK(dpe == doctest::Approx(100.0).epsilon(1e-6));
    }
}

TEST_CASE("MT-LB deterministic forecast adds the cell mean tendency") {
    ObservedStore history = tt::make_store({tt::make_storm(
        "AL011990", Basin::NA, parse_utc("1990-09-01T00:00:00Z"), 9, 15.0, 310.0, 0.1, -0.2,
        50.0, 5.0)});
    ClimatologyTable clim = build_climatology(history, {1980, 2022}, {24});

    ObservedStore test = tt::make_store({tt::make_storm(
        "AL012023", Basin::NA, parse_utc("2023-09-01T00:00:00Z"), 9, 20.0, 300.0, 0.0, 0.0,
        50.0, 0.0, 995.0)});
    const auto keys = enumerate_keys(test, {24}, 2023);
    REQUIRE(!keys.empty());

    MtlbResult result = mtlb_forecast(test, clim, keys, MtlbMode::Deterministic);
    CHECK(result.persistence_fallbacks.empty());
    const ClimatologyCell* cell = clim.cell(Basin::NA, 24);
    for (const VerificationKey& key : keys) {
        const auto members = result.set.members_at(key.sid, key.init_time, key.lead_h);
        REQUIRE(members.size() == 1);
        const TrackPoint* init_state = test.point(key.sid, key.init_time);
        CHECK(std::abs(members[0]->point.position.lat() -
                       (init_state->position.lat() + cell->mean_dlat())) <= 1e-9);
        CHECK(std::abs(wrap_signed_lon_deg(members[0]->point.position.lon() -
                                           init_state->position.lon()) -
                       cell->mean_dlon()) <= 1e-9);
        CHECK(std::abs(*members[0]->point.vmax_kt -
                       (*init_state->vmax_kt + *cell->mean_dvmax())) <= 1e-9);
    }

    SUBCASE("cell dvmax mean 20 on init vmax 50 gives 70") {
        CHECK(*result.set.rows().begin()->second.point.vmax_kt == doctest::Approx(70.0));
    }
}

TEST_CASE("MT-LB with zero tendencies equals persistence") {
    ObservedStore history = tt::make_store({tt::make_storm(
        "AL011990", Basin::NA, parse_utc("1990-09-01T00:00:00Z"), 9, 15.0, 310.0, 0.0, 0.0,
        50.0, 0.0)});
    ClimatologyTable clim = build_climatology(history, {1980, 2022}, {24});

    ObservedStore test = tt::make_store({tt::make_storm(
        "AL012023", Basin::NA, parse_utc("2023-09-01T00:00:00Z"), 9, 20.0, 300.0, 0.1, 0.2,
        55.0, 2.0)});
    const auto keys = enumerate_keys(test, {24}, 2023);
    MtlbResult mtlb = mtlb_forecast(test, clim, keys, MtlbMode::Deterministic);
    ForecastSet pers = persistence_forecast(test, keys);
    for (const VerificationKey& key : keys) {
        const auto a = mtlb.set.members_at(key.sid, key.init_time, key.lead_h);
        const auto b = pers.members_at(key.sid, key.init_time, key.lead_h);
        CHECK(a[0]->point.position == b[0]->point.position);
        CHECK(*a[0]->point.vmax_kt == *b[0]->point.vmax_kt);
    }
}

TEST_CASE("MT-LB ensemble members come from the empirical sample set") {
    ObservedStore history = tt::make_store(
        {tt::make_storm("AL011990", Basin::NA, parse_utc("1990-09-01T00:00:00Z"), 13, 15.0,
                        310.0, 0.1, -0.2, 50.0, 5.0),
         tt::make_storm("AL021991", Basin::NA, parse_utc("1991-09-01T00:00:00Z"), 13, 18.0,
                        300.0, 0.2, -0.1, 40.0, 2.0)});
    ClimatologyTable clim = build_climatology(history, {1980, 2022}, {24});
    const ClimatologyCell* cell = clim.cell(Basin::NA, 24);
    REQUIRE(cell->count() > 1);

    ObservedStore test = tt::make_store({tt::make_storm(
        "AL012023", Basin::NA, parse_utc("2023-09-01T00:00:00Z"), 9, 20.0, 300.0, 0.0, 0.0,
        50.0, 0.0, 995.0)});
    const auto keys = enumerate_keys(test, {24}, 2023);
    MtlbResult result = mtlb_forecast(test, clim, keys, MtlbMode::Ensemble, 50, 17);

    for (const VerificationKey& key : keys) {
        const auto members = result.set.members_at(key.sid, key.init_time, key.lead_h);
        REQUIRE(members.size() == 50);
        const TrackPoint* init_state = test.point(key.sid, key.init_time);
        for (const ForecastRow* member : members) {
            const double dvmax = *member->point.vmax_kt - *init_state->vmax_kt;
            const double dlat = member->point.position.lat() - init_state->position.lat();
            bool found = false;
            for (const TendencySample& s : cell->samples)
                if (std::abs(dvmax - *s.dvmax_kt) <= 1e-9 && std::abs(dlat - s.dlat_deg) <= 1e-9)
                    found = true;
            CHECK(found);
        }
    }

    SUBCASE("fixed seed reproduces members exactly") {
        MtlbResult again = mtlb_forecast(test, clim, keys, MtlbMode::Ensemble, 50, 17);
        CHECK(again.set == result.set);
    }
    SUBCASE("different seed gives a different draw somewhere") {
        MtlbResult other = mtlb_forecast(test, clim, keys, MtlbMode::Ensemble, 50, 18);
        CHECK_FALSE(other.set == result.set);
    }
}

TEST_CASE("MT-LB missing cell falls back to persistence and is recorded") {
    ObservedStore history = tt::make_store({tt::make_storm(
        "AL011990", Basin::NA, parse_utc("1990-09-01T00:00:00Z"), 9, 15.0, 310.0, 0.1, -0.2,
        50.0, 5.0)});
    ClimatologyTable clim = build_climatology(history, {1980, 2022}, {24});

    // test storm is in a basin with no climatology
    ObservedStore test = tt::make_store({tt::make_storm(
        "WP012023", Basin::WP, parse_utc("2023-09-01T00:00:00Z"), 9, 20.0, 130.0, 0.1, 0.1,
        55.0, 2.0)});
    const auto keys = enumerate_keys(test, {24}, 2023);
    MtlbResult result = mtlb_forecast(test, clim, keys, MtlbMode::Deterministic);
    CHECK(result.persistence_fallbacks.size() == keys.size());
    ForecastSet pers = persistence_forecast(test, keys);
    for (const VerificationKey& key : keys) {
        const auto a = result.set.members_at(key.sid, key.init_time, key.lead_h);
        const auto b = pers.members_at(key.sid, key.init_time, key.lead_h);
        CHECK(a[0]->point.position == b[0]->point.position);
    }
}

TEST_CASE("MT-LB clips vmax at zero") {
    ObservedStorm weakening = tt::make_storm("AL011990", Basin::NA,
                                             parse_utc("1990-09-01T00:00:00Z"), 5, 15.0, 310.0,
                                             0.0, 0.0, 60.0, -10.0); // -40 kt per 24 h
    ObservedStore history = tt::make_store({weakening});
    ClimatologyTable clim = build_climatology(history, {1980, 2022}, {24});

    ObservedStore test = tt::make_store({tt::make_storm(
        "AL012023", Basin::NA, parse_utc("2023-09-01T00:00:00Z"), 9, 20.0, 300.0, 0.0, 0.0,
        10.0, 0.0)}); // init vmax 10, tendency -40
    const auto keys = enumerate_keys(test, {24}, 2023);
    MtlbResult result = mtlb_forecast(test, clim, keys, MtlbMode::Deterministic);
    for (const auto& [key, row] : result.set.rows()) CHECK(*row.point.vmax_kt == 0.0);
}

TEST_CASE("persistence fill completes the key grid without touching model rows") {
    ObservedStore obs = tt::make_store({tt::make_storm(
        "AL012023", Basin::NA, parse_utc("2023-09-01T00:00:00Z"), 21, 15.0, 310.0, 0.1, -0.2,
        50.0, 2.0)});
    const auto all_keys = enumerate_keys(obs, {24}, 2023);
    REQUIRE(all_keys.size() >= 4);
    const std::vector<VerificationKey> keys(all_keys.begin(), all_keys.begin() + 4);

    SUBCASE("full model passes through untouched with fraction 0") {
        ForecastSet full = tt::perfect_forecasts("MODELX", obs, keys);
        FillResult result = persistence_fill(full, obs, keys);
        CHECK(result.n_filled == 0);
        CHECK(result.fill_fraction(24) == 0.0);
        CHECK(result.set == full);
    }
    SUBCASE("3 of 4 keys covered gives fraction 0.25 and one filled row") {
        const ForecastSet full = tt::perfect_forecasts("MODELX", obs, keys);
        ForecastSet partial("MODELX");
        int kept = 0;
        for (const auto& [key, row] : full.rows())
            if (kept++ < 3) partial.upsert(row);
        FillResult result = persistence_fill(partial, obs, keys);
        CHECK(result.n_filled == 1);
        CHECK(result.fill_fraction(24) == doctest::Approx(0.25));
        // model rows bitwise identical in the output
        for (const auto& [key, row] : partial.rows()) {
            const auto members = result.set.members_at(key.sid, key.init_time, key.lead_h);
            REQUIRE(members.size() == 1);
            CHECK_FALSE(members[0]->filled);
            CHECK(members[0]->point.position == row.point.position);
        }
    }
    SUBCASE("empty model set becomes exactly the persistence baseline") {
        FillResult result = persistence_fill(ForecastSet("EMPTY"), obs, keys);
        CHECK(result.fill_fraction(24) == 1.0);
        CHECK(result.n_filled == keys.size());
        ForecastSet pers = persistence_forecast(obs, keys);
        for (const VerificationKey& key : keys) {
            const auto a = result.set.members_at(key.sid, key.init_time, key.lead_h);
            const auto b = pers.members_at(key.sid, key.init_time, key.lead_h);
            REQUIRE(a.size() == 1);
            CHECK(a[0]->filled);
            CHECK(a[0]->point.position == b[0]->point.position);
            CHECK(*a[0]->point.vmax_kt == *b[0]->point.vmax_kt);
        }
    }
}

TEST_CASE("persistence intensity error equals the observed tendency magnitude") {
    ObservedStore obs = tt::make_store({tt::make_storm(
        "AL012023", Basin::NA, parse_utc("2023-09-01T00:00:00Z"), 21, 15.0, 310.0, 0.1, -0.2,
        40.0, 2.5)});
    const auto keys = enumerate_keys(obs, {6, 24, 48}, 2023);
    ForecastSet fs = persistence_forecast(obs, keys);
    for (const VerificationKey& key : keys) {
        const auto members = fs.members_at(key.sid, key.init_time, key.lead_h);
        const TrackPoint* t0 = obs.point(key.sid, key.init_time);
        const TrackPoint* t1 = obs.point(key.sid, key.valid_time());
        const double ae = std::abs(*members[0]->point.vmax_kt - *t1->vmax_kt);
        CHECK(ae == std::abs(*t1->vmax_kt - *t0->vmax_kt));
    }
}
