#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "test_helpers.hpp"

namespace tt = tcverify::testing;

namespace {

std::string binary() {
    const char* bin = std::getenv("TCVERIFY_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "TCVERIFY_BIN must point at the tcverify binary");
    return bin;
}

int run(const std::string& args, const std::filesystem::path& capture_dir,
        const std::string& tag) {
    const std::string cmd = binary() + " " + args + " >" +
                            (capture_dir / (tag + ".out")).string() + " 2>" +
                            (capture_dir / (tag + ".err")).string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

const std::string kSynthSpec = R"({
    "n_storms": 2, "lifetime_steps": 21, "start_lat": 14.0, "start_lon": 308.0,
    "start_time": "2023-09-01T00:00:00Z", "bearing_deg": 300.0, "speed_kmh": 15.0,
    "vmax_profile": [[0, 40.0], [24, 80.0], [126, 60.0]],
    "ensemble_size": 2, "seed": 7, "basin": "NA", "model": "SYNTH"
})";

} // namespace

TEST_CASE("help output is stable and documents every flag") {
    const auto dir = tt::temp_dir("cli_help");
    CHECK(run("--help", dir, "help") == 0);
    std::string help = tt::read_file(dir / "help.out");
    for (const char* sub :
         {"validate", "baseline", "evaluate", "ri", "scorecard", "coverage", "synth"}) {
        CHECK(help.find(sub) != std::string::npos);
        CHECK(run(std::string(sub) + " --help", dir, std::string("help_") + sub) == 0);
        help += "\n==== " + std::string(sub) + " ====\n";
        help += tt::read_file(dir / (std::string("help_") + sub + ".out"));
    }
    for (const char* flag : {"--truth", "--forecasts", "--mode", "--leads", "--test-year",
                             "--baseline-clim", "--out", "--seed", "--jobs", "--reduction",
                             "--ri-rule", "--match-init-km", "--results", "--metric",
                             "--baseline", "--spec", "--clim", "--members", "--save-clim"})
        CHECK(help.find(flag) != std::string::npos);

    const std::filesystem::path golden =
        std::filesystem::path(TCVERIFY_FIXTURE_DIR) / "golden_help.txt";
    if (std::getenv("TCVERIFY_REGEN_GOLDEN"))
        tt::write_file(golden.parent_path(), "golden_help.txt", help);
    REQUIRE_MESSAGE(std::filesystem::exists(golden),
                    "golden help missing; regenerate with TCVERIFY_REGEN_GOLDEN=1");
    CHECK(help == tt::read_file(golden));
}

TEST_CASE("usage errors exit 2, data errors exit 1") {
    const auto dir = tt::temp_dir("cli_errors");
    // missing required --truth
    CHECK(run("evaluate --forecasts nowhere --out " + (dir / "r").string(), dir, "usage") == 2);
    const std::string err = tt::read_file(dir / "usage.err");
    CHECK(err.find("--truth") != std::string::npos);

    // unknown subcommand
    CHECK(run("frobnicate", dir, "unknown") == 2);

    // malformed CSV names the row
    tt::write_file(dir, "bad.csv", "sid,time,lat,lon,vmax_kt,pmin_hpa,basin\nS1,garbage,1,2,3,1000,NA\n");
    tt::write_file(dir, "fc.csv",
                   "model,sid,init_time,valid_time,lead_h,member,lat,lon,vmax_kt,pmin_hpa\n");
    CHECK(run("validate --truth " + (dir / "bad.csv").string() + " --forecasts " +
                  (dir / "fc.csv").string(),
              dir, "badcsv") == 1);
    const std::string bad_err = tt::read_file(dir / "badcsv.err");
    CHECK(bad_err.find("row 2") != std::string::npos);
}

TEST_CASE("synth, evaluate, coverage, ri and scorecard run end to end") {
    const auto dir = tt::temp_dir("cli_e2e");
    const auto spec = tt::write_file(dir, "spec.json", kSynthSpec);

    REQUIRE(run("synth --spec " + spec.string() + " --out " + (dir / "world").string(), dir,
                "synth") == 0);
    REQUIRE(std::filesystem::exists(dir / "world" / "obs.csv"));
    REQUIRE(std::filesystem::exists(dir / "world" / "forecasts.csv"));

    const std::string truth = (dir / "world" / "obs.csv").string();
    const std::string forecasts = (dir / "world" / "forecasts.csv").string();

    SUBCASE("validate passes on the synthetic world") {
        CHECK(run("validate --truth " + truth + " --forecasts " + forecasts + " --out " +
                      (dir / "report.json").string(),
                  dir, "validate") == 0);
        const std::string report = tt::read_file(dir / "report.json");
        CHECK(report.find("\"pass\": true") != std::string::npos);
    }

    SUBCASE("evaluate writes a complete bundle and is byte-deterministic") {
        const std::string common = "evaluate --truth " + truth + " --forecasts " + forecasts +
                                   " --mode fair --leads 6:120:6 --test-year 2023 --seed 17";
        REQUIRE(run(common + " --out " + (dir / "r1").string() + " --jobs 1", dir, "eval1") == 0);
        REQUIRE(run(common + " --out " + (dir / "r2").string() + " --jobs 4", dir, "eval2") == 0);
        for (const char* name : {"records_det.csv", "records_prob.csv", "ri_events.csv",
                                 "ri_scores.csv", "coverage.csv", "config.json"}) {
            const std::string a = tt::read_file(dir / "r1" / name);
            const std::string b = tt::read_file(dir / "r2" / name);
            CHECK(!a.empty());
            CHECK(a == b);
        }

        SUBCASE("scorecard renders from the bundle") {
            CHECK(run("scorecard --results " + (dir / "r1").string() +
                          " --metric dpe --baseline PERSISTENCE --out " + (dir / "cards").string(),
                      dir, "scorecard") == 0);
            CHECK(std::filesystem::exists(dir / "cards" / "scorecard_dpe.csv"));
            CHECK(std::filesystem::exists(dir / "cards" / "scorecard_dpe.svg"));
            CHECK(std::filesystem::exists(dir / "cards" / "leadchart_dpe.svg"));
        }
    }

    SUBCASE("baseline subcommand writes canonical forecast CSVs") {
        CHECK(run("baseline persistence --truth " + truth + " --leads 6:120:6 --test-year 2023" +
                      " --out " + (dir / "pers.csv").string(),
                  dir, "pers") == 0);
        const std::string pers = tt::read_file(dir / "pers.csv");
        CHECK(pers.rfind("model,sid,init_time,valid_time,lead_h,member,lat,lon,vmax_kt,pmin_hpa",
                         0) == 0);
        CHECK(pers.find("PERSISTENCE") != std::string::npos);

        CHECK(run("baseline mtlb --truth " + truth + " --leads 6:120:6 --test-year 2023" +
                      " --clim-years 2023:2023 --mode ens --members 5 --seed 3 --out " +
                      (dir / "mtlb.csv").string() + " --save-clim " + (dir / "clim.csv").string(),
                  dir, "mtlb") == 0);
        CHECK(std::filesystem::exists(dir / "clim.csv"));
        CHECK(std::filesystem::exists(dir / "clim.csv.samples.csv"));
    }

    SUBCASE("coverage and ri subcommands") {
        CHECK(run("coverage --truth " + truth + " --forecasts " + forecasts +
                      " --leads 6:120:6 --test-year 2023 --out " + (dir / "cov.csv").string(),
                  dir, "cov") == 0);
        const std::string cov = tt::read_file(dir / "cov.csv");
        CHECK(cov.rfind("model,lead_h,covered_pairs,total_pairs,fraction", 0) == 0);

        CHECK(run("ri --truth " + truth + " --forecasts " + forecasts +
                      " --leads 6:120:6 --test-year 2023 --out " + (dir / "ri").string(),
                  dir, "ri") == 0);
        CHECK(std::filesystem::exists(dir / "ri" / "ri_events.csv"));
        CHECK(std::filesystem::exists(dir / "ri" / "ri_scores.csv"));
    }
}
