#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tcverify/baselines.hpp"
#include "tcverify/errors.hpp"
#include "tcverify/geodesy.hpp"
#include "tcverify/io.hpp"
#include "tcverify/matching.hpp"
#include "tcverify/prob_metrics.hpp"
#include "tcverify/protocol.hpp"
#include "tcverify/ri_metrics.hpp"
#include "tcverify/scorecard.hpp"
#include "tcverify/synthgen.hpp"

namespace py = pybind11;
using namespace tcverify;

namespace {

GeoPoint to_point(std::pair<double, double> latlon) {
    return GeoPoint(latlon.first, latlon.second);
}

std::vector<GeoPoint> to_points(const std::vector<std::pair<double, double>>& latlons) {
    std::vector<GeoPoint> out;
    out.reserve(latlons.size());
    for (const auto& p : latlons) out.push_back(to_point(p));
    return out;
}

/// Mirrors the `evaluate` CLI subcommand for use from python.
void run_evaluation(const std::string& truth_csv, const std::string& forecasts_path,
                    const std::string& out_dir, const std::string& mode, const std::string& leads,
                    int test_year, std::uint64_t seed, int jobs) {
    ObservedStore obs = load_observed(truth_csv);
    EvalConfig cfg;
    cfg.mode = eval_mode_from_string(mode);
    int start = 0, stop = 0, step = 0;
    if (std::sscanf(leads.c_str(), "%d:%d:%d", &start, &stop, &step) != 3 || step <= 0)
        throw Error("invalid leads '" + leads + "' (expected start:stop:step)");
    for (int lead = start; lead <= stop; lead += step) cfg.leads.push_back(lead);
    cfg.test_year = test_year;
    cfg.seed = seed;
    cfg.jobs = jobs;

    std::vector<ForecastSet> models;
    for (auto& [name, fs] : load_all_forecasts(forecasts_path)) models.push_back(std::move(fs));
    EvalResult result = run_eval(obs, models, cfg);
    std::map<std::string, std::string> digests;
    digests[truth_csv] = digest_file(truth_csv);
    write_bundle(result, out_dir, digests);
}

void make_scorecard(const std::string& results_dir, const std::string& metric,
                    const std::string& baseline, const std::string& out_dir) {
    ResultsBundle bundle = ResultsBundle::load(results_dir);
    const Metric m = metric_from_string(metric);
    Scorecard card = build_scorecard(bundle, m, baseline);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    save_scorecard_csv(card, dir / ("scorecard_" + metric + ".csv"));
    render_svg(card, dir / ("scorecard_" + metric + ".svg"));
    render_lead_chart(bundle, m, bundle.models(), dir / ("leadchart_" + metric + ".svg"));
}

void run_synth(const std::string& spec_json, const std::string& out_dir) {
    SynthSpec spec = SynthSpec::from_json(spec_json);
    SynthResult result = generate(spec);
    std::filesystem::create_directories(out_dir);
    save_observed(result.obs, std::filesystem::path(out_dir) / "obs.csv");
    save_forecasts(result.forecasts, std::filesystem::path(out_dir) / "forecasts.csv");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tropical-cyclone forecast verification core";

    py::register_exception<Error>(m, "VerifyError");

    m.def(
        "haversine_km",
        [](double lat1, double lon1, double lat2, double lon2, double radius_km) {
            return haversine_km(GeoPoint(lat1, lon1), GeoPoint(lat2, lon2),
                                EarthModel{radius_km});
        },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"),
        py::arg("radius_km") = 6371.0, "Great-circle distance in km");

    m.def(
        "initial_bearing_deg",
        [](double lat1, double lon1, double lat2, double lon2) {
            return initial_bearing_deg(GeoPoint(lat1, lon1), GeoPoint(lat2, lon2));
        },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));

    m.def(
        "decompose_track_error",
        [](std::pair<double, double> obs_prev, std::pair<double, double> obs_now,
           std::pair<double, double> fcst) {
            const TrackErrorDecomposition d =
                decompose_track_error(to_point(obs_prev), to_point(obs_now), to_point(fcst));
            py::dict out;
            out["dpe_km"] = d.dpe_km;
            out["cte_km"] = d.cte_km ? py::cast(*d.cte_km) : py::none();
            out["ate_km"] = d.ate_km ? py::cast(*d.ate_km) : py::none();
            return out;
        },
        py::arg("obs_prev"), py::arg("obs_now"), py::arg("fcst"),
        "DPE/CTE/ATE of a forecast position against the observed 12 h motion segment");

    m.def(
        "spherical_mean",
        [](const std::vector<std::pair<double, double>>& points) {
            const GeoPoint mean = spherical_mean(to_points(points));
            return std::make_pair(mean.lat(), mean.lon());
        },
        py::arg("points"));

    m.def("fair_crps",
          [](const std::vector<double>& values, double y) { return fair_crps(values, y); },
          py::arg("values"), py::arg("y"),
          "Fair CRPS of a scalar ensemble; N=1 degenerates to absolute error");

    m.def(
        "track_crps",
        [](const std::vector<std::pair<double, double>>& positions,
           std::pair<double, double> y) { return track_crps(to_points(positions), to_point(y)); },
        py::arg("positions"), py::arg("y"),
        "Fair CRPS with haversine distances; N=1 degenerates to DPE");

    m.def(
        "brier_skill",
        [](const std::vector<double>& forecast, const std::vector<int>& outcomes,
           const std::vector<double>& reference) {
            return brier_skill(forecast, outcomes, reference);
        },
        py::arg("forecast_probs"), py::arg("outcomes"), py::arg("reference_probs"));

    m.def(
        "ensemble_event_prob",
        [](const std::vector<double>& values, double threshold, const std::string& direction) {
            return ensemble_event_prob(values, threshold,
                                       direction == "<=" ? ThresholdDirection::LessEqual
                                                         : ThresholdDirection::GreaterEqual);
        },
        py::arg("values"), py::arg("threshold"), py::arg("direction") = ">=");

    m.def(
        "csi",
        [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
            const auto v = csi(ConfusionCounts{tp, fp, fn, tn});
            return v ? py::cast(*v) : py::none().cast<py::object>();
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"));

    m.def(
        "pss",
        [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
            const auto v = pss(ConfusionCounts{tp, fp, fn, tn});
            return v ? py::cast(*v) : py::none().cast<py::object>();
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"));

    m.def(
        "label_ri",
        [](const std::vector<std::pair<std::string, double>>& series) {
            std::vector<std::pair<UtcSeconds, double>> parsed;
            parsed.reserve(series.size());
            for (const auto& [iso, vmax] : series) parsed.emplace_back(parse_utc(iso), vmax);
            py::list out;
            for (const RIEvent& e : label_ri(parsed)) {
                py::dict d;
                d["window_start"] = format_utc(e.window_start);
                d["dvmax_kt"] = e.dvmax_kt;
                d["label"] = e.label;
                out.append(d);
            }
            return out;
        },
        py::arg("series"), "Rolling 24 h RI labels over a (iso_time, vmax_kt) series");

    m.def("evaluate", &run_evaluation, py::arg("truth_csv"), py::arg("forecasts"),
          py::arg("out_dir"), py::arg("mode") = "fair", py::arg("leads") = "6:120:6",
          py::arg("test_year") = 2023, py::arg("seed") = 0, py::arg("jobs") = 0,
          "Run the full evaluation and write the results bundle");

    m.def("scorecard", &make_scorecard, py::arg("results_dir"), py::arg("metric"),
          py::arg("baseline") = "PERSISTENCE", py::arg("out_dir") = ".",
          "Build scorecard CSV/SVG and the per-lead chart from a results bundle");

    m.def("synth", &run_synth, py::arg("spec_json"), py::arg("out_dir"),
          "Generate a synthetic world (obs.csv + forecasts.csv) from a JSON spec");
}
