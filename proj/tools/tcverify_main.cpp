#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tcverify/baselines.hpp"
#include "tcverify/csv.hpp"
#include "tcverify/errors.hpp"
#include "tcverify/io.hpp"
#include "tcverify/matching.hpp"
#include "tcverify/protocol.hpp"
#include "tcverify/ri_metrics.hpp"
#include "tcverify/scorecard.hpp"
#include "tcverify/synthgen.hpp"

namespace {

using namespace tcverify;

std::vector<int> parse_leads(const std::string& text) {
    int start = 0, stop = 0, step = 0;
    if (std::sscanf(text.c_str(), "%d:%d:%d", &start, &stop, &step) != 3 || step <= 0)
        throw Error("invalid --leads '" + text + "' (expected start:stop:step, e.g. 6:120:6)");
    std::vector<int> leads;
    for (int lead = start; lead <= stop; lead += step) leads.push_back(lead);
    if (leads.empty()) throw Error("--leads '" + text + "' produces no leads");
    return leads;
}

std::pair<int, int> parse_years(const std::string& text) {
    int lo = 0, hi = 0;
    if (std::sscanf(text.c_str(), "%d:%d", &lo, &hi) != 2 || lo > hi)
        throw Error("invalid year range '" + text + "' (expected min:max)");
    return {lo, hi};
}

RiRule parse_ri_rule(const std::string& text) {
    RiRule rule;
    if (text == "majority") {
        rule.kind = RiRuleKind::Majority;
    } else if (text == "any") {
        rule.kind = RiRuleKind::Any;
    } else if (text.rfind("probability:", 0) == 0) {
        rule.kind = RiRuleKind::Probability;
        rule.threshold = std::stod(text.substr(12));
        if (rule.threshold < 0.0 || rule.threshold > 1.0)
            throw Error("probability threshold must be in [0, 1]");
    } else {
        throw Error("invalid --ri-rule '" + text +
                    "' (expected majority, any, or probability:<p>)");
    }
    return rule;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
}

struct CommonArgs {
    std::string truth;
    std::string forecasts;
    std::string leads = "6:120:6";
    int test_year = 2023;
};

int run_validate(const CommonArgs& common, const std::string& model, const std::string& out_path) {
    ObservedStore obs = load_observed(common.truth);
    std::map<std::string, ForecastSet> sets;
    if (!model.empty())
        sets.emplace(model, load_forecasts(common.forecasts, model));
    else
        sets = load_all_forecasts(common.forecasts);
    if (sets.empty()) throw Error("no forecast models found under '" + common.forecasts + "'");

    bool all_pass = true;
    nlohmann::ordered_json by_model = nlohmann::ordered_json::object();
    for (const auto& [name, fs] : sets) {
        ValidationReport report = validate_inclusion(fs, obs);
        by_model[name] = nlohmann::ordered_json::parse(report.to_json());
        if (!report.all_pass()) all_pass = false;
    }
    const std::string text = by_model.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
    if (!all_pass) {
        std::cerr << "validation failed for at least one criterion\n";
        return 1;
    }
    return 0;
}

int run_baseline(const std::string& kind, const CommonArgs& common, const std::string& clim_path,
                 const std::string& clim_years, const std::string& save_clim,
                 const std::string& mode, int members, std::uint64_t seed,
                 const std::string& out_path) {
    ObservedStore obs = load_observed(common.truth);
    const std::vector<int> leads = parse_leads(common.leads);
    const std::vector<VerificationKey> keys = enumerate_keys(obs, leads, common.test_year);
    if (keys.empty())
        throw NoKeys("no verification keys for test year " + std::to_string(common.test_year));

    if (kind == "persistence") {
        save_forecasts(persistence_forecast(obs, keys), out_path);
        return 0;
    }

    ClimatologyTable table;
    if (!clim_path.empty())
        table = ClimatologyTable::load(clim_path);
    else
        table = build_climatology(obs, parse_years(clim_years), leads);
    if (!save_clim.empty()) table.save(save_clim);

    const MtlbMode m = mode == "ens" ? MtlbMode::Ensemble : MtlbMode::Deterministic;
    MtlbResult result = mtlb_forecast(obs, table, keys, m, members, seed);
    if (!result.persistence_fallbacks.empty())
        std::cerr << result.persistence_fallbacks.size()
                  << " keys fell back to persistence (no climatology cell)\n";
    save_forecasts(result.set, out_path);
    return 0;
}

int run_evaluate(const CommonArgs& common, const std::string& mode, const std::string& clim_path,
                 const std::string& out_dir, std::uint64_t seed, int jobs,
                 const std::string& reduction, const std::string& ri_rule,
                 double match_init_km) {
    ObservedStore obs = load_observed(common.truth);

    EvalConfig cfg;
    cfg.mode = eval_mode_from_string(mode);
    cfg.leads = parse_leads(common.leads);
    cfg.test_year = common.test_year;
    cfg.ensemble_reduction =
        reduction == "control" ? EnsembleReduction::Control : EnsembleReduction::Mean;
    cfg.ri_rule = parse_ri_rule(ri_rule);
    cfg.seed = seed;
    cfg.jobs = jobs;
    cfg.match_init_km = match_init_km;

    std::map<std::string, ForecastSet> sets = load_all_forecasts(common.forecasts);
    if (sets.empty()) throw Error("no forecast models found under '" + common.forecasts + "'");

    std::filesystem::create_directories(out_dir);
    std::vector<ForecastSet> models;
    for (auto& [name, fs] : sets) {
        if (match_init_km > 0.0) {
            MatchPolicy policy;
            policy.max_init_distance_km = match_init_km;
            MatchResult match = match_tracks(fs, obs, policy);
            write_text(std::filesystem::path(out_dir) / ("match_" + name + ".json"),
                       match.to_json());
            models.push_back(relabel(fs, match));
            cfg.provenance[name] = "rederived";
        } else {
            models.push_back(std::move(fs));
        }
    }

    ClimatologyTable table;
    const ClimatologyTable* clim = nullptr;
    if (!clim_path.empty()) {
        table = ClimatologyTable::load(clim_path);
        clim = &table;
    }

    EvalResult result = run_eval(obs, models, cfg, clim);

    std::map<std::string, std::string> digests;
    digests[common.truth] = digest_file(common.truth);
    if (std::filesystem::is_directory(common.forecasts)) {
        for (const auto& entry : std::filesystem::directory_iterator(common.forecasts))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                digests[entry.path().string()] = digest_file(entry.path());
    } else {
        digests[common.forecasts] = digest_file(common.forecasts);
    }
    if (!clim_path.empty()) digests[clim_path] = digest_file(clim_path);

    write_bundle(result, out_dir, digests);
    std::cerr << "evaluated " << result.keys.size() << " keys, " << result.models.size()
              << " models -> " << out_dir << "\n";
    return 0;
}

int run_ri(const CommonArgs& common, const std::string& ri_rule, const std::string& out_dir) {
    ObservedStore obs = load_observed(common.truth);
    const std::vector<int> leads = parse_leads(common.leads);
    const std::vector<VerificationKey> keys = enumerate_keys(obs, leads, common.test_year);
    if (keys.empty())
        throw NoKeys("no verification keys for test year " + std::to_string(common.test_year));
    std::map<std::string, ForecastSet> sets = load_all_forecasts(common.forecasts);
    if (sets.empty()) throw Error("no forecast models found under '" + common.forecasts + "'");
    const RiRule rule = parse_ri_rule(ri_rule);

    std::filesystem::create_directories(out_dir);
    std::ofstream events(std::filesystem::path(out_dir) / "ri_events.csv");
    std::ofstream scores(std::filesystem::path(out_dir) / "ri_scores.csv");
    if (!events || !scores) throw IoError("cannot write RI tables under '" + out_dir + "'");
    events << "model,sid,init_time,window_start,lead_h,dvmax_kt,label\n";
    scores << "model,lead_h,tp,fp,fn,tn,csi,pss\n";
    for (const auto& [name, fs] : sets) {
        RiTable table = ri_by_lead(fs, obs, keys, rule);
        for (const RiForecastEvent& e : table.events)
            events << name << ',' << e.sid << ',' << format_utc(e.init_time) << ','
                   << format_utc(e.window_start) << ',' << e.lead_h << ',' << fmt_real(e.dvmax_kt)
                   << ',' << (e.label ? 1 : 0) << '\n';
        const auto emit = [&](int lead, const RiLeadScores& s) {
            scores << name << ',' << lead << ',' << s.counts.tp << ',' << s.counts.fp << ','
                   << s.counts.fn << ',' << s.counts.tn << ',' << fmt_opt(s.csi) << ','
                   << fmt_opt(s.pss) << '\n';
        };
        emit(0, table.overall);
        for (const auto& [lead, lead_scores] : table.by_lead) emit(lead, lead_scores);
    }
    return 0;
}

int run_scorecard(const std::string& results_dir, const std::string& metric_name,
                  const std::string& baseline, const std::string& out_dir) {
    ResultsBundle bundle = ResultsBundle::load(results_dir);
    const Metric metric = metric_from_string(metric_name);
    Scorecard card = build_scorecard(bundle, metric, baseline);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    save_scorecard_csv(card, dir / ("scorecard_" + metric_name + ".csv"));
    render_svg(card, dir / ("scorecard_" + metric_name + ".svg"));
    render_lead_chart(bundle, metric, bundle.models(), dir / ("leadchart_" + metric_name + ".svg"));
    return 0;
}

int run_coverage(const CommonArgs& common, const std::string& out_path) {
    ObservedStore obs = load_observed(common.truth);
    const std::vector<int> leads = parse_leads(common.leads);
    const std::vector<VerificationKey> keys = enumerate_keys(obs, leads, common.test_year);
    if (keys.empty())
        throw NoKeys("no verification keys for test year " + std::to_string(common.test_year));
    std::map<std::string, ForecastSet> sets = load_all_forecasts(common.forecasts);
    std::vector<const ForecastSet*> pointers;
    for (const auto& [name, fs] : sets) pointers.push_back(&fs);

    CoverageReport report = coverage(pointers, keys);
    std::ostringstream out;
    out << "model,lead_h,covered_pairs,total_pairs,fraction\n";
    for (const auto& [key, cell] : report.cells)
        out << key.first << ',' << key.second << ',' << cell.covered << ',' << cell.total << ','
            << fmt_real(cell.fraction()) << '\n';
    if (out_path.empty())
        std::cout << out.str();
    else
        write_text(out_path, out.str());
    return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    std::ifstream in(spec_path);
    if (!in) throw IoError("cannot open synth spec '" + spec_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    SynthSpec spec = SynthSpec::from_json(buf.str());
    SynthResult result = generate(spec);

    std::filesystem::create_directories(out_dir);
    save_observed(result.obs, std::filesystem::path(out_dir) / "obs.csv");
    save_forecasts(result.forecasts, std::filesystem::path(out_dir) / "forecasts.csv");
    std::cerr << "wrote " << result.obs.storms().size() << " storms and "
              << result.forecasts.size() << " forecast rows to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Storm-following tropical-cyclone forecast verification engine"};
    app.name("tcverify");
    app.require_subcommand(1);

    CommonArgs common;
    std::string model, out_path, out_dir, clim_path, save_clim;
    std::string mode = "fair", baseline_kind, mtlb_mode = "det", reduction = "mean";
    std::string ri_rule = "majority", metric_name = "dpe", baseline_model = "PERSISTENCE";
    std::string results_dir, spec_path, clim_years = "1980:2022";
    std::uint64_t seed = 0;
    int jobs = 0, members = 50;
    double match_init_km = 0.0;

    auto* validate_cmd = app.add_subcommand("validate", "Check ingest inclusion criteria");
    validate_cmd->add_option("--truth", common.truth, "Observed-track CSV")->required();
    validate_cmd->add_option("--forecasts", common.forecasts, "Forecast CSV file or directory")
        ->required();
    validate_cmd->add_option("--model", model, "Validate only this model");
    validate_cmd->add_option("--out", out_path, "Report JSON path (default: stdout)");

    auto* baseline_cmd = app.add_subcommand("baseline", "Construct a naive baseline forecast set");
    baseline_cmd->add_option("kind", baseline_kind, "persistence or mtlb")->required();
    baseline_cmd->add_option("--truth", common.truth, "Observed-track CSV")->required();
    baseline_cmd->add_option("--leads", common.leads, "Lead grid start:stop:step hours");
    baseline_cmd->add_option("--test-year", common.test_year, "Verification year");
    baseline_cmd->add_option("--clim", clim_path, "Precomputed climatology CSV (mtlb)");
    baseline_cmd->add_option("--clim-years", clim_years, "Climatology year range min:max (mtlb)");
    baseline_cmd->add_option("--save-clim", save_clim, "Write the built climatology CSV (mtlb)");
    baseline_cmd->add_option("--mode", mtlb_mode, "mtlb variant: det or ens");
    baseline_cmd->add_option("--members", members, "Ensemble size (mtlb ens)");
    baseline_cmd->add_option("--seed", seed, "RNG seed (mtlb ens)");
    baseline_cmd->add_option("--out", out_path, "Output forecast CSV")->required();

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Run the FAIR or RAW evaluation");
    evaluate_cmd->add_option("--truth", common.truth, "Observed-track CSV")->required();
    evaluate_cmd->add_option("--forecasts", common.forecasts, "Forecast CSV file or directory")
        ->required();
    evaluate_cmd->add_option("--mode", mode, "fair (persistence-filled) or raw");
    evaluate_cmd->add_option("--leads", common.leads, "Lead grid start:stop:step hours");
    evaluate_cmd->add_option("--test-year", common.test_year, "Verification year");
    evaluate_cmd->add_option("--baseline-clim", clim_path, "Precomputed climatology CSV");
    evaluate_cmd->add_option("--out", out_dir, "Results bundle directory")->required();
    evaluate_cmd->add_option("--seed", seed, "RNG seed for sampled baselines");
    evaluate_cmd->add_option("--jobs", jobs, "Worker threads (0 = hardware)");
    evaluate_cmd->add_option("--reduction", reduction, "Ensemble reduction: mean or control");
    evaluate_cmd->add_option("--ri-rule", ri_rule,
                             "Ensemble RI label rule: majority, any, probability:<p>");
    evaluate_cmd->add_option("--match-init-km", match_init_km,
                             "Match provisional track ids to storms within this init-time "
                             "distance before scoring (0 = sids are trusted)");

    auto* ri_cmd = app.add_subcommand("ri", "Rapid-intensification tables only");
    ri_cmd->add_option("--truth", common.truth, "Observed-track CSV")->required();
    ri_cmd->add_option("--forecasts", common.forecasts, "Forecast CSV file or directory")
        ->required();
    ri_cmd->add_option("--leads", common.leads, "Lead grid start:stop:step hours");
    ri_cmd->add_option("--test-year", common.test_year, "Verification year");
    ri_cmd->add_option("--ri-rule", ri_rule, "majority, any, or probability:<p>");
    ri_cmd->add_option("--out", out_dir, "Output directory")->required();

    auto* scorecard_cmd = app.add_subcommand("scorecard", "Render scorecard and lead chart");
    scorecard_cmd->add_option("--results", results_dir, "Evaluation bundle directory")->required();
    scorecard_cmd->add_option("--metric", metric_name,
                              "dpe, crps_track, ae_pmin, crps_pmin, ae_vmax, crps_vmax, csi, pss");
    scorecard_cmd->add_option("--baseline", baseline_model, "Baseline model for percent diffs");
    scorecard_cmd->add_option("--out", out_dir, "Output directory")->required();

    auto* coverage_cmd = app.add_subcommand("coverage", "Coverage of verification pairs by lead");
    coverage_cmd->add_option("--truth", common.truth, "Observed-track CSV")->required();
    coverage_cmd->add_option("--forecasts", common.forecasts, "Forecast CSV file or directory")
        ->required();
    coverage_cmd->add_option("--leads", common.leads, "Lead grid start:stop:step hours");
    coverage_cmd->add_option("--test-year", common.test_year, "Verification year");
    coverage_cmd->add_option("--out", out_path, "Coverage CSV path (default: stdout)");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic world");
    synth_cmd->add_option("--spec", spec_path, "Synth spec JSON")->required();
    synth_cmd->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\nRun 'tcverify --help' for usage.\n";
        return 2;
    }

    try {
        if (validate_cmd->parsed()) return run_validate(common, model, out_path);
        if (baseline_cmd->parsed()) {
            if (baseline_kind != "persistence" && baseline_kind != "mtlb")
                throw Error("baseline kind must be persistence or mtlb, got '" + baseline_kind +
                            "'");
            return run_baseline(baseline_kind, common, clim_path, clim_years, save_clim, mtlb_mode,
                                members, seed, out_path);
        }
        if (evaluate_cmd->parsed())
            return run_evaluate(common, mode, clim_path, out_dir, seed, jobs, reduction, ri_rule,
                                match_init_km);
        if (ri_cmd->parsed()) return run_ri(common, ri_rule, out_dir);
        if (scorecard_cmd->parsed())
            return run_scorecard(results_dir, metric_name, baseline_model, out_dir);
        if (coverage_cmd->parsed()) return run_coverage(common, out_path);
        if (synth_cmd->parsed()) return run_synth(spec_path, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
