#include "tcverify/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "tcverify/csv.hpp"
#include "tcverify/errors.hpp"
#include "tcverify/rng.hpp"

namespace tcverify {

std::string eval_mode_to_string(EvalMode mode) {
    return mode == EvalMode::Fair ? "fair" : "raw";
}

EvalMode eval_mode_from_string(const std::string& s) {
    if (s == "fair") return EvalMode::Fair;
    if (s == "raw") return EvalMode::Raw;
    throw Error("unknown mode '" + s + "' (expected fair or raw)");
}

std::vector<int> EvalConfig::default_leads() {
    std::vector<int> leads;
    for (int lead = 6; lead <= 120; lead += 6) leads.push_back(lead);
    return leads;
}

void EvalConfig::validate() const {
    if (leads.empty()) throw Error("config: leads must not be empty");
    for (int lead : leads)
        if (lead < 6 || lead > 120 || lead % 6 != 0)
            throw Error("config: leads must be multiples of 6 in [6, 120], got " +
                        std::to_string(lead));
    if (test_year < 1980) throw Error("config: test_year must be >= 1980");
    if (mtlb_members < 1) throw Error("config: mtlb_members must be >= 1");
    if (earth.radius_km <= 0) throw Error("config: earth radius must be positive");
}

CoverageReport coverage(const std::vector<const ForecastSet*>& models,
                        const std::vector<VerificationKey>& keys) {
    CoverageReport report;
    for (const ForecastSet* fs : models) {
        for (const VerificationKey& key : keys) {
            auto& cell = report.cells[{fs->model(), key.lead_h}];
            ++cell.total;
            if (fs->covers(key.sid, key.init_time, key.lead_h)) ++cell.covered;
        }
    }
    return report;
}

namespace {

/// Score all keys of one (already filled, in FAIR mode) set. Work is split
/// over jobs threads by key index; each slot is written exactly once, so the
/// merged output is independent of the thread count.
void score_set(const ForecastSet& fs, const ObservedStore& obs,
               const std::vector<VerificationKey>& keys, const EvalConfig& cfg, ModelEval& out) {
    const std::size_t n = keys.size();
    std::vector<std::optional<MetricRecord>> det(n);
    std::vector<std::optional<ProbRecord>> prob(n);

    unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, 64);

    std::exception_ptr worker_error;
    std::mutex error_mutex;
    auto worker = [&](unsigned worker_id) {
        try {
            for (std::size_t i = worker_id; i < n; i += jobs) {
                const VerificationKey& key = keys[i];
                const auto members = fs.members_at(key.sid, key.init_time, key.lead_h);
                if (members.empty()) continue; // RAW mode: uncovered key
                const ObservedStorm* storm = obs.find(key.sid);
                const TrackPoint* obs_now = storm ? storm->at(key.valid_time()) : nullptr;
                if (!obs_now) continue; // cannot happen for enumerated keys
                const TrackPoint* obs_prev = storm->at(key.valid_time() - 12 * kHour);

                MetricRecord rec = score_key(members, *obs_now, obs_prev,
                                             cfg.ensemble_reduction, cfg.earth);
                rec.key = key;
                rec.model = fs.model();
                det[i] = std::move(rec);

                ProbRecord p = score_key_prob(members, *obs_now, cfg.earth);
                p.key = key;
                p.model = fs.model();
                prob[i] = std::move(p);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!worker_error) worker_error = std::current_exception();
        }
    };

    if (jobs <= 1 || n < 2) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    if (worker_error) std::rethrow_exception(worker_error);

    for (std::size_t i = 0; i < n; ++i) {
        if (det[i]) out.det_records.push_back(std::move(*det[i]));
        if (prob[i]) out.prob_records.push_back(std::move(*prob[i]));
    }
}

} // namespace

EvalResult run_eval(const ObservedStore& obs, const std::vector<ForecastSet>& model_sets,
                    const EvalConfig& cfg, const ClimatologyTable* climatology) {
    cfg.validate();

    EvalResult result;
    result.config = cfg;
    result.keys = enumerate_keys(obs, cfg.leads, cfg.test_year);
    if (result.keys.empty())
        throw NoKeys("no verification keys for test year " + std::to_string(cfg.test_year));

    // Baselines go through the identical scoring pipeline as the models.
    ForecastSet persistence = persistence_forecast(obs, result.keys);

    ClimatologyTable built;
    const ClimatologyTable* clim = climatology;
    if (!clim) {
        try {
            built = build_climatology(obs, cfg.clim_years, cfg.leads);
            clim = &built;
        } catch (const EmptyClimatology&) {
            clim = &built; // empty table: MT-LB falls back to persistence everywhere
        }
    }
    MtlbResult mtlb_det = mtlb_forecast(obs, *clim, result.keys, MtlbMode::Deterministic,
                                        cfg.mtlb_members, cfg.seed);
    MtlbResult mtlb_ens = mtlb_forecast(obs, *clim, result.keys, MtlbMode::Ensemble,
                                        cfg.mtlb_members, cfg.seed);
    result.mtlb_fallbacks = mtlb_det.persistence_fallbacks;

    std::vector<const ForecastSet*> all_sets;
    for (const ForecastSet& fs : model_sets) {
        if (fs.model() == kPersistenceModel || fs.model() == kMtlbDetModel ||
            fs.model() == kMtlbEnsModel)
            throw Error("model name '" + fs.model() + "' is reserved for a baseline");
        all_sets.push_back(&fs);
    }
    all_sets.push_back(&persistence);
    all_sets.push_back(&mtlb_det.set);
    all_sets.push_back(&mtlb_ens.set);
    std::sort(all_sets.begin(), all_sets.end(),
              [](const ForecastSet* a, const ForecastSet* b) { return a->model() < b->model(); });
    for (std::size_t i = 1; i < all_sets.size(); ++i)
        if (all_sets[i]->model() == all_sets[i - 1]->model())
            throw Error("duplicate model name '" + all_sets[i]->model() + "'");

    result.coverage = coverage(all_sets, result.keys);

    for (const ForecastSet* fs : all_sets) {
        ModelEval eval;
        eval.model = fs->model();
        if (cfg.mode == EvalMode::Fair) {
            FillResult filled = persistence_fill(*fs, obs, result.keys);
            for (const auto& [lead, counts] : filled.filled_and_total_by_lead)
                eval.fill_fraction_by_lead[lead] = filled.fill_fraction(lead);
            score_set(filled.set, obs, result.keys, cfg, eval);
            eval.ri = ri_by_lead(filled.set, obs, result.keys, cfg.ri_rule);
        } else {
            score_set(*fs, obs, result.keys, cfg, eval);
            eval.ri = ri_by_lead(*fs, obs, result.keys, cfg.ri_rule);
        }
        result.models.push_back(std::move(eval));
    }
    return result;
}

std::string digest_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for digest");
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return hex;
}

void write_bundle(const EvalResult& result, const std::filesystem::path& out_dir,
                  const std::map<std::string, std::string>& input_digests) {
    std::filesystem::create_directories(out_dir);

    {
        std::ofstream out(out_dir / "records_det.csv");
        if (!out) throw IoError("cannot write records_det.csv");
        out << "model,sid,init_time,lead_h,dpe_km,cte_km,ate_km,ae_vmax_kt,ae_pmin_hpa,filled\n";
        for (const ModelEval& m : result.models)
            for (const MetricRecord& r : m.det_records)
                out << m.model << ',' << r.key.sid << ',' << format_utc(r.key.init_time) << ','
                    << r.key.lead_h << ',' << fmt_real(r.dpe_km) << ',' << fmt_opt(r.cte_km) << ','
                    << fmt_opt(r.ate_km) << ',' << fmt_opt(r.ae_vmax_kt) << ','
                    << fmt_opt(r.ae_pmin_hpa) << ',' << (r.filled ? 1 : 0) << '\n';
    }
    {
        std::ofstream out(out_dir / "records_prob.csv");
        if (!out) throw IoError("cannot write records_prob.csv");
        out << "model,sid,init_time,lead_h,crps_track_km,crps_vmax_kt,crps_pmin_hpa,n_members,"
               "filled\n";
        for (const ModelEval& m : result.models)
            for (const ProbRecord& r : m.prob_records)
                out << m.model << ',' << r.key.sid << ',' << format_utc(r.key.init_time) << ','
                    << r.key.lead_h << ',' << fmt_real(r.crps_track_km) << ','
                    << fmt_opt(r.crps_vmax_kt) << ',' << fmt_opt(r.crps_pmin_hpa) << ','
                    << r.n_members << ',' << (r.filled ? 1 : 0) << '\n';
    }
    {
        std::ofstream out(out_dir / "ri_events.csv");
        if (!out) throw IoError("cannot write ri_events.csv");
        out << "model,sid,init_time,window_start,lead_h,dvmax_kt,label\n";
        for (const ModelEval& m : result.models)
            for (const RiForecastEvent& e : m.ri.events)
                out << m.model << ',' << e.sid << ',' << format_utc(e.init_time) << ','
                    << format_utc(e.window_start) << ',' << e.lead_h << ','
                    << fmt_real(e.dvmax_kt) << ',' << (e.label ? 1 : 0) << '\n';
    }
    {
        std::ofstream out(out_dir / "ri_scores.csv");
        if (!out) throw IoError("cannot write ri_scores.csv");
        out << "model,lead_h,tp,fp,fn,tn,csi,pss\n";
        for (const ModelEval& m : result.models) {
            // lead_h = 0 carries the all-leads pooled scores.
            const auto emit = [&](int lead, const RiLeadScores& s) {
                out << m.model << ',' << lead << ',' << s.counts.tp << ',' << s.counts.fp << ','
                    << s.counts.fn << ',' << s.counts.tn << ',' << fmt_opt(s.csi) << ','
                    << fmt_opt(s.pss) << '\n';
            };
            emit(0, m.ri.overall);
            for (const auto& [lead, scores] : m.ri.by_lead) emit(lead, scores);
        }
    }
    {
        std::ofstream out(out_dir / "coverage.csv");
        if (!out) throw IoError("cannot write coverage.csv");
        out << "model,lead_h,covered_pairs,total_pairs,fraction\n";
        for (const auto& [key, cell] : result.coverage.cells)
            out << key.first << ',' << key.second << ',' << cell.covered << ',' << cell.total
                << ',' << fmt_real(cell.fraction()) << '\n';
    }
    {
        nlohmann::ordered_json j;
        const EvalConfig& cfg = result.config;
        j["mode"] = eval_mode_to_string(cfg.mode);
        j["leads"] = cfg.leads;
        j["test_year"] = cfg.test_year;
        j["ensemble_reduction"] =
            cfg.ensemble_reduction == EnsembleReduction::Mean ? "mean" : "control";
        switch (cfg.ri_rule.kind) {
            case RiRuleKind::Majority: j["ri_rule"] = "majority"; break;
            case RiRuleKind::Any: j["ri_rule"] = "any"; break;
            case RiRuleKind::Probability:
                j["ri_rule"] = "probability:" + fmt_real(cfg.ri_rule.threshold);
                break;
        }
        j["seed"] = cfg.seed;
        j["clim_years"] = {cfg.clim_years.first, cfg.clim_years.second};
        j["mtlb_members"] = cfg.mtlb_members;
        j["earth_radius_km"] = cfg.earth.radius_km;
        if (cfg.match_init_km > 0.0) j["match_init_km"] = cfg.match_init_km;
        j["n_keys"] = result.keys.size();
        j["models"] = nlohmann::ordered_json::array();
        for (const ModelEval& m : result.models) j["models"].push_back(m.model);
        j["provenance"] = nlohmann::ordered_json::object();
        for (const ModelEval& m : result.models) {
            auto it = cfg.provenance.find(m.model);
            const bool baseline = m.model == kPersistenceModel || m.model == kMtlbDetModel ||
                                  m.model == kMtlbEnsModel;
            j["provenance"][m.model] =
                it != cfg.provenance.end() ? it->second : (baseline ? "baseline" : "provider");
        }
        j["mtlb_persistence_fallbacks"] = result.mtlb_fallbacks.size();
        j["inputs"] = nlohmann::ordered_json::object();
        for (const auto& [path, digest] : input_digests) j["inputs"][path] = digest;

        std::ofstream out(out_dir / "config.json");
        if (!out) throw IoError("cannot write config.json");
        out << j.dump(2) << '\n';
    }
}

} // namespace tcverify
