#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcverify/baselines.hpp"
#include "tcverify/det_metrics.hpp"
#include "tcverify/prob_metrics.hpp"
#include "tcverify/ri_metrics.hpp"
#include "tcverify/track.hpp"

namespace tcverify {

enum class EvalMode { Fair, Raw };

std::string eval_mode_to_string(EvalMode mode);
EvalMode eval_mode_from_string(const std::string& s);

struct EvalConfig {
    EvalMode mode = EvalMode::Fair;
    std::vector<int> leads; // default 6..120 step 6
    int test_year = 2023;
    EnsembleReduction ensemble_reduction = EnsembleReduction::Mean;
    RiRule ri_rule;
    std::uint64_t seed = 0;
    int jobs = 0; // 0 = available parallelism; never affects results
    std::pair<int, int> clim_years{1980, 2022};
    int mtlb_members = 50;
    EarthModel earth;
    double match_init_km = 0.0; // 0 = sids trusted, no matching pass
    std::map<std::string, std::string> provenance; // model -> provider|rederived

    static std::vector<int> default_leads();
    void validate() const; // throws Error on out-of-contract values
};

struct CoverageReport {
    struct Cell {
        std::size_t covered = 0;
        std::size_t total = 0;
        double fraction() const {
            return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
        }
    };
    // (model, lead) -> cell
    std::map<std::pair<std::string, int>, Cell> cells;
};

/// Any-row coverage per (model, lead) over the verification keys.
CoverageReport coverage(const std::vector<const ForecastSet*>& models,
                        const std::vector<VerificationKey>& keys);

struct ModelEval {
    std::string model;
    std::vector<MetricRecord> det_records;
    std::vector<ProbRecord> prob_records;
    RiTable ri;
    std::map<int, double> fill_fraction_by_lead; // FAIR mode only
};

struct EvalResult {
    EvalConfig config;
    std::vector<VerificationKey> keys;
    std::vector<ModelEval> models; // sorted by model name; baselines included
    CoverageReport coverage;
    std::vector<VerificationKey> mtlb_fallbacks;
};

/// Run the full evaluation: enumerate keys, construct baselines, apply the
/// FAIR fill or RAW coverage rule, and score every key deterministically
/// and probabilistically, plus the RI tables and the coverage report.
/// Deterministic for fixed config (including across jobs settings).
EvalResult run_eval(const ObservedStore& obs, const std::vector<ForecastSet>& model_sets,
                    const EvalConfig& cfg,
                    const ClimatologyTable* climatology = nullptr);

/// Write records_det.csv, records_prob.csv, ri_events.csv, ri_scores.csv,
/// coverage.csv and config.json into out_dir (created if needed).
/// input_digests: file path -> FNV-1a digest recorded for reproducibility.
void write_bundle(const EvalResult& result, const std::filesystem::path& out_dir,
                  const std::map<std::string, std::string>& input_digests);

std::string digest_file(const std::filesystem::path& path);

} // namespace tcverify
