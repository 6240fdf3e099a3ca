#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tcverify {

enum class Metric { Dpe, CrpsTrack, AePmin, CrpsPmin, AeVmax, CrpsVmax, Csi, Pss };

Metric metric_from_string(const std::string& name);
std::string metric_to_string(Metric m);
std::string metric_label(Metric m); // axis/title label with units
/// Sign convention for pct_diff coloring: CSI/PSS improve upward, error
/// metrics improve downward.
bool metric_higher_is_better(Metric m);

/// Per-lead metric means reloaded from an evaluation bundle directory.
class ResultsBundle {
public:
    static ResultsBundle load(const std::filesystem::path& dir);

    /// (model, lead) -> (mean value, n) for the metric; records with the
    /// field MISSING are excluded pairwise.
    std::map<std::pair<std::string, int>, std::pair<double, std::size_t>> per_lead(Metric m) const;

    std::vector<std::string> models() const;
    std::vector<int> leads(Metric m) const;

    /// Verification pair count by lead (from coverage.csv totals).
    std::map<int, std::size_t> pair_counts() const;

private:
    struct ValueRow {
        std::string model;
        int lead_h = 0;
        std::optional<double> value;
    };
    struct RiScoreRow {
        std::string model;
        int lead_h = 0;
        std::size_t n = 0;
        std::optional<double> csi;
        std::optional<double> pss;
    };
    std::map<Metric, std::vector<ValueRow>> values_;
    std::vector<RiScoreRow> ri_;
    std::map<std::pair<std::string, int>, std::pair<std::size_t, std::size_t>> coverage_;
};

struct ScorecardCell {
    std::optional<double> value;
    std::optional<double> pct_diff; // vs baseline at the same lead; empty when undefined
    std::size_t n = 0;
};

struct Scorecard {
    Metric metric = Metric::Dpe;
    std::string baseline;
    std::vector<std::string> models; // row order; baseline first
    std::vector<int> leads; // column order
    std::map<std::pair<std::string, int>, ScorecardCell> cells;
};

/// Join per-lead means against the baseline's means. Cells with n = 0 stay
/// undefined; pct_diff is empty when the baseline value is 0 or missing.
/// Throws UnknownBaseline when the baseline model is absent.
Scorecard build_scorecard(const ResultsBundle& results, Metric metric,
                          const std::string& baseline);

void save_scorecard_csv(const Scorecard& card, const std::filesystem::path& path);

/// Deterministic SVG heatmap: rows = models, columns = leads, diverging
/// color scale centered at 0% clamped at +-50%, cell text = value.
/// Byte-identical output for identical input.
void render_svg(const Scorecard& card, const std::filesystem::path& path);

/// Per-lead line chart with baseline curves dashed (persistence black,
/// MT-LB cyan) and a right-hand case-count axis.
void render_lead_chart(const ResultsBundle& results, Metric metric,
                       const std::vector<std::string>& models,
                       const std::filesystem::path& path);

} // namespace tcverify
