#include "tcverify/scorecard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "tcverify/baselines.hpp"
#include "tcverify/csv.hpp"
#include "tcverify/errors.hpp"

namespace tcverify {

Metric metric_from_string(const std::string& name) {
    if (name == "dpe") return Metric::Dpe;
    if (name == "crps_track") return Metric::CrpsTrack;
    if (name == "ae_pmin") return Metric::AePmin;
    if (name == "crps_pmin") return Metric::CrpsPmin;
    if (name == "ae_vmax") return Metric::AeVmax;
    if (name == "crps_vmax") return Metric::CrpsVmax;
    if (name == "csi") return Metric::Csi;
    if (name == "pss") return Metric::Pss;
    throw Error("unknown metric '" + name +
                "' (expected dpe, crps_track, ae_pmin, crps_pmin, ae_vmax, crps_vmax, csi, pss)");
}

std::string metric_to_string(Metric m) {
    switch (m) {
        case Metric::Dpe: return "dpe";
        case Metric::CrpsTrack: return "crps_track";
        case Metric::AePmin: return "ae_pmin";
        case Metric::CrpsPmin: return "crps_pmin";
        case Metric::AeVmax: return "ae_vmax";
        case Metric::CrpsVmax: return "crps_vmax";
        case Metric::Csi: return "csi";
        case Metric::Pss: return "pss";
    }
    return "dpe";
}

std::string metric_label(Metric m) {
    switch (m) {
        case Metric::Dpe: return "DPE (km)";
        case Metric::CrpsTrack: return "Track CRPS (km)";
        case Metric::AePmin: return "AE pmin (hPa)";
        case Metric::CrpsPmin: return "CRPS pmin (hPa)";
        case Metric::AeVmax: return "AE vmax (kt)";
        case Metric::CrpsVmax: return "CRPS vmax (kt)";
        case Metric::Csi: return "CSI";
        case Metric::Pss: return "PSS";
    }
    return "";
}

bool metric_higher_is_better(Metric m) {
    return m == Metric::Csi || m == Metric::Pss;
}

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string cell_text(Metric m, double value) {
    return metric_higher_is_better(m) ? fmt2(value) : fmt1(value);
}

/// Diverging fill: improvement shades toward blue, degradation toward red,
/// clamped at +-50%.
std::string pct_color(Metric m, std::optional<double> pct) {
    if (!pct) return "#d9d9d9";
    double goodness = metric_higher_is_better(m) ? *pct : -*pct;
    double t = std::clamp(goodness / 50.0, -1.0, 1.0);
    int r, g, b;
    if (t >= 0.0) { // toward blue #2166ac
        r = static_cast<int>(std::lround(255 + t * (33 - 255)));
        g = static_cast<int>(std::lround(255 + t * (102 - 255)));
        b = static_cast<int>(std::lround(255 + t * (172 - 255)));
    } else { // toward red #b2182b
        r = static_cast<int>(std::lround(255 - t * (178 - 255)));
        g = static_cast<int>(std::lround(255 - t * (24 - 255)));
        b = static_cast<int>(std::lround(255 - t * (43 - 255)));
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

struct Style {
    std::string color;
    bool dashed = false;
};

Style model_style(const std::string& model, std::size_t palette_index) {
    if (model == kPersistenceModel) return {"#000000", true};
    if (model == kMtlbDetModel || model == kMtlbEnsModel) return {"#00b5c8", true};
    return {kPalette[palette_index % (sizeof(kPalette) / sizeof(kPalette[0]))], false};
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

} // namespace

ResultsBundle ResultsBundle::load(const std::filesystem::path& dir) {
    ResultsBundle bundle;
    {
        std::ifstream in(dir / "records_det.csv");
        if (!in) throw IoError("cannot open '" + (dir / "records_det.csv").string() + "'");
        CsvReader reader(in, (dir / "records_det.csv").string());
        const std::size_t model_col = reader.require_column("model");
        const std::size_t lead_col = reader.require_column("lead_h");
        const std::size_t dpe_col = reader.require_column("dpe_km");
        const std::size_t vmax_col = reader.require_column("ae_vmax_kt");
        const std::size_t pmin_col = reader.require_column("ae_pmin_hpa");
        std::vector<std::string> fields;
        while (reader.next(fields)) {
            const std::string& model = fields[model_col];
            const int lead = static_cast<int>(reader.parse_int(fields, lead_col, "lead_h"));
            bundle.values_[Metric::Dpe].push_back(
                {model, lead, reader.parse_opt_real(fields, dpe_col, "dpe_km")});
            bundle.values_[Metric::AeVmax].push_back(
                {model, lead, reader.parse_opt_real(fields, vmax_col, "ae_vmax_kt")});
            bundle.values_[Metric::AePmin].push_back(
                {model, lead, reader.parse_opt_real(fields, pmin_col, "ae_pmin_hpa")});
        }
    }
    {
        std::ifstream in(dir / "records_prob.csv");
        if (!in) throw IoError("cannot open '" + (dir / "records_prob.csv").string() + "'");
        CsvReader reader(in, (dir / "records_prob.csv").string());
        const std::size_t model_col = reader.require_column("model");
        const std::size_t lead_col = reader.require_column("lead_h");
        const std::size_t track_col = reader.require_column("crps_track_km");
        const std::size_t vmax_col = reader.require_column("crps_vmax_kt");
        const std::size_t pmin_col = reader.require_column("crps_pmin_hpa");
        std::vector<std::string> fields;
        while (reader.next(fields)) {
            const std::string& model = fields[model_col];
            const int lead = static_cast<int>(reader.parse_int(fields, lead_col, "lead_h"));
            bundle.values_[Metric::CrpsTrack].push_back(
                {model, lead, reader.parse_opt_real(fields, track_col, "crps_track_km")});
            bundle.values_[Metric::CrpsVmax].push_back(
                {model, lead, reader.parse_opt_real(fields, vmax_col, "crps_vmax_kt")});
            bundle.values_[Metric::CrpsPmin].push_back(
                {model, lead, reader.parse_opt_real(fields, pmin_col, "crps_pmin_hpa")});
        }
    }
    {
        std::ifstream in(dir / "ri_scores.csv");
        if (!in) throw IoError("cannot open '" + (dir / "ri_scores.csv").string() + "'");
        CsvReader reader(in, (dir / "ri_scores.csv").string());
        const std::size_t model_col = reader.require_column("model");
        const std::size_t lead_col = reader.require_column("lead_h");
        const std::size_t tp_col = reader.require_column("tp");
        const std::size_t fp_col = reader.require_column("fp");
        const std::size_t fn_col = reader.require_column("fn");
        const std::size_t tn_col = reader.require_column("tn");
        const std::size_t csi_col = reader.require_column("csi");
        const std::size_t pss_col = reader.require_column("pss");
        std::vector<std::string> fields;
        while (reader.next(fields)) {
            RiScoreRow row;
            row.model = fields[model_col];
            row.lead_h = static_cast<int>(reader.parse_int(fields, lead_col, "lead_h"));
            row.n = static_cast<std::size_t>(reader.parse_int(fields, tp_col, "tp")) +
                    static_cast<std::size_t>(reader.parse_int(fields, fp_col, "fp")) +
                    static_cast<std::size_t>(reader.parse_int(fields, fn_col, "fn")) +
                    static_cast<std::size_t>(reader.parse_int(fields, tn_col, "tn"));
            row.csi = reader.parse_opt_real(fields, csi_col, "csi");
            row.pss = reader.parse_opt_real(fields, pss_col, "pss");
            bundle.ri_.push_back(std::move(row));
        }
    }
    {
        std::ifstream in(dir / "coverage.csv");
        if (!in) throw IoError("cannot open '" + (dir / "coverage.csv").string() + "'");
        CsvReader reader(in, (dir / "coverage.csv").string());
        const std::size_t model_col = reader.require_column("model");
        const std::size_t lead_col = reader.require_column("lead_h");
        const std::size_t covered_col = reader.require_column("covered_pairs");
        const std::size_t total_col = reader.require_column("total_pairs");
        std::vector<std::string> fields;
        while (reader.next(fields)) {
            const int lead = static_cast<int>(reader.parse_int(fields, lead_col, "lead_h"));
            bundle.coverage_[{fields[model_col], lead}] = {
                static_cast<std::size_t>(reader.parse_int(fields, covered_col, "covered_pairs")),
                static_cast<std::size_t>(reader.parse_int(fields, total_col, "total_pairs"))};
        }
    }
    return bundle;
}

std::map<std::pair<std::string, int>, std::pair<double, std::size_t>> ResultsBundle::per_lead(
    Metric m) const {
    std::map<std::pair<std::string, int>, std::pair<double, std::size_t>> out;
    if (m == Metric::Csi || m == Metric::Pss) {
        for (const RiScoreRow& row : ri_) {
            if (row.lead_h == 0) continue; // pooled row
            const auto& v = m == Metric::Csi ? row.csi : row.pss;
            if (!v) continue;
            out[{row.model, row.lead_h}] = {*v, row.n};
        }
        return out;
    }
    std::map<std::pair<std::string, int>, std::pair<double, std::size_t>> acc;
    auto it = values_.find(m);
    if (it == values_.end()) return out;
    for (const ValueRow& row : it->second) {
        if (!row.value) continue;
        auto& cell = acc[{row.model, row.lead_h}];
        cell.first += *row.value;
        cell.second += 1;
    }
    for (const auto& [key, cell] : acc)
        out[key] = {cell.first / static_cast<double>(cell.second), cell.second};
    return out;
}

std::vector<std::string> ResultsBundle::models() const {
    std::set<std::string> names;
    for (const auto& [metric, rows] : values_)
        for (const ValueRow& row : rows) names.insert(row.model);
    for (const RiScoreRow& row : ri_) names.insert(row.model);
    return {names.begin(), names.end()};
}

std::vector<int> ResultsBundle::leads(Metric m) const {
    std::set<int> leads;
    if (m == Metric::Csi || m == Metric::Pss) {
        for (const RiScoreRow& row : ri_)
            if (row.lead_h > 0) leads.insert(row.lead_h);
    } else {
        auto it = values_.find(m);
        if (it != values_.end())
            for (const ValueRow& row : it->second) leads.insert(row.lead_h);
    }
    return {leads.begin(), leads.end()};
}

std::map<int, std::size_t> ResultsBundle::pair_counts() const {
    std::map<int, std::size_t> out;
    for (const auto& [key, cell] : coverage_) out[key.second] = cell.second;
    return out;
}

Scorecard build_scorecard(const ResultsBundle& results, Metric metric,
                          const std::string& baseline) {
    const auto means = results.per_lead(metric);
    const auto all_models = results.models();
    if (std::find(all_models.begin(), all_models.end(), baseline) == all_models.end())
        throw UnknownBaseline("baseline model '" + baseline + "' not present in results");

    Scorecard card;
    card.metric = metric;
    card.baseline = baseline;
    card.leads = results.leads(metric);
    card.models.push_back(baseline);
    for (const std::string& model : all_models)
        if (model != baseline) card.models.push_back(model);

    for (const std::string& model : card.models) {
        for (int lead : card.leads) {
            ScorecardCell cell;
            auto it = means.find({model, lead});
            if (it != means.end()) {
                cell.value = it->second.first;
                cell.n = it->second.second;
                auto base = means.find({baseline, lead});
                if (base != means.end() && base->second.first != 0.0)
                    cell.pct_diff =
                        100.0 * (it->second.first - base->second.first) / base->second.first;
            }
            card.cells[{model, lead}] = cell;
        }
    }
    return card;
}

void save_scorecard_csv(const Scorecard& card, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "model,lead_h,value,pct_diff,n\n";
    for (const std::string& model : card.models)
        for (int lead : card.leads) {
            const ScorecardCell& cell = card.cells.at({model, lead});
            out << model << ',' << lead << ',' << fmt_opt(cell.value) << ','
                << fmt_opt(cell.pct_diff) << ',' << cell.n << '\n';
        }
}

void render_svg(const Scorecard& card, const std::filesystem::path& path) {
    if (card.models.empty() || card.leads.empty())
        throw Error("cannot render an empty scorecard");

    const int cell_w = 56, cell_h = 28, left = 150, top = 64;
    const int width = left + cell_w * static_cast<int>(card.leads.size()) + 20;
    const int height = top + cell_h * static_cast<int>(card.models.size()) + 20;

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"Helvetica,Arial,sans-serif\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\" font-weight=\"bold\">"
        << metric_label(card.metric) << " vs baseline " << card.baseline << "</text>\n";
    out << "<text x=\"" << left << "\" y=\"38\" font-size=\"10\" fill=\"#555555\">cells: mean "
           "value; color: percent difference vs baseline at the same lead (blue better, red "
           "worse)</text>\n";

    for (std::size_t c = 0; c < card.leads.size(); ++c) {
        const int x = left + static_cast<int>(c) * cell_w + cell_w / 2;
        out << "<text x=\"" << x << "\" y=\"" << top - 6
            << "\" font-size=\"10\" text-anchor=\"middle\">" << card.leads[c] << "h</text>\n";
    }

    for (std::size_t r = 0; r < card.models.size(); ++r) {
        const int y = top + static_cast<int>(r) * cell_h;
        out << "<text x=\"" << left - 8 << "\" y=\"" << y + cell_h / 2 + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << card.models[r] << "</text>\n";
        for (std::size_t c = 0; c < card.leads.size(); ++c) {
            const int x = left + static_cast<int>(c) * cell_w;
            const ScorecardCell& cell = card.cells.at({card.models[r], card.leads[c]});
            const bool defined = cell.value.has_value() && cell.n > 0;
            std::string fill = "#d9d9d9";
            if (defined)
                fill = card.models[r] == card.baseline ? "#f0f0f0"
                                                       : pct_color(card.metric, cell.pct_diff);
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w
                << "\" height=\"" << cell_h << "\" fill=\"" << fill
                << "\" stroke=\"#ffffff\"/>\n";
            const std::string text = defined ? cell_text(card.metric, *cell.value) : "-";
            out << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 4
                << "\" font-size=\"10\" text-anchor=\"middle\">" << text << "</text>\n";
        }
    }
    out << "</svg>\n";
}

void render_lead_chart(const ResultsBundle& results, Metric metric,
                       const std::vector<std::string>& models,
                       const std::filesystem::path& path) {
    if (models.empty()) throw Error("lead chart requires at least one model");

    const auto means = results.per_lead(metric);
    const auto leads = results.leads(metric);
    const auto counts = results.pair_counts();
    if (leads.empty()) throw Error("no leads available for metric " + metric_to_string(metric));

    const int width = 680, height = 380;
    const int left = 64, right = 64, top = 40, bottom = 48;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double vmax = 0.0;
    for (const std::string& model : models)
        for (int lead : leads) {
            auto it = means.find({model, lead});
            if (it != means.end()) vmax = std::max(vmax, it->second.first);
        }
    if (vmax <= 0.0) vmax = 1.0;
    vmax *= 1.05;

    std::size_t cmax = 1;
    for (const auto& [lead, n] : counts) cmax = std::max(cmax, n);

    const int lead_min = leads.front(), lead_max = leads.back();
    auto x_of = [&](int lead) {
        if (lead_max == lead_min) return left + plot_w / 2.0;
        return left + plot_w * (lead - lead_min) / static_cast<double>(lead_max - lead_min);
    };
    auto y_of = [&](double v) { return top + plot_h * (1.0 - v / vmax); };
    auto y_of_count = [&](std::size_t n) {
        return top + plot_h * (1.0 - static_cast<double>(n) / static_cast<double>(cmax));
    };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"Helvetica,Arial,sans-serif\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\" font-weight=\"bold\">"
        << metric_label(metric) << " by lead time</text>\n";

    // axes
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"#000000\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"#000000\"/>\n";
    out << "<line x1=\"" << left + plot_w << "\" y1=\"" << top << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"#999999\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double v = vmax * i / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << fmt2(y_of(v) + 3)
            << "\" font-size=\"9\" text-anchor=\"end\">" << fmt1(v) << "</text>\n";
        const std::size_t n = cmax * static_cast<std::size_t>(i) / 4;
        out << "<text x=\"" << left + plot_w + 6 << "\" y=\"" << fmt2(y_of_count(n) + 3)
            << "\" font-size=\"9\" fill=\"#777777\">" << n << "</text>\n";
    }
    for (int lead : leads) {
        if (lead % 24 != 0 && lead != lead_min) continue;
        out << "<text x=\"" << fmt2(x_of(lead)) << "\" y=\"" << top + plot_h + 14
            << "\" font-size=\"9\" text-anchor=\"middle\">" << lead << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"10\" text-anchor=\"middle\">lead time (h)</text>\n";
    out << "<text x=\"" << left + plot_w + 8 << "\" y=\"" << top - 6
        << "\" font-size=\"9\" fill=\"#777777\">cases</text>\n";

    // case-count curve (gray, thin)
    {
        std::string points;
        for (int lead : leads) {
            auto it = counts.find(lead);
            if (it == counts.end()) continue;
            points += fmt2(x_of(lead)) + "," + fmt2(y_of_count(it->second)) + " ";
        }
        if (!points.empty())
            out << "<polyline points=\"" << points
                << "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
    }

    std::size_t palette_index = 0;
    int legend_y = top + 8;
    for (const std::string& model : models) {
        const Style style = model_style(model, palette_index);
        if (!style.dashed) ++palette_index;
        std::string points;
        for (int lead : leads) {
            auto it = means.find({model, lead});
            if (it == means.end()) continue;
            points += fmt2(x_of(lead)) + "," + fmt2(y_of(it->second.first)) + " ";
        }
        if (!points.empty()) {
            out << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << style.color
                << "\" stroke-width=\"1.5\"";
            if (style.dashed) out << " stroke-dasharray=\"6,4\"";
            out << "/>\n";
        }
        out << "<line x1=\"" << left + 10 << "\" y1=\"" << legend_y << "\" x2=\"" << left + 34
            << "\" y2=\"" << legend_y << "\" stroke=\"" << style.color << "\" stroke-width=\"2\"";
        if (style.dashed) out << " stroke-dasharray=\"6,4\"";
        out << "/>\n";
        out << "<text x=\"" << left + 40 << "\" y=\"" << legend_y + 3 << "\" font-size=\"9\">"
            << model << "</text>\n";
        legend_y += 14;
    }
    out << "</svg>\n";
}

} // namespace tcverify
