#include "tcverify/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tcverify/csv.hpp"
#include "tcverify/errors.hpp"
#include "tcverify/geodesy.hpp"
#include "tcverify/rng.hpp"

namespace tcverify {

namespace {

double clip_vmax(double v) {
    return std::max(0.0, v);
}

double clip_pmin(double p) {
    return std::clamp(p, 800.0, 1100.0);
}

TrackPoint apply_tendency(const TrackPoint& init_state, const TendencySample& s,
                          UtcSeconds valid_time) {
    const double lat = std::clamp(init_state.position.lat() + s.dlat_deg, -90.0, 90.0);
    const double lon = wrap_lon_deg(init_state.position.lon() + s.dlon_deg);
    TrackPoint out{GeoPoint(lat, lon), std::nullopt, std::nullopt, valid_time};
    if (init_state.vmax_kt && s.dvmax_kt)
        out.vmax_kt = clip_vmax(*init_state.vmax_kt + *s.dvmax_kt);
    if (init_state.pmin_hpa && s.dpmin_hpa)
        out.pmin_hpa = clip_pmin(*init_state.pmin_hpa + *s.dpmin_hpa);
    return out;
}

} // namespace

double ClimatologyCell::mean_dlat() const {
    double sum = 0.0;
    for (const auto& s : samples) sum += s.dlat_deg;
    return sum / static_cast<double>(samples.size());
}

double ClimatologyCell::mean_dlon() const {
    double sum = 0.0;
    for (const auto& s : samples) sum += s.dlon_deg;
    return sum / static_cast<double>(samples.size());
}

std::optional<double> ClimatologyCell::mean_dvmax() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples)
        if (s.dvmax_kt) {
            sum += *s.dvmax_kt;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::optional<double> ClimatologyCell::mean_dpmin() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples)
        if (s.dpmin_hpa) {
            sum += *s.dpmin_hpa;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

const ClimatologyCell* ClimatologyTable::cell(Basin basin, int lead_h) const {
    auto it = cells_.find({basin, lead_h});
    return it == cells_.end() ? nullptr : &it->second;
}

void ClimatologyTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "basin,lead_h,stat,dlat,dlon,dvmax,dpmin,n\n";
    for (const auto& [key, cell] : cells_) {
        out << basin_to_string(key.first) << ',' << key.second << ",mean,"
            << fmt_real(cell.mean_dlat()) << ',' << fmt_real(cell.mean_dlon()) << ','
            << fmt_opt(cell.mean_dvmax()) << ',' << fmt_opt(cell.mean_dpmin()) << ','
            << cell.count() << '\n';
    }

    std::filesystem::path sidecar = path;
    sidecar += ".samples.csv";
    std::ofstream side(sidecar);
    if (!side) throw IoError("cannot open '" + sidecar.string() + "' for writing");
    side << "basin,lead_h,dlat,dlon,dvmax,dpmin\n";
    for (const auto& [key, cell] : cells_)
        for (const TendencySample& s : cell.samples)
            side << basin_to_string(key.first) << ',' << key.second << ',' << fmt_real(s.dlat_deg)
                 << ',' << fmt_real(s.dlon_deg) << ',' << fmt_opt(s.dvmax_kt) << ','
                 << fmt_opt(s.dpmin_hpa) << '\n';
}

ClimatologyTable ClimatologyTable::load(const std::filesystem::path& path) {
    std::filesystem::path sidecar = path;
    sidecar += ".samples.csv";
    std::ifstream side(sidecar);
    if (!side) throw IoError("cannot open climatology samples '" + sidecar.string() + "'");

    ClimatologyTable table;
    CsvReader reader(side, sidecar.string());
    const std::size_t basin_col = reader.require_column("basin");
    const std::size_t lead_col = reader.require_column("lead_h");
    const std::size_t dlat_col = reader.require_column("dlat");
    const std::size_t dlon_col = reader.require_column("dlon");
    const std::size_t dvmax_col = reader.require_column("dvmax");
    const std::size_t dpmin_col = reader.require_column("dpmin");
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const Basin basin = basin_from_string(fields[basin_col]);
        const int lead = static_cast<int>(reader.parse_int(fields, lead_col, "lead_h"));
        TendencySample s;
        s.dlat_deg = reader.parse_real(fields, dlat_col, "dlat");
        s.dlon_deg = reader.parse_real(fields, dlon_col, "dlon");
        s.dvmax_kt = reader.parse_opt_real(fields, dvmax_col, "dvmax");
        s.dpmin_hpa = reader.parse_opt_real(fields, dpmin_col, "dpmin");
        table.cell_for_update(basin, lead).samples.push_back(s);
    }
    if (table.empty())
        throw EmptyClimatology("no samples in '" + sidecar.string() + "'");
    return table;
}

ClimatologyTable build_climatology(const ObservedStore& obs, std::pair<int, int> years,
                                   const std::vector<int>& leads) {
    ClimatologyTable table;
    for (const auto& [sid, storm] : obs.storms()) {
        for (const TrackPoint& p0 : storm.points) {
            const int y = utc_year(p0.valid_time);
            if (y < years.first || y > years.second) continue;
            for (int lead : leads) {
                const TrackPoint* p1 = storm.at(p0.valid_time + static_cast<UtcSeconds>(lead) * kHour);
                if (!p1) continue;
                TendencySample s;
                s.dlat_deg = p1->position.lat() - p0.position.lat();
                s.dlon_deg = wrap_signed_lon_deg(p1->position.lon() - p0.position.lon());
                if (p0.vmax_kt && p1->vmax_kt) s.dvmax_kt = *p1->vmax_kt - *p0.vmax_kt;
                if (p0.pmin_hpa && p1->pmin_hpa) s.dpmin_hpa = *p1->pmin_hpa - *p0.pmin_hpa;
                table.cell_for_update(storm.basin, lead).samples.push_back(s);
            }
        }
    }
    if (table.empty())
        throw EmptyClimatology("no (basin, lead) cell received a tendency sample for years " +
                               std::to_string(years.first) + "-" + std::to_string(years.second));
    return table;
}

ForecastSet persistence_forecast(const ObservedStore& obs,
                                 const std::vector<VerificationKey>& keys) {
    ForecastSet fs(kPersistenceModel);
    for (const VerificationKey& key : keys) {
        const TrackPoint* init_state = obs.point(key.sid, key.init_time);
        if (!init_state)
            throw Error("persistence baseline: no observation for " + key.sid + " at " +
                        format_utc(key.init_time));
        ForecastRow row;
        row.key = RowKey{key.sid, key.init_time, key.lead_h, 0};
        row.point = *init_state;
        row.point.valid_time = key.valid_time();
        fs.upsert(std::move(row));
    }
    return fs;
}

MtlbResult mtlb_forecast(const ObservedStore& obs, const ClimatologyTable& clim,
                         const std::vector<VerificationKey>& keys, MtlbMode mode, int n_members,
                         std::uint64_t seed) {
    MtlbResult result;
    result.set.set_model(mode == MtlbMode::Deterministic ? kMtlbDetModel : kMtlbEnsModel);

    for (const VerificationKey& key : keys) {
        const ObservedStorm* storm = obs.find(key.sid);
        const TrackPoint* init_state = storm ? storm->at(key.init_time) : nullptr;
        if (!init_state)
            throw Error("MT-LB baseline: no observation for " + key.sid + " at " +
                        format_utc(key.init_time));
        const ClimatologyCell* cell = storm ? clim.cell(storm->basin, key.lead_h) : nullptr;
        if (!cell || cell->count() == 0) {
            // MissingCell: fall back to persistence for this key.
            result.persistence_fallbacks.push_back(key);
            ForecastRow row;
            row.key = RowKey{key.sid, key.init_time, key.lead_h, 0};
            row.point = *init_state;
            row.point.valid_time = key.valid_time();
            result.set.upsert(std::move(row));
            continue;
        }
        if (mode == MtlbMode::Deterministic) {
            TendencySample mean;
            mean.dlat_deg = cell->mean_dlat();
            mean.dlon_deg = cell->mean_dlon();
            mean.dvmax_kt = cell->mean_dvmax();
            mean.dpmin_hpa = cell->mean_dpmin();
            ForecastRow row;
            row.key = RowKey{key.sid, key.init_time, key.lead_h, 0};
            row.point = apply_tendency(*init_state, mean, key.valid_time());
            result.set.upsert(std::move(row));
        } else {
            for (int m = 0; m < n_members; ++m) {
                CounterRng rng(seed, key.sid, key.init_time, key.lead_h, m);
                const TendencySample& s = cell->samples[rng.uniform_index(cell->count())];
                ForecastRow row;
                row.key = RowKey{key.sid, key.init_time, key.lead_h, m};
                row.point = apply_tendency(*init_state, s, key.valid_time());
                result.set.upsert(std::move(row));
            }
        }
    }
    return result;
}

double FillResult::fill_fraction(int lead_h) const {
    auto it = filled_and_total_by_lead.find(lead_h);
    if (it == filled_and_total_by_lead.end() || it->second.second == 0) return 0.0;
    return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
}

FillResult persistence_fill(const ForecastSet& model_fs, const ObservedStore& obs,
                            const std::vector<VerificationKey>& keys) {
    FillResult result;
    result.set.set_model(model_fs.model());
    result.set.stats() = model_fs.stats();

    for (const VerificationKey& key : keys) {
        auto& [filled, total] = result.filled_and_total_by_lead[key.lead_h];
        ++total;
        const auto members = model_fs.members_at(key.sid, key.init_time, key.lead_h);
        if (!members.empty()) {
            for (const ForecastRow* row : members)
                result.set.upsert(*row); // untouched model rows
            continue;
        }
        const TrackPoint* init_state = obs.point(key.sid, key.init_time);
        if (!init_state)
            throw Error("persistence fill: no observation for " + key.sid + " at " +
                        format_utc(key.init_time));
        ForecastRow row;
        row.key = RowKey{key.sid, key.init_time, key.lead_h, 0};
        row.point = *init_state;
        row.point.valid_time = key.valid_time();
        row.filled = true;
        result.set.upsert(std::move(row));
        ++filled;
        ++result.n_filled;
    }
    return result;
}

} // namespace tcverify
