#include "tcverify/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "tcverify/csv.hpp"
#include "tcverify/errors.hpp"

namespace tcverify {

namespace {

constexpr double kMsToKt = 1.9438445;

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::vector<std::filesystem::path> csv_files_under(const std::filesystem::path& path) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    if (files.empty())
        throw IoError("no CSV files under '" + path.string() + "'");
    return files;
}

struct IntensityColumns {
    std::size_t vmax = 0;
    std::size_t pmin = 0;
    bool vmax_is_ms = false;
    bool pmin_is_pa = false;
};

IntensityColumns find_intensity_columns(const CsvReader& reader) {
    IntensityColumns cols;
    if (auto c = reader.column("vmax_kt")) {
        cols.vmax = *c;
    } else if (auto ms = reader.column("vmax_ms")) {
        cols.vmax = *ms;
        cols.vmax_is_ms = true;
    } else {
        reader.require_column("vmax_kt");
    }
    if (auto c = reader.column("pmin_hpa")) {
        cols.pmin = *c;
    } else if (auto pa = reader.column("pmin_pa")) {
        cols.pmin = *pa;
        cols.pmin_is_pa = true;
    } else {
        reader.require_column("pmin_hpa");
    }
    return cols;
}

std::optional<double> read_vmax(const CsvReader& reader, const std::vector<std::string>& fields,
                                const IntensityColumns& cols) {
    auto v = reader.parse_opt_real(fields, cols.vmax, "vmax");
    if (!v) return std::nullopt;
    double kt = cols.vmax_is_ms ? *v * kMsToKt : *v;
    if (!(kt >= 0.0 && std::isfinite(kt))) // negated form also rejects NaN
        throw SchemaError(reader.source() + " row " + std::to_string(reader.row_number()) +
                          ": vmax must be nonnegative, got " + std::to_string(kt));
    return kt;
}

std::optional<double> read_pmin(const CsvReader& reader, const std::vector<std::string>& fields,
                                const IntensityColumns& cols) {
    auto v = reader.parse_opt_real(fields, cols.pmin, "pmin");
    if (!v) return std::nullopt;
    double hpa = cols.pmin_is_pa ? *v / 100.0 : *v;
    if (!(hpa >= 800.0 && hpa <= 1100.0))
        throw SchemaError(reader.source() + " row " + std::to_string(reader.row_number()) +
                          ": pmin outside [800, 1100] hPa: " + std::to_string(hpa));
    return hpa;
}

GeoPoint read_position(const CsvReader& reader, const std::vector<std::string>& fields,
                       std::size_t lat_col, std::size_t lon_col) {
    const double lat = reader.parse_real(fields, lat_col, "lat");
    const double lon = reader.parse_real(fields, lon_col, "lon");
    const auto where = [&] {
        return reader.source() + " row " + std::to_string(reader.row_number());
    };
    if (!(lat >= -90.0 && lat <= 90.0))
        throw SchemaError(where() + ": lat outside [-90, 90]: " + std::to_string(lat));
    if (!(lon >= -180.0 && lon < 360.0))
        throw SchemaError(where() + ": lon outside [-180, 360): " + std::to_string(lon));
    return GeoPoint(lat, lon);
}

} // namespace

ObservedStore load_observed(const std::filesystem::path& path,
                            std::optional<std::pair<int, int>> year_filter) {
    auto in = open_input(path);
    CsvReader reader(in, path.string());
    const std::size_t sid_col = reader.require_column("sid");
    const std::size_t time_col = reader.require_column("time");
    const std::size_t lat_col = reader.require_column("lat");
    const std::size_t lon_col = reader.require_column("lon");
    const std::size_t basin_col = reader.require_column("basin");
    const IntensityColumns icols = find_intensity_columns(reader);

    LoadStats stats;
    // sid -> valid_time -> (point, basin); map keys give last-write-wins dedup
    // and time ordering for free.
    std::map<std::string, std::map<UtcSeconds, std::pair<TrackPoint, Basin>>> staged;

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        ++stats.rows_read;
        const std::string& sid = fields[sid_col];
        if (sid.empty())
            throw SchemaError(path.string() + " row " + std::to_string(reader.row_number()) +
                              ": sid must not be empty");
        UtcSeconds t;
        try {
            t = parse_utc(fields[time_col]);
        } catch (const SchemaError& e) {
            throw SchemaError(path.string() + " row " + std::to_string(reader.row_number()) + ": " +
                              e.what());
        }
        if (!is_synoptic(t)) {
            ++stats.dropped_offsynoptic;
            continue;
        }
        if (year_filter) {
            const int y = utc_year(t);
            if (y < year_filter->first || y > year_filter->second) {
                ++stats.dropped_year_filter;
                continue;
            }
        }
        TrackPoint pt{read_position(reader, fields, lat_col, lon_col),
                      read_vmax(reader, fields, icols), read_pmin(reader, fields, icols), t};
        Basin basin = basin_from_string(fields[basin_col]);
        auto& storm_points = staged[sid];
        if (storm_points.count(t)) ++stats.duplicate_keys;
        storm_points.insert_or_assign(t, std::make_pair(std::move(pt), basin));
    }

    std::map<std::string, ObservedStorm> storms;
    for (auto& [sid, by_time] : staged) {
        if (by_time.empty()) continue;
        ObservedStorm storm;
        storm.sid = sid;
        storm.basin = by_time.begin()->second.second; // basin of first observed point
        for (auto& [t, entry] : by_time)
            storm.points.push_back(std::move(entry.first));
        for (std::size_t i = 1; i < storm.points.size(); ++i)
            if (storm.points[i].valid_time - storm.points[i - 1].valid_time > kSixHours)
                ++stats.observed_gaps;
        storms.emplace(sid, std::move(storm));
    }
    if (storms.empty())
        throw EmptyStore("no storms survived ingestion of '" + path.string() + "'");
    return ObservedStore(std::move(storms), stats);
}

ForecastSet load_forecasts(const std::filesystem::path& path, const std::string& model) {
    ForecastSet fs(model);
    LoadStats& stats = fs.stats();

    for (const auto& file : csv_files_under(path)) {
        auto in = open_input(file);
        CsvReader reader(in, file.string());
        const std::size_t model_col = reader.require_column("model");
        const std::size_t sid_col = reader.require_column("sid");
        const std::size_t init_col = reader.require_column("init_time");
        const std::size_t valid_col = reader.require_column("valid_time");
        const std::size_t lead_col = reader.require_column("lead_h");
        const std::size_t member_col = reader.require_column("member");
        const std::size_t lat_col = reader.require_column("lat");
        const std::size_t lon_col = reader.require_column("lon");
        const IntensityColumns icols = find_intensity_columns(reader);

        std::vector<std::string> fields;
        while (reader.next(fields)) {
            ++stats.rows_read;
            if (fields[model_col] != model) {
                ++stats.skipped_other_model;
                continue;
            }
            const std::string& sid = fields[sid_col];
            if (sid.empty())
                throw SchemaError(file.string() + " row " + std::to_string(reader.row_number()) +
                                  ": sid must not be empty");
            UtcSeconds init, valid;
            try {
                init = parse_utc(fields[init_col]);
                valid = parse_utc(fields[valid_col]);
            } catch (const SchemaError& e) {
                throw SchemaError(file.string() + " row " + std::to_string(reader.row_number()) +
                                  ": " + e.what());
            }
            const long lead = reader.parse_int(fields, lead_col, "lead_h");
            const long member = reader.parse_int(fields, member_col, "member");
            const auto where = [&] {
                return file.string() + " row " + std::to_string(reader.row_number());
            };
            if (member < 0)
                throw SchemaError(where() + ": member must be >= 0");
            if (lead < 0 || lead > 168 || lead % 6 != 0) {
                ++stats.rejected_bad_lead;
                continue;
            }
            if (valid != init + static_cast<UtcSeconds>(lead) * kHour) {
                ++stats.inconsistent_valid_time;
                continue;
            }
            const int init_hour = utc_hour(init);
            if (init_hour != 0 && init_hour != 12) ++stats.offsynoptic_init;

            ForecastRow row;
            row.key = RowKey{sid, init, static_cast<int>(lead), static_cast<int>(member)};
            row.point = TrackPoint{read_position(reader, fields, lat_col, lon_col),
                                   read_vmax(reader, fields, icols),
                                   read_pmin(reader, fields, icols), valid};
            if (!fs.upsert(std::move(row))) ++stats.duplicate_keys;
        }
    }
    fs.renumber_members();
    return fs;
}

std::map<std::string, ForecastSet> load_all_forecasts(const std::filesystem::path& path) {
    std::set<std::string> models;
    for (const auto& file : csv_files_under(path)) {
        auto in = open_input(file);
        CsvReader reader(in, file.string());
        const std::size_t model_col = reader.require_column("model");
        std::vector<std::string> fields;
        while (reader.next(fields))
            if (!fields[model_col].empty()) models.insert(fields[model_col]);
    }
    std::map<std::string, ForecastSet> out;
    for (const std::string& model : models)
        out.emplace(model, load_forecasts(path, model));
    return out;
}

void save_observed(const ObservedStore& obs, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "sid,time,lat,lon,vmax_kt,pmin_hpa,basin\n";
    for (const auto& [sid, storm] : obs.storms()) {
        for (const TrackPoint& p : storm.points) {
            out << sid << ',' << format_utc(p.valid_time) << ',' << fmt_real(p.position.lat())
                << ',' << fmt_real(p.position.lon()) << ',' << fmt_opt(p.vmax_kt) << ','
                << fmt_opt(p.pmin_hpa) << ',' << basin_to_string(storm.basin) << '\n';
        }
    }
}

void save_forecasts(const ForecastSet& fs, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "model,sid,init_time,valid_time,lead_h,member,lat,lon,vmax_kt,pmin_hpa\n";
    for (const auto& [key, row] : fs.rows()) {
        out << fs.model() << ',' << key.sid << ',' << format_utc(key.init_time) << ','
            << format_utc(row.point.valid_time) << ',' << key.lead_h << ',' << key.member << ','
            << fmt_real(row.point.position.lat()) << ',' << fmt_real(row.point.position.lon())
            << ',' << fmt_opt(row.point.vmax_kt) << ',' << fmt_opt(row.point.pmin_hpa) << '\n';
    }
}

bool ValidationReport::all_pass() const {
    return std::all_of(criteria.begin(), criteria.end(),
                       [](const CriterionResult& c) { return c.pass; });
}

std::string ValidationReport::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CriterionResult& c : criteria) {
        arr.push_back({{"criterion", c.criterion},
                       {"pass", c.pass},
                       {"detail", c.detail},
                       {"count", c.count}});
    }
    return arr.dump(2) + "\n";
}

ValidationReport validate_inclusion(const ForecastSet& fs, const ObservedStore& obs) {
    ValidationReport report;

    // (a) at least two initializations (00Z, 12Z) per covered storm-day. A
    // 00/12Z slot is only required while the observed record leaves at least
    // one 6 h lead to forecast.
    {
        std::map<std::pair<std::string, std::int64_t>, std::set<int>> day_inits;
        for (const auto& [sid, init] : fs.inits())
            day_inits[{sid, utc_day_index(init)}].insert(utc_hour(init));
        double total = 0.0;
        std::size_t days = 0, violations = 0;
        for (const auto& [day, hours] : day_inits) {
            const ObservedStorm* storm = obs.find(day.first);
            std::set<int> required;
            for (int h : {0, 12}) {
                const UtcSeconds t = day.second * kDay + h * kHour;
                if (storm && storm->at(t) && t + kSixHours <= storm->last_time())
                    required.insert(h);
            }
            if (required.empty()) continue;
            ++days;
            std::size_t present = 0;
            for (int h : required) present += hours.count(h);
            total += static_cast<double>(present) / static_cast<double>(required.size());
            if (present < required.size()) ++violations;
        }
        const double fraction = days == 0 ? 0.0 : total / static_cast<double>(days);
        CriterionResult c;
        c.criterion = "a_two_inits_per_day";
        c.pass = days > 0 && violations == 0;
        c.count = violations;
        c.detail = "00/12Z init coverage fraction " + fmt_real(fraction) + " over " +
                   std::to_string(days) + " storm-days";
        report.criteria.push_back(std::move(c));
    }

    // (b) leads through 120 h or the end of the observed record.
    {
        std::map<std::pair<std::string, UtcSeconds>, int> max_lead;
        for (const auto& [key, row] : fs.rows()) {
            auto& m = max_lead[{key.sid, key.init_time}];
            m = std::max(m, key.lead_h);
        }
        std::size_t checked = 0, violations = 0;
        for (const auto& [init, lead] : max_lead) {
            const ObservedStorm* storm = obs.find(init.first);
            if (!storm) continue;
            ++checked;
            const auto remaining_h =
                static_cast<int>((storm->last_time() - init.second) / kHour);
            if (lead < std::min(120, std::max(0, remaining_h))) ++violations;
        }
        CriterionResult c;
        c.criterion = "b_lead_through_120h";
        c.pass = checked > 0 && violations == 0;
        c.count = violations;
        c.detail = std::to_string(violations) + " of " + std::to_string(checked) +
                   " inits stop short of 120 h / storm end";
        report.criteria.push_back(std::move(c));
    }

    // (c) 6-hourly lead grid: nothing rejected at ingest, no per-init gaps.
    {
        std::map<std::pair<std::string, UtcSeconds>, std::set<int>> leads;
        for (const auto& [key, row] : fs.rows())
            leads[{key.sid, key.init_time}].insert(key.lead_h);
        std::size_t gaps = 0;
        for (const auto& [init, ls] : leads) {
            if (ls.empty()) continue;
            for (int l = *ls.begin(); l <= *ls.rbegin(); l += 6)
                if (!ls.count(l)) ++gaps;
        }
        const std::size_t total = gaps + fs.stats().rejected_bad_lead;
        CriterionResult c;
        c.criterion = "c_six_hourly_leads";
        c.pass = total == 0 && !fs.empty();
        c.count = total;
        c.detail = std::to_string(fs.stats().rejected_bad_lead) + " non-6h rows rejected, " +
                   std::to_string(gaps) + " lead-grid gaps";
        report.criteria.push_back(std::move(c));
    }

    // (d) lat/lon/vmax/pmin all provided.
    {
        std::size_t n = 0, with_vmax = 0, with_pmin = 0;
        for (const auto& [key, row] : fs.rows()) {
            ++n;
            if (row.point.vmax_kt) ++with_vmax;
            if (row.point.pmin_hpa) ++with_pmin;
        }
        std::size_t absent = 0;
        if (n == 0 || with_vmax == 0) ++absent;
        if (n == 0 || with_pmin == 0) ++absent;
        CriterionResult c;
        c.criterion = "d_track_variables_present";
        c.pass = n > 0 && absent == 0;
        c.count = absent;
        c.detail = "vmax present in " + std::to_string(with_vmax) + "/" + std::to_string(n) +
                   " rows, pmin in " + std::to_string(with_pmin) + "/" + std::to_string(n);
        report.criteria.push_back(std::move(c));
    }

    return report;
}

} // namespace tcverify
