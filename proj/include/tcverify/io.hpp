#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcverify/track.hpp"

namespace tcverify {

/// Load the observed-track CSV (`sid,time,lat,lon,vmax_kt,pmin_hpa,basin`).
/// Off-synoptic rows are dropped and counted; `vmax_ms`/`pmin_pa` column
/// variants are converted to knots/hPa. Throws SchemaError or EmptyStore.
ObservedStore load_observed(const std::filesystem::path& path,
                            std::optional<std::pair<int, int>> year_filter = std::nullopt);

/// Load forecast rows for one model from a CSV file or a directory of CSV
/// files (`model,sid,init_time,valid_time,lead_h,member,lat,lon,vmax_kt,pmin_hpa`).
/// Rows of other models are skipped and counted; duplicate keys are
/// last-write-wins with a warning count; rows whose valid_time disagrees
/// with init_time + lead_h are rejected and counted.
ForecastSet load_forecasts(const std::filesystem::path& path, const std::string& model);

/// Load every model found under path into its own set, keyed by model name.
std::map<std::string, ForecastSet> load_all_forecasts(const std::filesystem::path& path);

void save_observed(const ObservedStore& obs, const std::filesystem::path& path);
void save_forecasts(const ForecastSet& fs, const std::filesystem::path& path);

struct CriterionResult {
    std::string criterion;
    bool pass = false;
    std::string detail;
    std::size_t count = 0; // violation count
};

struct ValidationReport {
    std::vector<CriterionResult> criteria;
    bool all_pass() const;
    std::string to_json() const;
};

/// Check the ingest inclusion criteria: (a) two inits per day, (b) leads
/// through 120 h or storm end, (c) 6-hourly lead grid, (d) presence of the
/// four track variables. Reporting only; never mutates data.
ValidationReport validate_inclusion(const ForecastSet& fs, const ObservedStore& obs);

} // namespace tcverify
