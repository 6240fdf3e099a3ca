#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tcverify/geodesy.hpp"
#include "tcverify/time_utils.hpp"

namespace tcverify {

enum class Basin { NA, EP, WP, NI, SI, SP, SA };

Basin basin_from_string(const std::string& code);
std::string basin_to_string(Basin b);

/// One timestamped storm state. Intensity fields are empty when the source
/// record lacks them; they are never imputed.
struct TrackPoint {
    GeoPoint position;
    std::optional<double> vmax_kt; // >= 0 when present (1-min sustained, 10 m)
    std::optional<double> pmin_hpa; // in [800, 1100] when present
    UtcSeconds valid_time = 0;
};

struct ObservedStorm {
    std::string sid;
    Basin basin = Basin::NA;
    std::vector<TrackPoint> points; // strictly increasing valid_time, 6 h grid with gaps allowed

    /// Point at an exact valid time, or nullptr.
    const TrackPoint* at(UtcSeconds t) const;
    UtcSeconds first_time() const { return points.front().valid_time; }
    UtcSeconds last_time() const { return points.back().valid_time; }
};

/// Counters accumulated while loading a file; consumed by validation.
struct LoadStats {
    std::size_t rows_read = 0;
    std::size_t dropped_offsynoptic = 0;
    std::size_t dropped_year_filter = 0;
    std::size_t duplicate_keys = 0;
    std::size_t inconsistent_valid_time = 0;
    std::size_t rejected_bad_lead = 0;
    std::size_t offsynoptic_init = 0; // ingested but protocol-ineligible
    std::size_t skipped_other_model = 0;
    std::size_t observed_gaps = 0; // >6 h jumps in a storm record (never interpolated)
};

/// Immutable best-track archive keyed by storm identifier.
class ObservedStore {
public:
    ObservedStore() = default;
    ObservedStore(std::map<std::string, ObservedStorm> storms, LoadStats stats);

    const std::map<std::string, ObservedStorm>& storms() const { return storms_; }
    const ObservedStorm* find(const std::string& sid) const;
    const TrackPoint* point(const std::string& sid, UtcSeconds t) const;
    bool empty() const { return storms_.empty(); }
    int min_year() const { return min_year_; }
    int max_year() const { return max_year_; }
    const LoadStats& stats() const { return stats_; }

private:
    std::map<std::string, ObservedStorm> storms_;
    int min_year_ = 0;
    int max_year_ = 0;
    LoadStats stats_;
};

struct RowKey {
    std::string sid;
    UtcSeconds init_time = 0;
    int lead_h = 0;
    int member = 0;

    auto operator<=>(const RowKey&) const = default;
};

struct ForecastRow {
    RowKey key;
    TrackPoint point;
    bool filled = false; // true only for persistence-filled rows
};

/// All forecast rows of one model, keyed by (sid, init, lead, member).
class ForecastSet {
public:
    ForecastSet() = default;
    explicit ForecastSet(std::string model) : model_(std::move(model)) {}

    const std::string& model() const { return model_; }
    void set_model(std::string m) { model_ = std::move(m); }

    /// Insert or overwrite; returns true when the key was new.
    bool upsert(ForecastRow row);

    const std::map<RowKey, ForecastRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    /// Member rows at (sid, init, lead), ordered by member index.
    std::vector<const ForecastRow*> members_at(const std::string& sid, UtcSeconds init,
                                               int lead_h) const;
    bool covers(const std::string& sid, UtcSeconds init, int lead_h) const;

    /// Largest member count over the leads of (sid, init).
    int ensemble_size(const std::string& sid, UtcSeconds init) const;

    /// Distinct (sid, init) pairs present.
    std::vector<std::pair<std::string, UtcSeconds>> inits() const;

    /// Remap member indices per (sid, init) so they form {0..m-1} while
    /// preserving member identity across leads.
    void renumber_members();

    LoadStats& stats() { return stats_; }
    const LoadStats& stats() const { return stats_; }

    bool operator==(const ForecastSet& other) const;

private:
    std::string model_;
    std::map<RowKey, ForecastRow> rows_;
    LoadStats stats_;
};

/// One scorable forecast-observation pair.
struct VerificationKey {
    std::string sid;
    UtcSeconds init_time = 0;
    int lead_h = 0;

    UtcSeconds valid_time() const { return init_time + static_cast<UtcSeconds>(lead_h) * kHour; }
    auto operator<=>(const VerificationKey&) const = default;
};

/// Every (sid, t0, L) with t0 at 00/12Z in test_year and observed points at
/// both t0 and t0+L. Sorted by (sid, t0, L); a pure function of its inputs.
std::vector<VerificationKey> enumerate_keys(const ObservedStore& obs, const std::vector<int>& leads,
                                            int test_year);

} // namespace tcverify
