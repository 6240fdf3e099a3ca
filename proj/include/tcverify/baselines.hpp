#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcverify/track.hpp"

namespace tcverify {

inline constexpr const char* kPersistenceModel = "PERSISTENCE";
inline constexpr const char* kMtlbDetModel = "MTLB_DET";
inline constexpr const char* kMtlbEnsModel = "MTLB_ENS";

/// One historical tendency: state change from t0 to t0+L. Longitude deltas
/// are wrapped signed degrees in (-180, 180].
struct TendencySample {
    double dlat_deg = 0.0;
    double dlon_deg = 0.0;
    std::optional<double> dvmax_kt;
    std::optional<double> dpmin_hpa;
};

struct ClimatologyCell {
    std::vector<TendencySample> samples;

    std::size_t count() const { return samples.size(); }
    double mean_dlat() const;
    double mean_dlon() const;
    std::optional<double> mean_dvmax() const; // over samples that carry dvmax
    std::optional<double> mean_dpmin() const;
};

/// Empirical tendency distributions keyed by (basin, lead). Cells with zero
/// samples are absent.
class ClimatologyTable {
public:
    using Key = std::pair<Basin, int>;

    const ClimatologyCell* cell(Basin basin, int lead_h) const;
    ClimatologyCell& cell_for_update(Basin basin, int lead_h) { return cells_[{basin, lead_h}]; }
    const std::map<Key, ClimatologyCell>& cells() const { return cells_; }
    bool empty() const { return cells_.empty(); }

    /// CSV: `basin,lead_h,stat,dlat,dlon,dvmax,dpmin,n`, plus a
    /// `<path>.samples.csv` sidecar carrying the retained samples.
    void save(const std::filesystem::path& path) const;
    static ClimatologyTable load(const std::filesystem::path& path);

private:
    std::map<Key, ClimatologyCell> cells_;
};

/// Record every observed (t0, t0+L) tendency within the year range into its
/// (basin, L) cell. Throws EmptyClimatology when nothing qualifies.
ClimatologyTable build_climatology(const ObservedStore& obs, std::pair<int, int> years,
                                   const std::vector<int>& leads);

/// Single-member baseline holding the t0 state at every lead.
ForecastSet persistence_forecast(const ObservedStore& obs,
                                 const std::vector<VerificationKey>& keys);

enum class MtlbMode { Deterministic, Ensemble };

struct MtlbResult {
    ForecastSet set;
    std::vector<VerificationKey> persistence_fallbacks; // keys with no (basin, lead) cell
};

/// Mean-tendency-by-lead-and-basin baseline. Deterministic mode adds the
/// cell mean tendency to the initial state; ensemble mode draws n_members
/// samples with replacement using a counter RNG keyed by
/// (seed, sid, t0, L, member). Keys whose cell is absent fall back to
/// persistence and are recorded.
MtlbResult mtlb_forecast(const ObservedStore& obs, const ClimatologyTable& clim,
                         const std::vector<VerificationKey>& keys, MtlbMode mode,
                         int n_members = 50, std::uint64_t seed = 0);

struct FillResult {
    ForecastSet set;
    std::map<int, std::pair<std::size_t, std::size_t>> filled_and_total_by_lead;
    std::size_t n_filled = 0;

    double fill_fraction(int lead_h) const;
};

/// FAIR-protocol fill: keep every model row untouched; for keys without any
/// model row add a single-member persistence row flagged filled=true.
FillResult persistence_fill(const ForecastSet& model_fs, const ObservedStore& obs,
                            const std::vector<VerificationKey>& keys);

} // namespace tcverify
