#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcverify/track.hpp"

namespace tcverify {

enum class EnsembleReduction { Mean, Control };

/// Deterministic scores for one verification key. Forecast/observed
/// intensity values are kept alongside the absolute errors so that R^2 can
/// be aggregated; they are not part of the serialized record schema.
struct MetricRecord {
    VerificationKey key;
    std::string model;
    double dpe_km = 0.0;
    std::optional<double> cte_km; // empty = UNDEFINED
    std::optional<double> ate_km;
    std::optional<double> ae_vmax_kt; // empty = MISSING on either side
    std::optional<double> ae_pmin_hpa;
    bool filled = false;
    int n_members = 1;

    std::optional<double> fcst_vmax_kt, obs_vmax_kt;
    std::optional<double> fcst_pmin_hpa, obs_pmin_hpa;
};

/// Score one key: reduce the members to a deterministic representative
/// (spherical-mean position + arithmetic-mean intensity, or the control
/// member), then take DPE/CTE/ATE from geodesy and pairwise absolute
/// intensity errors. obs_prev is the observed point 12 h before the
/// verification time, absent at the first valid time.
MetricRecord score_key(const std::vector<const ForecastRow*>& members, const TrackPoint& obs_now,
                       const TrackPoint* obs_prev,
                       EnsembleReduction reduction = EnsembleReduction::Mean,
                       const EarthModel& earth = {});

struct VariableStats {
    std::optional<double> mae;
    std::optional<double> rmse;
    std::optional<double> r2; // empty when Var < 1e-12 or targets unavailable
    std::optional<double> mean_signed; // CTE/ATE bias
    std::size_t n = 0;
};

struct AggregateCell {
    int lead_h = 0; // 0 = pooled over all leads
    VariableStats dpe;
    VariableStats cte; // mae = mean |cte|, mean_signed = mean cte
    VariableStats ate;
    VariableStats ae_vmax;
    VariableStats ae_pmin;
    std::size_t n = 0;
    std::size_t n_undefined_cte = 0;
};

/// Per-lead (or pooled) MAE/RMSE/R^2 with pairwise exclusion of
/// UNDEFINED/MISSING fields; exclusion counts are reported, never hidden.
std::vector<AggregateCell> aggregate(const std::vector<MetricRecord>& records, bool by_lead);

} // namespace tcverify
