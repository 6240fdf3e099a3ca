#include "tcverify/det_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tcverify/errors.hpp"

namespace tcverify {

namespace {

std::optional<double> mean_of_present(const std::vector<const ForecastRow*>& members,
                                      std::optional<double> TrackPoint::*field) {
    double sum = 0.0;
    std::size_t n = 0;
    std::optional<double> first;
    bool constant = true;
    for (const ForecastRow* row : members) {
        const auto& v = row->point.*field;
        if (v) {
            if (n == 0) first = *v;
            else if (*v != *first) constant = false;
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    if (constant) return first; // mean of identical values is exact
    return sum / static_cast<double>(n);
}

struct Accum {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double signed_sum = 0.0;
    std::size_t n = 0;

    void add(double err) {
        abs_sum += std::abs(err);
        sq_sum += err * err;
        signed_sum += err;
        ++n;
    }
};

struct TargetAccum {
    double obs_sum = 0.0;
    double obs_sq_sum = 0.0;
    double mse_sum = 0.0;
    std::size_t n = 0;

    void add(double fcst, double obs) {
        obs_sum += obs;
        obs_sq_sum += obs * obs;
        mse_sum += (fcst - obs) * (fcst - obs);
        ++n;
    }

    std::optional<double> r2() const {
        if (n == 0) return std::nullopt;
        const double mean = obs_sum / static_cast<double>(n);
        const double var = obs_sq_sum / static_cast<double>(n) - mean * mean;
        if (var < 1e-12) return std::nullopt; // DegenerateVariance
        const double mse = mse_sum / static_cast<double>(n);
        return 1.0 - mse / var;
    }
};

VariableStats finish(const Accum& acc) {
    VariableStats out;
    out.n = acc.n;
    if (acc.n == 0) return out;
    const double n = static_cast<double>(acc.n);
    out.mae = acc.abs_sum / n;
    out.rmse = std::sqrt(acc.sq_sum / n);
    out.mean_signed = acc.signed_sum / n;
    return out;
}

} // namespace

MetricRecord score_key(const std::vector<const ForecastRow*>& members, const TrackPoint& obs_now,
                       const TrackPoint* obs_prev, EnsembleReduction reduction,
                       const EarthModel& earth) {
    if (members.empty())
        throw Error("score_key requires at least one forecast member");

    MetricRecord rec;
    rec.n_members = static_cast<int>(members.size());
    rec.filled = std::all_of(members.begin(), members.end(),
                             [](const ForecastRow* r) { return r->filled; });

    GeoPoint rep_pos = members.front()->point.position;
    std::optional<double> rep_vmax = members.front()->point.vmax_kt;
    std::optional<double> rep_pmin = members.front()->point.pmin_hpa;
    if (members.size() > 1 && reduction == EnsembleReduction::Mean) {
        std::vector<GeoPoint> positions;
        positions.reserve(members.size());
        for (const ForecastRow* row : members) positions.push_back(row->point.position);
        rep_pos = spherical_mean(positions);
        rep_vmax = mean_of_present(members, &TrackPoint::vmax_kt);
        rep_pmin = mean_of_present(members, &TrackPoint::pmin_hpa);
    }

    if (obs_prev && !(obs_prev->position == obs_now.position)) {
        const TrackErrorDecomposition d =
            decompose_track_error(obs_prev->position, obs_now.position, rep_pos, earth);
        rec.dpe_km = d.dpe_km;
        rec.cte_km = d.cte_km;
        rec.ate_km = d.ate_km;
    } else {
        // First valid time or stationary observed segment: CTE/ATE undefined.
        rec.dpe_km = haversine_km(rep_pos, obs_now.position, earth);
    }

    rec.fcst_vmax_kt = rep_vmax;
    rec.obs_vmax_kt = obs_now.vmax_kt;
    rec.fcst_pmin_hpa = rep_pmin;
    rec.obs_pmin_hpa = obs_now.pmin_hpa;
    if (rep_vmax && obs_now.vmax_kt) rec.ae_vmax_kt = std::abs(*rep_vmax - *obs_now.vmax_kt);
    if (rep_pmin && obs_now.pmin_hpa) rec.ae_pmin_hpa = std::abs(*rep_pmin - *obs_now.pmin_hpa);
    return rec;
}

std::vector<AggregateCell> aggregate(const std::vector<MetricRecord>& records, bool by_lead) {
    if (records.empty())
        throw Error("aggregate requires at least one record");

    struct CellAccum {
        Accum dpe, cte, ate, ae_vmax, ae_pmin;
        TargetAccum vmax_target, pmin_target;
        std::size_t n = 0;
        std::size_t n_undefined_cte = 0;
    };
    std::map<int, CellAccum> cells;

    for (const MetricRecord& rec : records) {
        CellAccum& cell = cells[by_lead ? rec.key.lead_h : 0];
        ++cell.n;
        cell.dpe.add(rec.dpe_km);
        if (rec.cte_km)
            cell.cte.add(*rec.cte_km);
        else
            ++cell.n_undefined_cte;
        if (rec.ate_km) cell.ate.add(*rec.ate_km);
        if (rec.ae_vmax_kt) cell.ae_vmax.add(*rec.ae_vmax_kt);
        if (rec.ae_pmin_hpa) cell.ae_pmin.add(*rec.ae_pmin_hpa);
        if (rec.fcst_vmax_kt && rec.obs_vmax_kt)
            cell.vmax_target.add(*rec.fcst_vmax_kt, *rec.obs_vmax_kt);
        if (rec.fcst_pmin_hpa && rec.obs_pmin_hpa)
            cell.pmin_target.add(*rec.fcst_pmin_hpa, *rec.obs_pmin_hpa);
    }

    std::vector<AggregateCell> out;
    for (const auto& [lead, acc] : cells) {
        AggregateCell cell;
        cell.lead_h = lead;
        cell.dpe = finish(acc.dpe);
        cell.cte = finish(acc.cte);
        cell.ate = finish(acc.ate);
        cell.ae_vmax = finish(acc.ae_vmax);
        cell.ae_pmin = finish(acc.ae_pmin);
        cell.ae_vmax.r2 = acc.vmax_target.r2();
        cell.ae_pmin.r2 = acc.pmin_target.r2();
        cell.n = acc.n;
        cell.n_undefined_cte = acc.n_undefined_cte;
        out.push_back(cell);
    }
    return out;
}

} // namespace tcverify
