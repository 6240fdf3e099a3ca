#include "tcverify/ri_metrics.hpp"

#include <algorithm>
#include <set>

#include "tcverify/errors.hpp"

namespace tcverify {

std::vector<RIEvent> label_ri(const std::vector<std::pair<UtcSeconds, double>>& series,
                              std::size_t* skipped) {
    std::map<UtcSeconds, double> by_time(series.begin(), series.end());
    std::vector<RIEvent> events;
    const UtcSeconds window = static_cast<UtcSeconds>(kRiWindowHours) * kHour;
    for (const auto& [t, vmax] : by_time) {
        auto it = by_time.find(t + window);
        if (it == by_time.end()) {
            if (skipped) ++*skipped;
            continue;
        }
        RIEvent e;
        e.window_start = t;
        e.window_end = t + window;
        e.dvmax_kt = it->second - vmax;
        e.label = e.dvmax_kt >= kRiThresholdKt;
        events.push_back(e);
    }
    return events;
}

ConfusionCounts confusion(const std::vector<RIEvent>& model_events,
                          const std::vector<RIEvent>& truth_events, std::size_t* unmatched) {
    std::map<std::pair<std::string, UtcSeconds>, bool> truth;
    for (const RIEvent& e : truth_events) truth[{e.sid, e.window_start}] = e.label;

    ConfusionCounts counts;
    std::set<std::pair<std::string, UtcSeconds>> joined;
    for (const RIEvent& e : model_events) {
        auto it = truth.find({e.sid, e.window_start});
        if (it == truth.end()) {
            if (unmatched) ++*unmatched;
            continue;
        }
        joined.insert(it->first);
        if (e.label && it->second) ++counts.tp;
        else if (e.label && !it->second) ++counts.fp;
        else if (!e.label && it->second) ++counts.fn;
        else ++counts.tn;
    }
    if (unmatched) *unmatched += truth.size() - joined.size();
    return counts;
}

std::optional<double> csi(const ConfusionCounts& c) {
    const std::size_t denom = c.tp + c.fn + c.fp;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::optional<double> pss(const ConfusionCounts& c) {
    const std::size_t pos = c.tp + c.fn;
    const std::size_t neg = c.fp + c.tn;
    if (pos == 0 || neg == 0) return std::nullopt;
    const double tpr = static_cast<double>(c.tp) / static_cast<double>(pos);
    const double fpr = static_cast<double>(c.fp) / static_cast<double>(neg);
    return tpr - fpr;
}

namespace {

bool rule_label(const RiRule& rule, double fraction) {
    switch (rule.kind) {
        case RiRuleKind::Majority: return fraction >= 0.5;
        case RiRuleKind::Any: return fraction > 0.0;
        case RiRuleKind::Probability: return fraction >= rule.threshold;
    }
    return false;
}

void tally(RiLeadScores& scores, bool predicted, bool truth) {
    if (predicted && truth) ++scores.counts.tp;
    else if (predicted && !truth) ++scores.counts.fp;
    else if (!predicted && truth) ++scores.counts.fn;
    else ++scores.counts.tn;
}

} // namespace

RiTable ri_by_lead(const ForecastSet& fs, const ObservedStore& obs,
                   const std::vector<VerificationKey>& keys, const RiRule& rule) {
    RiTable table;

    std::set<std::pair<std::string, UtcSeconds>> init_set;
    int max_lead = 0;
    for (const VerificationKey& key : keys) {
        init_set.insert({key.sid, key.init_time});
        max_lead = std::max(max_lead, key.lead_h);
    }

    for (const auto& [sid, t0] : init_set) {
        const ObservedStorm* storm = obs.find(sid);
        if (!storm) continue;
        const TrackPoint* init_state = storm->at(t0);
        if (!init_state || !init_state->vmax_kt) continue;
        const double anchor_vmax = *init_state->vmax_kt;

        // member -> offset hours -> vmax; offset 0 is the observed anchor.
        std::map<int, std::map<int, double>> member_series;
        for (int offset = 6; offset <= max_lead; offset += 6) {
            for (const ForecastRow* row : fs.members_at(sid, t0, offset)) {
                if (!row->point.vmax_kt) continue;
                member_series[row->key.member][offset] = *row->point.vmax_kt;
            }
        }

        for (int start = 0; start + kRiWindowHours <= max_lead; start += 6) {
            const int end = start + kRiWindowHours;
            const UtcSeconds ws = t0 + static_cast<UtcSeconds>(start) * kHour;
            const UtcSeconds we = t0 + static_cast<UtcSeconds>(end) * kHour;

            const TrackPoint* obs_start = storm->at(ws);
            const TrackPoint* obs_end = storm->at(we);
            const bool truth_ok = obs_start && obs_end && obs_start->vmax_kt && obs_end->vmax_kt;
            if (!truth_ok) {
                ++table.skipped_truth;
                continue;
            }
            const double truth_dvmax = *obs_end->vmax_kt - *obs_start->vmax_kt;
            const bool truth_label = truth_dvmax >= kRiThresholdKt;

            std::size_t votable = 0, yes = 0;
            double dvmax_sum = 0.0;
            for (const auto& [member, by_offset] : member_series) {
                double v_start;
                if (start == 0) {
                    v_start = anchor_vmax;
                } else {
                    auto it = by_offset.find(start);
                    if (it == by_offset.end()) continue;
                    v_start = it->second;
                }
                auto it_end = by_offset.find(end);
                if (it_end == by_offset.end()) continue;
                const double dv = it_end->second - v_start;
                ++votable;
                dvmax_sum += dv;
                if (dv >= kRiThresholdKt) ++yes;
            }
            if (votable == 0) {
                ++table.skipped_model;
                continue;
            }
            const double fraction = static_cast<double>(yes) / static_cast<double>(votable);
            const bool predicted = rule_label(rule, fraction);

            RiForecastEvent event;
            event.sid = sid;
            event.init_time = t0;
            event.window_start = ws;
            event.lead_h = end;
            event.dvmax_kt = dvmax_sum / static_cast<double>(votable);
            event.member_fraction = fraction;
            event.label = predicted;
            event.truth_label = truth_label;
            table.events.push_back(event);

            tally(table.by_lead[end], predicted, truth_label);
            tally(table.overall, predicted, truth_label);
        }
    }

    std::sort(table.events.begin(), table.events.end(),
              [](const RiForecastEvent& a, const RiForecastEvent& b) {
                  return std::tie(a.sid, a.init_time, a.window_start) <
                         std::tie(b.sid, b.init_time, b.window_start);
              });
    for (auto& [lead, scores] : table.by_lead) {
        scores.csi = csi(scores.counts);
        scores.pss = pss(scores.counts);
    }
    table.overall.csi = csi(table.overall.counts);
    table.overall.pss = pss(table.overall.counts);
    return table;
}

} // namespace tcverify
