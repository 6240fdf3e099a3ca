#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcverify/track.hpp"

namespace tcverify {

inline constexpr double kRiThresholdKt = 30.0;
inline constexpr int kRiWindowHours = 24;

/// One rolling 24 h intensification window; label is dvmax >= 30 kt.
struct RIEvent {
    std::string sid;
    UtcSeconds window_start = 0;
    UtcSeconds window_end = 0;
    double dvmax_kt = 0.0;
    bool label = false;
};

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// One event per window start t where both vmax(t) and vmax(t+24h) exist;
/// windows with a missing endpoint are skipped (count via skipped).
std::vector<RIEvent> label_ri(const std::vector<std::pair<UtcSeconds, double>>& series,
                              std::size_t* skipped = nullptr);

/// Join model and truth events on (sid, window_start); unmatched windows on
/// either side are excluded (count via unmatched).
ConfusionCounts confusion(const std::vector<RIEvent>& model_events,
                          const std::vector<RIEvent>& truth_events,
                          std::size_t* unmatched = nullptr);

/// TP/(TP+FN+FP); empty when the denominator is zero.
std::optional<double> csi(const ConfusionCounts& c);

/// Peirce skill score TPR - FPR; empty when either marginal is empty.
std::optional<double> pss(const ConfusionCounts& c);

enum class RiRuleKind { Majority, Any, Probability };

struct RiRule {
    RiRuleKind kind = RiRuleKind::Majority;
    double threshold = 0.5; // used by Probability; Majority is fixed at 0.5
};

/// One forecast RI window of one model; dvmax/fraction are the mean over
/// votable members and the fraction of members labeling RI.
struct RiForecastEvent {
    std::string sid;
    UtcSeconds init_time = 0;
    UtcSeconds window_start = 0;
    int lead_h = 0; // window end offset from init
    double dvmax_kt = 0.0;
    double member_fraction = 0.0;
    bool label = false;
    bool truth_label = false;
};

struct RiLeadScores {
    ConfusionCounts counts;
    std::optional<double> csi;
    std::optional<double> pss;
};

struct RiTable {
    std::map<int, RiLeadScores> by_lead; // lead = window end offset, 24..120
    RiLeadScores overall;
    std::vector<RiForecastEvent> events;
    std::size_t skipped_truth = 0; // windows without both observed endpoints
    std::size_t skipped_model = 0; // windows without a votable member
};

/// Roll 24 h windows over each (sid, init) of the key set. Window starts at
/// offsets 0,6,...,96 h; its lead is the window END offset. Both model and
/// truth series are anchored at the observed initial state for offset 0.
/// Ensemble windows are labeled per rule over the members with both
/// endpoints present.
RiTable ri_by_lead(const ForecastSet& fs, const ObservedStore& obs,
                   const std::vector<VerificationKey>& keys, const RiRule& rule = {});

} // namespace tcverify
