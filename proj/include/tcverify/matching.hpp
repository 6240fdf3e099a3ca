#pragma once

#include <string>
#include <vector>

#include "tcverify/track.hpp"

namespace tcverify {

struct MatchPolicy {
    double max_init_distance_km = 300.0;
    bool require_init_time_exact = true;
};

struct MatchEntry {
    std::string candidate; // provisional track id
    UtcSeconds init_time = 0;
    std::string sid; // matched observed storm
    double distance_km = 0.0;
};

struct SpuriousEntry {
    std::string candidate;
    UtcSeconds init_time = 0;
    std::string reason;
};

struct MatchResult {
    std::vector<MatchEntry> matched;
    std::vector<SpuriousEntry> spurious;
    std::vector<std::pair<std::string, UtcSeconds>> unmatched_storms;

    std::string to_json() const;
};

/// Associate candidate forecast tracks (provisional ids in the sid field)
/// with observed storms by nearest init-time position within the policy
/// threshold. One-to-one per init time; when two candidates claim the same
/// storm the nearer wins and the other becomes spurious, ties broken by the
/// lexicographically smaller candidate id.
MatchResult match_tracks(const ForecastSet& candidates, const ObservedStore& obs,
                         const MatchPolicy& policy = {});

/// New set with matched tracks relabeled to observed sids and spurious
/// tracks dropped; the input set is left untouched.
/// Throws UnknownCandidate when the result references an id absent from fs.
ForecastSet relabel(const ForecastSet& fs, const MatchResult& result);

} // namespace tcverify
