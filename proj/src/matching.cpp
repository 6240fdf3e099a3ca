#include "tcverify/matching.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "tcverify/errors.hpp"
#include "tcverify/geodesy.hpp"

namespace tcverify {

std::string MatchResult::to_json() const {
    nlohmann::ordered_json j;
    j["matched"] = nlohmann::ordered_json::array();
    for (const MatchEntry& m : matched)
        j["matched"].push_back({{"candidate", m.candidate},
                                {"init_time", format_utc(m.init_time)},
                                {"sid", m.sid},
                                {"distance_km", m.distance_km}});
    j["spurious"] = nlohmann::ordered_json::array();
    for (const SpuriousEntry& s : spurious)
        j["spurious"].push_back({{"candidate", s.candidate},
                                 {"init_time", format_utc(s.init_time)},
                                 {"reason", s.reason}});
    j["unmatched"] = nlohmann::ordered_json::array();
    for (const auto& [sid, init] : unmatched_storms)
        j["unmatched"].push_back({{"sid", sid}, {"init_time", format_utc(init)}});
    return j.dump(2) + "\n";
}

MatchResult match_tracks(const ForecastSet& candidates, const ObservedStore& obs,
                         const MatchPolicy& policy) {
    MatchResult result;

    struct Claim {
        std::string candidate;
        std::string sid;
        double distance_km;
    };
    // init_time -> claims, so conflict resolution is per init.
    std::map<UtcSeconds, std::vector<Claim>> claims;

    for (const auto& [candidate, init] : candidates.inits()) {
        // Anchor the candidate at its earliest lead for this init.
        auto it = candidates.rows().lower_bound(RowKey{candidate, init, 0, 0});
        const ForecastRow* anchor = &it->second;
        if (policy.require_init_time_exact && anchor->key.lead_h != 0) {
            result.spurious.push_back({candidate, init, "no position at init time"});
            continue;
        }
        const UtcSeconds anchor_time = anchor->point.valid_time;

        const ObservedStorm* best_storm = nullptr;
        double best_dist = 0.0;
        for (const auto& [sid, storm] : obs.storms()) {
            const TrackPoint* truth = storm.at(anchor_time);
            if (!truth) continue;
            const double d = haversine_km(anchor->point.position, truth->position);
            if (d > policy.max_init_distance_km) continue;
            if (!best_storm || d < best_dist) {
                best_storm = &storm;
                best_dist = d;
            }
        }
        if (!best_storm) {
            result.spurious.push_back({candidate, init,
                                       "no observed storm within " +
                                           std::to_string(policy.max_init_distance_km) + " km"});
            continue;
        }
        claims[init].push_back({candidate, best_storm->sid, best_dist});
    }

    // Resolve conflicts: per (init, storm) the nearest claim wins; ties go to
    // the lexicographically smaller candidate id.
    std::set<std::pair<std::string, UtcSeconds>> matched_storm_inits;
    for (auto& [init, list] : claims) {
        std::stable_sort(list.begin(), list.end(), [](const Claim& a, const Claim& b) {
            if (a.distance_km != b.distance_km) return a.distance_km < b.distance_km;
            return a.candidate < b.candidate;
        });
        std::set<std::string> taken;
        for (const Claim& c : list) {
            if (taken.count(c.sid)) {
                result.spurious.push_back({c.candidate, init, "storm " + c.sid +
                                                                  " already claimed by a nearer "
                                                                  "candidate"});
                continue;
            }
            taken.insert(c.sid);
            matched_storm_inits.insert({c.sid, init});
            result.matched.push_back({c.candidate, init, c.sid, c.distance_km});
        }
    }
    std::sort(result.matched.begin(), result.matched.end(),
              [](const MatchEntry& a, const MatchEntry& b) {
                  return std::tie(a.candidate, a.init_time) < std::tie(b.candidate, b.init_time);
              });
    std::sort(result.spurious.begin(), result.spurious.end(),
              [](const SpuriousEntry& a, const SpuriousEntry& b) {
                  return std::tie(a.candidate, a.init_time) < std::tie(b.candidate, b.init_time);
              });

    // Observed storms alive at a candidate init time with no matched candidate.
    std::set<UtcSeconds> init_times;
    for (const auto& [candidate, init] : candidates.inits())
        init_times.insert(init);
    for (UtcSeconds init : init_times) {
        for (const auto& [sid, storm] : obs.storms()) {
            if (!storm.at(init)) continue;
            if (!matched_storm_inits.count({sid, init}))
                result.unmatched_storms.emplace_back(sid, init);
        }
    }
    return result;
}

ForecastSet relabel(const ForecastSet& fs, const MatchResult& result) {
    // (candidate, init) -> sid
    std::map<std::pair<std::string, UtcSeconds>, std::string> mapping;
    for (const MatchEntry& m : result.matched) {
        if (!std::any_of(fs.rows().begin(), fs.rows().end(), [&](const auto& kv) {
                return kv.first.sid == m.candidate && kv.first.init_time == m.init_time;
            }))
            throw UnknownCandidate("match result references unknown candidate '" + m.candidate +
                                   "' at " + format_utc(m.init_time));
        mapping[{m.candidate, m.init_time}] = m.sid;
    }

    ForecastSet out(fs.model());
    out.stats() = fs.stats();
    for (const auto& [key, row] : fs.rows()) {
        auto it = mapping.find({key.sid, key.init_time});
        if (it == mapping.end()) continue; // spurious or unmatched: dropped
        ForecastRow copy = row;
        copy.key.sid = it->second;
        out.upsert(std::move(copy));
    }
    return out;
}

} // namespace tcverify
