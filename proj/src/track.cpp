#include "tcverify/track.hpp"

#include <algorithm>

#include "tcverify/errors.hpp"

namespace tcverify {

Basin basin_from_string(const std::string& code) {
    if (code == "NA") return Basin::NA;
    if (code == "EP") return Basin::EP;
    if (code == "WP") return Basin::WP;
    if (code == "NI") return Basin::NI;
    if (code == "SI") return Basin::SI;
    if (code == "SP") return Basin::SP;
    if (code == "SA") return Basin::SA;
    throw SchemaError("unknown basin code '" + code + "'");
}

std::string basin_to_string(Basin b) {
    switch (b) {
        case Basin::NA: return "NA";
        case Basin::EP: return "EP";
        case Basin::WP: return "WP";
        case Basin::NI: return "NI";
        case Basin::SI: return "SI";
        case Basin::SP: return "SP";
        case Basin::SA: return "SA";
    }
    return "NA";
}

const TrackPoint* ObservedStorm::at(UtcSeconds t) const {
    auto it = std::lower_bound(points.begin(), points.end(), t,
                               [](const TrackPoint& p, UtcSeconds v) { return p.valid_time < v; });
    if (it == points.end() || it->valid_time != t) return nullptr;
    return &*it;
}

ObservedStore::ObservedStore(std::map<std::string, ObservedStorm> storms, LoadStats stats)
    : storms_(std::move(storms)), stats_(stats) {
    bool first = true;
    for (const auto& [sid, storm] : storms_) {
        for (const auto& p : storm.points) {
            const int y = utc_year(p.valid_time);
            if (first) {
                min_year_ = max_year_ = y;
                first = false;
            } else {
                min_year_ = std::min(min_year_, y);
                max_year_ = std::max(max_year_, y);
            }
        }
    }
}

const ObservedStorm* ObservedStore::find(const std::string& sid) const {
    auto it = storms_.find(sid);
    return it == storms_.end() ? nullptr : &it->second;
}

const TrackPoint* ObservedStore::point(const std::string& sid, UtcSeconds t) const {
    const ObservedStorm* storm = find(sid);
    return storm ? storm->at(t) : nullptr;
}

bool ForecastSet::upsert(ForecastRow row) {
    auto [it, inserted] = rows_.insert_or_assign(row.key, std::move(row));
    (void)it;
    return inserted;
}

std::vector<const ForecastRow*> ForecastSet::members_at(const std::string& sid, UtcSeconds init,
                                                        int lead_h) const {
    std::vector<const ForecastRow*> out;
    RowKey lo{sid, init, lead_h, 0};
    for (auto it = rows_.lower_bound(lo); it != rows_.end(); ++it) {
        const RowKey& k = it->first;
        if (k.sid != sid || k.init_time != init || k.lead_h != lead_h) break;
        out.push_back(&it->second);
    }
    return out;
}

bool ForecastSet::covers(const std::string& sid, UtcSeconds init, int lead_h) const {
    RowKey lo{sid, init, lead_h, 0};
    auto it = rows_.lower_bound(lo);
    return it != rows_.end() && it->first.sid == sid && it->first.init_time == init &&
           it->first.lead_h == lead_h;
}

int ForecastSet::ensemble_size(const std::string& sid, UtcSeconds init) const {
    std::map<int, std::set<int>> members_by_lead;
    RowKey lo{sid, init, 0, 0};
    for (auto it = rows_.lower_bound(lo); it != rows_.end(); ++it) {
        const RowKey& k = it->first;
        if (k.sid != sid || k.init_time != init) break;
        members_by_lead[k.lead_h].insert(k.member);
    }
    std::size_t best = 0;
    for (const auto& [lead, members] : members_by_lead)
        best = std::max(best, members.size());
    return static_cast<int>(best);
}

std::vector<std::pair<std::string, UtcSeconds>> ForecastSet::inits() const {
    std::vector<std::pair<std::string, UtcSeconds>> out;
    for (const auto& [key, row] : rows_) {
        if (out.empty() || out.back().first != key.sid || out.back().second != key.init_time)
            out.emplace_back(key.sid, key.init_time);
    }
    return out;
}

void ForecastSet::renumber_members() {
    std::map<std::pair<std::string, UtcSeconds>, std::set<int>> seen;
    for (const auto& [key, row] : rows_)
        seen[{key.sid, key.init_time}].insert(key.member);

    std::map<std::pair<std::string, UtcSeconds>, std::map<int, int>> remap;
    for (const auto& [init, members] : seen) {
        bool contiguous = true;
        int expect = 0;
        for (int m : members)
            if (m != expect++) {
                contiguous = false;
                break;
            }
        if (contiguous) continue;
        int next = 0;
        for (int m : members)
            remap[init][m] = next++;
    }
    if (remap.empty()) return;

    std::map<RowKey, ForecastRow> renumbered;
    for (auto& [key, row] : rows_) {
        RowKey k = key;
        auto it = remap.find({k.sid, k.init_time});
        if (it != remap.end()) k.member = it->second.at(k.member);
        row.key = k;
        renumbered.emplace(k, std::move(row));
    }
    rows_ = std::move(renumbered);
}

bool ForecastSet::operator==(const ForecastSet& other) const {
    if (model_ != other.model_ || rows_.size() != other.rows_.size()) return false;
    auto a = rows_.begin();
    auto b = other.rows_.begin();
    for (; a != rows_.end(); ++a, ++b) {
        if (a->first != b->first) return false;
        const ForecastRow& ra = a->second;
        const ForecastRow& rb = b->second;
        if (!(ra.point.position == rb.point.position) || ra.point.vmax_kt != rb.point.vmax_kt ||
            ra.point.pmin_hpa != rb.point.pmin_hpa || ra.point.valid_time != rb.point.valid_time ||
            ra.filled != rb.filled)
            return false;
    }
    return true;
}

std::vector<VerificationKey> enumerate_keys(const ObservedStore& obs, const std::vector<int>& leads,
                                            int test_year) {
    std::vector<VerificationKey> keys;
    for (const auto& [sid, storm] : obs.storms()) {
        for (const TrackPoint& p : storm.points) {
            const int hour = utc_hour(p.valid_time);
            if (hour != 0 && hour != 12) continue;
            if (utc_year(p.valid_time) != test_year) continue;
            for (int lead : leads) {
                const UtcSeconds vt = p.valid_time + static_cast<UtcSeconds>(lead) * kHour;
                if (storm.at(vt) != nullptr)
                    keys.push_back({sid, p.valid_time, lead});
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

} // namespace tcverify
