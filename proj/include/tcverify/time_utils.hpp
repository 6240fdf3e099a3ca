#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tcverify {

/// UTC timestamp as seconds since the Unix epoch.
using UtcSeconds = std::int64_t;

inline constexpr UtcSeconds kHour = 3600;
inline constexpr UtcSeconds kSixHours = 6 * kHour;
inline constexpr UtcSeconds kDay = 24 * kHour;

/// Parse an ISO 8601 UTC timestamp ("YYYY-MM-DDTHH:MM:SS" with optional
/// trailing 'Z'). Throws SchemaError on malformed input.
UtcSeconds parse_utc(std::string_view iso);

/// Format as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(UtcSeconds t);

UtcSeconds make_utc(int year, int month, int day, int hour = 0, int minute = 0, int second = 0);

int utc_year(UtcSeconds t);
int utc_hour(UtcSeconds t);

/// Days since epoch, for grouping timestamps by calendar day.
std::int64_t utc_day_index(UtcSeconds t);

/// True when minute and second are zero and the hour is one of 00/06/12/18.
bool is_synoptic(UtcSeconds t);

} // namespace tcverify
