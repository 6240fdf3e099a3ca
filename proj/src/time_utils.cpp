#include "tcverify/time_utils.hpp"

#include <cstdio>

#include "tcverify/errors.hpp"

namespace tcverify {

namespace {

// Howard Hinnant's civil-calendar algorithms; valid far beyond the
// period of any track archive.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yr + (m <= 2));
}

bool days_in_month_ok(int y, int m, int d) {
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return false;
    int len = lengths[m - 1];
    if (m == 2 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) len = 29;
    return d <= len;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    return a - floor_div(a, b) * b;
}

} // namespace

UtcSeconds parse_utc(std::string_view iso) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, consumed = 0;
    char sep = 0;
    std::string buf(iso);
    int n = std::sscanf(buf.c_str(), "%d-%d-%d%c%d:%d:%d%n", &y, &mo, &d, &sep, &h, &mi, &s,
                        &consumed);
    if (n != 7 || (sep != 'T' && sep != ' '))
        throw SchemaError("invalid timestamp '" + buf + "' (expected YYYY-MM-DDTHH:MM:SSZ)");
    // Only an optional trailing 'Z' may follow the seconds field.
    const std::string rest = buf.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest != "Z")
        throw SchemaError("invalid timestamp suffix '" + rest + "' in '" + buf + "'");
    if (!days_in_month_ok(y, mo, d) || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60)
        throw SchemaError("timestamp out of range: '" + buf + "'");
    return make_utc(y, mo, d, h, mi, s);
}

UtcSeconds make_utc(int year, int month, int day, int hour, int minute, int second) {
    return days_from_civil(year, month, day) * kDay + hour * 3600 + minute * 60 + second;
}

std::string format_utc(UtcSeconds t) {
    const std::int64_t days = floor_div(t, kDay);
    const std::int64_t rem = floor_mod(t, kDay);
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

int utc_year(UtcSeconds t) {
    int y, m, d;
    civil_from_days(floor_div(t, kDay), y, m, d);
    return y;
}

int utc_hour(UtcSeconds t) {
    return static_cast<int>(floor_mod(t, kDay) / 3600);
}

std::int64_t utc_day_index(UtcSeconds t) {
    return floor_div(t, kDay);
}

bool is_synoptic(UtcSeconds t) {
    const std::int64_t rem = floor_mod(t, kDay);
    return rem % 3600 == 0 && (rem / 3600) % 6 == 0;
}

} // namespace tcverify
