#include "syncsim/nmea.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>

#include "syncsim/errors.hpp"

namespace syncsim {
namespace {

bool is_hex_upper(char c) {
    return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F');
}

// Strict fixed-width unsigned decimal field.
std::int64_t parse_digits(std::string_view s, const char* what) {
    if (s.empty())
        throw ParseError(std::string("zda: empty ") + what);
    std::int64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9')
            throw ParseError(std::string("zda: non-digit in ") + what);
        v = v * 10 + (c - '0');
    }
    return v;
}

} // namespace

std::string nmea_checksum(std::string_view body) {
    unsigned x = 0;
    for (char c : body) {
        if (c == '$' || c == '*')
            throw ContractError("nmea body must not contain '$' or '*'");
        x ^= static_cast<unsigned char>(c);
    }
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02X", x);
    return std::string(buf);
}

std::string format_zda(TimeInstant utc) {
    using namespace std::chrono;
    utc = normalize(utc);

    sys_seconds tp{seconds{utc.seconds}};
    sys_days day = floor<days>(tp);
    year_month_day ymd{day};
    hh_mm_ss<seconds> hms{tp - day};

    int y = static_cast<int>(ymd.year());
    if (y < 1 || y > 9999)
        throw RangeError("zda: year " + std::to_string(y) + " outside [1, 9999]");

    std::int64_t centis = utc.nanos / 10'000'000; // truncated

    char body[64];
    std::snprintf(body, sizeof body, "GPZDA,%02d%02d%02d.%02d,%02d,%02d,%04d,00,00",
                  static_cast<int>(hms.hours().count()),
                  static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()),
                  static_cast<int>(centis),
                  static_cast<int>(static_cast<unsigned>(ymd.day())),
                  static_cast<int>(static_cast<unsigned>(ymd.month())), y);
    return "$" + std::string(body) + "*" + nmea_checksum(body) + "\r\n";
}

NmeaSentence parse_sentence(std::string_view text) {
    if (text.empty() || text.front() != '$')
        throw ParseError("nmea: sentence must start with '$'");
    std::size_t star = text.find('*');
    if (star == std::string_view::npos)
        throw ParseError("nmea: missing '*' delimiter");
    // After '*': exactly two hex digits and CRLF, nothing else.
    if (text.size() != star + 5 || text[star + 3] != '\r' || text[star + 4] != '\n')
        throw ParseError("nmea: bad trailer, expected *hh\\r\\n");
    char h1 = text[star + 1], h2 = text[star + 2];
    if (!is_hex_upper(h1) || !is_hex_upper(h2))
        throw ParseError("nmea: checksum is not two uppercase hex digits");

    std::string_view body = text.substr(1, star - 1);
    if (body.find('$') != std::string_view::npos)
        throw ParseError("nmea: '$' inside body");

    std::string received{h1, h2};
    std::string computed = nmea_checksum(body);
    if (received != computed)
        throw IntegrityError("nmea: checksum mismatch, got " + received +
                             ", computed " + computed);

    NmeaSentence s;
    s.checksum = received;
    std::vector<std::string> toks;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = body.find(',', start);
        if (comma == std::string_view::npos) {
            toks.emplace_back(body.substr(start));
            break;
        }
        toks.emplace_back(body.substr(start, comma - start));
        start = comma + 1;
    }
    if (toks.empty() || toks[0].size() < 5)
        throw ParseError("nmea: address field too short");
    s.talker = toks[0].substr(0, 2);
    s.type = toks[0].substr(2);
    s.fields.assign(toks.begin() + 1, toks.end());
    return s;
}

TimeInstant zda_instant(const NmeaSentence& s) {
    using namespace std::chrono;
    if (s.type != "ZDA")
        throw ParseError("zda: sentence type is " + s.type);
    if (s.fields.size() < 4)
        throw ParseError("zda: expected at least 4 fields");

    const std::string& t = s.fields[0];
    if (t.size() != 9 || t[6] != '.')
        throw ParseError("zda: time field must be hhmmss.cc");
    std::int64_t hh = parse_digits(std::string_view(t).substr(0, 2), "hours");
    std::int64_t mm = parse_digits(std::string_view(t).substr(2, 2), "minutes");
    std::int64_t ss = parse_digits(std::string_view(t).substr(4, 2), "seconds");
    std::int64_t cc = parse_digits(std::string_view(t).substr(7, 2), "centiseconds");
    if (hh > 23 || mm > 59 || ss > 60)
        throw ParseError("zda: time of day out of range");

    std::int64_t dd = parse_digits(s.fields[1], "day");
    std::int64_t mo = parse_digits(s.fields[2], "month");
    std::int64_t yy = parse_digits(s.fields[3], "year");

    year_month_day ymd{year{static_cast<int>(yy)}, month{static_cast<unsigned>(mo)},
                       day{static_cast<unsigned>(dd)}};
    if (!ymd.ok())
        throw ParseError("zda: invalid calendar date");

    sys_days base{ymd};
    std::int64_t secs = base.time_since_epoch().count() * 86400LL +
                        hh * 3600 + mm * 60 + ss;
    return TimeInstant{secs, cc * 10'000'000};
}

} // namespace syncsim
