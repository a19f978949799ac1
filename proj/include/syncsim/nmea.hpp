#pragma once

// NMEA 0183 framing for the RTC's serial time report. Only ZDA (time and
// date) is generated; parsing is generic over sentence types.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "syncsim/time.hpp"

namespace syncsim {

struct NmeaSentence {
    std::string talker;              // e.g. "GP"
    std::string type;                // e.g. "ZDA"
    std::vector<std::string> fields; // payload fields after the address
    std::string checksum;            // two uppercase hex digits, as received
};

// XOR of all body bytes, rendered as two uppercase hex digits. The body is
// everything between '$' and '*' and must not itself contain either.
std::string nmea_checksum(std::string_view body);

// $GPZDA,hhmmss.cc,dd,mm,yyyy,00,00*CS\r\n for the given UTC instant.
// Sub-second precision is centiseconds, truncated. Years outside [1, 9999]
// do not fit the field width: RangeError.
std::string format_zda(TimeInstant utc);

// Parses one framed sentence (must include the trailing CRLF). Malformed
// framing is a ParseError; good framing with a wrong checksum is an
// IntegrityError.
NmeaSentence parse_sentence(std::string_view text);

// UTC instant encoded by a parsed ZDA sentence. ParseError on anything that
// is not a well-formed ZDA payload.
TimeInstant zda_instant(const NmeaSentence& s);

} // namespace syncsim
