#include <doctest.h>

#include <string>

#include "syncsim/errors.hpp"
#include "syncsim/nmea.hpp"

using namespace syncsim;

TEST_CASE("checksum is the XOR of the body bytes") {
    CHECK(nmea_checksum("") == "00");
    CHECK(nmea_checksum("A") == "41");
    CHECK(nmea_checksum("AA") == "00");
    CHECK_THROWS_AS(nmea_checksum("GP$ZDA"), ContractError);
    CHECK_THROWS_AS(nmea_checksum("GP*ZDA"), ContractError);
}

TEST_CASE("ZDA formatting against frozen sentences") {
    CHECK(format_zda(TimeInstant{1'704'164'645, 0}) ==
          "$GPZDA,030405.00,02,01,2024,00,00*63\r\n");
    CHECK(format_zda(TimeInstant{1'704'067'200, 0}) ==
          "$GPZDA,000000.00,01,01,2024,00,00*62\r\n");
    CHECK(format_zda(TimeInstant{946'684'799, 990'000'000}) ==
          "$GPZDA,235959.99,31,12,1999,00,00*6E\r\n");
    CHECK(format_zda(TimeInstant{1'786'710'896, 789'000'000}) ==
          "$GPZDA,123456.78,14,08,2026,00,00*65\r\n");
}

TEST_CASE("sub-second digits truncate to centiseconds") {
    std::string a = format_zda(TimeInstant{1'704'067'200, 9'999'999});
    CHECK(a.substr(13, 3) == ".00");
    std::string b = format_zda(TimeInstant{1'704'067'200, 999'999'999});
    CHECK(b.substr(13, 3) == ".99");
}

TEST_CASE("years outside the four-digit field are rejected") {
    // unix bounds of years 1..9999
    CHECK_NOTHROW(format_zda(TimeInstant{-62'135'596'800, 0}));
    CHECK_THROWS_AS(format_zda(TimeInstant{-62'135'596'801, 0}), RangeError);
    CHECK_NOTHROW(format_zda(TimeInstant{253'402'300'799, 0}));
    CHECK_THROWS_AS(format_zda(TimeInstant{253'402'300'800, 0}), RangeError);
}

TEST_CASE("parse splits address and payload fields") {
    NmeaSentence s = parse_sentence("$GPZDA,030405.00,02,01,2024,00,00*63\r\n");
    CHECK(s.talker == "GP");
    CHECK(s.type == "ZDA");
    REQUIRE(s.fields.size() == 6);
    CHECK(s.fields[0] == "030405.00");
    CHECK(s.fields[1] == "02");
    CHECK(s.fields[3] == "2024");
    CHECK(s.checksum == "63");
}

TEST_CASE("format and parse round-trip to the centisecond") {
    TimeInstant t{1'754'321'098, 760'000'000};
    TimeInstant back = zda_instant(parse_sentence(format_zda(t)));
    CHECK(back.seconds == t.seconds);
    CHECK(back.nanos == 760'000'000);
}

TEST_CASE("framing errors are ParseError, corruption is IntegrityError") {
    CHECK_THROWS_AS(parse_sentence(""), ParseError);
    CHECK_THROWS_AS(parse_sentence("GPZDA,1*00\r\n"), ParseError);       // no '$'
    CHECK_THROWS_AS(parse_sentence("$GPZDA,1\r\n"), ParseError);         // no '*'
    CHECK_THROWS_AS(parse_sentence("$GPZDA,1*00"), ParseError);          // no CRLF
    CHECK_THROWS_AS(parse_sentence("$GPZDA,1*00\r\nX"), ParseError);     // trailing junk
    CHECK_THROWS_AS(parse_sentence("$GPZDA,1*0\r\n"), ParseError);       // short checksum
    CHECK_THROWS_AS(parse_sentence("$GPZDA,1*6e\r\n"), ParseError);      // lowercase hex
    CHECK_THROWS_AS(parse_sentence("$GP$ZDA,1*00\r\n"), ParseError);     // '$' in body
    CHECK_THROWS_AS(parse_sentence("$GPZDA,030405.00,02,01,2024,00,00*64\r\n"),
                    IntegrityError); // one bit off
    // flip one body character: checksum no longer matches
    CHECK_THROWS_AS(parse_sentence("$GPZDA,030406.00,02,01,2024,00,00*63\r\n"),
                    IntegrityError);
    CHECK_THROWS_AS(parse_sentence("$GPZ*4D\r\n"), ParseError); // address too short
}

TEST_CASE("zda_instant accepts only well-formed ZDA payloads") {
    auto zda = [](std::vector<std::string> fields) {
        NmeaSentence s;
        s.talker = "GP";
        s.type = "ZDA";
        s.fields = std::move(fields);
        return s;
    };
    CHECK(zda_instant(zda({"030405.00", "02", "01", "2024", "00", "00"})) ==
          TimeInstant{1'704'164'645, 0});
    CHECK(zda_instant(zda({"235959.99", "31", "12", "1999", "00", "00"})) ==
          TimeInstant{946'684'799, 990'000'000});

    NmeaSentence gga = zda({"030405.00", "02", "01", "2024"});
    gga.type = "GGA";
    CHECK_THROWS_AS(zda_instant(gga), ParseError);

    CHECK_THROWS_AS(zda_instant(zda({"030405.00", "02", "01"})), ParseError); // few fields
    CHECK_THROWS_AS(zda_instant(zda({"30405.00", "02", "01", "2024"})), ParseError);
    CHECK_THROWS_AS(zda_instant(zda({"0304a5.00", "02", "01", "2024"})), ParseError);
    CHECK_THROWS_AS(zda_instant(zda({"240405.00", "02", "01", "2024"})), ParseError);
    CHECK_THROWS_AS(zda_instant(zda({"030461.00", "02", "01", "2024"})), ParseError);
    CHECK_THROWS_AS(zda_instant(zda({"030405.00", "31", "02", "2024"})), ParseError);
    CHECK_THROWS_AS(zda_instant(zda({"030405.00", "00", "01", "2024"})), ParseError);
}
