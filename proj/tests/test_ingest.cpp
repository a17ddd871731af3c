#include <doctest.h>

#include <sstream>
#include <string>

#include "hybridcover/error.hpp"
#include "hybridcover/ingest.hpp"

using namespace hc;

namespace {

const char* kHeader = "om,yr,mo,dy,st,mag,loss,slat,slon,elat,elon,len,wid\n";

ParseReport parse(const std::string& text) {
    std::istringstream in(text);
    return parse_tornado_csv(in);
}

}  // namespace

TEST_CASE("header only") {
    const auto r = parse(kHeader);
    CHECK(r.records.empty());
    CHECK(r.rejects.empty());
}

TEST_CASE("missing required column names it") {
    try {
        parse("om,yr,loss,slat,slon,elat,elon,len\n");
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("'wid'") != std::string::npos);
    }
}

TEST_CASE("costliest tornado row parses") {
    const auto r = parse(std::string(kHeader) +
                         "620,2019,5,28,OH,4,1500000000,39.7,-84.3,39.8,-84.0,19.0,1000\n");
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].loss == 1.5e9);
    CHECK(r.records[0].year == 2019);
    CHECK(r.records[0].raw_id == "620");
}

TEST_CASE("malformed rows are rejected with a reason") {
    const auto r = parse(std::string(kHeader) +
                         "1,2019,5,28,OH,1,1000,39.7,-84.3,39.8,-84.0,1.0,\n"
                         "2,2019,5,28,OH,1,abc,39.7,-84.3,39.8,-84.0,1.0,10\n"
                         "3,2019,5,28,OH,1,1000,39.7\n"
                         "4,2019,5,28,OH,1,-5,39.7,-84.3,39.8,-84.0,1.0,10\n"
                         "5,2019,5,28,OH,1,10,99.0,-84.3,39.8,-84.0,1.0,10\n");
    CHECK(r.records.empty());
    REQUIRE(r.rejects.size() == 5);
    CHECK(r.rejects[0].reason == "missing wid");
    CHECK(r.rejects[1].reason.find("unparseable loss") == 0);
    CHECK(r.rejects[2].reason.find("expected") == 0);
    CHECK(r.rejects[3].reason == "negative loss");
    CHECK(r.rejects[4].reason == "latitude out of range");
    CHECK(r.rejects[0].line == 2);
}

TEST_CASE("unknown end point takes the start point") {
    const auto r = parse(std::string(kHeader) + "9,2020,1,1,TX,1,5000,30.0,-97.0,0.0,0.0,0.5,50\n");
    REQUIRE(r.records.size() == 1);
    CHECK(r.end_point_imputed == 1);
    CHECK(r.records[0].elat == 30.0);
    CHECK(r.records[0].elon == -97.0);
}

TEST_CASE("quoted fields and CRLF line endings") {
    const auto r = parse("om,yr,loss,slat,slon,elat,elon,len,wid,note\r\n"
                         "\"7\",2018,\"2,500\",35,-90,35.5,-89.5,2,100,\"a \"\"b\"\"\"\r\n"
                         "8,2018,2500,35,-90,35.5,-89.5,2,100,x\r\n");
    CHECK(r.rejects.size() == 1);  // "2,500" is not a number
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].wid == 100.0);
}

TEST_CASE("sample construction and filters") {
    const auto r = parse(std::string(kHeader) +
                         "1,2015,1,1,TX,1,1000,30,-97,30,-97,1,10\n"   // outside years
                         "2,2016,1,1,TX,1,0,30,-97,30,-97,1,10\n"      // zero loss
                         "3,2017,1,1,TX,1,1000,30,-97,30,-97,0,10\n"   // zero area
                         "4,2023,1,1,TX,1,1000,30,-97,31,-96,2,10\n"
                         "5,2024,1,1,TX,1,1000,30,-97,31,-96,2,10\n"
                         "6,2018,1,1,TX,1,600,40,-100,42,-98,1,3\n");
    const auto b = build_sample(r.records, 2016, 2023);
    CHECK(b.input_rows == 6);
    CHECK(b.outside_years == 2);
    CHECK(b.zero_loss == 1);
    CHECK(b.zero_area == 1);
    REQUIRE(b.sample.rows() == 2);
    CHECK(b.sample.y(0) == 50.0);
    CHECK(b.sample.w(0)[0] == 30.5);
    CHECK(b.sample.w(0)[1] == -96.5);
    CHECK(b.sample.y(1) == 200.0);
    CHECK(b.years == std::vector<int>{2023, 2018});
    CHECK_THROWS_AS(build_sample(r.records, 1990, 1991), DataError);
    CHECK_THROWS_AS(build_sample(r.records, 2020, 2019), ConfigError);
}

TEST_CASE("records round trip through the writer") {
    const auto r = parse(std::string(kHeader) +
                         "11,2019,5,28,OH,4,1500000000,39.71,-84.3333,39.8,-84.01,19.1,1000\n"
                         "12,2021,5,28,KS,1,0.1,38.123456789,-97.5,38.2,-97.4,0.3,25\n");
    std::ostringstream out;
    write_records_csv(out, r.records);
    std::istringstream in(out.str());
    const auto back = parse_tornado_csv(in);
    CHECK(back.records == r.records);
    CHECK(back.rejects.empty());
}

TEST_CASE("build is idempotent and order preserving") {
    const auto r = parse(std::string(kHeader) + "1,2019,1,1,TX,1,10,30,-97,30,-97,1,2\n"
                                                "2,2019,1,1,TX,1,30,31,-97,31,-97,1,2\n"
                                                "3,2019,1,1,TX,1,20,32,-97,32,-97,1,2\n");
    const auto a = build_sample(r.records, 2016, 2023);
    const auto b = build_sample(r.records, 2016, 2023);
    CHECK(a.sample.y(0) == 5.0);
    CHECK(a.sample.y(1) == 15.0);
    CHECK(a.sample.y(2) == 10.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.sample.y(i) == b.sample.y(i));
    std::ostringstream os;
    write_sample_csv(os, a);
    std::istringstream in(os.str());
    const LossSample back = read_sample_csv(in);
    CHECK(back.rows() == 3);
    CHECK(back.dim() == 2);
    CHECK(back.y(2) == 10.0);
}
