#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pott/errors.hpp"
#include "pott/timebase.hpp"

using namespace pott;

namespace {

OwltEnvelope single_window(std::uint64_t lo, std::uint64_t hi, std::int64_t mn,
                           std::int64_t mx) {
    OwltEnvelope env;
    env.windows.push_back(OwltWindow{lo, hi, mn, mx});
    return env;
}

} // namespace

TEST_CASE("epoch constant and identity conversion") {
    // 4383 days between 1958-01-01 and 1970-01-01
    CHECK(kSeconds1958To1970 == 4383 * std::int64_t{86400});
    auto table = LeapSecondTable::parse("-1000000 10\n");
    TaiTimestamp t{static_cast<std::uint64_t>(kSeconds1958To1970) + 10};
    CHECK(tai_to_unix_utc(t, table) == 0);
}

TEST_CASE("shipped table applies offset 37 to modern instants") {
    auto table = LeapSecondTable::load("data/leap_seconds.txt");
    REQUIRE(table.entries.size() == 28);
    CHECK(table.entries.front().tai_minus_utc == 10);
    CHECK(table.entries.back().effective_unix == 1483228800);
    CHECK(table.entries.back().tai_minus_utc == 37);

    TaiTimestamp t{2'000'000'000};
    CHECK(tai_to_unix_utc(t, table) ==
          2'000'000'000 - kSeconds1958To1970 - 37);
}

TEST_CASE("leap-second insertion folds one TAI second") {
    auto table = LeapSecondTable::load("data/leap_seconds.txt");
    // TAI instants surrounding the 2017-01-01 insertion
    std::uint64_t tai_at_37 =
        static_cast<std::uint64_t>(1483228800 + kSeconds1958To1970 + 37);
    CHECK(tai_to_unix_utc(TaiTimestamp{tai_at_37}, table) == 1483228800);
    CHECK(tai_to_unix_utc(TaiTimestamp{tai_at_37 - 1}, table) == 1483228800);
    CHECK(tai_to_unix_utc(TaiTimestamp{tai_at_37 - 2}, table) == 1483228799);
    CHECK(tai_to_unix_utc(TaiTimestamp{tai_at_37 + 1}, table) == 1483228801);
}

TEST_CASE("conversion is monotone nondecreasing") {
    auto table = LeapSecondTable::load("data/leap_seconds.txt");
    std::uint64_t start = 1'500'000'000;
    std::int64_t prev = tai_to_unix_utc(TaiTimestamp{start}, table);
    std::uint64_t step = 7'919'017; // dense-ish scan over decades
    for (std::uint64_t t = start + step; t < 3'000'000'000ull; t += step) {
        std::int64_t cur = tai_to_unix_utc(TaiTimestamp{t}, table);
            CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("table gaps raise errors") {
    SUBCASE("empty table") {
        try {
            (void)tai_to_unix_utc(TaiTimestamp{100}, LeapSecondTable{});
            FAIL_CHECK("empty table accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::TableGap);
        }
    }
    SUBCASE("instant before the first entry") {
        auto table = LeapSecondTable::load("data/leap_seconds.txt");
        try {
            (void)tai_to_unix_utc(TaiTimestamp{1000}, table); // 1958-era
            FAIL_CHECK("pre-table instant accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::TableGap);
        }
    }
}

TEST_CASE("table parser enforces monotone entries") {
    CHECK_THROWS_AS((void)LeapSecondTable::parse("100 10\n50 11\n"), Error);
    CHECK_THROWS_AS((void)LeapSecondTable::parse("100 10\n200 10\n"), Error);
    CHECK_THROWS_AS((void)LeapSecondTable::parse("100 -1\n"), Error);
    CHECK_THROWS_AS((void)LeapSecondTable::parse("hello\n"), Error);
    auto ok = LeapSecondTable::parse("# comment\n100 10\n\n200 11 # trailing\n");
    CHECK(ok.entries.size() == 2);
}

TEST_CASE("OWLT envelope containment") {
    auto env = single_window(0, 10'000'000'000ull, 180, 1320);
    SUBCASE("plausible interplanetary transit accepted") {
        CHECK(within_owlt_envelope(TaiTimestamp{1000}, TaiTimestamp{1600}, env, 0));
    }
    SUBCASE("superluminal transit rejected") {
        CHECK_FALSE(within_owlt_envelope(TaiTimestamp{1000}, TaiTimestamp{1060}, env, 0));
    }
    SUBCASE("bounds are inclusive") {
        CHECK(within_owlt_envelope(TaiTimestamp{1000}, TaiTimestamp{2320}, env, 0));
        CHECK(within_owlt_envelope(TaiTimestamp{1000}, TaiTimestamp{1180}, env, 0));
        CHECK_FALSE(within_owlt_envelope(TaiTimestamp{1000}, TaiTimestamp{2321}, env, 0));
        CHECK_FALSE(within_owlt_envelope(TaiTimestamp{1000}, TaiTimestamp{1179}, env, 0));
    }
    SUBCASE("slack widens both bounds") {
        CHECK(within_owlt_envelope(TaiTimestamp{1000}, TaiTimestamp{2321}, env, 1));
        CHECK(within_owlt_envelope(TaiTimestamp{1000}, TaiTimestamp{1179}, env, 1));
    }
    SUBCASE("fractional part participates in the transit") {
        CHECK_FALSE(within_owlt_envelope(TaiTimestamp{1000, 0x80000000u},
                                         TaiTimestamp{1180, 0}, env, 0));
        CHECK(within_owlt_envelope(TaiTimestamp{1000, 0x80000000u},
                                   TaiTimestamp{1180, 0x80000000u}, env, 0));
    }
    SUBCASE("backdated receive time rejected") {
        CHECK_FALSE(within_owlt_envelope(TaiTimestamp{5000}, TaiTimestamp{4000}, env, 0));
    }
}

TEST_CASE("window selection follows t_send") {
    auto env = OwltEnvelope::load("data/owlt_envelope.csv");
    REQUIRE(env.windows.size() == 3);
    // second window raises the minimum to 240 s
    CHECK(within_owlt_envelope(TaiTimestamp{2'000'000'100}, TaiTimestamp{2'000'000'300},
                               env, 0));
    CHECK_FALSE(within_owlt_envelope(TaiTimestamp{2'050'000'100},
                                     TaiTimestamp{2'050'000'300}, env, 0));
    try {
        (void)within_owlt_envelope(TaiTimestamp{100}, TaiTimestamp{700}, env, 0);
        FAIL_CHECK("uncovered send time accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WindowNotCovered);
    }
}

TEST_CASE("planet names roundtrip") {
    CHECK(planet_from_name("earth") == Planet::Earth);
    CHECK(planet_from_name("Mars") == Planet::Mars);
    CHECK(planet_from_name(planet_name(Planet::Mars)) == Planet::Mars);
    CHECK_THROWS_AS((void)planet_from_name("venus"), Error);
}
