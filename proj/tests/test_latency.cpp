#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pott/errors.hpp"
#include "pott/latency.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace pott;

namespace {

std::uint64_t extra(double owlt, double J, double b_target = 10) {
    TimelockInputs in;
    in.owlt_minutes = owlt;
    in.J_minutes = J;
    in.b_target_minutes = b_target;
    return cltv_extra_blocks(in);
}

template <typename F>
void expect_error(ErrorCode code, F&& fn) {
    try {
        fn();
        FAIL_CHECK("expected an error but none was thrown");
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

} // namespace

TEST_CASE("CLTV extra blocks") {
    SUBCASE("worked example and small cases") {
        CHECK(extra(22, 60) == 11); // ceil(104/10)
        CHECK(extra(0, 0) == 0);
        CHECK(extra(3, 0) == 1); // ceil(6/10)
        CHECK(extra(10, 0) == 2); // RTT+J = 20 exactly: stays 2
        CHECK(extra(0, 20) == 2);
        CHECK(extra(5, 10) == 2);
    }
    SUBCASE("equality never bumps; one tick past does") {
        for (std::uint64_t k = 0; k <= 30; ++k) {
            CHECK(extra(0, static_cast<double>(10 * k)) == k);
            CHECK(extra(static_cast<double>(5 * k), 0) == k);
            if (k > 0)
                CHECK(extra(0, 10.0 * k + 0.1) == k + 1);
        }
    }
    SUBCASE("tenth-of-a-minute grid around a step") {
        CHECK(extra(4.9, 0) == 1); // RTT 9.8
        CHECK(extra(5.0, 0) == 1); // RTT 10.0 exactly
        CHECK(extra(5.1, 0) == 2); // RTT 10.2
    }
    SUBCASE("nondecreasing in owlt and J, increments of at most one per 0.1 min") {
        for (int J : {0, 30, 60}) {
            std::uint64_t prev = extra(0, J);
            for (int i = 1; i <= 220; ++i) {
                std::uint64_t cur = extra(i / 10.0, J);
                REQUIRE(cur >= prev);
                REQUIRE(cur - prev <= 1);
                prev = cur;
            }
        }
        for (int j = 1; j <= 600; ++j)
            REQUIRE(extra(7, j / 10.0) >= extra(7, (j - 1) / 10.0));
    }
    SUBCASE("input validation") {
        expect_error(ErrorCode::IoError, [] { extra(-1, 0); });
        expect_error(ErrorCode::IoError, [] { extra(0, -1); });
        expect_error(ErrorCode::IoError, [] { extra(1, 1, 0); });
    }
}

TEST_CASE("CLTV total blocks") {
    TimelockInputs in;
    in.owlt_minutes = 22;
    in.J_minutes = 60;
    CHECK(cltv_total_blocks(in) == 157); // 144 + 11 + 2

    TimelockInputs zeros;
    zeros.owlt_minutes = 0;
    zeros.J_minutes = 0;
    zeros.M_op_blocks = 0;
    CHECK(cltv_total_blocks(zeros) == 144);

    TimelockInputs no_jitter;
    no_jitter.owlt_minutes = 22;
    CHECK(cltv_total_blocks(no_jitter) == 151); // 144 + ceil(44/10) + 2
}

TEST_CASE("CSV sequence units") {
    CHECK(csv_sequence_units(0) == 0);
    CHECK(csv_sequence_units(1) == 1);
    CHECK(csv_sequence_units(512) == 1);
    CHECK(csv_sequence_units(513) == 2);
    CHECK(csv_sequence_units(1024) == 2);
    CHECK(csv_sequence_units(6240) == 13); // RTT_max + J at owlt 22 min, J 60 min
    expect_error(ErrorCode::IoError, [] { csv_sequence_units(-1); });
}

TEST_CASE("link budget") {
    SUBCASE("header stream") {
        LinkBudget b = link_budget(52560, 80);
        CHECK(b.bytes_per_year == 4'204'800.0);
        CHECK(std::abs(b.bytes_per_year / 1e6 - 4.2) < 0.042); // within 1%
        CHECK(std::abs(b.sustained_bps - 1.07) < 0.0107);
    }
    SUBCASE("filter stream") {
        LinkBudget b = link_budget(52560, 20000);
        CHECK(b.bytes_per_year == 1'051'200'000.0);
        CHECK(std::abs(b.bytes_per_year / 1e9 - 1.05) < 0.0105);
        CHECK(std::abs(b.sustained_bps - 267) < 2.67);
    }
    SUBCASE("zero blocks") {
        LinkBudget b = link_budget(0, 123456);
        CHECK(b.bytes_per_year == 0);
        CHECK(b.sustained_bps == 0);
    }
    SUBCASE("linear in both arguments") {
        LinkBudget one = link_budget(1000, 7);
        CHECK(link_budget(3000, 7).bytes_per_year == 3 * one.bytes_per_year);
        CHECK(link_budget(1000, 21).bytes_per_year == 3 * one.bytes_per_year);
        CHECK(link_budget(3000, 7).sustained_bps == doctest::Approx(3 * one.sustained_bps));
    }
}

TEST_CASE("stale-rate fair interval") {
    SUBCASE("proof-sketch example is exact") {
        StaleBoundInputs in;
        in.max_owlt_minutes = 22;
        in.margin_minutes = 0;
        in.epsilon = 0.05;
        CHECK(stale_fair_interval(in) == 880.0);
        double p = stale_probability(in, 880.0);
        CHECK(p == doctest::Approx(1.0 - std::exp(-0.05)).epsilon(1e-12));
        CHECK(p <= 0.05);
    }
    SUBCASE("degenerate epsilon of one returns D itself") {
        StaleBoundInputs in;
        in.max_owlt_minutes = 22;
        in.margin_minutes = 3;
        in.epsilon = 1;
        CHECK(stale_fair_interval(in) == 47.0);
    }
    SUBCASE("margin participates") {
        StaleBoundInputs in;
        in.max_owlt_minutes = 10;
        in.margin_minutes = 5;
        in.epsilon = 0.1;
        CHECK(stale_fair_interval(in) == 250.0);
    }
    SUBCASE("p at the bound stays within epsilon plus linearization slack") {
        for (double owlt : {1.0, 5.0, 12.3, 22.0}) {
            for (double margin : {0.0, 2.5, 10.0}) {
                for (double eps : {0.01, 0.05, 0.2, 0.5}) {
                    StaleBoundInputs in;
                    in.max_owlt_minutes = owlt;
                    in.margin_minutes = margin;
                    in.epsilon = eps;
                    double b = stale_fair_interval(in);
                    REQUIRE(stale_probability(in, b) <= eps + 0.003);
                }
            }
        }
    }
    SUBCASE("validation") {
        StaleBoundInputs in;
        in.epsilon = 0;
        expect_error(ErrorCode::IoError, [&] { stale_fair_interval(in); });
        in.epsilon = 1.5;
        expect_error(ErrorCode::IoError, [&] { stale_fair_interval(in); });
        in.epsilon = 0.5;
        in.max_owlt_minutes = -2;
        expect_error(ErrorCode::IoError, [&] { stale_fair_interval(in); });
    }
}

TEST_CASE("fig. 3 step table") {
    std::string csv = fig3_table_csv();
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "owlt_min,J,delta_blocks");

    struct Row {
        double owlt;
        int J;
        std::uint64_t delta;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        Row r{};
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        bool parsed = static_cast<bool>(ls >> r.owlt >> c1 >> r.J >> c2 >> r.delta);
        REQUIRE(parsed);
        REQUIRE(c1 == ',');
        REQUIRE(c2 == ',');
        rows.push_back(r);
    }
    REQUIRE(rows.size() == 3 * 221);

    // exhaustive re-check of every row against the calculator, plus the
    // equality semantics: at RTT+J = k*10 the value is exactly k
    std::size_t idx = 0;
    for (int J : {0, 30, 60}) {
        std::uint64_t prev = 0;
        for (int i = 0; i <= 220; ++i, ++idx) {
            const Row& r = rows[idx];
            REQUIRE(r.J == J);
            REQUIRE(r.owlt == doctest::Approx(i / 10.0));
            std::uint64_t want = extra(i / 10.0, J);
            REQUIRE(r.delta == want);
            // integer tenth-of-minute bookkeeping: RTT+J in 0.1-min units
            std::uint64_t tenth = static_cast<std::uint64_t>(2 * i + 10 * J);
            if (tenth % 100 == 0)
                REQUIRE(r.delta == tenth / 100);
            if (i > 0) {
                REQUIRE(r.delta >= prev);
                REQUIRE(r.delta - prev <= 1);
            }
            prev = r.delta;
        }
    }

    // spot checks, including the worked example
    CHECK(csv.find("22.0,60,11\n") != std::string::npos);
    CHECK(csv.find("0.0,0,0\n") != std::string::npos);
    CHECK(csv.find("5.0,0,1\n") != std::string::npos);
    CHECK(csv.find("5.1,0,2\n") != std::string::npos);
}
