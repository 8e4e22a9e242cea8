#pragma once

#include "pott/receipt.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pott {

// 1958-01-01 (TAI/CUC epoch) to 1970-01-01 (Unix epoch): 4383 days.
inline constexpr std::int64_t kSeconds1958To1970 = 378'691'200;

enum class Planet { Earth, Mars };

const char* planet_name(Planet p);
Planet planet_from_name(const std::string& name); // throws IoError on unknown name

struct LeapSecondTable {
    struct Entry {
        std::int64_t effective_unix = 0; // UTC instant the offset takes effect
        std::int64_t tai_minus_utc = 0;
    };
    std::vector<Entry> entries; // strictly increasing in both fields

    static LeapSecondTable parse(const std::string& text); // throws IoError
    static LeapSecondTable load(const std::string& path);
};

// unix = (tai - 378,691,200) - offset, using the offset in force at the
// claimed instant. Throws TableGap when the table is empty or the instant
// precedes the first entry (no extrapolation).
std::int64_t tai_to_unix_utc(const TaiTimestamp& t, const LeapSecondTable& table);

struct OwltWindow {
    std::uint64_t start_tai = 0;
    std::uint64_t end_tai = 0; // inclusive
    std::int64_t min_owlt = 0; // seconds
    std::int64_t max_owlt = 0;
};

// Piecewise-constant min/max one-way light time, the stand-in for ephemeris
// geometry. Windows are selected by the send time.
struct OwltEnvelope {
    std::vector<OwltWindow> windows;

    static OwltEnvelope parse(const std::string& text); // throws IoError
    static OwltEnvelope load(const std::string& path);

    const OwltWindow* window_covering(const TaiTimestamp& t) const;
};

// true iff min_owlt - slack <= (t_recv - t_send) <= max_owlt + slack, bounds
// inclusive. Throws WindowNotCovered when no window covers t_send.
bool within_owlt_envelope(const TaiTimestamp& t_send, const TaiTimestamp& t_recv,
                          const OwltEnvelope& env, double slack_seconds);

struct BeaconReading {
    std::string beacon_id;
    Planet domain = Planet::Earth;
    TaiTimestamp tai;
    double sigma_t_seconds = 0;
};

// Seconds as a real number including the CUC fractional part.
double tai_real_seconds(const TaiTimestamp& t);

} // namespace pott
