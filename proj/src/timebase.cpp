#include "pott/timebase.hpp"

#include "pott/errors.hpp"

#include <cmath>
#include <sstream>

namespace pott {

namespace {

// Strip comments/blank lines; returns false when nothing is left to parse.
bool strip_line(std::string& line) {
    if (auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        line.clear();
        return false;
    }
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    return true;
}

} // namespace

const char* planet_name(Planet p) {
    switch (p) {
    case Planet::Earth: return "earth";
    case Planet::Mars: return "mars";
    }
    return "earth";
}

Planet planet_from_name(const std::string& name) {
    if (name == "earth" || name == "Earth")
        return Planet::Earth;
    if (name == "mars" || name == "Mars")
        return Planet::Mars;
    throw Error(ErrorCode::IoError, "unknown planetary domain: " + name);
}

LeapSecondTable LeapSecondTable::parse(const std::string& text) {
    LeapSecondTable table;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!strip_line(line))
            continue;
        std::istringstream ls(line);
        Entry e;
        if (!(ls >> e.effective_unix >> e.tai_minus_utc))
            throw Error(ErrorCode::IoError, "malformed leap-second line: " + line);
        if (e.tai_minus_utc < 0)
            throw Error(ErrorCode::IoError, "negative TAI-UTC offset");
        if (!table.entries.empty()) {
            const Entry& prev = table.entries.back();
            if (e.effective_unix <= prev.effective_unix || e.tai_minus_utc <= prev.tai_minus_utc)
                throw Error(ErrorCode::IoError,
                            "leap-second entries must be strictly increasing");
        }
        table.entries.push_back(e);
    }
    return table;
}

LeapSecondTable LeapSecondTable::load(const std::string& path) {
    Bytes raw = read_file(path);
    return parse(std::string(raw.begin(), raw.end()));
}

std::int64_t tai_to_unix_utc(const TaiTimestamp& t, const LeapSecondTable& table) {
    if (table.entries.empty())
        throw Error(ErrorCode::TableGap, "leap-second table is empty");
    std::int64_t base = static_cast<std::int64_t>(t.seconds) - kSeconds1958To1970;
    const LeapSecondTable::Entry* applicable = nullptr;
    for (const auto& e : table.entries) {
        // The entry's offset is in force once the UTC clock it implies has
        // reached the entry's effective instant.
        if (base - e.tai_minus_utc >= e.effective_unix)
            applicable = &e;
    }
    if (!applicable)
        throw Error(ErrorCode::TableGap, "instant precedes the first leap-second entry");
    return base - applicable->tai_minus_utc;
}

OwltEnvelope OwltEnvelope::parse(const std::string& text) {
    OwltEnvelope env;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!strip_line(line))
            continue;
        if (line.find("start_tai") != std::string::npos)
            continue; // header row
        for (char& c : line)
            if (c == ',')
                c = ' ';
        std::istringstream ls(line);
        OwltWindow w;
        if (!(ls >> w.start_tai >> w.end_tai >> w.min_owlt >> w.max_owlt))
            throw Error(ErrorCode::IoError, "malformed OWLT envelope line: " + line);
        if (w.end_tai < w.start_tai || w.max_owlt < w.min_owlt || w.min_owlt < 0)
            throw Error(ErrorCode::IoError, "inconsistent OWLT window bounds");
        env.windows.push_back(w);
    }
    return env;
}

OwltEnvelope OwltEnvelope::load(const std::string& path) {
    Bytes raw = read_file(path);
    return parse(std::string(raw.begin(), raw.end()));
}

const OwltWindow* OwltEnvelope::window_covering(const TaiTimestamp& t) const {
    for (const auto& w : windows)
        if (t.seconds >= w.start_tai && t.seconds <= w.end_tai)
            return &w;
    return nullptr;
}

double tai_real_seconds(const TaiTimestamp& t) {
    double s = static_cast<double>(t.seconds);
    if (t.frac)
        s += static_cast<double>(*t.frac) / 4294967296.0;
    return s;
}

bool within_owlt_envelope(const TaiTimestamp& t_send, const TaiTimestamp& t_recv,
                          const OwltEnvelope& env, double slack_seconds) {
    const OwltWindow* w = env.window_covering(t_send);
    if (!w)
        throw Error(ErrorCode::WindowNotCovered,
                    "no OWLT window covers t_send=" + std::to_string(t_send.seconds));
    double transit = tai_real_seconds(t_recv) - tai_real_seconds(t_send);
    return transit >= static_cast<double>(w->min_owlt) - slack_seconds &&
           transit <= static_cast<double>(w->max_owlt) + slack_seconds;
}

} // namespace pott
