#include "pott/latency.hpp"

#include "pott/errors.hpp"

#include <cmath>
#include <sstream>

namespace pott {

namespace {

// nearest 0.1 s; all supported inputs sit exactly on this grid
std::int64_t deciseconds_from_minutes(double minutes) {
    return std::llround(minutes * 600.0);
}

std::uint64_t ceil_div(std::uint64_t num, std::uint64_t den) {
    return num == 0 ? 0 : (num - 1) / den + 1;
}

} // namespace

void TimelockInputs::validate() const {
    if (owlt_minutes < 0 || J_minutes < 0)
        throw Error(ErrorCode::IoError, "owlt and jitter must be nonnegative");
    if (b_target_minutes <= 0)
        throw Error(ErrorCode::IoError, "block target must be positive");
}

std::uint64_t cltv_extra_blocks(const TimelockInputs& in) {
    in.validate();
    std::uint64_t numer = static_cast<std::uint64_t>(2 * deciseconds_from_minutes(in.owlt_minutes) +
                                                     deciseconds_from_minutes(in.J_minutes));
    std::uint64_t denom = static_cast<std::uint64_t>(deciseconds_from_minutes(in.b_target_minutes));
    return ceil_div(numer, denom);
}

std::uint64_t cltv_total_blocks(const TimelockInputs& in) {
    return in.B_base_blocks + cltv_extra_blocks(in) + in.M_op_blocks;
}

std::uint64_t csv_sequence_units(double t_seconds) {
    if (t_seconds < 0)
        throw Error(ErrorCode::IoError, "locktime cannot be negative");
    std::uint64_t ds = static_cast<std::uint64_t>(std::llround(t_seconds * 10.0));
    return ceil_div(ds, 5120); // 512 s in 0.1-s units
}

LinkBudget link_budget(std::uint64_t blocks_per_year, double bytes_per_block) {
    if (bytes_per_block < 0)
        throw Error(ErrorCode::IoError, "bytes per block must be nonnegative");
    LinkBudget b;
    b.bytes_per_year = static_cast<double>(blocks_per_year) * bytes_per_block;
    b.sustained_bps = b.bytes_per_year * 8.0 / 31'536'000.0;
    return b;
}

void StaleBoundInputs::validate() const {
    if (max_owlt_minutes < 0 || margin_minutes < 0)
        throw Error(ErrorCode::IoError, "owlt and margin must be nonnegative");
    if (!(epsilon > 0) || epsilon > 1)
        throw Error(ErrorCode::IoError, "epsilon must lie in (0, 1]");
}

double stale_fair_interval(const StaleBoundInputs& in) {
    in.validate();
    // micro-minute / ppb integer scaling keeps decimal inputs exact, so e.g.
    // 44 / 0.05 comes out as precisely 880
    std::int64_t d_micro =
        2 * std::llround(in.max_owlt_minutes * 1e6) + std::llround(in.margin_minutes * 1e6);
    std::int64_t eps_ppb = std::llround(in.epsilon * 1e9);
    return static_cast<double>(d_micro) * 1000.0 / static_cast<double>(eps_ppb);
}

double stale_probability(const StaleBoundInputs& in, double b_minutes) {
    if (b_minutes <= 0)
        throw Error(ErrorCode::IoError, "block interval must be positive");
    double D = 2 * in.max_owlt_minutes + in.margin_minutes;
    return 1.0 - std::exp(-D / b_minutes);
}

std::string fig3_table_csv() {
    std::ostringstream out;
    out << "owlt_min,J,delta_blocks\n";
    for (int J : {0, 30, 60}) {
        for (int i = 0; i <= 220; ++i) {
            TimelockInputs in;
            in.owlt_minutes = i / 10.0;
            in.J_minutes = J;
            out << i / 10 << '.' << i % 10 << ',' << J << ',' << cltv_extra_blocks(in) << '\n';
        }
    }
    return out.str();
}

} // namespace pott
