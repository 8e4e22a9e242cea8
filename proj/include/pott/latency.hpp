#pragma once

#include <cstdint>
#include <string>

namespace pott {

// Inputs to the CLTV margin calculation. Minutes may carry one decimal place
// (the supported grid); internal arithmetic is exact in 0.1-second units so
// equality cases land exactly on the step.
struct TimelockInputs {
    double owlt_minutes = 0;
    double J_minutes = 0;
    double b_target_minutes = 10;
    std::uint64_t B_base_blocks = 144;
    std::uint64_t M_op_blocks = 2;

    void validate() const; // throws IoError
};

// ceil((RTT + J) / b_target) with RTT = 2*owlt; exact at k*b_target.
std::uint64_t cltv_extra_blocks(const TimelockInputs& in);

// B_base + extra + M_op.
std::uint64_t cltv_total_blocks(const TimelockInputs& in);

// ceil(t / 512) relative-locktime units (BIP-68 time granularity).
std::uint64_t csv_sequence_units(double t_seconds); // throws IoError when negative

struct LinkBudget {
    double bytes_per_year = 0;
    double sustained_bps = 0; // over a 365-day year
};

LinkBudget link_budget(std::uint64_t blocks_per_year, double bytes_per_block);

struct StaleBoundInputs {
    double max_owlt_minutes = 0;
    double margin_minutes = 0;
    double epsilon = 0.05; // tolerated stale rate; (0,1], 1 = degenerate bound D

    void validate() const; // throws IoError
};

// Fair-interval lower bound (2*max_owlt + M) / epsilon, in minutes; exact
// when the quotient is integral.
double stale_fair_interval(const StaleBoundInputs& in);

// p(b) = 1 - exp(-D/b) with D = 2*max_owlt + M, the stale-probability model
// behind the bound.
double stale_probability(const StaleBoundInputs& in, double b_minutes);

// Step table: owlt_min,J,delta_blocks for J in {0,30,60}, OWLT 0..22.0 min in
// 0.1-minute steps.
std::string fig3_table_csv();

} // namespace pott
