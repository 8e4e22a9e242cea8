#pragma once

#include "pott/receipt.hpp"
#include "pott/timebase.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pott {

struct BlockHeader {
    std::array<std::uint8_t, 80> raw{};
    std::uint64_t height = 0;
    std::uint32_t timestamp = 0; // little-endian u32 at raw offset 68

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

BlockHeader parse_header(ByteView raw80, std::uint64_t height); // throws WrongLength

// Adjudication parameters. delta_seconds must dominate J + 2*sigma_t, which is
// also its default; build through make() so the bound is checked.
struct MtpParams {
    double delta_seconds = 0;        // safety margin added to t*
    double delta_mtp_seconds = 3600; // tolerated MTP lag
    std::uint64_t kappa_blocks = 0;  // confirmation depth held back from expiry
    std::uint64_t h_expiry = 0;
    std::uint64_t mtp_window_blocks = 4032; // drift-estimation window

    static MtpParams make(double J_seconds, double sigma_t_seconds, std::uint64_t h_expiry,
                          std::optional<double> delta_seconds = std::nullopt,
                          double delta_mtp_seconds = 3600, std::uint64_t kappa_blocks = 0,
                          std::uint64_t mtp_window_blocks = 4032); // throws IoError
};

// BIP-113 median time past over the last min(11, count) of the given headers.
// Median = sorted[count/2]. Throws EmptyInput.
std::int64_t median_time_past(const std::vector<BlockHeader>& headers);

enum class Adjudication { Reject, Accept };
const char* adjudication_name(Adjudication a);

struct ExpiryDecision {
    Adjudication verdict = Adjudication::Reject;
    std::string rationale; // names the branch(es) that failed, or the accept slack
    std::int64_t t_star_utc = 0;
    std::int64_t mtp = 0;
    std::uint64_t tip_height = 0;

    friend bool operator==(const ExpiryDecision&, const ExpiryDecision&) = default;
};

// Accept iff t*_utc + delta <= mtp + delta_mtp and tip.height + kappa <=
// h_expiry. TableGap propagates from the TAI->UTC conversion.
ExpiryDecision arrived_before_expiry(const TaiTimestamp& t_star_tai, const BlockHeader& tip,
                                     std::int64_t tip_mtp, const MtpParams& params,
                                     const LeapSecondTable& table);

struct DriftBound {
    std::int64_t max_drift_seconds = 0; // max over the window of |MTP_i - ts_i|
    std::uint64_t first_height = 0;     // exact block range used
    std::uint64_t last_height = 0;

    friend bool operator==(const DriftBound&, const DriftBound&) = default;
};

// Empirical MTP-vs-timestamp drift over a header window; needs at least the
// 11 headers of one full MTP window, else WindowTooShort.
DriftBound mtp_drift_bound(const std::vector<BlockHeader>& headers);

// Concatenated raw 80-byte headers plus a sidecar text file assigning the
// first header's height (`start_height = N`).
std::vector<BlockHeader> load_headers(const std::string& bin_path,
                                      const std::string& sidecar_path);
void store_headers(const std::vector<BlockHeader>& headers, const std::string& bin_path,
                   const std::string& sidecar_path);

struct DisputeBundle {
    ReceiptChain chain;
    Adjudication verdict = Adjudication::Reject;
    TaiTimestamp t_star;
    std::uint64_t tip_height = 0;
    std::int64_t mtp = 0;
    std::pair<std::uint64_t, std::uint64_t> window_range{0, 0};
    std::vector<std::string> beacon_ids;

    friend bool operator==(const DisputeBundle&, const DisputeBundle&) = default;
};

Bytes encode_dispute_bundle(const DisputeBundle& b);
DisputeBundle decode_dispute_bundle(ByteView bytes);

} // namespace pott
