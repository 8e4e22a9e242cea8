#include "pott/btc.hpp"

#include "pott/cbor.hpp"
#include "pott/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace pott {

BlockHeader parse_header(ByteView raw80, std::uint64_t height) {
    if (raw80.size() != 80)
        throw_wrong_length(80, raw80.size());
    BlockHeader h;
    std::copy(raw80.begin(), raw80.end(), h.raw.begin());
    h.height = height;
    h.timestamp = static_cast<std::uint32_t>(h.raw[68]) |
                  static_cast<std::uint32_t>(h.raw[69]) << 8 |
                  static_cast<std::uint32_t>(h.raw[70]) << 16 |
                  static_cast<std::uint32_t>(h.raw[71]) << 24;
    return h;
}

MtpParams MtpParams::make(double J_seconds, double sigma_t_seconds, std::uint64_t h_expiry,
                          std::optional<double> delta_seconds, double delta_mtp_seconds,
                          std::uint64_t kappa_blocks, std::uint64_t mtp_window_blocks) {
    if (J_seconds < 0 || sigma_t_seconds < 0)
        throw Error(ErrorCode::IoError, "jitter and sigma bounds must be nonnegative");
    double floor = J_seconds + 2 * sigma_t_seconds;
    double delta = delta_seconds.value_or(floor);
    if (delta < floor)
        throw Error(ErrorCode::IoError, "delta below the J + 2*sigma_t floor");
    MtpParams p;
    p.delta_seconds = delta;
    p.delta_mtp_seconds = delta_mtp_seconds;
    p.kappa_blocks = kappa_blocks;
    p.h_expiry = h_expiry;
    p.mtp_window_blocks = mtp_window_blocks;
    return p;
}

std::int64_t median_time_past(const std::vector<BlockHeader>& headers) {
    if (headers.empty())
        throw Error(ErrorCode::EmptyInput, "median time past of zero headers");
    std::size_t count = std::min<std::size_t>(headers.size(), 11);
    std::vector<std::uint32_t> stamps;
    stamps.reserve(count);
    for (std::size_t i = headers.size() - count; i < headers.size(); ++i)
        stamps.push_back(headers[i].timestamp);
    std::sort(stamps.begin(), stamps.end());
    return stamps[count / 2];
}

const char* adjudication_name(Adjudication a) {
    return a == Adjudication::Accept ? "accept" : "reject";
}

ExpiryDecision arrived_before_expiry(const TaiTimestamp& t_star_tai, const BlockHeader& tip,
                                     std::int64_t tip_mtp, const MtpParams& params,
                                     const LeapSecondTable& table) {
    ExpiryDecision d;
    d.t_star_utc = tai_to_unix_utc(t_star_tai, table);
    d.mtp = tip_mtp;
    d.tip_height = tip.height;

    // strict-total order over reals; all operands stay well under 2^53
    bool time_ok = static_cast<double>(d.t_star_utc) + params.delta_seconds <=
                   static_cast<double>(tip_mtp) + params.delta_mtp_seconds;
    bool height_ok = tip.height + params.kappa_blocks <= params.h_expiry;

    std::ostringstream why;
    if (time_ok && height_ok) {
        d.verdict = Adjudication::Accept;
        why << "accept: t*+delta precedes MTP+slack by "
            << (static_cast<double>(tip_mtp) + params.delta_mtp_seconds -
                static_cast<double>(d.t_star_utc) - params.delta_seconds)
            << " s; " << (params.h_expiry - params.kappa_blocks - tip.height)
            << " block(s) before expiry";
    } else {
        d.verdict = Adjudication::Reject;
        why << "reject:";
        if (!time_ok)
            why << " time branch failed (t* " << d.t_star_utc << " + delta "
                << params.delta_seconds << " exceeds MTP " << tip_mtp << " + "
                << params.delta_mtp_seconds << ")";
        if (!height_ok)
            why << " height branch failed (tip " << tip.height << " past expiry "
                << params.h_expiry << " - kappa " << params.kappa_blocks << ")";
    }
    d.rationale = why.str();
    return d;
}

DriftBound mtp_drift_bound(const std::vector<BlockHeader>& headers) {
    if (headers.size() < 11)
        throw Error(ErrorCode::WindowTooShort,
                    "drift estimation needs a full 11-header window, got " +
                        std::to_string(headers.size()));
    DriftBound bound;
    bound.first_height = headers.front().height;
    bound.last_height = headers.back().height;
    std::vector<BlockHeader> prefix;
    prefix.reserve(headers.size());
    for (const auto& h : headers) {
        prefix.push_back(h);
        std::int64_t mtp = median_time_past(prefix);
        std::int64_t drift = std::llabs(mtp - static_cast<std::int64_t>(h.timestamp));
        bound.max_drift_seconds = std::max(bound.max_drift_seconds, drift);
    }
    return bound;
}

std::vector<BlockHeader> load_headers(const std::string& bin_path,
                                      const std::string& sidecar_path) {
    Bytes raw = read_file(bin_path);
    if (raw.size() % 80 != 0)
        throw_wrong_length(80 * (raw.size() / 80 + 1), raw.size());

    Bytes side = read_file(sidecar_path);
    std::istringstream in(std::string(side.begin(), side.end()));
    std::string line;
    std::optional<std::uint64_t> start;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        if (trim(line.substr(0, eq)) == "start_height") {
            try {
                start = std::stoull(trim(line.substr(eq + 1)));
            } catch (...) {
                throw Error(ErrorCode::IoError, "bad start_height in " + sidecar_path);
            }
        }
    }
    if (!start)
        throw Error(ErrorCode::IoError, "sidecar lacks start_height: " + sidecar_path);

    std::vector<BlockHeader> out;
    out.reserve(raw.size() / 80);
    for (std::size_t off = 0; off < raw.size(); off += 80)
        out.push_back(parse_header(ByteView(raw).subspan(off, 80), *start + off / 80));
    return out;
}

void store_headers(const std::vector<BlockHeader>& headers, const std::string& bin_path,
                   const std::string& sidecar_path) {
    if (headers.empty())
        throw Error(ErrorCode::EmptyInput, "no headers to store");
    Bytes raw;
    raw.reserve(headers.size() * 80);
    for (const auto& h : headers)
        raw.insert(raw.end(), h.raw.begin(), h.raw.end());
    write_file(bin_path, raw);
    std::string side = "start_height = " + std::to_string(headers.front().height) + "\n";
    write_file(sidecar_path, Bytes(side.begin(), side.end()));
}

namespace {

void expect_bundle_key(cbor::Reader& rd, std::uint64_t want) {
    std::uint64_t got = rd.unsigned_int();
    if (got != want)
        throw Error(got <= 6 ? ErrorCode::NonCanonicalEncoding : ErrorCode::UnknownKey,
                    "unexpected dispute-bundle key " + std::to_string(got));
}

} // namespace

Bytes encode_dispute_bundle(const DisputeBundle& b) {
    if (b.mtp < 0)
        throw Error(ErrorCode::IoError, "negative MTP is not encodable");
    cbor::Writer w;
    w.map_header(7);
    w.unsigned_int(0);
    w.byte_string(encode_chain(b.chain));
    w.unsigned_int(1);
    w.unsigned_int(b.verdict == Adjudication::Accept ? 1 : 0);
    w.unsigned_int(2);
    write_timestamp_array(w, b.t_star);
    w.unsigned_int(3);
    w.unsigned_int(b.tip_height);
    w.unsigned_int(4);
    w.unsigned_int(static_cast<std::uint64_t>(b.mtp));
    w.unsigned_int(5);
    w.array_header(2);
    w.unsigned_int(b.window_range.first);
    w.unsigned_int(b.window_range.second);
    w.unsigned_int(6);
    w.array_header(b.beacon_ids.size());
    for (const auto& id : b.beacon_ids)
        w.text_string(id);
    return w.take();
}

DisputeBundle decode_dispute_bundle(ByteView bytes) {
    cbor::Reader rd(bytes);
    if (rd.map_header() != 7)
        throw Error(ErrorCode::NonCanonicalEncoding, "dispute bundle must carry keys 0-6");
    DisputeBundle b;
    expect_bundle_key(rd, 0);
    b.chain = decode_chain(rd.byte_string());
    expect_bundle_key(rd, 1);
    std::uint64_t v = rd.unsigned_int();
    if (v > 1)
        throw Error(ErrorCode::NonCanonicalEncoding, "verdict must be 0 or 1");
    b.verdict = v ? Adjudication::Accept : Adjudication::Reject;
    expect_bundle_key(rd, 2);
    b.t_star = read_timestamp_array(rd);
    expect_bundle_key(rd, 3);
    b.tip_height = rd.unsigned_int();
    expect_bundle_key(rd, 4);
    b.mtp = static_cast<std::int64_t>(rd.unsigned_int());
    expect_bundle_key(rd, 5);
    if (rd.array_header() != 2)
        throw Error(ErrorCode::NonCanonicalEncoding, "window range must be a pair");
    b.window_range.first = rd.unsigned_int();
    b.window_range.second = rd.unsigned_int();
    expect_bundle_key(rd, 6);
    std::uint64_t ids = rd.array_header();
    for (std::uint64_t i = 0; i < ids; ++i)
        b.beacon_ids.push_back(rd.text_string());
    if (!rd.done())
        throw Error(ErrorCode::NonCanonicalEncoding, "trailing bytes after dispute bundle");
    return b;
}

} // namespace pott
