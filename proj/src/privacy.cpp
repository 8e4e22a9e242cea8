#include "pott/privacy.hpp"

#include "pott/cbor.hpp"
#include "pott/errors.hpp"
#include "pott/verify.hpp"

#include <algorithm>
#include <string>

namespace pott {

TranscriptCommitment commit_transcript(const ReceiptChain& chain) {
    if (chain.receipts.empty())
        throw Error(ErrorCode::EmptyChain, "nothing to commit to");
    Bytes transcript;
    TranscriptCommitment c;
    c.t_min_in = chain.receipts.front().t_in;
    c.t_max_out = chain.receipts.front().t_out;
    for (const Receipt& r : chain.receipts) {
        Bytes enc = encode_receipt(r);
        transcript.insert(transcript.end(), enc.begin(), enc.end());
        if (compare_time(r.t_in, c.t_min_in) < 0)
            c.t_min_in = r.t_in;
        if (compare_time(r.t_out, c.t_max_out) > 0)
            c.t_max_out = r.t_out;
    }
    c.h_txpt = sha256(transcript);
    c.hop_count = chain.receipts.size();
    return c;
}

OpeningResult verify_opening(const TranscriptCommitment& commitment, const ReceiptChain& chain,
                             const std::optional<std::set<NodeId>>& allowlist) {
    OpeningResult res;
    if (chain.receipts.empty()) {
        res.violations.push_back("opened chain is empty");
        return res;
    }

    TranscriptCommitment recomputed = commit_transcript(chain);
    if (!(recomputed.h_txpt == commitment.h_txpt))
        res.violations.push_back("transcript hash does not match the commitment");
    if (recomputed.hop_count != commitment.hop_count)
        res.violations.push_back("hop count " + std::to_string(recomputed.hop_count) +
                                 " does not match committed " +
                                 std::to_string(commitment.hop_count));
    for (std::size_t i = 0; i < chain.receipts.size(); ++i) {
        const Receipt& r = chain.receipts[i];
        if (compare_time(r.t_in, commitment.t_min_in) < 0 ||
            compare_time(r.t_out, commitment.t_max_out) > 0)
            res.violations.push_back("hop " + std::to_string(i) +
                                     " times fall outside the committed aggregate window");
    }

    // membership is unknowable without an allowlist; substitute the chain's
    // own nodes so signature/link/ordering rules still run
    std::set<NodeId> allow;
    if (allowlist) {
        allow = *allowlist;
    } else {
        for (const Receipt& r : chain.receipts)
            allow.insert(r.node);
    }
    VerificationReport report = verify_structure(chain, allow);
    for (const RuleFailure& f : report.failures)
        res.violations.push_back("structural " + f.rule + " at hop " + std::to_string(f.hop) +
                                 ": " + f.detail);

    res.ok = res.violations.empty();
    return res;
}

namespace {

void expect_commitment_key(cbor::Reader& rd, std::uint64_t want) {
    std::uint64_t got = rd.unsigned_int();
    if (got != want)
        throw Error(got <= 3 ? ErrorCode::NonCanonicalEncoding : ErrorCode::UnknownKey,
                    "unexpected commitment key " + std::to_string(got));
}

} // namespace

Bytes encode_commitment(const TranscriptCommitment& c) {
    if (c.hop_count < 1)
        throw Error(ErrorCode::EmptyChain, "commitment must cover at least one hop");
    if (compare_time(c.t_min_in, c.t_max_out) > 0)
        throw Error(ErrorCode::ClockError, "committed window is inverted");
    cbor::Writer w;
    w.map_header(4);
    w.unsigned_int(0);
    w.byte_string(c.h_txpt);
    w.unsigned_int(1);
    write_timestamp_array(w, c.t_min_in);
    w.unsigned_int(2);
    write_timestamp_array(w, c.t_max_out);
    w.unsigned_int(3);
    w.unsigned_int(c.hop_count);
    return w.take();
}

TranscriptCommitment decode_commitment(ByteView bytes) {
    cbor::Reader rd(bytes);
    if (rd.map_header() != 4)
        throw Error(ErrorCode::NonCanonicalEncoding, "commitment must carry keys 0-3");
    TranscriptCommitment c;
    expect_commitment_key(rd, 0);
    ByteView h = rd.byte_string();
    if (h.size() != 32)
        throw_wrong_length(32, h.size());
    std::copy(h.begin(), h.end(), c.h_txpt.begin());
    expect_commitment_key(rd, 1);
    c.t_min_in = read_timestamp_array(rd);
    expect_commitment_key(rd, 2);
    c.t_max_out = read_timestamp_array(rd);
    expect_commitment_key(rd, 3);
    c.hop_count = rd.unsigned_int();
    if (!rd.done())
        throw Error(ErrorCode::NonCanonicalEncoding, "trailing bytes after commitment");
    if (compare_time(c.t_min_in, c.t_max_out) > 0)
        throw Error(ErrorCode::ClockError, "committed window is inverted");
    if (c.hop_count < 1)
        throw Error(ErrorCode::EmptyChain, "commitment must cover at least one hop");
    return c;
}

} // namespace pott
