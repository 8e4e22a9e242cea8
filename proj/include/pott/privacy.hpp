#pragma once

#include "pott/receipt.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pott {

// Routine attestation under commit-and-reveal: a transcript hash plus three
// aggregates. Deliberately reveals nothing else about the path.
struct TranscriptCommitment {
    Digest32 h_txpt{};
    TaiTimestamp t_min_in;
    TaiTimestamp t_max_out;
    std::uint64_t hop_count = 0;

    friend bool operator==(const TranscriptCommitment&, const TranscriptCommitment&) = default;
};

// h_txpt = SHA-256 over the concatenated full receipt encodings (signatures
// included) in index order. Throws EmptyChain.
TranscriptCommitment commit_transcript(const ReceiptChain& chain);

struct OpeningResult {
    bool ok = false;
    std::vector<std::string> violations;
};

// Dispute-time opening check: recomputed h_txpt matches, every hop's times lie
// within [t_min_in, t_max_out], hop_count matches, and the chain passes
// structural verification. With no allowlist, relay membership is not checked
// (signatures and links still are); policy bounds are the policy module's job.
OpeningResult verify_opening(const TranscriptCommitment& commitment, const ReceiptChain& chain,
                             const std::optional<std::set<NodeId>>& allowlist = std::nullopt);

// .pottp file form: canonical CBOR map {0: h_txpt, 1: t_min_in, 2: t_max_out,
// 3: hop_count}.
Bytes encode_commitment(const TranscriptCommitment& c);
TranscriptCommitment decode_commitment(ByteView bytes);

} // namespace pott
