#pragma once

#include "pott/receipt.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pott {

struct RuleFailure {
    std::string rule; // R1 signatures/authorization, R2 identity, R3 times, R4 links
    std::size_t hop = 0;
    std::string detail;

    friend bool operator==(const RuleFailure&, const RuleFailure&) = default;
};

struct VerificationReport {
    bool structural_ok = false;
    std::vector<RuleFailure> failures;
    Digest32 evidence_h{};
    Nonce16 evidence_nu{};
    std::size_t hop_count = 0;
    TaiTimestamp t_first_in;
    TaiTimestamp t_last_out;

    friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

// Structural verification: R1 every signature valid under its allowlisted
// node; R2 uniform (h, nu); R3 intra-hop t_in <= t_out and strict inter-hop
// t_out < next t_in; R4 prev_0 = 0^256 and prev_i = link_hash of hop i-1.
// Every rule is evaluated; the report lists all violations.
VerificationReport verify_structure(const ReceiptChain& chain,
                                    const std::set<NodeId>& allowlist);

using EvidenceKey = std::pair<Digest32, Nonce16>;

// Groups chains by (h, nu): each key is a distinct evidence set, so
// retransmissions under fresh nonces stay separate. Duplicates are retained.
std::map<EvidenceKey, std::vector<ReceiptChain>> evidence_sets(
    const std::vector<ReceiptChain>& chains);

} // namespace pott
