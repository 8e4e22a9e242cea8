#include "pott/verify.hpp"

#include "pott/errors.hpp"
#include "pott/schnorr.hpp"

namespace pott {

namespace {

std::string hop_word(std::size_t i) { return "hop " + std::to_string(i); }

} // namespace

VerificationReport verify_structure(const ReceiptChain& chain,
                                    const std::set<NodeId>& allowlist) {
    if (chain.receipts.empty())
        throw Error(ErrorCode::EmptyChain, "nothing to verify");

    const auto& rs = chain.receipts;
    VerificationReport report;
    report.evidence_h = rs[0].h;
    report.evidence_nu = rs[0].nu;
    report.hop_count = rs.size();
    report.t_first_in = rs[0].t_in;
    report.t_last_out = rs.back().t_out;
    auto fail = [&](const char* rule, std::size_t hop, std::string detail) {
        report.failures.push_back(RuleFailure{rule, hop, std::move(detail)});
    };

    // R1: signatures under authorized relay keys
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (!allowlist.contains(rs[i].node))
            fail("R1", i, hop_word(i) + " signed by non-allowlisted node");
        if (!schnorr::verify(signing_message(rs[i]), rs[i].sig, rs[i].node))
            fail("R1", i, hop_word(i) + " signature invalid");
    }

    // R2: every receipt carries the originator's (h, nu)
    for (std::size_t i = 1; i < rs.size(); ++i) {
        if (!(rs[i].h == rs[0].h))
            fail("R2", i, hop_word(i) + " payload digest differs from hop 0");
        if (!(rs[i].nu == rs[0].nu))
            fail("R2", i, hop_word(i) + " nonce differs from hop 0");
    }

    // R3: intra-hop and strict inter-hop time ordering
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (compare_time(rs[i].t_in, rs[i].t_out) == std::strong_ordering::greater)
            fail("R3", i, hop_word(i) + " has t_in after t_out");
        if (i > 0 &&
            compare_time(rs[i - 1].t_out, rs[i].t_in) != std::strong_ordering::less)
            fail("R3", i, hop_word(i) + " t_in not strictly after previous t_out");
    }

    // R4: prev links
    if (!(rs[0].prev == zero_prev()))
        fail("R4", 0, "origin prev is not the all-zero string");
    for (std::size_t i = 1; i < rs.size(); ++i) {
        if (!(rs[i].prev == link_hash(rs[i - 1])))
            fail("R4", i, hop_word(i) + " prev does not match hash of hop " +
                              std::to_string(i - 1));
    }

    report.structural_ok = report.failures.empty();
    return report;
}

std::map<EvidenceKey, std::vector<ReceiptChain>> evidence_sets(
    const std::vector<ReceiptChain>& chains) {
    std::map<EvidenceKey, std::vector<ReceiptChain>> sets;
    for (const auto& chain : chains) {
        if (chain.receipts.empty())
            continue;
        sets[{chain.receipts[0].h, chain.receipts[0].nu}].push_back(chain);
    }
    return sets;
}

} // namespace pott
