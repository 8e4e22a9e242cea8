#pragma once

#include "pott/receipt.hpp"
#include "pott/timebase.hpp"
#include "pott/verify.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pott {

struct ManifestEntry {
    NodeId node{};
    std::string operator_domain;
    Planet planetary_domain = Planet::Earth;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Signed relay directory: who may appear in chains, which operator runs each
// relay, and which planet it sits on. Wire form is a canonical CBOR map,
// keys 0..6; the signature covers keys 0..5.
struct AllowlistManifest {
    std::uint64_t version = 1;
    std::vector<ManifestEntry> entries;
    std::vector<NodeId> revoked;
    std::uint64_t ttl_hours = 72;
    std::uint64_t issued_at_tai = 0;
    NodeId signer{};
    Sig64 signature{};

    friend bool operator==(const AllowlistManifest&, const AllowlistManifest&) = default;

    const ManifestEntry* find(const NodeId& node) const;
    bool is_revoked(const NodeId& node) const;
    std::set<NodeId> allowlist() const; // listed and not revoked
};

Bytes manifest_signing_bytes(const AllowlistManifest& m);
Bytes encode_manifest(const AllowlistManifest& m);
AllowlistManifest decode_manifest(ByteView bytes); // structure only, no sig check
void sign_manifest(AllowlistManifest& m, const schnorr::Keypair& key);

// Parse + signature check + optional staleness check (stale when
// now_tai > issued_at_tai + ttl_hours * 3600).
AllowlistManifest load_manifest(ByteView bytes, std::optional<std::uint64_t> now_tai);

struct PolicyProfile {
    std::uint64_t min_hops = 3;
    std::uint64_t min_operator_domains = 2;
    bool require_anchor_per_planetary_domain = true;
    double J_seconds = 3600;
    std::uint64_t max_hops = 32;
    std::uint64_t max_chain_bytes = 8192;
    std::uint64_t high_stakes_min_diverse_chains = 2;
    std::uint64_t retention_days = 90;
    double sigma_t_max_seconds = 60;
    double beacon_slack_seconds = 3600;

    void validate() const; // throws IoError on inconsistent knobs
    static PolicyProfile parse(const std::string& text);
    static PolicyProfile load(const std::string& path);
};

enum class Assurance { Full, Downgraded, NonProbative };
const char* assurance_name(Assurance a);

struct PolicyViolation {
    std::string check; // P1..P7
    std::string detail;

    friend bool operator==(const PolicyViolation&, const PolicyViolation&) = default;
};

struct PolicyVerdict {
    bool compliant = false;
    Assurance assurance = Assurance::Downgraded;
    std::vector<PolicyViolation> violations;

    friend bool operator==(const PolicyVerdict&, const PolicyVerdict&) = default;
};

// PoTT-M2 evaluation over a structural report. P1 structure, P2 hop floor,
// P3 operator diversity, P4 beacon anchors per planetary domain, P5 dwell
// and cross-domain transit bounds, P6 size caps (both limbs), P7 listing and
// revocation. NonProbative only for the no-anchor single-operator case.
PolicyVerdict check_profile(const VerificationReport& report, const ReceiptChain& chain,
                            const AllowlistManifest& manifest, const PolicyProfile& profile,
                            const OwltEnvelope& env,
                            const std::vector<BeaconReading>& beacons);

// High-stakes adjudication: at least profile.high_stakes_min_diverse_chains
// compliant chains whose relay operator sets are pairwise disjoint. All
// chains must commit to the same payload digest.
bool check_high_stakes(const std::vector<std::pair<ReceiptChain, PolicyVerdict>>& sets,
                       const AllowlistManifest& manifest, const PolicyProfile& profile);

} // namespace pott
