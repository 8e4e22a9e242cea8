#pragma once

#include "pott/btc.hpp"
#include "pott/policy.hpp"
#include "pott/receipt.hpp"
#include "pott/timebase.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pott {

// xoshiro256** seeded through splitmix64, per Blackman & Vigna. Named and
// pinned so fixture generation is reproducible from the 64-bit seed alone;
// ports in other languages can regenerate the corpus bit-for-bit.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed);
    std::uint64_t next();
    // Uniform in [0, bound). Plain modulo: the tiny bias is irrelevant for
    // fixtures and keeps the draw sequence trivial to port.
    std::uint64_t below(std::uint64_t bound);
    double unit(); // [0, 1), 53-bit mantissa

private:
    std::uint64_t s_[4];
};

struct RelaySpec {
    std::string operator_domain;
    Planet planet = Planet::Earth;
};

struct BeaconSpec {
    std::string id;
    Planet planet = Planet::Earth;
    double sigma_t_seconds = 5;
    std::int64_t tai_offset = 600; // reading time relative to scenario t0
};

// Hand-derived verdict a fixture author freezes into the scenario file; the
// integration harness compares the real verifier/policy output against it.
struct ExpectedLabel {
    std::string action;
    int chain_index = -1; // filled in by run_scenario; -1 = not delivered
    bool delivered = true;
    bool compliant = true;
    std::string assurance = "full";
    std::vector<std::string> structural_rules; // distinct rule ids, sorted
    std::vector<std::string> violated_checks;  // distinct check ids, sorted
    int shares_evidence_key_with = -1;         // chain index, -1 = none

    friend bool operator==(const ExpectedLabel&, const ExpectedLabel&) = default;
};

// One step of the adversary script. `kind` selects which of the index/flag
// fields apply:
//   honest                          —
//   backdate      hop, seconds, resign
//   truncate      after_hop
//   sybil_insert  hop (>= 1), resign
//   nonce_reuse   reuse_of (chain index whose (h, nu) is reused)
//   splice        chain_a, chain_b, cut_hop, resign
//   drop          after_hop (receipts are minted, then the bundle is lost)
// "resign" models relay collusion: the mutated hop and everything downstream
// is re-linked and re-signed, so only time/policy checks can catch it. With
// resign=false the bytes are left inconsistent and R1/R4 fire.
struct AdversaryAction {
    std::string kind;
    std::size_t hop = 0;
    std::int64_t seconds = 0; // backdate shift, positive = earlier
    bool resign = true;
    std::size_t after_hop = 0;
    std::size_t reuse_of = 0;
    std::size_t chain_a = 0;
    std::size_t chain_b = 0;
    std::size_t cut_hop = 0;
    std::vector<std::size_t> route; // overrides the scenario route when set
    ExpectedLabel expect;
};

// Fully self-contained scenario: seed, roster, route, envelope, beacons,
// policy knobs, adversary script. The seed determines every output byte.
//
// JSON form (Scenario::parse_json):
//   {
//     "seed": 7, "t0_tai": 2080000000, "payload_kind": "generic",
//     "max_dwell_seconds": 60, "same_planet_transit_max": 60,
//     "manifest_ttl_hours": 720,
//     "relays": [{"operator": "a.net", "planet": "earth"}, ...],
//     "route": [0, 1, 2],
//     "owlt_windows": [{"start_tai": ..., "end_tai": ..., "min_owlt": 180,
//                       "max_owlt": 1320}],
//     "beacons": [{"id": "e1", "planet": "earth", "sigma_t_seconds": 5,
//                  "tai_offset": 600}],
//     "profile": {"min_hops": 3, ...},          // optional knob overrides
//     "actions": [{"do": "honest", "expect": {...}}, ...]
//   }
// Unknown keys anywhere are rejected (ScenarioInvalid) so fixture typos
// cannot silently weaken a test.
struct Scenario {
    std::uint64_t seed = 0;
    DigestKind payload_kind = DigestKind::Generic;
    std::uint64_t t0_tai = 0;
    std::uint64_t max_dwell_seconds = 60;
    std::uint64_t same_planet_transit_max = 60;
    std::uint64_t manifest_ttl_hours = 720;
    std::vector<RelaySpec> relays;
    std::vector<std::size_t> route;
    OwltEnvelope envelope;
    std::vector<BeaconSpec> beacons;
    PolicyProfile profile;
    std::vector<AdversaryAction> actions;

    static Scenario parse_json(const std::string& text); // throws ScenarioInvalid
    static Scenario load(const std::string& path);       // IoError on unreadable file
};

struct SimOutput {
    std::vector<ReceiptChain> chains; // delivery order
    std::vector<BeaconReading> beacons;
    std::vector<ExpectedLabel> labels; // one per action, script order
    AllowlistManifest manifest;        // signed roster for the scenario relays
    PolicyProfile profile;
    OwltEnvelope envelope;
};

// Deterministic scenario execution. Honest chains are built exclusively via
// originate_chain/append_hop; adversarial chains start from an honest chain
// and are then mutated at the wire level (fields edited, signatures left
// stale unless the action says the relays collude and re-sign).
SimOutput run_scenario(const Scenario& s); // throws ScenarioInvalid

// Synthetic header chain for expiry adjudication fixtures: real 80-byte
// headers whose prev-hash fields actually link, heights from 840000.
// Exponential inter-block times with the given mean (floored at 1 s), or
// exact constant spacing when exponential = false. start_timestamp = 0 picks
// a seed-jittered base around 1.7e9; a nonzero value is used exactly.
std::vector<BlockHeader> synth_header_chain(std::uint64_t seed, std::size_t count,
                                            double mean_interval_seconds,
                                            bool exponential = true,
                                            std::uint64_t start_timestamp = 0);

// Beacon-reading file format shared by the corpus and the CLI: a JSON array
// of {beacon_id, planet, tai_seconds, [tai_frac], sigma_t_seconds}.
std::string beacons_to_json(const std::vector<BeaconReading>& beacons);
std::vector<BeaconReading> beacons_from_json(const std::string& text); // IoError

// Writes a verification corpus under out_dir:
//   chains/chain_<i>.pottc        encoded receipt chains
//   commitments/chain_<i>.pottp   transcript commitments for each chain
//   manifest.pottm, profile.txt, envelope.csv, beacons.json
//   headers.bin + headers.start.txt   synthetic header chain (seed-derived)
//   expected.json                 frozen labels, one object per action
// Byte-identical for identical SimOutput.
void write_corpus(const SimOutput& out, const Scenario& s, const std::string& out_dir);

} // namespace pott
