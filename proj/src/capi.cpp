#include "pott.h"

#include "pott/btc.hpp"
#include "pott/errors.hpp"
#include "pott/latency.hpp"
#include "pott/policy.hpp"
#include "pott/privacy.hpp"
#include "pott/schnorr.hpp"
#include "pott/sim.hpp"
#include "pott/timebase.hpp"
#include "pott/verify.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <memory>
#include <random>
#include <set>
#include <string>

using nlohmann::json;

// Opaque handle bodies. Each wraps exactly one core object so the C surface
// stays a thin shell over the C++ library.
struct pott_chain {
    pott::ReceiptChain v;
};
struct pott_manifest {
    pott::AllowlistManifest v;
};
struct pott_profile {
    pott::PolicyProfile v;
};
struct pott_envelope {
    pott::OwltEnvelope v;
};
struct pott_beacons {
    std::vector<pott::BeaconReading> v;
};

namespace {

thread_local std::string g_last_error;

// Status mapping for library errors. Semantic rejections of well-formed
// inputs report 1; anything the decoder or filesystem refused reports 3;
// scenario validation is the usage surface, 2.
int map_code(pott::ErrorCode c) {
    switch (c) {
    case pott::ErrorCode::ScenarioInvalid:
        return 2;
    case pott::ErrorCode::ManifestSignatureInvalid:
    case pott::ErrorCode::ManifestStale:
    case pott::ErrorCode::MixedPayload:
    case pott::ErrorCode::WindowNotCovered:
    case pott::ErrorCode::WindowTooShort:
        return 1;
    default:
        return 3;
    }
}

template <typename F>
int guarded(F&& f) {
    g_last_error.clear();
    try {
        return f();
    } catch (const pott::Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return 3;
    }
}

int usage_error(const char* what) {
    g_last_error = what;
    return 2;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void emit(char** slot, const json& j) {
    if (slot)
        *slot = dup_string(j.dump());
}

std::string load_text(const char* path) {
    pott::Bytes raw = pott::read_file(path);
    return {raw.begin(), raw.end()};
}

json time_json(const pott::TaiTimestamp& t) {
    json j;
    j["seconds"] = t.seconds;
    if (t.frac)
        j["frac"] = *t.frac;
    return j;
}

json structure_json(const pott::VerificationReport& r) {
    json j;
    j["structural_ok"] = r.structural_ok;
    json fails = json::array();
    for (const auto& f : r.failures)
        fails.push_back({{"rule", f.rule}, {"hop", f.hop}, {"detail", f.detail}});
    j["failures"] = std::move(fails);
    j["hop_count"] = r.hop_count;
    j["evidence_h"] = pott::to_hex(pott::ByteView(r.evidence_h.data(), r.evidence_h.size()));
    j["evidence_nu"] =
        pott::to_hex(pott::ByteView(r.evidence_nu.data(), r.evidence_nu.size()));
    j["t_first_in"] = time_json(r.t_first_in);
    j["t_last_out"] = time_json(r.t_last_out);
    return j;
}

json policy_json(const pott::PolicyVerdict& v) {
    json j;
    j["compliant"] = v.compliant;
    j["assurance"] = pott::assurance_name(v.assurance);
    json viols = json::array();
    for (const auto& viol : v.violations)
        viols.push_back({{"check", viol.check}, {"detail", viol.detail}});
    j["violations"] = std::move(viols);
    return j;
}

json chain_report(const pott_chain* chain, const pott_manifest* manifest,
                  const pott_profile* profile, const pott_envelope* envelope,
                  const pott_beacons* beacons, bool& compliant) {
    auto report = pott::verify_structure(chain->v, manifest->v.allowlist());
    auto verdict = pott::check_profile(report, chain->v, manifest->v, profile->v,
                                       envelope->v, beacons ? beacons->v
                                                            : std::vector<pott::BeaconReading>{});
    compliant = verdict.compliant;
    json j = structure_json(report);
    j["policy"] = policy_json(verdict);
    return j;
}

} // namespace

extern "C" {

const char* pott_last_error(void) { return g_last_error.c_str(); }

void pott_string_free(char* s) { delete[] s; }

/* ---- artifact loading ------------------------------------------------- */

int pott_chain_load(const char* path, pott_chain** out) {
    if (!path || !out)
        return usage_error("pott_chain_load: null argument");
    return guarded([&] {
        auto c = std::make_unique<pott_chain>();
        c->v = pott::decode_chain(pott::read_file(path));
        *out = c.release();
        return 0;
    });
}

void pott_chain_free(pott_chain* c) { delete c; }

int pott_manifest_load(const char* path, uint64_t now_tai, int check_staleness,
                       pott_manifest** out) {
    if (!path || !out)
        return usage_error("pott_manifest_load: null argument");
    return guarded([&] {
        auto m = std::make_unique<pott_manifest>();
        m->v = pott::load_manifest(pott::read_file(path),
                                   check_staleness ? std::optional<uint64_t>(now_tai)
                                                   : std::nullopt);
        *out = m.release();
        return 0;
    });
}

void pott_manifest_free(pott_manifest* m) { delete m; }

int pott_profile_load(const char* path, pott_profile** out) {
    if (!path || !out)
        return usage_error("pott_profile_load: null argument");
    return guarded([&] {
        auto p = std::make_unique<pott_profile>();
        p->v = pott::PolicyProfile::load(path);
        *out = p.release();
        return 0;
    });
}

void pott_profile_free(pott_profile* p) { delete p; }

int pott_envelope_load(const char* path, pott_envelope** out) {
    if (!path || !out)
        return usage_error("pott_envelope_load: null argument");
    return guarded([&] {
        auto e = std::make_unique<pott_envelope>();
        e->v = pott::OwltEnvelope::load(path);
        *out = e.release();
        return 0;
    });
}

void pott_envelope_free(pott_envelope* e) { delete e; }

int pott_beacons_load(const char* path, pott_beacons** out) {
    if (!path || !out)
        return usage_error("pott_beacons_load: null argument");
    return guarded([&] {
        auto b = std::make_unique<pott_beacons>();
        b->v = pott::beacons_from_json(load_text(path));
        *out = b.release();
        return 0;
    });
}

void pott_beacons_free(pott_beacons* b) { delete b; }

/* ---- keys ------------------------------------------------------------- */

int pott_keygen(const uint8_t* seed32, char** secret_hex, char** public_hex) {
    if (!secret_hex || !public_hex)
        return usage_error("pott_keygen: null output argument");
    return guarded([&] {
        std::array<std::uint8_t, 32> secret{};
        if (seed32) {
            std::memcpy(secret.data(), seed32, 32);
        } else {
            std::random_device rd;
            for (std::size_t i = 0; i < 32; i += 4) {
                std::uint32_t v = rd();
                std::memcpy(secret.data() + i, &v, 4);
            }
        }
        for (;;) {
            try {
                pott::schnorr::Keypair kp = pott::schnorr::keypair_from_secret(secret);
                *secret_hex =
                    dup_string(pott::to_hex(pott::ByteView(secret.data(), secret.size())));
                *public_hex =
                    dup_string(pott::to_hex(pott::ByteView(kp.pub.data(), kp.pub.size())));
                return 0;
            } catch (const pott::Error&) {
                // out-of-range scalar: re-derive deterministically
                pott::Digest32 h =
                    pott::sha256(pott::ByteView(secret.data(), secret.size()));
                std::copy(h.begin(), h.end(), secret.begin());
            }
        }
    });
}

/* ---- verification ----------------------------------------------------- */

int pott_verify(const pott_chain* chain, const pott_manifest* manifest,
                const pott_profile* profile, const pott_envelope* envelope,
                const pott_beacons* beacons, char** report_json) {
    if (!chain || !manifest || !profile || !envelope)
        return usage_error("pott_verify: null argument");
    return guarded([&] {
        bool compliant = false;
        json j = chain_report(chain, manifest, profile, envelope, beacons, compliant);
        emit(report_json, j);
        return compliant ? 0 : 1;
    });
}

int pott_verify_high_stakes(const pott_chain* const* chains, size_t chain_count,
                            const pott_manifest* manifest, const pott_profile* profile,
                            const pott_envelope* envelope, const pott_beacons* beacons,
                            char** report_json) {
    if (!chains || chain_count == 0 || !manifest || !profile || !envelope)
        return usage_error("pott_verify_high_stakes: null argument");
    for (size_t i = 0; i < chain_count; ++i)
        if (!chains[i])
            return usage_error("pott_verify_high_stakes: null chain");
    return guarded([&] {
        json per_chain = json::array();
        std::vector<std::pair<pott::ReceiptChain, pott::PolicyVerdict>> sets;
        for (size_t i = 0; i < chain_count; ++i) {
            bool compliant = false;
            per_chain.push_back(
                chain_report(chains[i], manifest, profile, envelope, beacons, compliant));
            auto report = pott::verify_structure(chains[i]->v, manifest->v.allowlist());
            sets.emplace_back(chains[i]->v,
                              pott::check_profile(report, chains[i]->v, manifest->v,
                                                  profile->v, envelope->v,
                                                  beacons ? beacons->v
                                                          : std::vector<pott::BeaconReading>{}));
        }
        json hs;
        hs["required"] = profile->v.high_stakes_min_diverse_chains;
        bool satisfied = false;
        try {
            satisfied = pott::check_high_stakes(sets, manifest->v, profile->v);
            hs["payload_consistent"] = true;
        } catch (const pott::Error& e) {
            if (e.code() != pott::ErrorCode::MixedPayload)
                throw;
            hs["payload_consistent"] = false;
        }
        hs["satisfied"] = satisfied;
        if (!satisfied)
            hs["detail"] = "need at least " +
                           std::to_string(profile->v.high_stakes_min_diverse_chains) +
                           " compliant chains with pairwise-disjoint operator sets over "
                           "one payload";
        json j;
        j["chains"] = std::move(per_chain);
        j["high_stakes"] = std::move(hs);
        emit(report_json, j);
        return satisfied ? 0 : 1;
    });
}

/* ---- expiry adjudication ---------------------------------------------- */

int pott_adjudicate(const pott_chain* chain, const char* headers_bin_path,
                    const char* headers_sidecar_path, const char* leap_table_path,
                    uint64_t h_expiry, double delta_seconds, double delta_mtp_seconds,
                    uint64_t kappa_blocks, const char* beacons_path,
                    const char* bundle_out_path, char** report_json) {
    if (!chain || !headers_bin_path || !headers_sidecar_path || !leap_table_path)
        return usage_error("pott_adjudicate: null argument");
    pott::MtpParams params;
    try {
        params = pott::MtpParams::make(0, 0, h_expiry, delta_seconds, delta_mtp_seconds,
                                       kappa_blocks);
    } catch (const pott::Error& e) {
        return usage_error(e.what());
    }
    return guarded([&] {
        // Adjudication presumes structural integrity; check it against the
        // chain's own relay set so signatures, links, and ordering all count.
        std::set<pott::NodeId> own_nodes;
        for (const auto& r : chain->v.receipts)
            own_nodes.insert(r.node);
        auto structure = pott::verify_structure(chain->v, own_nodes);
        if (!structure.structural_ok) {
            json j = structure_json(structure);
            j["verdict"] = "reject";
            j["rationale"] = "chain fails structural verification";
            emit(report_json, j);
            return 1;
        }

        auto table = pott::LeapSecondTable::load(leap_table_path);
        auto headers = pott::load_headers(headers_bin_path, headers_sidecar_path);
        std::int64_t mtp = pott::median_time_past(headers);
        pott::TaiTimestamp t_star = chain->v.receipts.back().t_out;
        auto decision =
            pott::arrived_before_expiry(t_star, headers.back(), mtp, params, table);

        pott::DisputeBundle bundle;
        bundle.chain = chain->v;
        bundle.verdict = decision.verdict;
        bundle.t_star = t_star;
        bundle.tip_height = decision.tip_height;
        bundle.mtp = decision.mtp;
        bundle.window_range = {headers.front().height, headers.back().height};
        if (beacons_path)
            for (const auto& b : pott::beacons_from_json(load_text(beacons_path)))
                bundle.beacon_ids.push_back(b.beacon_id);
        if (bundle_out_path)
            pott::write_file(bundle_out_path, pott::encode_dispute_bundle(bundle));

        json j;
        j["verdict"] = pott::adjudication_name(decision.verdict);
        j["rationale"] = decision.rationale;
        j["t_star"] = time_json(t_star);
        j["t_star_utc"] = decision.t_star_utc;
        j["mtp"] = decision.mtp;
        j["tip_height"] = decision.tip_height;
        j["h_expiry"] = h_expiry;
        j["window"] = {headers.front().height, headers.back().height};
        if (bundle_out_path)
            j["bundle_path"] = bundle_out_path;
        emit(report_json, j);
        return decision.verdict == pott::Adjudication::Accept ? 0 : 1;
    });
}

/* ---- latency arithmetic ----------------------------------------------- */

int pott_cltv(double owlt_minutes, double jitter_minutes, uint64_t base_blocks,
              uint64_t margin_blocks, double block_target_minutes, char** report_json) {
    g_last_error.clear();
    try {
        pott::TimelockInputs in;
        in.owlt_minutes = owlt_minutes;
        in.J_minutes = jitter_minutes;
        in.b_target_minutes = block_target_minutes;
        in.B_base_blocks = base_blocks;
        in.M_op_blocks = margin_blocks;
        std::uint64_t delta = pott::cltv_extra_blocks(in);
        std::uint64_t total = pott::cltv_total_blocks(in);
        json j;
        j["owlt_minutes"] = owlt_minutes;
        j["jitter_minutes"] = jitter_minutes;
        j["block_target_minutes"] = block_target_minutes;
        j["base_blocks"] = base_blocks;
        j["margin_blocks"] = margin_blocks;
        j["delta_blocks"] = delta;
        j["total_blocks"] = total;
        emit(report_json, j);
        return 0;
    } catch (const pott::Error& e) {
        // arguments, not files: every failure here is a usage error
        return usage_error(e.what());
    }
}

int pott_cltv_table(char** csv) {
    if (!csv)
        return usage_error("pott_cltv_table: null output argument");
    return guarded([&] {
        *csv = dup_string(pott::fig3_table_csv());
        return 0;
    });
}

int pott_budget(uint64_t blocks_per_year, double bytes_per_block, char** report_json) {
    g_last_error.clear();
    try {
        pott::LinkBudget b = pott::link_budget(blocks_per_year, bytes_per_block);
        json j;
        j["blocks_per_year"] = blocks_per_year;
        j["bytes_per_block"] = bytes_per_block;
        j["bytes_per_year"] = b.bytes_per_year;
        j["sustained_bps"] = b.sustained_bps;
        emit(report_json, j);
        return 0;
    } catch (const pott::Error& e) {
        return usage_error(e.what());
    }
}

/* ---- simulation ------------------------------------------------------- */

int pott_simulate(const char* scenario_path, const char* out_dir, char** report_json) {
    if (!scenario_path || !out_dir)
        return usage_error("pott_simulate: null argument");
    return guarded([&] {
        pott::Scenario s = pott::Scenario::load(scenario_path);
        pott::SimOutput out = pott::run_scenario(s);
        pott::write_corpus(out, s, out_dir);
        json labels = json::array();
        for (const auto& label : out.labels)
            labels.push_back({{"action", label.action},
                              {"chain", label.chain_index},
                              {"delivered", label.delivered}});
        json j;
        j["scenario"] = scenario_path;
        j["out_dir"] = out_dir;
        j["chains"] = out.chains.size();
        j["labels"] = std::move(labels);
        emit(report_json, j);
        return 0;
    });
}

/* ---- privacy commitments ---------------------------------------------- */

int pott_commit(const pott_chain* chain, const char* out_path, char** report_json) {
    if (!chain)
        return usage_error("pott_commit: null argument");
    return guarded([&] {
        pott::TranscriptCommitment c = pott::commit_transcript(chain->v);
        pott::Bytes wire = pott::encode_commitment(c);
        if (out_path)
            pott::write_file(out_path, wire);
        json j;
        j["h_txpt"] = pott::to_hex(pott::ByteView(c.h_txpt.data(), c.h_txpt.size()));
        j["t_min_in"] = time_json(c.t_min_in);
        j["t_max_out"] = time_json(c.t_max_out);
        j["hop_count"] = c.hop_count;
        j["bytes"] = wire.size();
        if (out_path)
            j["path"] = out_path;
        emit(report_json, j);
        return 0;
    });
}

int pott_open(const char* commitment_path, const pott_chain* chain, char** report_json) {
    if (!commitment_path || !chain)
        return usage_error("pott_open: null argument");
    return guarded([&] {
        pott::TranscriptCommitment c =
            pott::decode_commitment(pott::read_file(commitment_path));
        pott::OpeningResult r = pott::verify_opening(c, chain->v);
        json j;
        j["ok"] = r.ok;
        j["violations"] = r.violations;
        j["h_txpt"] = pott::to_hex(pott::ByteView(c.h_txpt.data(), c.h_txpt.size()));
        emit(report_json, j);
        return r.ok ? 0 : 1;
    });
}

} // extern "C"
