#include "pott/policy.hpp"

#include "pott/cbor.hpp"
#include "pott/errors.hpp"
#include "pott/schnorr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace pott {

namespace {

template <std::size_t N>
void fixed_bstr(cbor::Reader& rd, std::array<std::uint8_t, N>& out) {
    ByteView b = rd.byte_string();
    if (b.size() != N)
        throw_wrong_length(N, b.size());
    std::copy(b.begin(), b.end(), out.begin());
}

void expect_manifest_key(cbor::Reader& rd, std::uint64_t want) {
    std::uint64_t got = rd.unsigned_int();
    if (got != want)
        throw Error(got <= 6 ? ErrorCode::NonCanonicalEncoding : ErrorCode::UnknownKey,
                    "unexpected manifest key " + std::to_string(got));
}

void write_manifest_body(cbor::Writer& w, const AllowlistManifest& m) {
    w.unsigned_int(0);
    w.unsigned_int(m.version);
    w.unsigned_int(1);
    w.array_header(m.entries.size());
    for (const auto& e : m.entries) {
        w.array_header(3);
        w.byte_string(e.node);
        w.text_string(e.operator_domain);
        w.text_string(planet_name(e.planetary_domain));
    }
    w.unsigned_int(2);
    w.array_header(m.revoked.size());
    for (const auto& n : m.revoked)
        w.byte_string(n);
    w.unsigned_int(3);
    w.unsigned_int(m.ttl_hours);
    w.unsigned_int(4);
    w.unsigned_int(m.issued_at_tai);
    w.unsigned_int(5);
    w.byte_string(m.signer);
}

double dwell_seconds(const Receipt& r) {
    return tai_real_seconds(r.t_out) - tai_real_seconds(r.t_in);
}

} // namespace

const ManifestEntry* AllowlistManifest::find(const NodeId& node) const {
    for (const auto& e : entries)
        if (e.node == node)
            return &e;
    return nullptr;
}

bool AllowlistManifest::is_revoked(const NodeId& node) const {
    return std::find(revoked.begin(), revoked.end(), node) != revoked.end();
}

std::set<NodeId> AllowlistManifest::allowlist() const {
    std::set<NodeId> out;
    for (const auto& e : entries)
        if (!is_revoked(e.node))
            out.insert(e.node);
    return out;
}

Bytes manifest_signing_bytes(const AllowlistManifest& m) {
    cbor::Writer w;
    w.map_header(6);
    write_manifest_body(w, m);
    return w.take();
}

Bytes encode_manifest(const AllowlistManifest& m) {
    cbor::Writer w;
    w.map_header(7);
    write_manifest_body(w, m);
    w.unsigned_int(6);
    w.byte_string(m.signature);
    return w.take();
}

AllowlistManifest decode_manifest(ByteView bytes) {
    cbor::Reader rd(bytes);
    std::uint64_t entries = rd.map_header();
    if (entries != 7)
        throw Error(ErrorCode::NonCanonicalEncoding, "manifest map must carry keys 0-6");
    AllowlistManifest m;
    expect_manifest_key(rd, 0);
    m.version = rd.unsigned_int();
    expect_manifest_key(rd, 1);
    std::uint64_t n_entries = rd.array_header();
    for (std::uint64_t i = 0; i < n_entries; ++i) {
        if (rd.array_header() != 3)
            throw Error(ErrorCode::NonCanonicalEncoding, "manifest entry must be a triple");
        ManifestEntry e;
        fixed_bstr(rd, e.node);
        e.operator_domain = rd.text_string();
        e.planetary_domain = planet_from_name(rd.text_string());
        m.entries.push_back(std::move(e));
    }
    expect_manifest_key(rd, 2);
    std::uint64_t n_revoked = rd.array_header();
    for (std::uint64_t i = 0; i < n_revoked; ++i) {
        NodeId n;
        fixed_bstr(rd, n);
        m.revoked.push_back(n);
    }
    expect_manifest_key(rd, 3);
    m.ttl_hours = rd.unsigned_int();
    expect_manifest_key(rd, 4);
    m.issued_at_tai = rd.unsigned_int();
    expect_manifest_key(rd, 5);
    fixed_bstr(rd, m.signer);
    expect_manifest_key(rd, 6);
    fixed_bstr(rd, m.signature);
    if (!rd.done())
        throw Error(ErrorCode::NonCanonicalEncoding, "trailing bytes after manifest");
    return m;
}

void sign_manifest(AllowlistManifest& m, const schnorr::Keypair& key) {
    m.signer = key.pub;
    m.signature = schnorr::sign(manifest_signing_bytes(m), key, {});
}

AllowlistManifest load_manifest(ByteView bytes, std::optional<std::uint64_t> now_tai) {
    AllowlistManifest m = decode_manifest(bytes);
    if (!schnorr::verify(manifest_signing_bytes(m), m.signature, m.signer))
        throw Error(ErrorCode::ManifestSignatureInvalid, "manifest signature does not verify");
    if (now_tai) {
        std::uint64_t expiry = m.issued_at_tai + m.ttl_hours * 3600;
        if (*now_tai > expiry)
            throw Error(ErrorCode::ManifestStale,
                        "manifest issued at " + std::to_string(m.issued_at_tai) +
                            " exceeded its " + std::to_string(m.ttl_hours) + "h TTL");
    }
    return m;
}

void PolicyProfile::validate() const {
    if (min_hops < 1)
        throw Error(ErrorCode::IoError, "min_hops must be at least 1");
    if (max_hops < min_hops)
        throw Error(ErrorCode::IoError, "max_hops below min_hops");
    if (min_operator_domains < 1 || max_chain_bytes == 0 ||
        high_stakes_min_diverse_chains < 1)
        throw Error(ErrorCode::IoError, "policy bounds must be positive");
    if (J_seconds < 0 || sigma_t_max_seconds < 0 || beacon_slack_seconds < 0)
        throw Error(ErrorCode::IoError, "time bounds must be nonnegative");
}

PolicyProfile PolicyProfile::parse(const std::string& text) {
    PolicyProfile p;
    std::istringstream in(text);
    std::string line;
    auto as_u64 = [](const std::string& k, const std::string& v) {
        try {
            return static_cast<std::uint64_t>(std::stoull(v));
        } catch (...) {
            throw Error(ErrorCode::IoError, "bad integer for " + k + ": " + v);
        }
    };
    auto as_double = [](const std::string& k, const std::string& v) {
        try {
            return std::stod(v);
        } catch (...) {
            throw Error(ErrorCode::IoError, "bad number for " + k + ": " + v);
        }
    };
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw Error(ErrorCode::IoError, "malformed profile line: " + line);
            continue;
        }
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "min_hops")
            p.min_hops = as_u64(key, value);
        else if (key == "min_operator_domains")
            p.min_operator_domains = as_u64(key, value);
        else if (key == "require_anchor_per_planetary_domain")
            p.require_anchor_per_planetary_domain = (value == "true" || value == "1");
        else if (key == "J_seconds")
            p.J_seconds = as_double(key, value);
        else if (key == "max_hops")
            p.max_hops = as_u64(key, value);
        else if (key == "max_chain_bytes")
            p.max_chain_bytes = as_u64(key, value);
        else if (key == "high_stakes_min_diverse_chains")
            p.high_stakes_min_diverse_chains = as_u64(key, value);
        else if (key == "retention_days")
            p.retention_days = as_u64(key, value);
        else if (key == "sigma_t_max_seconds")
            p.sigma_t_max_seconds = as_double(key, value);
        else if (key == "beacon_slack_seconds")
            p.beacon_slack_seconds = as_double(key, value);
        else
            throw Error(ErrorCode::IoError, "unknown profile knob: " + key);
    }
    p.validate();
    return p;
}

PolicyProfile PolicyProfile::load(const std::string& path) {
    Bytes raw = read_file(path);
    return parse(std::string(raw.begin(), raw.end()));
}

const char* assurance_name(Assurance a) {
    switch (a) {
    case Assurance::Full: return "full";
    case Assurance::Downgraded: return "downgraded";
    case Assurance::NonProbative: return "non-probative";
    }
    return "downgraded";
}

PolicyVerdict check_profile(const VerificationReport& report, const ReceiptChain& chain,
                            const AllowlistManifest& manifest, const PolicyProfile& profile,
                            const OwltEnvelope& env,
                            const std::vector<BeaconReading>& beacons) {
    profile.validate();
    if (!schnorr::verify(manifest_signing_bytes(manifest), manifest.signature,
                         manifest.signer))
        throw Error(ErrorCode::ManifestSignatureInvalid, "manifest signature does not verify");

    PolicyVerdict verdict;
    auto violate = [&](const char* check, std::string detail) {
        verdict.violations.push_back(PolicyViolation{check, std::move(detail)});
    };

    // P1 structure
    if (!report.structural_ok)
        violate("P1", "structural verification failed with " +
                          std::to_string(report.failures.size()) + " finding(s)");

    // P2 hop floor
    if (report.hop_count < profile.min_hops)
        violate("P2", "chain has " + std::to_string(report.hop_count) + " hop(s), policy floor is " +
                          std::to_string(profile.min_hops));

    // Resolve relays against the manifest once; P3/P4/P5/P7 all consume this.
    std::set<std::string> operators;
    std::set<Planet> planets;
    bool any_unlisted = false;
    for (std::size_t i = 0; i < chain.receipts.size(); ++i) {
        const NodeId& node = chain.receipts[i].node;
        const ManifestEntry* entry = manifest.find(node);
        if (!entry || manifest.is_revoked(node)) {
            any_unlisted = true;
            violate("P7", "hop " + std::to_string(i) +
                              (entry ? " uses a revoked relay key" : " uses an unlisted relay key"));
            continue;
        }
        operators.insert(entry->operator_domain);
        planets.insert(entry->planetary_domain);
    }

    // P3 operator diversity
    if (operators.size() < profile.min_operator_domains)
        violate("P3", "chain spans " + std::to_string(operators.size()) +
                          " operator domain(s), policy floor is " +
                          std::to_string(profile.min_operator_domains));

    // P4 beacon anchors, one acceptable reading per planetary domain touched
    std::size_t anchored_domains = 0;
    bool p4_failed = false;
    if (profile.require_anchor_per_planetary_domain) {
        for (Planet planet : planets) {
            bool anchored = false;
            for (const auto& b : beacons) {
                if (b.domain != planet)
                    continue;
                if (b.sigma_t_seconds > profile.sigma_t_max_seconds)
                    continue;
                double t = tai_real_seconds(b.tai);
                if (t < tai_real_seconds(report.t_first_in) - profile.beacon_slack_seconds ||
                    t > tai_real_seconds(report.t_last_out) + profile.beacon_slack_seconds)
                    continue;
                anchored = true;
                break;
            }
            if (anchored)
                ++anchored_domains;
            else
                violate("P4", std::string("no acceptable time beacon for domain ") +
                                  planet_name(planet));
        }
        p4_failed = !planets.empty() && anchored_domains == 0;
    }

    // P5 per-hop dwell and cross-domain transit
    for (std::size_t i = 0; i < chain.receipts.size(); ++i) {
        const Receipt& r = chain.receipts[i];
        if (dwell_seconds(r) > profile.J_seconds)
            violate("P5", "hop " + std::to_string(i) + " dwell exceeds J");
        if (i == 0)
            continue;
        const ManifestEntry* prev = manifest.find(chain.receipts[i - 1].node);
        const ManifestEntry* cur = manifest.find(r.node);
        if (!prev || !cur || prev->planetary_domain == cur->planetary_domain)
            continue;
        try {
            if (!within_owlt_envelope(chain.receipts[i - 1].t_out, r.t_in, env,
                                      2 * profile.sigma_t_max_seconds))
                violate("P5", "hop " + std::to_string(i - 1) + "->" + std::to_string(i) +
                                  " transit outside the OWLT envelope");
        } catch (const Error&) {
            violate("P5", "hop " + std::to_string(i - 1) + "->" + std::to_string(i) +
                              " handoff time not covered by any OWLT window");
        }
    }

    // P6 both caps
    if (report.hop_count > profile.max_hops)
        violate("P6", "chain exceeds the hop cap (" + std::to_string(report.hop_count) + " > " +
                          std::to_string(profile.max_hops) + ")");
    std::size_t encoded = encoded_chain_size(chain);
    if (encoded > profile.max_chain_bytes)
        violate("P6", "chain exceeds the byte cap (" + std::to_string(encoded) + " > " +
                          std::to_string(profile.max_chain_bytes) + ")");

    verdict.compliant = verdict.violations.empty();
    if (verdict.compliant) {
        verdict.assurance = Assurance::Full;
    } else if (p4_failed && !any_unlisted && operators.size() == 1) {
        // every relay resolves to the same operator and no domain is anchored:
        // the chain reduces to that operator's own assertions
        verdict.assurance = Assurance::NonProbative;
    } else {
        verdict.assurance = Assurance::Downgraded;
    }
    return verdict;
}

bool check_high_stakes(const std::vector<std::pair<ReceiptChain, PolicyVerdict>>& sets,
                       const AllowlistManifest& manifest, const PolicyProfile& profile) {
    const Digest32* h = nullptr;
    for (const auto& [chain, verdict] : sets) {
        if (chain.receipts.empty())
            continue;
        if (!h)
            h = &chain.receipts[0].h;
        else if (!(chain.receipts[0].h == *h))
            throw Error(ErrorCode::MixedPayload,
                        "high-stakes evidence must target a single payload digest");
    }

    std::vector<std::set<std::string>> operator_sets;
    for (const auto& [chain, verdict] : sets) {
        if (!verdict.compliant)
            continue;
        std::set<std::string> ops;
        for (const auto& r : chain.receipts)
            if (const ManifestEntry* e = manifest.find(r.node))
                ops.insert(e->operator_domain);
        operator_sets.push_back(std::move(ops));
    }

    std::uint64_t need = profile.high_stakes_min_diverse_chains;
    if (operator_sets.size() < need)
        return false;

    // exhaustive search for `need` pairwise-disjoint operator sets; evidence
    // bundles are small, so this stays cheap
    std::vector<std::size_t> picked;
    std::function<bool(std::size_t)> dfs = [&](std::size_t start) {
        if (picked.size() == need)
            return true;
        for (std::size_t i = start; i < operator_sets.size(); ++i) {
            bool disjoint = true;
            for (std::size_t j : picked) {
                for (const auto& op : operator_sets[i]) {
                    if (operator_sets[j].contains(op)) {
                        disjoint = false;
                        break;
                    }
                }
                if (!disjoint)
                    break;
            }
            if (!disjoint)
                continue;
            picked.push_back(i);
            if (dfs(i + 1))
                return true;
            picked.pop_back();
        }
        return false;
    };
    return dfs(0);
}

} // namespace pott
