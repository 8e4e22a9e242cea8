#include "pott/sim.hpp"

#include "pott/errors.hpp"
#include "pott/privacy.hpp"
#include "pott/sha256.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>
#include <sstream>

using nlohmann::json;

namespace pott {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_)
        w = splitmix64(x);
}

std::uint64_t Xoshiro256ss::next() {
    std::uint64_t result = rotl64(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl64(s_[3], 45);
    return result;
}

std::uint64_t Xoshiro256ss::below(std::uint64_t bound) {
    if (bound == 0)
        throw Error(ErrorCode::ScenarioInvalid, "zero range in random draw");
    return next() % bound;
}

double Xoshiro256ss::unit() { return double(next() >> 11) * 0x1.0p-53; }

namespace {

void fill_bytes(Xoshiro256ss& rng, std::uint8_t* p, std::size_t n) {
    for (std::size_t i = 0; i < n; i += 8) {
        std::uint64_t v = rng.next();
        for (std::size_t j = 0; j < 8 && i + j < n; ++j)
            p[i + j] = std::uint8_t(v >> (8 * j));
    }
}

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::ScenarioInvalid, what);
}

// Relay/signer secrets are hashed out of (label, seed, index); the retry
// counter handles the astronomically unlikely out-of-range scalar.
schnorr::Keypair derive_key(const char* label, std::uint64_t seed, std::uint32_t index) {
    for (std::uint8_t retry = 0;; ++retry) {
        Bytes preimage(std::strlen(label) + 13);
        std::memcpy(preimage.data(), label, std::strlen(label));
        std::size_t off = std::strlen(label);
        for (int i = 0; i < 8; ++i)
            preimage[off + i] = std::uint8_t(seed >> (8 * i));
        for (int i = 0; i < 4; ++i)
            preimage[off + 8 + i] = std::uint8_t(index >> (8 * i));
        preimage[off + 12] = retry;
        Digest32 d = sha256(preimage);
        std::array<std::uint8_t, 32> secret{};
        std::copy(d.begin(), d.end(), secret.begin());
        try {
            return schnorr::keypair_from_secret(secret);
        } catch (const Error&) {
            continue;
        }
    }
}

struct RunContext {
    const Scenario& s;
    std::vector<schnorr::Keypair> relay_keys;
    std::map<NodeId, schnorr::Keypair> key_of_node; // relays + sybils, for re-signing
    PayloadDigest payload;
    Xoshiro256ss rng;

    explicit RunContext(const Scenario& sc) : s(sc), rng(sc.seed) {}
};

ReceiptChain gen_route_chain(RunContext& ctx, const std::vector<std::size_t>& route,
                             const EntropyFn& nonce_fn) {
    const Scenario& s = ctx.s;
    std::uint64_t t = s.t0_tai;
    ReceiptChain chain;
    for (std::size_t k = 0; k < route.size(); ++k) {
        std::uint64_t dwell = 1 + ctx.rng.below(s.max_dwell_seconds);
        TaiTimestamp tin{t};
        TaiTimestamp tout{t + dwell};
        const auto& key = ctx.relay_keys[route[k]];
        if (k == 0)
            chain = originate_chain(ctx.payload, key, tin, tout, nonce_fn);
        else
            chain = append_hop(chain, key, tin, tout);
        if (k + 1 < route.size()) {
            Planet here = s.relays[route[k]].planet;
            Planet there = s.relays[route[k + 1]].planet;
            std::uint64_t transit;
            if (here != there) {
                const OwltWindow* w = s.envelope.window_covering(tout);
                if (!w)
                    invalid("no envelope window covers a cross-planet send time");
                transit = std::uint64_t(w->min_owlt) +
                          ctx.rng.below(std::uint64_t(w->max_owlt - w->min_owlt) + 1);
            } else {
                transit = 1 + ctx.rng.below(s.same_planet_transit_max);
            }
            t = tout.seconds + transit;
        }
    }
    return chain;
}

// Re-link and re-sign hops [first, end): the relay-collusion primitive. Every
// touched node's key must be known (roster or sybil).
void resign_from(RunContext& ctx, ReceiptChain& chain, std::size_t first) {
    for (std::size_t j = first; j < chain.receipts.size(); ++j) {
        Receipt& r = chain.receipts[j];
        if (j > 0)
            r.prev = link_hash(chain.receipts[j - 1]);
        auto it = ctx.key_of_node.find(r.node);
        if (it == ctx.key_of_node.end())
            invalid("re-sign requested for a node without a known key");
        r.sig = schnorr::sign(signing_message(r), it->second, {});
    }
}

void apply_backdate(RunContext& ctx, ReceiptChain& chain, const AdversaryAction& act) {
    if (act.hop >= chain.receipts.size())
        invalid("backdate hop out of range");
    if (act.seconds == 0)
        invalid("backdate shift must be nonzero");
    Receipt& r = chain.receipts[act.hop];
    if (act.seconds > 0) {
        std::uint64_t shift = std::uint64_t(act.seconds);
        if (r.t_in.seconds < shift)
            invalid("backdate shift precedes the epoch");
        r.t_in.seconds -= shift;
        r.t_out.seconds -= shift;
    } else {
        std::uint64_t shift = std::uint64_t(-act.seconds);
        r.t_in.seconds += shift;
        r.t_out.seconds += shift;
    }
    if (act.resign)
        resign_from(ctx, chain, act.hop);
}

void apply_sybil(RunContext& ctx, ReceiptChain& chain, const AdversaryAction& act,
                 std::size_t action_index) {
    if (act.hop < 1 || act.hop > chain.receipts.size())
        invalid("sybil insert position out of range");
    const Receipt& before = chain.receipts[act.hop - 1];
    schnorr::Keypair sybil = derive_key("pott.sim.sybil", ctx.s.seed,
                                        std::uint32_t(action_index));
    NodeId node{};
    std::copy(sybil.pub.begin(), sybil.pub.end(), node.begin());
    ctx.key_of_node.emplace(node, sybil);

    Receipt r;
    r.h = before.h;
    r.nu = before.nu;
    r.node = node;
    if (act.hop < chain.receipts.size()) {
        std::uint64_t gap = chain.receipts[act.hop].t_in.seconds - before.t_out.seconds;
        if (gap < 2)
            invalid("no room to insert a sybil hop between these receipts");
        r.t_in.seconds = before.t_out.seconds + 1;
        r.t_out.seconds = before.t_out.seconds + std::min<std::uint64_t>(gap - 1, 31);
    } else {
        r.t_in.seconds = before.t_out.seconds + 1;
        r.t_out.seconds = r.t_in.seconds + 30;
    }
    chain.receipts.insert(chain.receipts.begin() + std::ptrdiff_t(act.hop), r);
    if (act.resign) {
        resign_from(ctx, chain, act.hop);
    } else {
        // Even a non-colluding splice-in must self-sign; downstream links are
        // left stale so R4 fires alongside R1.
        Receipt& ins = chain.receipts[act.hop];
        ins.prev = link_hash(chain.receipts[act.hop - 1]);
        ins.sig = schnorr::sign(signing_message(ins), sybil, {});
    }
}

json label_to_json(const ExpectedLabel& label) {
    json j;
    j["action"] = label.action;
    j["chain"] = label.chain_index;
    j["delivered"] = label.delivered;
    j["compliant"] = label.compliant;
    j["assurance"] = label.assurance;
    j["structural_rules"] = label.structural_rules;
    j["violated_checks"] = label.violated_checks;
    if (label.shares_evidence_key_with >= 0)
        j["shares_evidence_key_with"] = label.shares_evidence_key_with;
    return j;
}

const json& need(const json& obj, const char* key, const char* ctx_name) {
    auto it = obj.find(key);
    if (it == obj.end())
        invalid(std::string(ctx_name) + " is missing \"" + key + "\"");
    return *it;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const char* ctx_name) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k)
                ok = true;
        if (!ok)
            invalid(std::string("unknown key \"") + it.key() + "\" in " + ctx_name);
    }
}

ExpectedLabel parse_expect(const json& j) {
    reject_unknown(j,
                   {"delivered", "compliant", "assurance", "structural_rules",
                    "violated_checks", "shares_evidence_key_with"},
                   "expect");
    ExpectedLabel e;
    e.delivered = j.value("delivered", true);
    e.assurance = j.value("assurance", "full");
    if (e.assurance != "full" && e.assurance != "downgraded" && e.assurance != "non-probative")
        invalid("unknown assurance label \"" + e.assurance + "\"");
    e.structural_rules = j.value("structural_rules", std::vector<std::string>{});
    e.violated_checks = j.value("violated_checks", std::vector<std::string>{});
    bool default_compliant =
        e.assurance == "full" && e.structural_rules.empty() && e.violated_checks.empty();
    e.compliant = j.value("compliant", default_compliant);
    e.shares_evidence_key_with = j.value("shares_evidence_key_with", -1);
    return e;
}

} // namespace

Scenario Scenario::parse_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        invalid(std::string("scenario is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object())
            invalid("scenario root must be an object");
        reject_unknown(doc,
                       {"seed", "payload_kind", "t0_tai", "max_dwell_seconds",
                        "same_planet_transit_max", "manifest_ttl_hours", "relays", "route",
                        "owlt_windows", "beacons", "profile", "actions"},
                       "scenario");
        Scenario s;
        s.seed = need(doc, "seed", "scenario").get<std::uint64_t>();
        s.t0_tai = need(doc, "t0_tai", "scenario").get<std::uint64_t>();
        if (doc.contains("payload_kind"))
            s.payload_kind = digest_kind_from_name(doc["payload_kind"].get<std::string>());
        s.max_dwell_seconds = doc.value("max_dwell_seconds", std::uint64_t{60});
        s.same_planet_transit_max = doc.value("same_planet_transit_max", std::uint64_t{60});
        s.manifest_ttl_hours = doc.value("manifest_ttl_hours", std::uint64_t{720});

        for (const json& jr : need(doc, "relays", "scenario")) {
            reject_unknown(jr, {"operator", "planet"}, "relay");
            RelaySpec r;
            r.operator_domain = need(jr, "operator", "relay").get<std::string>();
            r.planet = planet_from_name(need(jr, "planet", "relay").get<std::string>());
            s.relays.push_back(std::move(r));
        }
        for (const json& ji : need(doc, "route", "scenario"))
            s.route.push_back(ji.get<std::size_t>());

        if (doc.contains("owlt_windows")) {
            for (const json& jw : doc["owlt_windows"]) {
                reject_unknown(jw, {"start_tai", "end_tai", "min_owlt", "max_owlt"},
                               "owlt window");
                OwltWindow w;
                w.start_tai = need(jw, "start_tai", "owlt window").get<std::uint64_t>();
                w.end_tai = need(jw, "end_tai", "owlt window").get<std::uint64_t>();
                w.min_owlt = need(jw, "min_owlt", "owlt window").get<std::int64_t>();
                w.max_owlt = need(jw, "max_owlt", "owlt window").get<std::int64_t>();
                if (w.end_tai < w.start_tai || w.min_owlt < 0 || w.max_owlt < w.min_owlt)
                    invalid("malformed owlt window");
                s.envelope.windows.push_back(w);
            }
        }
        if (doc.contains("beacons")) {
            for (const json& jb : doc["beacons"]) {
                reject_unknown(jb, {"id", "planet", "sigma_t_seconds", "tai_offset"},
                               "beacon");
                BeaconSpec b;
                b.id = need(jb, "id", "beacon").get<std::string>();
                b.planet = planet_from_name(need(jb, "planet", "beacon").get<std::string>());
                b.sigma_t_seconds = jb.value("sigma_t_seconds", 5.0);
                b.tai_offset = jb.value("tai_offset", std::int64_t{600});
                s.beacons.push_back(std::move(b));
            }
        }
        if (doc.contains("profile")) {
            // Reuse the key=value knob table instead of duplicating it here.
            std::ostringstream text_form;
            for (auto it = doc["profile"].begin(); it != doc["profile"].end(); ++it)
                text_form << it.key() << "=" << it.value().dump() << "\n";
            s.profile = PolicyProfile::parse(text_form.str());
        }

        for (const json& ja : need(doc, "actions", "scenario")) {
            reject_unknown(ja,
                           {"do", "hop", "seconds", "resign", "after_hop", "reuse_of",
                            "chain_a", "chain_b", "cut_hop", "route", "expect"},
                           "action");
            AdversaryAction a;
            a.kind = need(ja, "do", "action").get<std::string>();
            a.hop = ja.value("hop", std::size_t{0});
            a.seconds = ja.value("seconds", std::int64_t{0});
            a.resign = ja.value("resign", true);
            a.after_hop = ja.value("after_hop", std::size_t{0});
            a.reuse_of = ja.value("reuse_of", std::size_t{0});
            a.chain_a = ja.value("chain_a", std::size_t{0});
            a.chain_b = ja.value("chain_b", std::size_t{0});
            a.cut_hop = ja.value("cut_hop", std::size_t{0});
            if (ja.contains("route"))
                for (const json& ji : ja["route"])
                    a.route.push_back(ji.get<std::size_t>());
            a.expect = ja.contains("expect") ? parse_expect(ja["expect"]) : ExpectedLabel{};
            a.expect.action = a.kind;
            s.actions.push_back(std::move(a));
        }
        return s;
    } catch (const json::exception& e) {
        invalid(std::string("scenario field has the wrong type: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ScenarioInvalid)
            throw;
        invalid(e.what());
    }
}

Scenario Scenario::load(const std::string& path) {
    Bytes raw = read_file(path);
    return parse_json(std::string(raw.begin(), raw.end()));
}

SimOutput run_scenario(const Scenario& s) {
    if (s.relays.empty())
        invalid("scenario needs at least one relay");
    if (s.route.empty())
        invalid("scenario route is empty");
    for (std::size_t idx : s.route)
        if (idx >= s.relays.size())
            invalid("route references a relay that does not exist");
    if (s.t0_tai == 0)
        invalid("t0_tai must be positive");
    if (s.max_dwell_seconds < 1 || s.same_planet_transit_max < 1)
        invalid("dwell and transit ranges must be at least one second");
    try {
        s.profile.validate();
    } catch (const Error& e) {
        invalid(std::string("profile: ") + e.what());
    }

    RunContext ctx(s);
    for (std::size_t i = 0; i < s.relays.size(); ++i) {
        ctx.relay_keys.push_back(derive_key("pott.sim.relay", s.seed, std::uint32_t(i)));
        NodeId node{};
        std::copy(ctx.relay_keys[i].pub.begin(), ctx.relay_keys[i].pub.end(), node.begin());
        ctx.key_of_node.emplace(node, ctx.relay_keys[i]);
    }
    Digest32 payload_seed = [&] {
        Bytes pre(16 + 8);
        std::memcpy(pre.data(), "pott.sim.payload", 16);
        for (int i = 0; i < 8; ++i)
            pre[16 + i] = std::uint8_t(s.seed >> (8 * i));
        return sha256(pre);
    }();
    ctx.payload = compute_payload_digest(payload_seed, s.payload_kind);

    SimOutput out;
    out.profile = s.profile;
    out.envelope = s.envelope;

    out.manifest.version = 1;
    out.manifest.ttl_hours = s.manifest_ttl_hours;
    out.manifest.issued_at_tai = s.t0_tai >= 600 ? s.t0_tai - 600 : 0;
    for (std::size_t i = 0; i < s.relays.size(); ++i) {
        ManifestEntry e;
        std::copy(ctx.relay_keys[i].pub.begin(), ctx.relay_keys[i].pub.end(),
                  e.node.begin());
        e.operator_domain = s.relays[i].operator_domain;
        e.planetary_domain = s.relays[i].planet;
        out.manifest.entries.push_back(std::move(e));
    }
    sign_manifest(out.manifest, derive_key("pott.sim.signer", s.seed, 0));

    for (const BeaconSpec& b : s.beacons) {
        BeaconReading r;
        r.beacon_id = b.id;
        r.domain = b.planet;
        std::int64_t t = std::int64_t(s.t0_tai) + b.tai_offset;
        if (t <= 0)
            invalid("beacon reading precedes the epoch");
        r.tai = TaiTimestamp{std::uint64_t(t)};
        r.sigma_t_seconds = b.sigma_t_seconds;
        out.beacons.push_back(std::move(r));
    }

    EntropyFn rng_fn = [&ctx](std::uint8_t* p, std::size_t n) { fill_bytes(ctx.rng, p, n); };

    for (std::size_t ai = 0; ai < s.actions.size(); ++ai) {
        const AdversaryAction& act = s.actions[ai];
        ExpectedLabel label = act.expect;
        bool delivered = true;

        const std::vector<std::size_t>& route = act.route.empty() ? s.route : act.route;
        for (std::size_t idx : route)
            if (idx >= s.relays.size())
                invalid("action route references a relay that does not exist");

        if (act.kind == "honest") {
            out.chains.push_back(gen_route_chain(ctx, route, rng_fn));
        } else if (act.kind == "backdate") {
            ReceiptChain chain = gen_route_chain(ctx, route, rng_fn);
            apply_backdate(ctx, chain, act);
            out.chains.push_back(std::move(chain));
        } else if (act.kind == "truncate") {
            ReceiptChain chain = gen_route_chain(ctx, route, rng_fn);
            if (act.after_hop + 1 >= chain.receipts.size())
                invalid("truncate keeps the whole chain");
            chain.receipts.resize(act.after_hop + 1);
            out.chains.push_back(std::move(chain));
        } else if (act.kind == "sybil_insert") {
            ReceiptChain chain = gen_route_chain(ctx, route, rng_fn);
            apply_sybil(ctx, chain, act, ai);
            out.chains.push_back(std::move(chain));
        } else if (act.kind == "nonce_reuse") {
            if (act.reuse_of >= out.chains.size())
                invalid("nonce_reuse references a chain not yet delivered");
            Nonce16 nu = out.chains[act.reuse_of].receipts.at(0).nu;
            std::size_t served = 0;
            EntropyFn reuse_fn = [&](std::uint8_t* p, std::size_t n) {
                for (std::size_t i = 0; i < n; ++i)
                    p[i] = served < nu.size() ? nu[served++] : std::uint8_t(ctx.rng.next());
            };
            out.chains.push_back(gen_route_chain(ctx, route, reuse_fn));
        } else if (act.kind == "splice") {
            if (act.chain_a >= out.chains.size() || act.chain_b >= out.chains.size())
                invalid("splice references a chain not yet delivered");
            const auto& a = out.chains[act.chain_a].receipts;
            const auto& b = out.chains[act.chain_b].receipts;
            if (act.cut_hop >= a.size() || act.cut_hop + 1 >= b.size())
                invalid("splice cut leaves an empty head or tail");
            ReceiptChain spliced;
            spliced.receipts.assign(a.begin(), a.begin() + std::ptrdiff_t(act.cut_hop) + 1);
            spliced.receipts.insert(spliced.receipts.end(),
                                    b.begin() + std::ptrdiff_t(act.cut_hop) + 1, b.end());
            if (act.resign)
                resign_from(ctx, spliced, act.cut_hop + 1);
            out.chains.push_back(std::move(spliced));
        } else if (act.kind == "drop") {
            ReceiptChain chain = gen_route_chain(ctx, route, rng_fn);
            if (act.after_hop >= chain.receipts.size())
                invalid("drop point past the end of the route");
            delivered = false; // minted, then lost in flight: nothing to verify
        } else {
            invalid("unknown adversary action \"" + act.kind + "\"");
        }

        label.action = act.kind;
        label.delivered = delivered;
        label.chain_index = delivered ? int(out.chains.size()) - 1 : -1;
        out.labels.push_back(std::move(label));
    }
    return out;
}

std::vector<BlockHeader> synth_header_chain(std::uint64_t seed, std::size_t count,
                                            double mean_interval_seconds, bool exponential,
                                            std::uint64_t start_timestamp) {
    if (count < 1)
        throw Error(ErrorCode::EmptyInput, "header count must be at least 1");
    if (!(mean_interval_seconds > 0))
        throw Error(ErrorCode::IoError, "mean interval must be positive");
    Xoshiro256ss rng(seed);
    std::uint64_t ts =
        start_timestamp != 0 ? start_timestamp : 1'700'000'000 + rng.below(1'000'000);
    std::array<std::uint8_t, 32> prev{};
    std::vector<BlockHeader> headers;
    headers.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::array<std::uint8_t, 80> raw{};
        raw[0] = 0x00;
        raw[1] = 0x00;
        raw[2] = 0x00;
        raw[3] = 0x20; // version 0x20000000
        std::copy(prev.begin(), prev.end(), raw.begin() + 4);
        fill_bytes(rng, raw.data() + 36, 32); // merkle root stand-in
        for (int b = 0; b < 4; ++b)
            raw[68 + b] = std::uint8_t(ts >> (8 * b));
        raw[72] = 0xFF;
        raw[73] = 0xFF;
        raw[74] = 0x00;
        raw[75] = 0x1D; // bits 0x1d00ffff
        fill_bytes(rng, raw.data() + 76, 4);
        headers.push_back(parse_header(ByteView(raw.data(), raw.size()), 840'000 + i));
        Digest32 link = double_sha256(ByteView(raw.data(), raw.size()));
        std::copy(link.begin(), link.end(), prev.begin());
        if (i + 1 < count) {
            std::int64_t step;
            if (exponential)
                step = std::llround(-mean_interval_seconds * std::log(1.0 - rng.unit()));
            else
                step = std::llround(mean_interval_seconds);
            ts += std::uint64_t(std::max<std::int64_t>(step, 1));
        }
    }
    return headers;
}

namespace {

std::string profile_text(const PolicyProfile& p) {
    std::ostringstream os;
    os << "min_hops=" << p.min_hops << "\n";
    os << "min_operator_domains=" << p.min_operator_domains << "\n";
    os << "require_anchor_per_planetary_domain="
       << (p.require_anchor_per_planetary_domain ? "true" : "false") << "\n";
    os << "J_seconds=" << p.J_seconds << "\n";
    os << "max_hops=" << p.max_hops << "\n";
    os << "max_chain_bytes=" << p.max_chain_bytes << "\n";
    os << "high_stakes_min_diverse_chains=" << p.high_stakes_min_diverse_chains << "\n";
    os << "retention_days=" << p.retention_days << "\n";
    os << "sigma_t_max_seconds=" << p.sigma_t_max_seconds << "\n";
    os << "beacon_slack_seconds=" << p.beacon_slack_seconds << "\n";
    return os.str();
}

std::string envelope_text(const OwltEnvelope& env) {
    std::ostringstream os;
    os << "start_tai,end_tai,min_owlt,max_owlt\n";
    for (const OwltWindow& w : env.windows)
        os << w.start_tai << "," << w.end_tai << "," << w.min_owlt << "," << w.max_owlt
           << "\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_file(path.string(), ByteView(reinterpret_cast<const std::uint8_t*>(text.data()),
                                       text.size()));
}

} // namespace

std::string beacons_to_json(const std::vector<BeaconReading>& beacons) {
    json arr = json::array();
    for (const BeaconReading& b : beacons) {
        json j;
        j["beacon_id"] = b.beacon_id;
        j["planet"] = planet_name(b.domain);
        j["tai_seconds"] = b.tai.seconds;
        if (b.tai.frac)
            j["tai_frac"] = *b.tai.frac;
        j["sigma_t_seconds"] = b.sigma_t_seconds;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<BeaconReading> beacons_from_json(const std::string& text) {
    try {
        json arr = json::parse(text);
        if (!arr.is_array())
            throw Error(ErrorCode::IoError, "beacon file must hold a JSON array");
        std::vector<BeaconReading> out;
        for (const json& j : arr) {
            BeaconReading b;
            b.beacon_id = need(j, "beacon_id", "beacon reading").get<std::string>();
            b.domain = planet_from_name(need(j, "planet", "beacon reading").get<std::string>());
            b.tai = TaiTimestamp{need(j, "tai_seconds", "beacon reading").get<std::uint64_t>()};
            if (j.contains("tai_frac"))
                b.tai.frac = j["tai_frac"].get<std::uint32_t>();
            b.sigma_t_seconds =
                need(j, "sigma_t_seconds", "beacon reading").get<double>();
            out.push_back(std::move(b));
        }
        return out;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("malformed beacon file: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::IoError, e.what());
    }
}

void write_corpus(const SimOutput& out, const Scenario& s, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::path root(out_dir);
    fs::create_directories(root / "chains");
    fs::create_directories(root / "commitments");

    for (std::size_t i = 0; i < out.chains.size(); ++i) {
        std::string stem = "chain_" + std::to_string(i);
        write_file((root / "chains" / (stem + ".pottc")).string(),
                   encode_chain(out.chains[i]));
        write_file((root / "commitments" / (stem + ".pottp")).string(),
                   encode_commitment(commit_transcript(out.chains[i])));
    }
    write_file((root / "manifest.pottm").string(), encode_manifest(out.manifest));
    write_text(root / "profile.txt", profile_text(out.profile));
    write_text(root / "envelope.csv", envelope_text(out.envelope));
    write_text(root / "beacons.json", beacons_to_json(out.beacons));

    // Header timestamps are anchored to the scenario epoch so the corpus can
    // exercise both adjudication branches: with 48 blocks at exactly 600 s the
    // tip MTP lands 5200 s after t0 in UTC, comfortably past any honest
    // chain's arrival yet within reach of a tightened delta. The fixed 37-s
    // TAI-UTC offset is the modern value; corpus epochs stay in its era.
    if (s.t0_tai <= 378'691'200 + 37 + 20'000)
        invalid("scenario epoch too early to anchor a header chain");
    std::uint64_t t0_unix = s.t0_tai - 378'691'200 - 37;
    auto headers = synth_header_chain(s.seed, 48, 600.0, false, t0_unix - 20'000);
    store_headers(headers, (root / "headers.bin").string(),
                  (root / "headers.start.txt").string());

    json labels = json::array();
    for (const ExpectedLabel& label : out.labels)
        labels.push_back(label_to_json(label));
    write_text(root / "expected.json", labels.dump(2) + "\n");
}

} // namespace pott
