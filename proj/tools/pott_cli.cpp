// Operator CLI for the proof-of-transit toolkit. Everything goes through
// the shared-library C API; this file only parses flags, shuttles files,
// and renders reports. Exit codes follow the library convention:
// 0 ok / 1 verification failed / 2 usage / 3 unreadable input.

#include "pott.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Format { JsonLines, Text };

Format parse_format(const std::string& s) {
    return s == "text" ? Format::Text : Format::JsonLines;
}

// One JSON object per line on stdout, even on failure paths, so scripts can
// always parse the last line of output.
void emit_json(const json& j) { std::cout << j.dump() << "\n"; }

int fail(Format fmt, int status, const std::string& msg) {
    if (fmt == Format::JsonLines)
        emit_json({{"error", msg}, {"status", status}});
    else
        std::cout << "error: " << msg << "\n";
    return status;
}

int fail_api(Format fmt, int status) { return fail(fmt, status, pott_last_error()); }

std::string take_string(char* s) {
    std::string out = s ? s : "";
    pott_string_free(s);
    return out;
}

// RAII over the opaque handles so early returns cannot leak.
template <typename T, void (*Free)(T*)> struct Handle {
    T* h = nullptr;
    ~Handle() { Free(h); }
    T** slot() { return &h; }
    operator T*() const { return h; }
};
using Chain = Handle<pott_chain, pott_chain_free>;
using Manifest = Handle<pott_manifest, pott_manifest_free>;
using Profile = Handle<pott_profile, pott_profile_free>;
using Envelope = Handle<pott_envelope, pott_envelope_free>;
using Beacons = Handle<pott_beacons, pott_beacons_free>;

/* ---- text renderers --------------------------------------------------- */

void render_chain_report(const json& j, const std::string& indent = "") {
    std::cout << indent << "structural: "
              << (j.at("structural_ok").get<bool>() ? "ok" : "FAIL") << "\n";
    for (const auto& f : j.at("failures"))
        std::cout << indent << "  " << f.at("rule").get<std::string>() << " hop "
                  << f.at("hop") << ": " << f.at("detail").get<std::string>() << "\n";
    const auto& p = j.at("policy");
    std::cout << indent << "policy: "
              << (p.at("compliant").get<bool>() ? "compliant" : "non-compliant") << " ("
              << p.at("assurance").get<std::string>() << ")\n";
    for (const auto& v : p.at("violations"))
        std::cout << indent << "  " << v.at("check").get<std::string>() << ": "
                  << v.at("detail").get<std::string>() << "\n";
}

void render_report(Format fmt, const std::string& report_json,
                   void (*text_renderer)(const json&)) {
    if (fmt == Format::JsonLines) {
        std::cout << report_json << "\n";
        return;
    }
    text_renderer(json::parse(report_json));
}

/* ---- keygen ----------------------------------------------------------- */

int run_keygen(Format fmt, const std::string& out_prefix, const std::string& seed_hex) {
    std::optional<std::array<uint8_t, 32>> seed;
    if (!seed_hex.empty()) {
        if (seed_hex.size() != 64 ||
            seed_hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
            return fail(fmt, 2, "--seed wants 64 hex characters");
        seed.emplace();
        for (size_t i = 0; i < 32; ++i)
            (*seed)[i] = static_cast<uint8_t>(
                std::stoul(seed_hex.substr(2 * i, 2), nullptr, 16));
    }

    fs::path sec_path = out_prefix + ".sec";
    fs::path pub_path = out_prefix + ".pub";
    if (fs::exists(sec_path) || fs::exists(pub_path))
        return fail(fmt, 3, "refusing to overwrite existing key files at " + out_prefix);

    char *sec = nullptr, *pub = nullptr;
    if (int rc = pott_keygen(seed ? seed->data() : nullptr, &sec, &pub); rc != 0)
        return fail_api(fmt, rc);
    std::string secret = take_string(sec), pub_hex = take_string(pub);

    std::ofstream(sec_path) << secret << "\n";
    std::ofstream(pub_path) << pub_hex << "\n";
    if (!fs::exists(sec_path) || !fs::exists(pub_path))
        return fail(fmt, 3, "could not write key files");

    if (fmt == Format::JsonLines)
        emit_json({{"secret_path", sec_path.string()},
                   {"public_path", pub_path.string()},
                   {"public", pub_hex}});
    else
        std::cout << "wrote " << sec_path.string() << " and " << pub_path.string()
                  << "\npublic: " << pub_hex << "\n";
    return 0;
}

/* ---- verify ----------------------------------------------------------- */

struct VerifyInputs {
    Manifest manifest;
    Profile profile;
    Envelope envelope;
    Beacons beacons;
};

int load_verify_inputs(const std::string& manifest_path, const std::string& profile_path,
                       const std::string& envelope_path, const std::string& beacons_path,
                       uint64_t now_tai, bool check_staleness, VerifyInputs& in) {
    if (int rc = pott_manifest_load(manifest_path.c_str(), now_tai,
                                    check_staleness ? 1 : 0, in.manifest.slot()))
        return rc;
    if (int rc = pott_profile_load(profile_path.c_str(), in.profile.slot()))
        return rc;
    if (int rc = pott_envelope_load(envelope_path.c_str(), in.envelope.slot()))
        return rc;
    return pott_beacons_load(beacons_path.c_str(), in.beacons.slot());
}

void render_verify_text(const json& j) { render_chain_report(j); }

void render_high_stakes_text(const json& j) {
    int i = 0;
    for (const auto& c : j.at("chains")) {
        std::cout << "chain " << i++ << ":\n";
        render_chain_report(c, "  ");
    }
    const auto& hs = j.at("high_stakes");
    std::cout << "high-stakes: "
              << (hs.at("satisfied").get<bool>() ? "satisfied" : "NOT satisfied");
    if (hs.contains("detail"))
        std::cout << " — " << hs.at("detail").get<std::string>();
    std::cout << "\n";
}

int run_verify(Format fmt, const std::string& chain_path,
               const std::string& manifest_path, const std::string& profile_path,
               const std::string& envelope_path, const std::string& beacons_path,
               bool high_stakes, const std::vector<std::string>& extra_chains,
               uint64_t now_tai, bool check_staleness) {
    VerifyInputs in;
    if (int rc = load_verify_inputs(manifest_path, profile_path, envelope_path,
                                    beacons_path, now_tai, check_staleness, in))
        return fail_api(fmt, rc);

    // a bare --high-stakes flag shows up as one empty-string value
    std::vector<std::string> paths{chain_path};
    for (const std::string& p : extra_chains)
        if (!p.empty())
            paths.push_back(p);

    std::vector<std::unique_ptr<Chain>> chains;
    std::vector<const pott_chain*> raw;
    for (const std::string& p : paths) {
        auto c = std::make_unique<Chain>();
        if (int rc = pott_chain_load(p.c_str(), c->slot()))
            return fail_api(fmt, rc);
        raw.push_back(c->h);
        chains.push_back(std::move(c));
    }

    char* report = nullptr;
    int rc;
    if (high_stakes)
        rc = pott_verify_high_stakes(raw.data(), raw.size(), in.manifest, in.profile,
                                     in.envelope, in.beacons, &report);
    else
        rc = pott_verify(raw[0], in.manifest, in.profile, in.envelope, in.beacons,
                         &report);
    if (!report)
        return fail_api(fmt, rc);
    render_report(fmt, take_string(report),
                  high_stakes ? render_high_stakes_text : render_verify_text);
    return rc;
}

/* ---- adjudicate ------------------------------------------------------- */

void render_adjudicate_text(const json& j) {
    std::cout << "verdict: " << j.at("verdict").get<std::string>() << "\n";
    if (j.contains("rationale"))
        std::cout << "rationale: " << j.at("rationale").get<std::string>() << "\n";
    if (j.contains("t_star_utc"))
        std::cout << "t*: " << j.at("t_star").at("seconds") << " s TAI = "
                  << j.at("t_star_utc") << " s UTC\n"
                  << "mtp: " << j.at("mtp") << " s UTC\n"
                  << "tip: height " << j.at("tip_height") << " (window "
                  << j.at("window")[0] << ".." << j.at("window")[1] << ")\n";
    if (j.contains("bundle_path"))
        std::cout << "bundle: " << j.at("bundle_path").get<std::string>() << "\n";
}

int run_adjudicate(Format fmt, const std::string& chain_path,
                   const std::string& headers_path, std::string start_file,
                   const std::string& leap_table, uint64_t h_expiry, double delta,
                   double delta_mtp, uint64_t kappa, const std::string& beacons_path,
                   const std::string& bundle_path) {
    if (start_file.empty())
        start_file = fs::path(headers_path).replace_extension(".start.txt").string();

    Chain chain;
    if (int rc = pott_chain_load(chain_path.c_str(), chain.slot()))
        return fail_api(fmt, rc);

    char* report = nullptr;
    int rc = pott_adjudicate(chain, headers_path.c_str(), start_file.c_str(),
                             leap_table.c_str(), h_expiry, delta, delta_mtp, kappa,
                             beacons_path.empty() ? nullptr : beacons_path.c_str(),
                             bundle_path.empty() ? nullptr : bundle_path.c_str(),
                             &report);
    if (!report)
        return fail_api(fmt, rc);
    render_report(fmt, take_string(report), render_adjudicate_text);
    return rc;
}

/* ---- latency arithmetic ----------------------------------------------- */

int run_cltv(Format fmt, bool table, double owlt, double jitter, uint64_t base,
             uint64_t mop, double btarget) {
    if (table) {
        char* csv = nullptr;
        if (int rc = pott_cltv_table(&csv))
            return fail_api(fmt, rc);
        std::string text = take_string(csv);
        if (fmt == Format::JsonLines)
            emit_json({{"csv", text}});
        else
            std::cout << text;
        return 0;
    }
    char* report = nullptr;
    int rc = pott_cltv(owlt, jitter, base, mop, btarget, &report);
    if (rc != 0)
        return fail_api(fmt, rc);
    std::string text = take_string(report);
    if (fmt == Format::JsonLines) {
        std::cout << text << "\n";
    } else {
        json j = json::parse(text);
        std::cout << "delta=" << j.at("delta_blocks").get<uint64_t>()
                  << " total=" << j.at("total_blocks").get<uint64_t>() << "\n";
    }
    return 0;
}

int run_budget(Format fmt, uint64_t blocks_per_year, double bytes_per_block) {
    char* report = nullptr;
    int rc = pott_budget(blocks_per_year, bytes_per_block, &report);
    if (rc != 0)
        return fail_api(fmt, rc);
    std::string text = take_string(report);
    if (fmt == Format::JsonLines) {
        std::cout << text << "\n";
        return 0;
    }
    json j = json::parse(text);
    double bytes_year = j.at("bytes_per_year");
    double bps = j.at("sustained_bps");
    char buf[64];
    if (bytes_year >= 1e9)
        std::snprintf(buf, sizeof buf, "%.2f GB/yr", bytes_year / 1e9);
    else
        std::snprintf(buf, sizeof buf, "%.1f MB/yr", bytes_year / 1e6);
    std::string line = buf;
    if (bps >= 100)
        std::snprintf(buf, sizeof buf, ", %.0f bps", bps);
    else
        std::snprintf(buf, sizeof buf, ", %.2f bps", bps);
    std::cout << line << buf << "\n";
    return 0;
}

/* ---- simulate / privacy ----------------------------------------------- */

int run_simulate(Format fmt, const std::string& scenario, const std::string& out_dir) {
    char* report = nullptr;
    int rc = pott_simulate(scenario.c_str(), out_dir.c_str(), &report);
    if (rc != 0)
        return fail_api(fmt, rc);
    std::string text = take_string(report);
    if (fmt == Format::JsonLines) {
        std::cout << text << "\n";
    } else {
        json j = json::parse(text);
        std::cout << "wrote " << j.at("chains") << " chain(s) to "
                  << j.at("out_dir").get<std::string>() << "\n";
    }
    return 0;
}

int run_commit(Format fmt, const std::string& chain_path, const std::string& out_path) {
    Chain chain;
    if (int rc = pott_chain_load(chain_path.c_str(), chain.slot()))
        return fail_api(fmt, rc);
    char* report = nullptr;
    int rc = pott_commit(chain, out_path.empty() ? nullptr : out_path.c_str(), &report);
    if (rc != 0)
        return fail_api(fmt, rc);
    std::string text = take_string(report);
    if (fmt == Format::JsonLines) {
        std::cout << text << "\n";
    } else {
        json j = json::parse(text);
        std::cout << "committed " << j.at("hop_count") << " hop(s), h_txpt="
                  << j.at("h_txpt").get<std::string>() << "\n";
        if (j.contains("path"))
            std::cout << "wrote " << j.at("path").get<std::string>() << "\n";
    }
    return 0;
}

void render_open_text(const json& j) {
    if (j.at("ok").get<bool>()) {
        std::cout << "opening: ok\n";
        return;
    }
    std::cout << "opening: FAIL\n";
    for (const auto& v : j.at("violations"))
        std::cout << "  " << v.get<std::string>() << "\n";
}

int run_open(Format fmt, const std::string& commitment_path,
             const std::string& chain_path) {
    Chain chain;
    if (int rc = pott_chain_load(chain_path.c_str(), chain.slot()))
        return fail_api(fmt, rc);
    char* report = nullptr;
    int rc = pott_open(commitment_path.c_str(), chain, &report);
    if (!report)
        return fail_api(fmt, rc);
    render_report(fmt, take_string(report), render_open_text);
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"proof-of-transit timestamping toolkit"};
    app.require_subcommand(1);

    std::string format = "json";
    app.add_option("--format", format, "report format: json (one object per line) or text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();

    int rc = 0;

    // keygen
    std::string kg_out, kg_seed;
    auto* keygen = app.add_subcommand("keygen", "generate a relay keypair");
    keygen->add_option("out", kg_out, "output path prefix (writes .sec and .pub)")
        ->required();
    keygen->add_option("--seed", kg_seed,
                       "64 hex chars; derive the key deterministically");
    keygen->callback(
        [&] { rc = run_keygen(parse_format(format), kg_out, kg_seed); });

    // verify
    std::string v_chain, v_manifest, v_profile, v_envelope, v_beacons;
    std::vector<std::string> v_extra;
    uint64_t v_now = 0;
    auto* verify = app.add_subcommand("verify", "verify a receipt chain against policy");
    verify->add_option("chain", v_chain, "receipt chain (.pottc)")->required();
    verify->add_option("manifest", v_manifest, "signed relay manifest (.pottm)")
        ->required();
    verify->add_option("profile", v_profile, "policy profile (key=value)")->required();
    verify->add_option("envelope", v_envelope, "OWLT envelope CSV")->required();
    verify->add_option("beacons", v_beacons, "beacon readings JSON")->required();
    auto* hs_opt = verify->add_option("--high-stakes", v_extra,
                                      "demand operator-disjoint chains; extra chain "
                                      "paths may follow the flag");
    hs_opt->expected(0, -1);
    auto* now_opt = verify->add_option(
        "--now-tai", v_now, "current TAI seconds; enables manifest staleness check");
    verify->callback([&] {
        rc = run_verify(parse_format(format), v_chain, v_manifest, v_profile, v_envelope,
                        v_beacons, hs_opt->count() > 0, v_extra, v_now,
                        now_opt->count() > 0);
    });

    // adjudicate
    std::string a_chain, a_headers, a_start, a_leap = "data/leap_seconds.txt";
    std::string a_beacons, a_bundle;
    uint64_t a_expiry = 0, a_kappa = 0;
    double a_delta = 3720.0, a_delta_mtp = 3600.0;
    auto* adj = app.add_subcommand("adjudicate",
                                   "decide arrived-before-expiry against headers");
    adj->add_option("chain", a_chain, "receipt chain (.pottc)")->required();
    adj->add_option("headers", a_headers, "concatenated raw 80-byte headers")
        ->required();
    adj->add_option("--h-expiry", a_expiry, "expiry height")->required();
    adj->add_option("--start-file", a_start,
                    "start-height sidecar (default: headers path with .start.txt)");
    adj->add_option("--leap-table", a_leap, "leap-second table")
        ->capture_default_str();
    adj->add_option("--delta", a_delta, "timestamp safety margin, seconds")
        ->capture_default_str();
    adj->add_option("--delta-mtp", a_delta_mtp, "MTP lag allowance, seconds")
        ->capture_default_str();
    adj->add_option("--kappa", a_kappa, "confirmation margin, blocks")
        ->capture_default_str();
    adj->add_option("--beacons", a_beacons, "beacon readings to cite in the bundle");
    adj->add_option("--bundle", a_bundle, "write the dispute bundle CBOR here");
    adj->callback([&] {
        rc = run_adjudicate(parse_format(format), a_chain, a_headers, a_start, a_leap,
                            a_expiry, a_delta, a_delta_mtp, a_kappa, a_beacons,
                            a_bundle);
    });

    // cltv
    double c_owlt = 0, c_jitter = 0, c_btarget = 10.0;
    uint64_t c_base = 144, c_mop = 2;
    bool c_table = false;
    auto* cltv = app.add_subcommand("cltv", "size an absolute timelock");
    auto* owlt_opt = cltv->add_option("--owlt", c_owlt, "one-way light time, minutes");
    cltv->add_option("--jitter", c_jitter, "scheduling jitter J, minutes");
    cltv->add_option("--base", c_base, "terrestrial base blocks")->capture_default_str();
    cltv->add_option("--mop", c_mop, "operational margin blocks")->capture_default_str();
    cltv->add_option("--btarget", c_btarget, "block target, minutes")
        ->capture_default_str();
    cltv->add_flag("--table", c_table, "emit the full OWLT sweep as CSV");
    cltv->callback([&] {
        if (!c_table && owlt_opt->count() == 0) {
            rc = fail(parse_format(format), 2, "cltv wants --owlt (or --table)");
            return;
        }
        rc = run_cltv(parse_format(format), c_table, c_owlt, c_jitter, c_base, c_mop,
                      c_btarget);
    });

    // budget
    uint64_t b_blocks = 52'560;
    double b_bytes = 0;
    auto* budget = app.add_subcommand("budget", "anchoring bandwidth arithmetic");
    budget->add_option("--blocks-per-year", b_blocks, "blocks mined per year")
        ->capture_default_str();
    budget->add_option("--bytes-per-block", b_bytes, "average bytes per block")
        ->required();
    budget->callback(
        [&] { rc = run_budget(parse_format(format), b_blocks, b_bytes); });

    // simulate
    std::string s_scenario, s_out;
    auto* sim = app.add_subcommand("simulate", "run a scenario into a fixture corpus");
    sim->add_option("scenario", s_scenario, "scenario JSON")->required();
    sim->add_option("out_dir", s_out, "output directory")->required();
    sim->callback([&] { rc = run_simulate(parse_format(format), s_scenario, s_out); });

    // commit / open
    std::string cm_chain, cm_out;
    auto* commit = app.add_subcommand("commit", "derive a privacy commitment");
    commit->add_option("chain", cm_chain, "receipt chain (.pottc)")->required();
    commit->add_option("--out", cm_out, "write the commitment (.pottp) here");
    commit->callback([&] { rc = run_commit(parse_format(format), cm_chain, cm_out); });

    std::string o_commitment, o_chain;
    auto* open = app.add_subcommand("open", "check a chain against a commitment");
    open->add_option("commitment", o_commitment, "commitment (.pottp)")->required();
    open->add_option("chain", o_chain, "receipt chain (.pottc)")->required();
    open->callback([&] { rc = run_open(parse_format(format), o_commitment, o_chain); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help and friends
        std::cout << json{{"error", e.what()}, {"status", 2}}.dump() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    }
    return rc;
}
