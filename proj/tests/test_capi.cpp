#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pott.h"

#include <nlohmann/json.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Takes ownership of a report string from the API.
json take_json(char* s) {
    REQUIRE(s != nullptr);
    json j = json::parse(s);
    pott_string_free(s);
    return j;
}

struct ChainHandle {
    pott_chain* h = nullptr;
    explicit ChainHandle(const char* path) { REQUIRE(pott_chain_load(path, &h) == 0); }
    ~ChainHandle() { pott_chain_free(h); }
};

struct Fixture {
    pott_manifest* manifest = nullptr;
    pott_profile* profile = nullptr;
    pott_envelope* envelope = nullptr;
    pott_beacons* beacons = nullptr;
    std::string root;

    explicit Fixture(const std::string& corpus_root) : root(corpus_root) {
        REQUIRE(pott_manifest_load((root + "/manifest.pottm").c_str(), 2'080'000'000, 1,
                                   &manifest) == 0);
        REQUIRE(pott_profile_load((root + "/profile.txt").c_str(), &profile) == 0);
        REQUIRE(pott_envelope_load((root + "/envelope.csv").c_str(), &envelope) == 0);
        REQUIRE(pott_beacons_load((root + "/beacons.json").c_str(), &beacons) == 0);
    }
    ~Fixture() {
        pott_beacons_free(beacons);
        pott_envelope_free(envelope);
        pott_profile_free(profile);
        pott_manifest_free(manifest);
    }
    std::string chain(int i) const {
        return root + "/chains/chain_" + std::to_string(i) + ".pottc";
    }
};

fs::path temp_root() {
    fs::path p = fs::temp_directory_path() / "pott_capi_test";
    fs::create_directories(p);
    return p;
}

std::string write_temp(const char* name, const std::string& content) {
    fs::path p = temp_root() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
}

} // namespace

TEST_CASE("keygen is deterministic under a seed and random without one") {
    uint8_t seed[32];
    std::memset(seed, 0x41, sizeof seed);
    char *sec1, *pub1, *sec2, *pub2;
    REQUIRE(pott_keygen(seed, &sec1, &pub1) == 0);
    REQUIRE(pott_keygen(seed, &sec2, &pub2) == 0);
    CHECK(std::string(sec1) == sec2);
    CHECK(std::string(pub1) == pub2);
    CHECK(std::strlen(pub1) == 64);
    CHECK(std::strlen(sec1) == 64);
    CHECK(std::string(sec1) != pub1);
    pott_string_free(sec1);
    pott_string_free(pub1);
    pott_string_free(sec2);
    pott_string_free(pub2);

    char *ra, *rpa, *rb, *rpb;
    REQUIRE(pott_keygen(nullptr, &ra, &rpa) == 0);
    REQUIRE(pott_keygen(nullptr, &rb, &rpb) == 0);
    CHECK(std::string(ra) != rb);
    pott_string_free(ra);
    pott_string_free(rpa);
    pott_string_free(rb);
    pott_string_free(rpb);

    CHECK(pott_keygen(nullptr, nullptr, nullptr) == 2);
    CHECK(std::string(pott_last_error()).size() > 0);
}

TEST_CASE("artifact loaders distinguish usage, format, and absence") {
    pott_chain* c = nullptr;
    CHECK(pott_chain_load(nullptr, &c) == 2);
    CHECK(pott_chain_load("data/corpus/no_such_file.pottc", &c) == 3);
    std::string junk = write_temp("junk.pottc", "this is not cbor");
    CHECK(pott_chain_load(junk.c_str(), &c) == 3);
    CHECK(pott_chain_load("data/corpus/honest_small/chains/chain_0.pottc", &c) == 0);
    pott_chain_free(c);

    pott_beacons* b = nullptr;
    std::string badjson = write_temp("bad.json", "{nope");
    CHECK(pott_beacons_load(badjson.c_str(), &b) == 3);
}

TEST_CASE("manifest staleness is an explicit verification failure") {
    pott_manifest* m = nullptr;
    const char* path = "data/corpus/honest_small/manifest.pottm";
    // issued around the scenario epoch with a 720 h TTL: far future is stale
    CHECK(pott_manifest_load(path, 3'000'000'000, 1, &m) == 1);
    CHECK(pott_manifest_load(path, 3'000'000'000, 0, &m) == 0);
    pott_manifest_free(m);
    m = nullptr;
    CHECK(pott_manifest_load(path, 2'080'000'000, 1, &m) == 0);
    pott_manifest_free(m);
}

TEST_CASE("verify reports compliant honest chains") {
    Fixture f("data/corpus/honest_small");
    ChainHandle c(f.chain(0).c_str());
    char* report = nullptr;
    CHECK(pott_verify(c.h, f.manifest, f.profile, f.envelope, f.beacons, &report) == 0);
    json j = take_json(report);
    CHECK(j["structural_ok"] == true);
    CHECK(j["failures"].empty());
    CHECK(j["policy"]["compliant"] == true);
    CHECK(j["policy"]["assurance"] == "full");
    CHECK(j["hop_count"] == 3);
    CHECK(j["evidence_h"].get<std::string>().size() == 64);
}

TEST_CASE("verify surfaces structural findings on tampered chains") {
    Fixture f("data/corpus/m2_suite");
    ChainHandle spliced(f.chain(2).c_str());
    char* report = nullptr;
    CHECK(pott_verify(spliced.h, f.manifest, f.profile, f.envelope, f.beacons, &report) ==
          1);
    json j = take_json(report);
    CHECK(j["structural_ok"] == false);
    bool saw_r2 = false, saw_r4 = false;
    for (const auto& fail : j["failures"]) {
        if (fail["rule"] == "R2")
            saw_r2 = true;
        if (fail["rule"] == "R4")
            saw_r4 = true;
    }
    CHECK(saw_r2);
    CHECK(saw_r4);
    CHECK(j["policy"]["compliant"] == false);
}

TEST_CASE("verify surfaces pure policy findings") {
    Fixture f("data/corpus/m2_suite");
    ChainHandle backdated(f.chain(3).c_str());
    char* report = nullptr;
    CHECK(pott_verify(backdated.h, f.manifest, f.profile, f.envelope, f.beacons,
                      &report) == 1);
    json j = take_json(report);
    CHECK(j["structural_ok"] == true);
    REQUIRE(j["policy"]["violations"].size() == 1);
    CHECK(j["policy"]["violations"][0]["check"] == "P5");
    CHECK(j["policy"]["assurance"] == "downgraded");
}

TEST_CASE("missing beacons downgrade an otherwise honest chain") {
    Fixture f("data/corpus/honest_small");
    ChainHandle c(f.chain(0).c_str());
    char* report = nullptr;
    CHECK(pott_verify(c.h, f.manifest, f.profile, f.envelope, nullptr, &report) == 1);
    json j = take_json(report);
    bool saw_p4 = false;
    for (const auto& v : j["policy"]["violations"])
        if (v["check"] == "P4")
            saw_p4 = true;
    CHECK(saw_p4);
}

TEST_CASE("high-stakes demands diverse compliant chains") {
    Fixture pair("data/corpus/honest_pair");
    ChainHandle a(pair.chain(0).c_str());
    ChainHandle b(pair.chain(1).c_str());
    char* report = nullptr;

    const pott_chain* both[2] = {a.h, b.h};
    CHECK(pott_verify_high_stakes(both, 2, pair.manifest, pair.profile, pair.envelope,
                                  pair.beacons, &report) == 0);
    json ok = take_json(report);
    CHECK(ok["high_stakes"]["satisfied"] == true);
    CHECK(ok["high_stakes"]["payload_consistent"] == true);
    CHECK(ok["chains"].size() == 2);

    const pott_chain* one[1] = {a.h};
    report = nullptr;
    CHECK(pott_verify_high_stakes(one, 1, pair.manifest, pair.profile, pair.envelope,
                                  pair.beacons, &report) == 1);
    json single = take_json(report);
    CHECK(single["high_stakes"]["satisfied"] == false);
    std::string detail = single["high_stakes"]["detail"];
    CHECK(detail.find("disjoint") != std::string::npos);

    // same-roster chains: compliant but operator-overlapping
    Fixture m2("data/corpus/m2_suite");
    ChainHandle c0(m2.chain(0).c_str());
    ChainHandle c1(m2.chain(1).c_str());
    const pott_chain* overlapping[2] = {c0.h, c1.h};
    report = nullptr;
    CHECK(pott_verify_high_stakes(overlapping, 2, m2.manifest, m2.profile, m2.envelope,
                                  m2.beacons, &report) == 1);
    take_json(report);
}

TEST_CASE("adjudication accepts the corpus fixture and rejects under pressure") {
    ChainHandle c("data/corpus/honest_small/chains/chain_0.pottc");
    const char* hb = "data/corpus/honest_small/headers.bin";
    const char* hs = "data/corpus/honest_small/headers.start.txt";
    const char* leap = "data/leap_seconds.txt";
    std::string bundle_path = (temp_root() / "bundle.bin").string();

    char* report = nullptr;
    CHECK(pott_adjudicate(c.h, hb, hs, leap, 840'100, 3720, 3600, 0,
                          "data/corpus/honest_small/beacons.json", bundle_path.c_str(),
                          &report) == 0);
    json j = take_json(report);
    CHECK(j["verdict"] == "accept");
    CHECK(j["tip_height"] == 840'047);
    bool window_ok = j["window"] == json({840'000, 840'047});
    CHECK(window_ok);
    CHECK(fs::file_size(bundle_path) > 609); // bundle embeds the whole 3-hop chain
    std::string rationale = j["rationale"];
    CHECK(rationale.find("accept") != std::string::npos);

    // time branch: an enormous safety margin pushes t* past the bound
    report = nullptr;
    CHECK(pott_adjudicate(c.h, hb, hs, leap, 840'100, 99'999, 3600, 0, nullptr, nullptr,
                          &report) == 1);
    json jt = take_json(report);
    CHECK(jt["verdict"] == "reject");
    CHECK(jt["rationale"].get<std::string>().find("time branch") != std::string::npos);

    // height branch: expiry already reached
    report = nullptr;
    CHECK(pott_adjudicate(c.h, hb, hs, leap, 840'000, 3720, 3600, 0, nullptr, nullptr,
                          &report) == 1);
    json jh = take_json(report);
    CHECK(jh["rationale"].get<std::string>().find("height branch") != std::string::npos);

    // kappa consumes the height slack the same way
    report = nullptr;
    CHECK(pott_adjudicate(c.h, hb, hs, leap, 840'100, 3720, 3600, 100, nullptr, nullptr,
                          &report) == 1);
    take_json(report);

    CHECK(pott_adjudicate(c.h, hb, hs, leap, 840'100, -5, 3600, 0, nullptr, nullptr,
                          nullptr) == 2);
    CHECK(pott_adjudicate(c.h, "no/such/headers.bin", hs, leap, 840'100, 3720, 3600, 0,
                          nullptr, nullptr, nullptr) == 3);
}

TEST_CASE("adjudication refuses structurally broken chains") {
    ChainHandle spliced("data/corpus/m2_suite/chains/chain_2.pottc");
    char* report = nullptr;
    CHECK(pott_adjudicate(spliced.h, "data/corpus/m2_suite/headers.bin",
                          "data/corpus/m2_suite/headers.start.txt",
                          "data/leap_seconds.txt", 840'100, 3720, 3600, 0, nullptr,
                          nullptr, &report) == 1);
    json j = take_json(report);
    CHECK(j["verdict"] == "reject");
    CHECK(j["structural_ok"] == false);
}

TEST_CASE("cltv arithmetic round-trips through the ABI") {
    char* report = nullptr;
    REQUIRE(pott_cltv(22, 60, 144, 2, 10, &report) == 0);
    json j = take_json(report);
    CHECK(j["delta_blocks"] == 11);
    CHECK(j["total_blocks"] == 157);

    report = nullptr;
    REQUIRE(pott_cltv(0, 0, 144, 2, 10, &report) == 0);
    json z = take_json(report);
    CHECK(z["delta_blocks"] == 0);
    CHECK(z["total_blocks"] == 146);

    CHECK(pott_cltv(-1, 0, 144, 2, 10, nullptr) == 2);
    CHECK(pott_cltv(22, 60, 144, 2, 0, nullptr) == 2);

    char* csv = nullptr;
    REQUIRE(pott_cltv_table(&csv) == 0);
    std::string table(csv);
    pott_string_free(csv);
    CHECK(table.rfind("owlt_min,J,delta_blocks\n", 0) == 0);
    CHECK(table.find("\n22.0,60,11\n") != std::string::npos);
}

TEST_CASE("budget arithmetic round-trips through the ABI") {
    char* report = nullptr;
    REQUIRE(pott_budget(52'560, 80, &report) == 0);
    json j = take_json(report);
    CHECK(j["bytes_per_year"] == 4'204'800.0);
    double bps = j["sustained_bps"];
    bool bps_ok = bps > 1.06 && bps < 1.08;
    CHECK(bps_ok);

    report = nullptr;
    REQUIRE(pott_budget(0, 80, &report) == 0);
    json z = take_json(report);
    CHECK(z["bytes_per_year"] == 0.0);
    CHECK(z["sustained_bps"] == 0.0);

    CHECK(pott_budget(52'560, -1.0, nullptr) == 2);
}

TEST_CASE("simulate writes a corpus and maps failures to the right codes") {
    fs::path out = temp_root() / "sim_out";
    fs::remove_all(out);
    char* report = nullptr;
    REQUIRE(pott_simulate("data/scenarios/honest_small.json", out.string().c_str(),
                          &report) == 0);
    json j = take_json(report);
    CHECK(j["chains"] == 1);
    CHECK(fs::exists(out / "expected.json"));
    CHECK(fs::exists(out / "chains/chain_0.pottc"));

    std::string bad = write_temp("bad_scenario.json", "{\"seed\": 1}");
    CHECK(pott_simulate(bad.c_str(), (temp_root() / "x").string().c_str(), nullptr) == 2);
    CHECK(pott_simulate("data/scenarios/absent.json",
                        (temp_root() / "x").string().c_str(), nullptr) == 3);
}

TEST_CASE("commitments round-trip and openings discriminate") {
    ChainHandle c("data/corpus/honest_small/chains/chain_0.pottc");
    std::string cpath = (temp_root() / "c.pottp").string();
    char* report = nullptr;
    REQUIRE(pott_commit(c.h, cpath.c_str(), &report) == 0);
    json j = take_json(report);
    CHECK(j["h_txpt"].get<std::string>().size() == 64);
    CHECK(j["hop_count"] == 3);

    report = nullptr;
    CHECK(pott_open(cpath.c_str(), c.h, &report) == 0);
    json ok = take_json(report);
    CHECK(ok["ok"] == true);
    CHECK(ok["violations"].empty());

    ChainHandle other("data/corpus/m2_suite/chains/chain_0.pottc");
    report = nullptr;
    CHECK(pott_open(cpath.c_str(), other.h, &report) == 1);
    json bad = take_json(report);
    CHECK(bad["ok"] == false);
    CHECK(bad["violations"].size() > 0);

    std::string junk = write_temp("junk.pottp", "not a commitment");
    CHECK(pott_open(junk.c_str(), c.h, nullptr) == 3);
}

TEST_CASE("last error is per-call and descriptive") {
    pott_chain* c = nullptr;
    CHECK(pott_chain_load("data/corpus/no_such_file.pottc", &c) == 3);
    std::string msg = pott_last_error();
    CHECK(msg.size() > 0);
    ChainHandle good("data/corpus/honest_small/chains/chain_0.pottc");
    CHECK(std::string(pott_last_error()).empty()); // success clears it
}
