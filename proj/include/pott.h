/* Proof-of-transit timestamping: C API for the shared library.
 *
 * Conventions:
 *   - Every function returns a status int:
 *       0  success / compliant / accepted
 *       1  inputs well-formed but verification, policy, or adjudication failed
 *       2  invalid arguments or an invalid scenario
 *       3  unreadable, undecodable, or otherwise malformed input data
 *   - Out-parameters are written only on the paths documented below. JSON
 *     report strings are heap strings the caller must release with
 *     pott_string_free(); handles must be released with their _free function.
 *   - pott_last_error() returns a thread-local message describing the most
 *     recent failure in the calling thread (empty string if none).
 *   - No function reads the clock, the network, or anything outside the
 *     paths it is given; "now" is always an explicit argument.
 */

#ifndef POTT_H
#define POTT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pott_chain pott_chain;       /* receipt chain (.pottc)        */
typedef struct pott_manifest pott_manifest; /* signed relay roster (.pottm)  */
typedef struct pott_profile pott_profile;   /* policy knobs (key=value text) */
typedef struct pott_envelope pott_envelope; /* OWLT envelope (CSV)           */
typedef struct pott_beacons pott_beacons;   /* beacon readings (JSON array)  */

const char* pott_last_error(void);
void pott_string_free(char* s);

/* ---- artifact loading ------------------------------------------------- */

int pott_chain_load(const char* path, pott_chain** out);
void pott_chain_free(pott_chain* c);

/* check_staleness != 0 enforces the manifest TTL against now_tai. */
int pott_manifest_load(const char* path, uint64_t now_tai, int check_staleness,
                       pott_manifest** out);
void pott_manifest_free(pott_manifest* m);

int pott_profile_load(const char* path, pott_profile** out);
void pott_profile_free(pott_profile* p);

int pott_envelope_load(const char* path, pott_envelope** out);
void pott_envelope_free(pott_envelope* e);

int pott_beacons_load(const char* path, pott_beacons** out);
void pott_beacons_free(pott_beacons* b);

/* ---- keys ------------------------------------------------------------- */

/* Writes 64-char lowercase hex strings. seed32 = NULL draws the secret from
 * the OS entropy source; otherwise the key is derived deterministically from
 * the 32 seed bytes. */
int pott_keygen(const uint8_t* seed32, char** secret_hex, char** public_hex);

/* ---- verification ----------------------------------------------------- */

/* Structural rules plus policy profile evaluation. *report_json receives one
 * JSON object (rule findings, policy violations, assurance) on both the 0 and
 * 1 paths. Status 0 iff the chain is policy-compliant. */
int pott_verify(const pott_chain* chain, const pott_manifest* manifest,
                const pott_profile* profile, const pott_envelope* envelope,
                const pott_beacons* beacons, char** report_json);

/* High-stakes variant over several chains: status 0 iff enough compliant,
 * operator-disjoint chains carry the same payload. */
int pott_verify_high_stakes(const pott_chain* const* chains, size_t chain_count,
                            const pott_manifest* manifest, const pott_profile* profile,
                            const pott_envelope* envelope, const pott_beacons* beacons,
                            char** report_json);

/* ---- expiry adjudication ---------------------------------------------- */

/* t* is the last receipt's t_out. The chain must pass structural checks
 * (signatures, links, ordering) under its own relay set; headers come from
 * headers_bin_path plus the start-height sidecar. delta_seconds and
 * delta_mtp_seconds are the safety margins in seconds, kappa_blocks the
 * required confirmation margin before h_expiry. beacons_path may be NULL;
 * when given, its beacon ids are recorded in the dispute bundle.
 * bundle_out_path may be NULL; otherwise the dispute-bundle CBOR is written
 * there. Status 0 = accepted, 1 = rejected (rationale in the report). */
int pott_adjudicate(const pott_chain* chain, const char* headers_bin_path,
                    const char* headers_sidecar_path, const char* leap_table_path,
                    uint64_t h_expiry, double delta_seconds, double delta_mtp_seconds,
                    uint64_t kappa_blocks, const char* beacons_path,
                    const char* bundle_out_path, char** report_json);

/* ---- latency arithmetic ----------------------------------------------- */

/* Timelock sizing for one-way light time and jitter given in minutes. */
int pott_cltv(double owlt_minutes, double jitter_minutes, uint64_t base_blocks,
              uint64_t margin_blocks, double block_target_minutes, char** report_json);

/* The full 0.1-minute sweep as CSV (owlt_min,J,delta_blocks). */
int pott_cltv_table(char** csv);

/* Anchoring bandwidth for a yearly block count and average block size. */
int pott_budget(uint64_t blocks_per_year, double bytes_per_block, char** report_json);

/* ---- simulation ------------------------------------------------------- */

/* Runs a scenario file and writes the fixture corpus under out_dir. */
int pott_simulate(const char* scenario_path, const char* out_dir, char** report_json);

/* ---- privacy commitments ---------------------------------------------- */

/* Commits to the chain transcript; writes the commitment to out_path when
 * non-NULL. */
int pott_commit(const pott_chain* chain, const char* out_path, char** report_json);

/* Verifies a stored commitment against a revealed chain. Status 0 iff the
 * opening is consistent. */
int pott_open(const char* commitment_path, const pott_chain* chain, char** report_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POTT_H */
