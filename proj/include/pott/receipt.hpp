#pragma once

#include "pott/bytes.hpp"
#include "pott/cbor.hpp"
#include "pott/schnorr.hpp"
#include "pott/sha256.hpp"

#include <compare>
#include <functional>
#include <optional>
#include <vector>

namespace pott {

// TAI seconds since the 1958-01-01 CUC epoch. The optional fractional field
// carries CUC fine units (frac / 2^32 seconds); a receipt carries it on both
// timestamps or on neither.
struct TaiTimestamp {
    std::uint64_t seconds = 0;
    std::optional<std::uint32_t> frac;

    TaiTimestamp() = default;
    TaiTimestamp(std::uint64_t s) : seconds(s) {}
    TaiTimestamp(std::uint64_t s, std::uint32_t f) : seconds(s), frac(f) {}

    friend bool operator==(const TaiTimestamp&, const TaiTimestamp&) = default;
};

// Ordering for monotonicity rules: (seconds, frac) lexicographic, absent frac
// comparing as zero.
std::strong_ordering compare_time(const TaiTimestamp& a, const TaiTimestamp& b);

// One hop's custody attestation. Wire form is a canonical CBOR map with
// integer keys 0..6 (plus 7/8 when fractional timestamps are carried).
//
// `wide_times` records whether the timestamp items use fixed 8-byte CBOR
// arguments rather than shortest form. New receipts use shortest form; the
// flag exists so a decoded receipt re-encodes byte-identically either way.
struct Receipt {
    Digest32 h{};
    Nonce16 nu{};
    NodeId node{};
    TaiTimestamp t_in;
    TaiTimestamp t_out;
    Digest32 prev{};
    Sig64 sig{};
    bool wide_times = false;

    friend bool operator==(const Receipt&, const Receipt&) = default;
};

struct ReceiptChain {
    std::vector<Receipt> receipts; // index 0 = origin hop

    friend bool operator==(const ReceiptChain&, const ReceiptChain&) = default;
};

Bytes encode_receipt(const Receipt& r);
Receipt decode_receipt(ByteView bytes);

// Canonical CBOR of the map restricted to keys 0..5: the message signed by
// the hop and the preimage of the next hop's prev link.
Bytes signing_message(const Receipt& r);
Digest32 link_hash(const Receipt& r);

Bytes encode_chain(const ReceiptChain& chain);
ReceiptChain decode_chain(ByteView bytes);
std::size_t encoded_chain_size(const ReceiptChain& chain);

// All-zero prev marking an origin receipt.
Digest32 zero_prev();

// Aggregate-timestamp form used by container formats (commitments, dispute
// bundles): a [seconds] or [seconds, frac] array.
void write_timestamp_array(cbor::Writer& w, const TaiTimestamp& t);
TaiTimestamp read_timestamp_array(cbor::Reader& rd);

using EntropyFn = std::function<void(std::uint8_t*, std::size_t)>;

ReceiptChain originate_chain(const PayloadDigest& h, const schnorr::Keypair& key,
                             TaiTimestamp t_in, TaiTimestamp t_out, const EntropyFn& rng,
                             const std::array<std::uint8_t, 32>& aux_rand = {});

ReceiptChain append_hop(const ReceiptChain& chain, const schnorr::Keypair& key,
                        TaiTimestamp t_in, TaiTimestamp t_out,
                        const std::array<std::uint8_t, 32>& aux_rand = {});

} // namespace pott
