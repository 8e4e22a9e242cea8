#include "pott/receipt.hpp"

#include "pott/cbor.hpp"
#include "pott/errors.hpp"

#include <algorithm>

namespace pott {

namespace {

// Keys 7/8 (fractional timestamps) are accepted only as a pair; any other
// shape beyond keys 0..6 is rejected.
constexpr std::uint64_t kKeyTinFrac = 7;
constexpr std::uint64_t kKeyToutFrac = 8;

void check_frac_pairing(const Receipt& r) {
    if (r.t_in.frac.has_value() != r.t_out.frac.has_value())
        throw Error(ErrorCode::ClockError,
                    "fractional field must be present on both timestamps or neither");
}

void write_timestamp(cbor::Writer& w, const TaiTimestamp& t, bool wide) {
    if (wide)
        w.unsigned_int_fixed64(t.seconds);
    else
        w.unsigned_int(t.seconds);
}

void write_frac(cbor::Writer& w, std::uint32_t frac, bool wide) {
    if (wide)
        w.unsigned_int_fixed32(frac);
    else
        w.unsigned_int(frac);
}

// Shared body for the wire map and the signing message: keys 0..5, then the
// caller appends sig / frac items as appropriate.
void write_core_items(cbor::Writer& w, const Receipt& r) {
    w.unsigned_int(0);
    w.byte_string(r.h);
    w.unsigned_int(1);
    w.byte_string(r.nu);
    w.unsigned_int(2);
    w.byte_string(r.node);
    w.unsigned_int(3);
    write_timestamp(w, r.t_in, r.wide_times);
    w.unsigned_int(4);
    write_timestamp(w, r.t_out, r.wide_times);
    w.unsigned_int(5);
    w.byte_string(r.prev);
}

void expect_key(cbor::Reader& rd, std::uint64_t want) {
    std::uint64_t got = rd.unsigned_int();
    if (got == want)
        return;
    if (got <= kKeyToutFrac)
        throw Error(ErrorCode::NonCanonicalEncoding,
                    "map keys out of ascending order or duplicated");
    throw Error(ErrorCode::UnknownKey, "unknown receipt key " + std::to_string(got));
}

template <std::size_t N>
void read_fixed_bstr(cbor::Reader& rd, std::array<std::uint8_t, N>& out) {
    ByteView b = rd.byte_string();
    if (b.size() != N)
        throw_wrong_length(N, b.size());
    std::copy(b.begin(), b.end(), out.begin());
}

// Timestamps accept shortest form or the fixed 8-byte form; anything else
// (e.g. a 2-byte argument holding a small value) is non-canonical. Returns
// whether the item used the non-shortest wide form.
bool read_timestamp(cbor::Reader& rd, TaiTimestamp& out) {
    cbor::UnsignedItem item = rd.unsigned_int_any_width();
    if (!item.shortest && item.arg_bytes != 8)
        throw Error(ErrorCode::NonCanonicalEncoding, "timestamp argument not shortest-form");
    out.seconds = item.value;
    return !item.shortest;
}

std::uint32_t read_frac(cbor::Reader& rd, bool wide) {
    cbor::UnsignedItem item = rd.unsigned_int_any_width();
    if (wide) {
        if (item.arg_bytes != 4)
            throw Error(ErrorCode::NonCanonicalEncoding,
                        "fractional field must use a 4-byte argument in wide receipts");
    } else if (!item.shortest) {
        throw Error(ErrorCode::NonCanonicalEncoding, "fractional field not shortest-form");
    }
    if (item.value > 0xFFFFFFFFull)
        throw_wrong_length(4, 8);
    return static_cast<std::uint32_t>(item.value);
}

Receipt decode_receipt_item(cbor::Reader& rd) {
    std::uint64_t entries = rd.map_header();
    if (entries < 7)
        throw Error(ErrorCode::NonCanonicalEncoding,
                    "receipt map must carry keys 0-6");
    Receipt r;
    expect_key(rd, 0);
    read_fixed_bstr(rd, r.h);
    expect_key(rd, 1);
    read_fixed_bstr(rd, r.nu);
    expect_key(rd, 2);
    read_fixed_bstr(rd, r.node);
    expect_key(rd, 3);
    bool wide_in = read_timestamp(rd, r.t_in);
    expect_key(rd, 4);
    bool wide_out = read_timestamp(rd, r.t_out);
    if (wide_in != wide_out)
        throw Error(ErrorCode::NonCanonicalEncoding,
                    "timestamps mix wide and shortest-form arguments");
    r.wide_times = wide_in;
    expect_key(rd, 5);
    read_fixed_bstr(rd, r.prev);
    expect_key(rd, 6);
    read_fixed_bstr(rd, r.sig);
    if (entries == 7)
        return r;
    if (entries != 9) {
        // e.g. a lone key 7: not a shape we know
        std::uint64_t got = rd.unsigned_int();
        throw Error(ErrorCode::UnknownKey, "unknown receipt key " + std::to_string(got));
    }
    expect_key(rd, kKeyTinFrac);
    r.t_in.frac = read_frac(rd, r.wide_times);
    expect_key(rd, kKeyToutFrac);
    r.t_out.frac = read_frac(rd, r.wide_times);
    return r;
}

Bytes encode_map(const Receipt& r, bool include_sig) {
    check_frac_pairing(r);
    bool frac = r.t_in.frac.has_value();
    cbor::Writer w;
    std::uint64_t entries = include_sig ? (frac ? 9 : 7) : 6;
    w.map_header(entries);
    write_core_items(w, r);
    if (!include_sig)
        return w.take();
    w.unsigned_int(6);
    w.byte_string(r.sig);
    if (frac) {
        w.unsigned_int(kKeyTinFrac);
        write_frac(w, *r.t_in.frac, r.wide_times);
        w.unsigned_int(kKeyToutFrac);
        write_frac(w, *r.t_out.frac, r.wide_times);
    }
    return w.take();
}

Receipt build_receipt(const Digest32& h, const Nonce16& nu, const schnorr::Keypair& key,
                      TaiTimestamp t_in, TaiTimestamp t_out, const Digest32& prev,
                      const std::array<std::uint8_t, 32>& aux_rand) {
    Receipt r;
    r.h = h;
    r.nu = nu;
    r.node = key.pub;
    r.t_in = t_in;
    r.t_out = t_out;
    r.prev = prev;
    check_frac_pairing(r);
    if (compare_time(t_in, t_out) == std::strong_ordering::greater)
        throw Error(ErrorCode::ClockError, "t_in exceeds t_out");
    r.sig = schnorr::sign(signing_message(r), key, aux_rand);
    return r;
}

} // namespace

std::strong_ordering compare_time(const TaiTimestamp& a, const TaiTimestamp& b) {
    if (auto c = a.seconds <=> b.seconds; c != 0)
        return c;
    return a.frac.value_or(0) <=> b.frac.value_or(0);
}

Bytes encode_receipt(const Receipt& r) { return encode_map(r, true); }

Receipt decode_receipt(ByteView bytes) {
    cbor::Reader rd(bytes);
    Receipt r = decode_receipt_item(rd);
    if (!rd.done())
        throw Error(ErrorCode::NonCanonicalEncoding, "trailing bytes after receipt map");
    return r;
}

Bytes signing_message(const Receipt& r) { return encode_map(r, false); }

Digest32 link_hash(const Receipt& r) { return sha256(signing_message(r)); }

Bytes encode_chain(const ReceiptChain& chain) {
    cbor::Writer w;
    w.array_header(chain.receipts.size());
    for (const Receipt& r : chain.receipts)
        w.raw(encode_receipt(r));
    return w.take();
}

ReceiptChain decode_chain(ByteView bytes) {
    cbor::Reader rd(bytes);
    std::uint64_t count = rd.array_header();
    ReceiptChain chain;
    chain.receipts.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i)
        chain.receipts.push_back(decode_receipt_item(rd));
    if (!rd.done())
        throw Error(ErrorCode::NonCanonicalEncoding, "trailing bytes after chain array");
    return chain;
}

std::size_t encoded_chain_size(const ReceiptChain& chain) {
    return encode_chain(chain).size();
}

Digest32 zero_prev() { return Digest32{}; }

ReceiptChain originate_chain(const PayloadDigest& h, const schnorr::Keypair& key,
                             TaiTimestamp t_in, TaiTimestamp t_out, const EntropyFn& rng,
                             const std::array<std::uint8_t, 32>& aux_rand) {
    Nonce16 nu{};
    rng(nu.data(), nu.size());
    ReceiptChain chain;
    chain.receipts.push_back(build_receipt(h.bytes, nu, key, t_in, t_out, zero_prev(), aux_rand));
    return chain;
}

ReceiptChain append_hop(const ReceiptChain& chain, const schnorr::Keypair& key,
                        TaiTimestamp t_in, TaiTimestamp t_out,
                        const std::array<std::uint8_t, 32>& aux_rand) {
    if (chain.receipts.empty())
        throw Error(ErrorCode::EmptyChain, "cannot append to an empty chain");
    const Receipt& last = chain.receipts.back();
    if (compare_time(t_in, last.t_out) != std::strong_ordering::greater)
        throw Error(ErrorCode::MonotonicityError,
                    "hop t_in must strictly exceed the previous hop's t_out");
    ReceiptChain out = chain;
    out.receipts.push_back(
        build_receipt(last.h, last.nu, key, t_in, t_out, link_hash(last), aux_rand));
    return out;
}

void write_timestamp_array(cbor::Writer& w, const TaiTimestamp& t) {
    w.array_header(t.frac ? 2 : 1);
    w.unsigned_int(t.seconds);
    if (t.frac)
        w.unsigned_int(*t.frac);
}

TaiTimestamp read_timestamp_array(cbor::Reader& rd) {
    std::uint64_t n = rd.array_header();
    if (n != 1 && n != 2)
        throw Error(ErrorCode::NonCanonicalEncoding, "timestamp must be [s] or [s, frac]");
    TaiTimestamp t{rd.unsigned_int()};
    if (n == 2) {
        std::uint64_t f = rd.unsigned_int();
        if (f > 0xFFFF'FFFFull)
            throw_wrong_length(4, 8);
        t.frac = static_cast<std::uint32_t>(f);
    }
    return t;
}

} // namespace pott
