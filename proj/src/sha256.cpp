#include "pott/sha256.hpp"

#include "pott/errors.hpp"

#include <cstring>
#include <map>
#include <mutex>

#include <openssl/evp.h>

namespace pott {

Digest32 sha256(ByteView data) {
    Digest32 out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != 32)
        throw Error(ErrorCode::DigestError, "SHA-256 failed");
    return out;
}

Digest32 double_sha256(ByteView data) {
    Digest32 first = sha256(data);
    return sha256(ByteView(first.data(), first.size()));
}

Digest32 tagged_sha256(const char* tag, ByteView msg) {
    // Tag midstates are tiny and few; memoize SHA256(tag) per tag.
    static std::mutex mu;
    static std::map<std::string, Digest32> tag_hashes;
    Digest32 th;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = tag_hashes.find(tag);
        if (it == tag_hashes.end()) {
            ByteView tv(reinterpret_cast<const std::uint8_t*>(tag), std::strlen(tag));
            it = tag_hashes.emplace(tag, sha256(tv)).first;
        }
        th = it->second;
    }
    Bytes buf;
    buf.reserve(64 + msg.size());
    buf.insert(buf.end(), th.begin(), th.end());
    buf.insert(buf.end(), th.begin(), th.end());
    buf.insert(buf.end(), msg.begin(), msg.end());
    return sha256(buf);
}

// Canonical Bitcoin CompactSize; returns encoded length or -1 when malformed.
static int parse_compact_size(ByteView b, std::uint64_t& value) {
    if (b.empty()) return -1;
    std::uint8_t first = b[0];
    if (first < 0xFD) {
        value = first;
        return 1;
    }
    auto read_le = [&](std::size_t n) -> bool {
        if (b.size() < 1 + n) return false;
        value = 0;
        for (std::size_t i = 0; i < n; ++i)
            value |= static_cast<std::uint64_t>(b[1 + i]) << (8 * i);
        return true;
    };
    if (first == 0xFD) {
        if (!read_le(2) || value < 0xFD) return -1;
        return 3;
    }
    if (first == 0xFE) {
        if (!read_le(4) || value <= 0xFFFF) return -1;
        return 5;
    }
    if (!read_le(8) || value <= 0xFFFFFFFFull) return -1;
    return 9;
}

PayloadDigest compute_payload_digest(ByteView payload, DigestKind kind) {
    switch (kind) {
    case DigestKind::BitcoinTx:
    case DigestKind::BitcoinHeader:
        return {double_sha256(payload), kind};
    case DigestKind::Bip157Filter: {
        // filter_hash = double-SHA-256 of the serialized filter, which must
        // start with a canonical CompactSize element count.
        std::uint64_t n = 0;
        int hdr = parse_compact_size(payload, n);
        if (hdr < 0)
            throw Error(ErrorCode::DigestError, "malformed BIP-158 filter: bad element count");
        if (n > 0 && payload.size() <= static_cast<std::size_t>(hdr))
            throw Error(ErrorCode::DigestError, "malformed BIP-158 filter: empty GCS body");
        return {double_sha256(payload), kind};
    }
    case DigestKind::Generic:
        return {sha256(payload), kind};
    }
    throw Error(ErrorCode::DigestError, "unknown digest kind");
}

const char* digest_kind_name(DigestKind kind) {
    switch (kind) {
    case DigestKind::BitcoinTx: return "bitcoin_tx";
    case DigestKind::BitcoinHeader: return "bitcoin_header";
    case DigestKind::Bip157Filter: return "bip157_filter";
    case DigestKind::Generic: return "generic";
    }
    return "unknown";
}

DigestKind digest_kind_from_name(const std::string& name) {
    if (name == "bitcoin_tx") return DigestKind::BitcoinTx;
    if (name == "bitcoin_header") return DigestKind::BitcoinHeader;
    if (name == "bip157_filter") return DigestKind::Bip157Filter;
    if (name == "generic") return DigestKind::Generic;
    throw Error(ErrorCode::DigestError, "unknown digest kind '" + name + "'");
}

} // namespace pott
