#pragma once

#include "pott/bytes.hpp"

namespace pott {

Digest32 sha256(ByteView data);
Digest32 double_sha256(ByteView data);

// SHA256(SHA256(tag) || SHA256(tag) || msg), the BIP-340 tagged-hash scheme.
Digest32 tagged_sha256(const char* tag, ByteView msg);

enum class DigestKind {
    BitcoinTx,     // double-SHA-256
    BitcoinHeader, // double-SHA-256
    Bip157Filter,  // BIP157/158 filter identifier
    Generic,       // SHA-256 of canonical bytes
};

struct PayloadDigest {
    Digest32 bytes;
    DigestKind kind = DigestKind::Generic;
};

// Digest of a payload under the rule selected by `kind`. For Bip157Filter the
// input must be the raw serialized filter bytes; the identifier is
// double-SHA-256(filter) per BIP-157 (an empty filter is malformed).
PayloadDigest compute_payload_digest(ByteView payload, DigestKind kind);

const char* digest_kind_name(DigestKind kind);
DigestKind digest_kind_from_name(const std::string& name); // throws DigestError

} // namespace pott
