#pragma once

#include "pott/bytes.hpp"

namespace pott::schnorr {

struct Keypair {
    std::array<std::uint8_t, 32> secret{};
    NodeId pub{};
};

// Derives the x-only public key; throws InvalidKey when the secret is zero or
// not below the curve order.
Keypair keypair_from_secret(const std::array<std::uint8_t, 32>& secret);

// BIP-340 signature over msg. aux_rand is caller-supplied so signing stays
// deterministic under test.
Sig64 sign(ByteView msg, const Keypair& key, const std::array<std::uint8_t, 32>& aux_rand);

// BIP-340 verification; malformed keys, points or signatures return false.
bool verify(ByteView msg, const Sig64& sig, const NodeId& pub);

// True when pub is the x coordinate of a curve point.
bool valid_x_only_key(const NodeId& pub);

} // namespace pott::schnorr
