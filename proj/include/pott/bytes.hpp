#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pott {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Fixed-size values carried in receipts. Distinct types so a node id cannot
// silently stand in for a digest.
struct Digest32 : std::array<std::uint8_t, 32> {};
struct Nonce16 : std::array<std::uint8_t, 16> {};
struct NodeId : std::array<std::uint8_t, 32> {};
struct Sig64 : std::array<std::uint8_t, 64> {};

std::string to_hex(ByteView data);
Bytes from_hex(const std::string& hex); // throws WrongLength on bad input

[[noreturn]] void throw_wrong_length(std::size_t expected, std::size_t got);

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(const std::string& hex) {
    Bytes b = from_hex(hex);
    std::array<std::uint8_t, N> out{};
    if (b.size() != N)
        throw_wrong_length(N, b.size());
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

Bytes read_file(const std::string& path);          // throws IoError
void write_file(const std::string& path, ByteView data);

} // namespace pott
