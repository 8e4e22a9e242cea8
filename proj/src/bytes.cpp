#include "pott/bytes.hpp"

#include "pott/errors.hpp"

#include <fstream>

namespace pott {

const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::NonCanonicalEncoding: return "NonCanonicalEncoding";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::WrongLength: return "WrongLength";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::DigestError: return "DigestError";
    case ErrorCode::ClockError: return "ClockError";
    case ErrorCode::MonotonicityError: return "MonotonicityError";
    case ErrorCode::EmptyChain: return "EmptyChain";
    case ErrorCode::NonceMismatch: return "NonceMismatch";
    case ErrorCode::TableGap: return "TableGap";
    case ErrorCode::WindowNotCovered: return "WindowNotCovered";
    case ErrorCode::ManifestSignatureInvalid: return "ManifestSignatureInvalid";
    case ErrorCode::ManifestStale: return "ManifestStale";
    case ErrorCode::MixedPayload: return "MixedPayload";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::InvalidKey: return "InvalidKey";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::string to_hex(ByteView data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0)
        throw Error(ErrorCode::WrongLength, "odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw Error(ErrorCode::WrongLength, "non-hex character");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

void throw_wrong_length(std::size_t expected, std::size_t got) {
    throw Error(ErrorCode::WrongLength,
                "expected " + std::to_string(expected) + " bytes, got " + std::to_string(got));
}

Bytes read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    Bytes data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad())
        throw Error(ErrorCode::IoError, "read failed for " + path);
    return data;
}

void write_file(const std::string& path, ByteView data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!f)
        throw Error(ErrorCode::IoError, "write failed for " + path);
}

} // namespace pott
