#pragma once

#include "pott/bytes.hpp"

#include <cstdint>
#include <string_view>

// Minimal canonical CBOR subset used by the receipt wire format: definite
// lengths only, shortest-form arguments, integer map keys in ascending order.
// The reader is strict by default and rejects anything non-canonical; a
// width-reporting unsigned read exists for the one field family (timestamps)
// where the normative test vector uses a fixed 8-byte argument.
namespace pott::cbor {

class Writer {
public:
    void map_header(std::uint64_t entries);
    void array_header(std::uint64_t entries);
    void unsigned_int(std::uint64_t v);          // shortest-form argument
    void unsigned_int_fixed32(std::uint32_t v);  // 0x1A, 4-byte argument
    void unsigned_int_fixed64(std::uint64_t v);  // 0x1B, 8-byte argument
    void byte_string(ByteView b);
    void text_string(std::string_view s);
    void boolean(bool v);
    void raw(ByteView pre_encoded); // append already-encoded items verbatim

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    void head(std::uint8_t major, std::uint64_t arg);
    Bytes buf_;
};

struct UnsignedItem {
    std::uint64_t value = 0;
    int arg_bytes = 0; // 0 for immediate 0..23, else 1/2/4/8
    bool shortest = true;
};

class Reader {
public:
    explicit Reader(ByteView data) : data_(data) {}

    std::uint64_t map_header();
    std::uint64_t array_header();
    std::uint64_t unsigned_int();        // throws NonCanonicalEncoding unless shortest-form
    UnsignedItem unsigned_int_any_width();
    ByteView byte_string();              // shortest-form length argument enforced
    std::string text_string();
    bool boolean();

    std::uint8_t peek() const;           // throws Truncated at end
    bool done() const { return pos_ == data_.size(); }
    std::size_t offset() const { return pos_; }

private:
    struct Head {
        std::uint8_t major;
        std::uint64_t arg;
        int arg_bytes;
        bool shortest;
    };
    Head read_head();
    Head read_head_expect(std::uint8_t major, const char* what);

    ByteView data_;
    std::size_t pos_ = 0;
};

} // namespace pott::cbor
