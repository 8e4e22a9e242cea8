#include "pott/cbor.hpp"

#include "pott/errors.hpp"

namespace pott::cbor {

namespace {
constexpr std::uint8_t kMajorUnsigned = 0;
constexpr std::uint8_t kMajorBytes = 2;
constexpr std::uint8_t kMajorText = 3;
constexpr std::uint8_t kMajorArray = 4;
constexpr std::uint8_t kMajorMap = 5;
constexpr std::uint8_t kMajorSimple = 7;
} // namespace

void Writer::head(std::uint8_t major, std::uint64_t arg) {
    std::uint8_t mb = static_cast<std::uint8_t>(major << 5);
    if (arg < 24) {
        buf_.push_back(mb | static_cast<std::uint8_t>(arg));
    } else if (arg <= 0xFF) {
        buf_.push_back(mb | 24);
        buf_.push_back(static_cast<std::uint8_t>(arg));
    } else if (arg <= 0xFFFF) {
        buf_.push_back(mb | 25);
        buf_.push_back(static_cast<std::uint8_t>(arg >> 8));
        buf_.push_back(static_cast<std::uint8_t>(arg));
    } else if (arg <= 0xFFFFFFFFull) {
        buf_.push_back(mb | 26);
        for (int s = 24; s >= 0; s -= 8)
            buf_.push_back(static_cast<std::uint8_t>(arg >> s));
    } else {
        buf_.push_back(mb | 27);
        for (int s = 56; s >= 0; s -= 8)
            buf_.push_back(static_cast<std::uint8_t>(arg >> s));
    }
}

void Writer::map_header(std::uint64_t entries) { head(kMajorMap, entries); }
void Writer::array_header(std::uint64_t entries) { head(kMajorArray, entries); }
void Writer::unsigned_int(std::uint64_t v) { head(kMajorUnsigned, v); }

void Writer::unsigned_int_fixed32(std::uint32_t v) {
    buf_.push_back((kMajorUnsigned << 5) | 26);
    for (int s = 24; s >= 0; s -= 8)
        buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void Writer::unsigned_int_fixed64(std::uint64_t v) {
    buf_.push_back((kMajorUnsigned << 5) | 27);
    for (int s = 56; s >= 0; s -= 8)
        buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void Writer::byte_string(ByteView b) {
    head(kMajorBytes, b.size());
    buf_.insert(buf_.end(), b.begin(), b.end());
}

void Writer::text_string(std::string_view s) {
    head(kMajorText, s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void Writer::boolean(bool v) {
    buf_.push_back(v ? 0xF5 : 0xF4);
}

void Writer::raw(ByteView pre_encoded) {
    buf_.insert(buf_.end(), pre_encoded.begin(), pre_encoded.end());
}

std::uint8_t Reader::peek() const {
    if (pos_ >= data_.size())
        throw Error(ErrorCode::Truncated, "unexpected end of CBOR input");
    return data_[pos_];
}

Reader::Head Reader::read_head() {
    std::uint8_t ib = peek();
    ++pos_;
    Head h{};
    h.major = ib >> 5;
    std::uint8_t info = ib & 0x1F;
    if (info < 24) {
        h.arg = info;
        h.arg_bytes = 0;
        h.shortest = true;
        return h;
    }
    if (info > 27)
        throw Error(ErrorCode::NonCanonicalEncoding,
                    "indefinite length or reserved additional info");
    int nbytes = 1 << (info - 24);
    if (data_.size() - pos_ < static_cast<std::size_t>(nbytes))
        throw Error(ErrorCode::Truncated, "CBOR argument runs past end of input");
    std::uint64_t arg = 0;
    for (int i = 0; i < nbytes; ++i)
        arg = (arg << 8) | data_[pos_ + static_cast<std::size_t>(i)];
    pos_ += static_cast<std::size_t>(nbytes);
    h.arg = arg;
    h.arg_bytes = nbytes;
    // shortest form: value must not fit in the next-smaller encoding
    h.shortest = (nbytes == 1 && arg >= 24) || (nbytes == 2 && arg > 0xFF) ||
                 (nbytes == 4 && arg > 0xFFFF) || (nbytes == 8 && arg > 0xFFFFFFFFull);
    return h;
}

Reader::Head Reader::read_head_expect(std::uint8_t major, const char* what) {
    Head h = read_head();
    if (h.major != major)
        throw Error(ErrorCode::NonCanonicalEncoding,
                    std::string("expected ") + what + " item");
    return h;
}

std::uint64_t Reader::map_header() {
    Head h = read_head_expect(kMajorMap, "map");
    if (!h.shortest)
        throw Error(ErrorCode::NonCanonicalEncoding, "map length not shortest-form");
    return h.arg;
}

std::uint64_t Reader::array_header() {
    Head h = read_head_expect(kMajorArray, "array");
    if (!h.shortest)
        throw Error(ErrorCode::NonCanonicalEncoding, "array length not shortest-form");
    return h.arg;
}

std::uint64_t Reader::unsigned_int() {
    Head h = read_head_expect(kMajorUnsigned, "unsigned integer");
    if (!h.shortest)
        throw Error(ErrorCode::NonCanonicalEncoding, "integer not shortest-form");
    return h.arg;
}

UnsignedItem Reader::unsigned_int_any_width() {
    Head h = read_head_expect(kMajorUnsigned, "unsigned integer");
    return UnsignedItem{h.arg, h.arg_bytes, h.shortest};
}

ByteView Reader::byte_string() {
    Head h = read_head_expect(kMajorBytes, "byte string");
    if (!h.shortest)
        throw Error(ErrorCode::NonCanonicalEncoding, "byte-string length not shortest-form");
    if (data_.size() - pos_ < h.arg)
        throw Error(ErrorCode::Truncated, "byte string runs past end of input");
    ByteView out = data_.subspan(pos_, h.arg);
    pos_ += h.arg;
    return out;
}

std::string Reader::text_string() {
    Head h = read_head_expect(kMajorText, "text string");
    if (!h.shortest)
        throw Error(ErrorCode::NonCanonicalEncoding, "text-string length not shortest-form");
    if (data_.size() - pos_ < h.arg)
        throw Error(ErrorCode::Truncated, "text string runs past end of input");
    std::string out(reinterpret_cast<const char*>(data_.data() + pos_), h.arg);
    pos_ += h.arg;
    return out;
}

bool Reader::boolean() {
    std::uint8_t b = peek();
    if (b == 0xF5) { ++pos_; return true; }
    if (b == 0xF4) { ++pos_; return false; }
    throw Error(ErrorCode::NonCanonicalEncoding, "expected boolean");
}

} // namespace pott::cbor
