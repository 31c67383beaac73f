#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace poh {

using Bytes = std::vector<std::uint8_t>;
using Hash256 = std::array<std::uint8_t, 32>;
using Nonce16 = std::array<std::uint8_t, 16>;
using Key256 = std::array<std::uint8_t, 32>;

std::string to_hex(std::span<const std::uint8_t> data);
std::optional<Bytes> from_hex(const std::string& hex);

// RFC 4648 §5, unpadded.
std::string base64url_encode(std::span<const std::uint8_t> data);
std::optional<Bytes> base64url_decode(const std::string& text);

// Exact byte-subsequence search; backs the secrets-hygiene scans.
bool contains_subsequence(std::span<const std::uint8_t> haystack,
                          std::span<const std::uint8_t> needle);

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

// Big-endian, length-prefixed canonical encoding primitives shared by
// tokens, attestations, and audit entries.
class ByteWriter {
public:
    void u8(std::uint8_t v);
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(std::span<const std::uint8_t> data);
    void var_bytes(std::span<const std::uint8_t> data);  // u16 length prefix
    void var_string(const std::string& s);

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

// Strict reader: any short read marks the stream bad and stays bad.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    bool raw(std::span<std::uint8_t> out);
    std::optional<Bytes> var_bytes(std::size_t max_len = 256);
    std::optional<std::string> var_string(std::size_t max_len = 256);

    bool ok() const { return ok_; }
    bool exhausted() const { return ok_ && pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    bool ok_ = true;
};

}  // namespace poh
