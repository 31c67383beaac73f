#include "poh/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <stdexcept>

namespace poh {

Hash256 sha256(std::span<const std::uint8_t> data) {
    Hash256 out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                   nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

Hash256 hmac_sha256(std::span<const std::uint8_t> key,
                    std::span<const std::uint8_t> message) {
    Hash256 out{};
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
             message.data(), message.size(), out.data(), &len) == nullptr ||
        len != out.size()) {
        throw std::runtime_error("hmac-sha256 failed");
    }
    return out;
}

Hash256 labeled_hash(const std::string& label,
                     std::initializer_list<std::span<const std::uint8_t>> parts) {
    Bytes buf;
    buf.insert(buf.end(), label.begin(), label.end());
    for (const auto& p : parts) buf.insert(buf.end(), p.begin(), p.end());
    return sha256(buf);
}

}  // namespace poh
