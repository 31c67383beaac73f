#pragma once

#include <string>

#include "poh/bytes.hpp"

namespace poh {

Hash256 sha256(std::span<const std::uint8_t> data);
Hash256 hmac_sha256(std::span<const std::uint8_t> key,
                    std::span<const std::uint8_t> message);

// SHA-256 over label ‖ parts, the domain-separated form used for leaf/node/
// attestation/binding hashes throughout.
Hash256 labeled_hash(const std::string& label,
                     std::initializer_list<std::span<const std::uint8_t>> parts);

}  // namespace poh
