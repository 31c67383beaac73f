#pragma once

#include <cstdint>
#include <string>

#include "poh/bytes.hpp"

namespace poh {

// Deterministic byte generator (SHA-256 in counter mode). Every random value
// in a simulation run is drawn from one of these so that equal seeds give
// byte-identical runs.
class DeterministicRng {
public:
    DeterministicRng(std::uint64_t seed, const std::string& label);

    void fill(std::span<std::uint8_t> out);
    Bytes bytes(std::size_t n);
    Hash256 hash256();
    Nonce16 nonce16();
    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double uniform();
    // Uniform in [0, bound), bound > 0.
    std::uint64_t uniform_u64(std::uint64_t bound);

    // Child generator with an independent stream.
    DeterministicRng fork(const std::string& label);

private:
    Hash256 key_;
    std::uint64_t counter_ = 0;
    Hash256 block_{};
    std::size_t block_used_ = sizeof(Hash256);
};

}  // namespace poh
