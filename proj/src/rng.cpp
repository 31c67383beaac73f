#include "poh/rng.hpp"

#include <cstring>

#include "poh/hash.hpp"

namespace poh {

DeterministicRng::DeterministicRng(std::uint64_t seed, const std::string& label) {
    ByteWriter w;
    w.u64(seed);
    w.var_string(label);
    key_ = labeled_hash("poh/rng/v1", {std::span(w.bytes())});
}

void DeterministicRng::fill(std::span<std::uint8_t> out) {
    std::size_t written = 0;
    while (written < out.size()) {
        if (block_used_ == block_.size()) {
            ByteWriter w;
            w.raw(key_);
            w.u64(counter_++);
            block_ = sha256(w.bytes());
            block_used_ = 0;
        }
        std::size_t n = std::min(out.size() - written, block_.size() - block_used_);
        std::memcpy(out.data() + written, block_.data() + block_used_, n);
        written += n;
        block_used_ += n;
    }
}

Bytes DeterministicRng::bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
}

Hash256 DeterministicRng::hash256() {
    Hash256 out;
    fill(out);
    return out;
}

Nonce16 DeterministicRng::nonce16() {
    Nonce16 out;
    fill(out);
    return out;
}

std::uint64_t DeterministicRng::next_u64() {
    std::uint8_t buf[8];
    fill(buf);
    std::uint64_t v = 0;
    for (std::uint8_t b : buf) v = (v << 8) | b;
    return v;
}

double DeterministicRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t DeterministicRng::uniform_u64(std::uint64_t bound) {
    // Rejection sampling keeps the draw unbiased.
    std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

DeterministicRng DeterministicRng::fork(const std::string& label) {
    DeterministicRng child(next_u64(), label);
    return child;
}

}  // namespace poh
