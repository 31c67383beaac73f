#pragma once

#include <stdexcept>
#include <vector>

#include "poh/bytes.hpp"

namespace poh {

struct IndexOutOfRange : std::out_of_range {
    explicit IndexOutOfRange(std::size_t index)
        : std::out_of_range("no leaf at index " + std::to_string(index)) {}
};

struct ProofElement {
    Hash256 sibling{};
    bool sibling_on_left = false;
};

struct InclusionProof {
    std::size_t leaf_index = 0;
    std::vector<ProofElement> elements;
};

// Append-only Merkle tree over token hashes, one leaf per routing-domain hop.
// leaf = H("poh/leaf" ‖ token bytes); node = H("poh/node" ‖ left ‖ right);
// a level's odd last node is promoted unchanged. A single-leaf chain has
// root == leaf.
class ProvenanceChain {
public:
    void append(std::span<const std::uint8_t> token_bytes);
    void append_leaf(const Hash256& leaf);

    const std::vector<Hash256>& leaves() const { return leaves_; }
    std::size_t size() const { return leaves_.size(); }
    // Root of the empty chain is all zeroes.
    Hash256 root() const;

    InclusionProof prove(std::size_t index) const;
    static bool verify(const Hash256& root, const Hash256& leaf,
                       const InclusionProof& proof);

    static Hash256 leaf_hash(std::span<const std::uint8_t> token_bytes);
    static Hash256 node_hash(const Hash256& left, const Hash256& right);

private:
    std::vector<Hash256> leaves_;
};

}  // namespace poh
