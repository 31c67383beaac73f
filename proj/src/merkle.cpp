#include "poh/merkle.hpp"

#include "poh/hash.hpp"

namespace poh {

Hash256 ProvenanceChain::leaf_hash(std::span<const std::uint8_t> token_bytes) {
    return labeled_hash("poh/leaf", {token_bytes});
}

Hash256 ProvenanceChain::node_hash(const Hash256& left, const Hash256& right) {
    return labeled_hash("poh/node", {std::span(left), std::span(right)});
}

void ProvenanceChain::append(std::span<const std::uint8_t> token_bytes) {
    leaves_.push_back(leaf_hash(token_bytes));
}

void ProvenanceChain::append_leaf(const Hash256& leaf) {
    leaves_.push_back(leaf);
}

Hash256 ProvenanceChain::root() const {
    if (leaves_.empty()) return Hash256{};
    std::vector<Hash256> level = leaves_;
    while (level.size() > 1) {
        std::vector<Hash256> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(node_hash(level[i], level[i + 1]));
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
    }
    return level[0];
}

InclusionProof ProvenanceChain::prove(std::size_t index) const {
    if (index >= leaves_.size()) throw IndexOutOfRange(index);

    InclusionProof proof;
    proof.leaf_index = index;
    std::vector<Hash256> level = leaves_;
    std::size_t pos = index;
    while (level.size() > 1) {
        std::size_t sibling = pos ^ 1;
        if (sibling < level.size()) {
            proof.elements.push_back({level[sibling], sibling < pos});
        }
        // else: odd last node, promoted without a proof element.
        std::vector<Hash256> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(node_hash(level[i], level[i + 1]));
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
        pos /= 2;
    }
    return proof;
}

bool ProvenanceChain::verify(const Hash256& root, const Hash256& leaf,
                             const InclusionProof& proof) {
    Hash256 h = leaf;
    for (const ProofElement& e : proof.elements) {
        h = e.sibling_on_left ? node_hash(e.sibling, h) : node_hash(h, e.sibling);
    }
    return h == root;
}

}  // namespace poh
