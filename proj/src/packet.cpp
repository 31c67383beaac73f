#include "poh/packet.hpp"

#include <sstream>

#include "poh/hash.hpp"

namespace poh {

std::string FlowId::to_string() const {
    std::ostringstream os;
    os << src << ':' << src_port << "->" << dst << ':' << dst_port << '/'
       << static_cast<int>(proto);
    return os.str();
}

std::string FlowId::endpoint_pair() const { return src + "|" + dst; }

SimPacket inject_token(const SimPacket& packet,
                       std::span<const std::uint8_t> token_wire) {
    if (packet.ext_header.has_value()) throw HeaderOccupied();
    SimPacket out = packet;
    out.ext_header = Bytes(token_wire.begin(), token_wire.end());
    return out;
}

ExtractResult extract_token(const SimPacket& packet) {
    if (!packet.ext_header.has_value()) return {ExtractStatus::Absent, {}};
    if (!wire_decode(*packet.ext_header).has_value())
        return {ExtractStatus::Corrupt, {}};
    return {ExtractStatus::Present, *packet.ext_header};
}

SimPacket encapsulate(const SimPacket& packet, const std::string& tunnel_id) {
    if (packet.encapsulation.has_value()) throw AlreadyEncapsulated();
    SimPacket out = packet;
    out.encapsulation = tunnel_id;
    return out;
}

SimPacket decapsulate(const SimPacket& packet) {
    if (!packet.encapsulation.has_value()) throw NotEncapsulated();
    SimPacket out = packet;
    out.encapsulation.reset();
    return out;
}

std::string to_string(HopBehavior b) {
    switch (b) {
        case HopBehavior::Honest: return "Honest";
        case HopBehavior::Strip: return "Strip";
        case HopBehavior::TamperSignature: return "TamperSignature";
        case HopBehavior::TamperTimestamp: return "TamperTimestamp";
        case HopBehavior::ReplayRecorder: return "ReplayRecorder";
        case HopBehavior::Injector: return "Injector";
    }
    return "?";
}

std::optional<HopBehavior> hop_behavior_from_string(const std::string& s) {
    if (s == "Honest") return HopBehavior::Honest;
    if (s == "Strip") return HopBehavior::Strip;
    if (s == "TamperSignature") return HopBehavior::TamperSignature;
    if (s == "TamperTimestamp") return HopBehavior::TamperTimestamp;
    if (s == "ReplayRecorder") return HopBehavior::ReplayRecorder;
    if (s == "Injector") return HopBehavior::Injector;
    return std::nullopt;
}

std::shared_ptr<TokenIssuer> make_rogue_issuer(std::uint64_t seed,
                                               const std::string& colliding_key_id) {
    DeterministicRng rng(seed, "poh/rogue-issuer");
    Key256 sign_seed = rng.hash256();
    TokenIssuer::Config cfg;
    cfg.issuer_id = "rogue";
    cfg.key_id = colliding_key_id.empty() ? "rogue-key" : colliding_key_id;
    return std::make_shared<TokenIssuer>(cfg, sign_seed, seed ^ 0x5151);
}

namespace {

// Flip one signature bit chosen by the rng.
void tamper_signature(Bytes& header, DeterministicRng& rng) {
    if (header.size() < kSignatureSize) return;
    std::size_t sig_start = header.size() - kSignatureSize;
    std::size_t bit = rng.uniform_u64(kSignatureSize * 8);
    header[sig_start + bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
}

// Shift issued_at by +3600 s in the canonical bytes, keeping the old
// signature. The signed timestamp no longer matches.
void tamper_timestamp(Bytes& header) {
    auto token = wire_decode(header);
    if (!token) return;
    token->issued_at += 3600;
    Bytes re = wire_encode(*token);
    header = re;
}

SimPacket inject_rogue(const SimPacket& packet, TokenIssuer& rogue, Micros now) {
    SessionContext fake;
    fake.subscriber_id = "rogue";
    fake.expires_at = now + 3600 * kMicrosPerSecond;
    ProvenanceToken forged = rogue.issue(fake, now, 60);
    SimPacket out = packet;
    out.ext_header = wire_encode(forged);
    return out;
}

}  // namespace

ForwardResult forward_path(const SimPacket& packet, std::span<const HopNode> path,
                           DeterministicRng& rng) {
    ForwardResult result;
    result.delivered = packet;

    for (const HopNode& hop : path) {
        Micros delay = hop.fixed_delay;
        if (hop.jitter > 0) delay += rng.uniform_u64(hop.jitter + 1);
        result.delivered.sent_at += delay;

        switch (hop.behavior) {
            case HopBehavior::Honest:
                break;
            case HopBehavior::Strip:
                result.delivered.ext_header.reset();
                break;
            case HopBehavior::TamperSignature:
                if (result.delivered.ext_header)
                    tamper_signature(*result.delivered.ext_header, rng);
                break;
            case HopBehavior::TamperTimestamp:
                if (result.delivered.ext_header)
                    tamper_timestamp(*result.delivered.ext_header);
                break;
            case HopBehavior::ReplayRecorder:
                if (hop.stash && result.delivered.ext_header)
                    hop.stash->captured.push_back(*result.delivered.ext_header);
                break;
            case HopBehavior::Injector:
                if (hop.rogue_issuer) {
                    SimPacket replaced = result.delivered;
                    replaced.ext_header.reset();
                    result.delivered = inject_rogue(replaced, *hop.rogue_issuer,
                                                    result.delivered.sent_at);
                }
                break;
        }

        HopTrace trace;
        trace.node_id = hop.node_id;
        trace.delay = delay;
        trace.header_state =
            result.delivered.ext_header
                ? to_hex(sha256(*result.delivered.ext_header))
                : "absent";
        result.trace.push_back(std::move(trace));
    }
    return result;
}

std::string format_trace_line(const SimPacket& packet, std::size_t hop_index,
                              const HopTrace& trace) {
    std::ostringstream os;
    os << packet.flow_id.to_string() << '\t' << packet.seq << '\t' << hop_index
       << '\t' << trace.node_id << '\t' << trace.header_state;
    return os.str();
}

}  // namespace poh
