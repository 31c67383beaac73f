#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "poh/bytes.hpp"
#include "poh/clock.hpp"
#include "poh/rng.hpp"
#include "poh/token.hpp"

namespace poh {

struct HeaderOccupied : std::runtime_error {
    HeaderOccupied() : std::runtime_error("extension header already occupied") {}
};
struct AlreadyEncapsulated : std::runtime_error {
    AlreadyEncapsulated() : std::runtime_error("packet already encapsulated") {}
};
struct NotEncapsulated : std::runtime_error {
    NotEncapsulated() : std::runtime_error("packet is not encapsulated") {}
};
// Thrown by a poisoned payload source; reaching it means some verifier code
// path inspected payload content, which the design forbids.
struct PayloadInspected : std::logic_error {
    PayloadInspected() : std::logic_error("payload content was read") {}
};

struct FlowId {
    std::string src;
    std::string dst;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t proto = 17;

    auto operator<=>(const FlowId&) const = default;
    std::string to_string() const;
    // src/dst pair only, the reuse-ratio context key.
    std::string endpoint_pair() const;
};

// Payload content is opaque end to end; only its length is ever observable.
// Tests install a poisoned source to prove nothing reads it.
class PayloadSource {
public:
    virtual ~PayloadSource() = default;
    virtual Bytes read() const = 0;
};

class PoisonedPayloadSource : public PayloadSource {
public:
    Bytes read() const override { throw PayloadInspected(); }
};

struct SimPacket {
    FlowId flow_id;
    std::uint64_t seq = 0;           // strictly increasing within a flow
    Micros sent_at = 0;
    std::optional<Bytes> ext_header;
    std::size_t payload_len = 0;
    std::shared_ptr<const PayloadSource> payload;
    std::optional<std::string> encapsulation;  // tunnel id
    std::optional<int> session_tag;            // DSCP-like class mark
};

SimPacket inject_token(const SimPacket& packet, std::span<const std::uint8_t> token_wire);

enum class ExtractStatus { Present, Absent, Corrupt };

struct ExtractResult {
    ExtractStatus status = ExtractStatus::Absent;
    Bytes token;  // populated only when Present
};

ExtractResult extract_token(const SimPacket& packet);

SimPacket encapsulate(const SimPacket& packet, const std::string& tunnel_id);
SimPacket decapsulate(const SimPacket& packet);

enum class HopBehavior {
    Honest,
    Strip,
    TamperSignature,
    TamperTimestamp,
    ReplayRecorder,
    Injector
};

std::string to_string(HopBehavior b);
std::optional<HopBehavior> hop_behavior_from_string(const std::string& s);

// Header bytes captured by a ReplayRecorder hop for later re-injection.
struct ReplayStash {
    std::vector<Bytes> captured;
};

struct HopNode {
    std::string node_id;
    HopBehavior behavior = HopBehavior::Honest;
    Micros fixed_delay = 0;
    Micros jitter = 0;  // extra uniform delay in [0, jitter]
    std::shared_ptr<ReplayStash> stash;          // ReplayRecorder only
    std::shared_ptr<TokenIssuer> rogue_issuer;   // Injector only
};

// Rogue issuer for Injector hops. colliding_key_id reuses a legitimate key id
// so the forgery resolves to the wrong key (InvalidSignature) instead of an
// unknown one (Unverifiable).
std::shared_ptr<TokenIssuer> make_rogue_issuer(std::uint64_t seed,
                                               const std::string& colliding_key_id = "");

struct HopTrace {
    std::string node_id;
    // "absent" or hex SHA-256 of the header bytes after the hop.
    std::string header_state;
    Micros delay = 0;
};

struct ForwardResult {
    SimPacket delivered;
    std::vector<HopTrace> trace;
};

// Applies each hop's behavior in order; delays accumulate into the delivered
// packet's timestamp. rng drives jitter and adversarial bit choices.
ForwardResult forward_path(const SimPacket& packet, std::span<const HopNode> path,
                           DeterministicRng& rng);

std::string format_trace_line(const SimPacket& packet, std::size_t hop_index,
                              const HopTrace& trace);

}  // namespace poh
