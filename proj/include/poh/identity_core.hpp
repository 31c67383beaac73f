#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "poh/audit_log.hpp"
#include "poh/bytes.hpp"
#include "poh/clock.hpp"
#include "poh/rng.hpp"

namespace poh {

using SessionId = std::array<std::uint8_t, 16>;

enum class SubscriberStatus { Active, Suspended, Revoked };

std::string to_string(SubscriberStatus status);

struct DuplicateSubscriber : std::runtime_error {
    explicit DuplicateSubscriber(const std::string& id)
        : std::runtime_error("subscriber already provisioned: " + id) {}
};
struct UnknownSubscriber : std::runtime_error {
    explicit UnknownSubscriber(const std::string& id)
        : std::runtime_error("unknown subscriber: " + id) {}
};
struct DeviceMismatch : std::runtime_error {
    explicit DeviceMismatch(const std::string& id)
        : std::runtime_error("device not bound to subscriber: " + id) {}
};
struct SubscriberRevoked : std::runtime_error {
    explicit SubscriberRevoked(const std::string& id)
        : std::runtime_error("subscriber revoked: " + id) {}
};
struct SubscriberSuspended : std::runtime_error {
    explicit SubscriberSuspended(const std::string& id)
        : std::runtime_error("subscriber suspended: " + id) {}
};
struct InvalidStatusTransition : std::runtime_error {
    InvalidStatusTransition(SubscriberStatus from, SubscriberStatus to)
        : std::runtime_error("status may not move from " + to_string(from) +
                             " to " + to_string(to)) {}
};

// Public view of a provisioned identity root. The root key itself stays
// inside the registry; only derivation outputs leave the module.
struct SubscriberRecord {
    std::string subscriber_id;
    std::string device_id;
    Micros provisioned_at = 0;
    SubscriberStatus status = SubscriberStatus::Active;
};

struct SessionContext {
    SessionId session_id{};
    std::string subscriber_id;
    Key256 session_key{};    // K_SEAF analogue, derived per attach
    Micros established_at = 0;
    Micros expires_at = 0;
    Nonce16 auth_nonce{};

    bool expired(Micros now) const { return now >= expires_at; }
};

// Keyed extract-and-expand with the "poh/seaf/v1" domain label. Deterministic;
// every output bit depends on every input byte.
Key256 derive_session_key(const Key256& root_key, const Nonce16& auth_nonce,
                          const std::string& network_id);

// The simulated Telco identity plane: subscriber provisioning with
// hardware-style root keys and an AKA-style attach deriving a session key
// bound to the SIM/device pair. Shared state; operations are atomic per
// subscriber record.
class SubscriberRegistry {
public:
    struct Config {
        Seconds session_lifetime = 3600;
        std::uint64_t session_seed = 0;
    };

    explicit SubscriberRegistry(const Clock& clock);
    SubscriberRegistry(const Clock& clock, Config config,
                       AuditLog* audit = nullptr);

    SubscriberRecord provision_subscriber(const std::string& subscriber_id,
                                          const std::string& device_id,
                                          std::uint64_t rng_seed);

    SessionContext authenticate_attach(const std::string& subscriber_id,
                                       const std::string& device_id,
                                       const std::string& network_id, Micros now);

    void suspend(const std::string& subscriber_id);
    void revoke(const std::string& subscriber_id);

    std::optional<SubscriberRecord> find(const std::string& subscriber_id) const;
    std::optional<SessionContext> find_session(const SessionId& id) const;
    std::size_t subscriber_count() const;
    std::size_t session_count() const;

    // Line-delimited snapshot; see docs/file_formats.md. include_secrets writes
    // root keys and restricts the file mode to owner read/write.
    void save_snapshot(const std::filesystem::path& path, bool include_secrets) const;
    // Only secret snapshots restore attachable subscribers.
    void load_snapshot(const std::filesystem::path& path);

    // Test hook; production callers use derive outputs only.
    Key256 root_key_for_test(const std::string& subscriber_id) const;

private:
    struct Stored {
        SubscriberRecord record;
        Key256 root_key{};
    };

    const Clock& clock_;
    Config config_;
    AuditLog* audit_;
    mutable std::mutex mutex_;
    std::map<std::string, Stored> subscribers_;
    std::map<SessionId, SessionContext> sessions_;
    DeterministicRng session_rng_;
};

std::string session_id_hex(const SessionId& id);
std::optional<SessionId> session_id_from_hex(const std::string& hex);

}  // namespace poh
