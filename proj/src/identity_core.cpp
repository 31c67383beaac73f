#include "poh/identity_core.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "poh/hash.hpp"

namespace poh {

std::string to_string(SubscriberStatus status) {
    switch (status) {
        case SubscriberStatus::Active: return "Active";
        case SubscriberStatus::Suspended: return "Suspended";
        case SubscriberStatus::Revoked: return "Revoked";
    }
    return "?";
}

static std::optional<SubscriberStatus> status_from_string(const std::string& s) {
    if (s == "Active") return SubscriberStatus::Active;
    if (s == "Suspended") return SubscriberStatus::Suspended;
    if (s == "Revoked") return SubscriberStatus::Revoked;
    return std::nullopt;
}

Key256 derive_session_key(const Key256& root_key, const Nonce16& auth_nonce,
                          const std::string& network_id) {
    if (network_id.empty())
        throw std::invalid_argument("network_id must be non-empty");
    // Extract with the auth nonce as salt, expand under the domain label.
    Hash256 prk = hmac_sha256(auth_nonce, root_key);
    ByteWriter info;
    info.var_string("poh/seaf/v1");
    info.var_string(network_id);
    info.u8(0x01);
    return hmac_sha256(prk, info.bytes());
}

SubscriberRegistry::SubscriberRegistry(const Clock& clock)
    : SubscriberRegistry(clock, Config{}) {}

SubscriberRegistry::SubscriberRegistry(const Clock& clock, Config config,
                                       AuditLog* audit)
    : clock_(clock),
      config_(config),
      audit_(audit),
      session_rng_(config.session_seed, "poh/registry-sessions") {}

SubscriberRecord SubscriberRegistry::provision_subscriber(
    const std::string& subscriber_id, const std::string& device_id,
    std::uint64_t rng_seed) {
    if (subscriber_id.empty() || device_id.empty())
        throw std::invalid_argument("subscriber_id and device_id must be non-empty");

    std::lock_guard lock(mutex_);
    if (subscribers_.contains(subscriber_id))
        throw DuplicateSubscriber(subscriber_id);

    Stored stored;
    stored.record.subscriber_id = subscriber_id;
    stored.record.device_id = device_id;
    stored.record.provisioned_at = clock_.now();
    stored.record.status = SubscriberStatus::Active;
    DeterministicRng key_rng(rng_seed, "poh/rootkey/" + subscriber_id);
    key_rng.fill(stored.root_key);

    SubscriberRecord view = stored.record;
    subscribers_.emplace(subscriber_id, std::move(stored));
    return view;
}

SessionContext SubscriberRegistry::authenticate_attach(
    const std::string& subscriber_id, const std::string& device_id,
    const std::string& network_id, Micros now) {
    std::lock_guard lock(mutex_);
    auto it = subscribers_.find(subscriber_id);
    if (it == subscribers_.end()) throw UnknownSubscriber(subscriber_id);
    const Stored& stored = it->second;
    if (stored.record.status == SubscriberStatus::Revoked)
        throw SubscriberRevoked(subscriber_id);
    if (stored.record.status == SubscriberStatus::Suspended)
        throw SubscriberSuspended(subscriber_id);
    if (stored.record.device_id != device_id)
        throw DeviceMismatch(subscriber_id);

    SessionContext session;
    do {
        session.session_id = session_rng_.nonce16();
    } while (sessions_.contains(session.session_id));
    session.subscriber_id = subscriber_id;
    session.auth_nonce = session_rng_.nonce16();
    session.session_key =
        derive_session_key(stored.root_key, session.auth_nonce, network_id);
    session.established_at = now;
    session.expires_at = now + config_.session_lifetime * kMicrosPerSecond;

    sessions_.emplace(session.session_id, session);
    if (audit_)
        audit_->append("attach", subscriber_id + "/" + session_id_hex(session.session_id),
                       "", now);
    return session;
}

void SubscriberRegistry::suspend(const std::string& subscriber_id) {
    std::lock_guard lock(mutex_);
    auto it = subscribers_.find(subscriber_id);
    if (it == subscribers_.end()) throw UnknownSubscriber(subscriber_id);
    SubscriberStatus cur = it->second.record.status;
    if (cur != SubscriberStatus::Active)
        throw InvalidStatusTransition(cur, SubscriberStatus::Suspended);
    it->second.record.status = SubscriberStatus::Suspended;
}

void SubscriberRegistry::revoke(const std::string& subscriber_id) {
    std::lock_guard lock(mutex_);
    auto it = subscribers_.find(subscriber_id);
    if (it == subscribers_.end()) throw UnknownSubscriber(subscriber_id);
    it->second.record.status = SubscriberStatus::Revoked;
}

std::optional<SubscriberRecord> SubscriberRegistry::find(
    const std::string& subscriber_id) const {
    std::lock_guard lock(mutex_);
    auto it = subscribers_.find(subscriber_id);
    if (it == subscribers_.end()) return std::nullopt;
    return it->second.record;
}

std::optional<SessionContext> SubscriberRegistry::find_session(
    const SessionId& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

std::size_t SubscriberRegistry::subscriber_count() const {
    std::lock_guard lock(mutex_);
    return subscribers_.size();
}

std::size_t SubscriberRegistry::session_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

void SubscriberRegistry::save_snapshot(const std::filesystem::path& path,
                                       bool include_secrets) const {
    std::lock_guard lock(mutex_);
    FILE* f;
    if (include_secrets) {
        int fd = ::open(path.string().c_str(), O_CREAT | O_WRONLY | O_TRUNC, 0600);
        if (fd < 0) throw std::runtime_error("cannot open snapshot file: " + path.string());
        f = ::fdopen(fd, "w");
    } else {
        f = std::fopen(path.string().c_str(), "w");
    }
    if (!f) throw std::runtime_error("cannot open snapshot file: " + path.string());

    for (const auto& [id, stored] : subscribers_) {
        std::string key_field =
            include_secrets ? to_hex(stored.root_key) : std::string("-");
        std::fprintf(f, "%s\t%s\t%llu\t%s\t%s\n", id.c_str(),
                     stored.record.device_id.c_str(),
                     static_cast<unsigned long long>(stored.record.provisioned_at),
                     to_string(stored.record.status).c_str(), key_field.c_str());
    }
    std::fclose(f);
}

void SubscriberRegistry::load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot file: " + path.string());

    std::lock_guard lock(mutex_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string id, device, ts, status_str, key_hex;
        if (!std::getline(is, id, '\t') || !std::getline(is, device, '\t') ||
            !std::getline(is, ts, '\t') || !std::getline(is, status_str, '\t') ||
            !std::getline(is, key_hex)) {
            throw std::runtime_error("snapshot line " + std::to_string(line_no) +
                                     ": expected 5 fields");
        }
        auto status = status_from_string(status_str);
        if (!status)
            throw std::runtime_error("snapshot line " + std::to_string(line_no) +
                                     ": bad status");
        if (key_hex == "-")
            throw std::runtime_error("snapshot line " + std::to_string(line_no) +
                                     ": redacted snapshot is not loadable");
        auto key = from_hex(key_hex);
        if (!key || key->size() != 32)
            throw std::runtime_error("snapshot line " + std::to_string(line_no) +
                                     ": bad root key");
        if (subscribers_.contains(id)) throw DuplicateSubscriber(id);

        Stored stored;
        stored.record.subscriber_id = id;
        stored.record.device_id = device;
        stored.record.provisioned_at = std::stoull(ts);
        stored.record.status = *status;
        std::copy(key->begin(), key->end(), stored.root_key.begin());
        subscribers_.emplace(id, std::move(stored));
    }
}

Key256 SubscriberRegistry::root_key_for_test(const std::string& subscriber_id) const {
    std::lock_guard lock(mutex_);
    auto it = subscribers_.find(subscriber_id);
    if (it == subscribers_.end()) throw UnknownSubscriber(subscriber_id);
    return it->second.root_key;
}

std::string session_id_hex(const SessionId& id) { return to_hex(id); }

std::optional<SessionId> session_id_from_hex(const std::string& hex) {
    auto bytes = from_hex(hex);
    if (!bytes || bytes->size() != 16) return std::nullopt;
    SessionId id;
    std::copy(bytes->begin(), bytes->end(), id.begin());
    return id;
}

}  // namespace poh
