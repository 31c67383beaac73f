#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "poh/bytes.hpp"
#include "poh/clock.hpp"

namespace poh {

// One hash-chained record. entry_hash = SHA-256(prev_hash ‖ canonical entry
// bytes); the genesis prev_hash is 32 zero bytes. Any mutation breaks the
// chain from that entry forward.
struct AuditEntry {
    std::string event_type;
    std::string subject;
    std::string verdict;   // verdict or state name; may be empty
    Micros timestamp = 0;
    Hash256 prev_hash{};
    Hash256 entry_hash{};

    Bytes canonical_bytes() const;
};

struct AuditVerification {
    bool ok = true;
    std::size_t first_broken_index = 0;  // meaningful only when !ok
};

// Append-only, single-appender log. Concurrent sessions may interleave but
// each append is atomic and the chain stays linear. Optionally mirrored to a
// line-delimited file (tab-separated, hex hashes) flushed per entry.
class AuditLog {
public:
    AuditLog() = default;
    explicit AuditLog(const std::filesystem::path& file);
    ~AuditLog();

    void append(const std::string& event_type, const std::string& subject,
                const std::string& verdict, Micros timestamp);

    std::vector<AuditEntry> entries() const;
    std::size_t size() const;
    void flush();

private:
    mutable std::mutex mutex_;
    std::vector<AuditEntry> entries_;
    Hash256 head_{};
    std::optional<std::filesystem::path> file_path_;
    FILE* file_ = nullptr;
};

AuditVerification verify_audit_log(const std::vector<AuditEntry>& entries);

// File-side counterparts used by the `audit` CLI subcommand. Verification
// treats an unparseable line as a break at that index; the strict reader
// throws instead.
std::optional<AuditEntry> parse_audit_line(const std::string& line);
std::vector<AuditEntry> read_audit_log_file(const std::filesystem::path& file);
AuditVerification verify_audit_log_file(const std::filesystem::path& file);

std::string format_audit_line(const AuditEntry& entry);

}  // namespace poh
