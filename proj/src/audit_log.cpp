#include "poh/audit_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "poh/hash.hpp"

namespace poh {

namespace {

void check_field(const std::string& s) {
    for (char c : s) {
        if (c == '\t' || c == '\n' || c == '\r')
            throw std::invalid_argument("audit field contains separator character");
    }
}

Hash256 chain_hash(const Hash256& prev, const AuditEntry& entry) {
    ByteWriter w;
    w.raw(prev);
    w.raw(entry.canonical_bytes());
    return sha256(w.bytes());
}

}  // namespace

Bytes AuditEntry::canonical_bytes() const {
    ByteWriter w;
    w.var_string(event_type);
    w.var_string(subject);
    w.var_string(verdict);
    w.u64(timestamp);
    return w.take();
}

AuditLog::AuditLog(const std::filesystem::path& file) : file_path_(file) {
    file_ = std::fopen(file.string().c_str(), "a");
    if (!file_) throw std::runtime_error("cannot open audit log file: " + file.string());
}

AuditLog::~AuditLog() {
    if (file_) std::fclose(file_);
}

void AuditLog::append(const std::string& event_type, const std::string& subject,
                      const std::string& verdict, Micros timestamp) {
    check_field(event_type);
    check_field(subject);
    check_field(verdict);

    std::lock_guard lock(mutex_);
    AuditEntry entry;
    entry.event_type = event_type;
    entry.subject = subject;
    entry.verdict = verdict;
    entry.timestamp = timestamp;
    entry.prev_hash = head_;
    entry.entry_hash = chain_hash(head_, entry);
    head_ = entry.entry_hash;

    if (file_) {
        std::string line = format_audit_line(entry);
        std::fputs(line.c_str(), file_);
        std::fputc('\n', file_);
        std::fflush(file_);
    }
    entries_.push_back(std::move(entry));
}

std::vector<AuditEntry> AuditLog::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t AuditLog::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void AuditLog::flush() {
    std::lock_guard lock(mutex_);
    if (file_) std::fflush(file_);
}

AuditVerification verify_audit_log(const std::vector<AuditEntry>& entries) {
    Hash256 head{};
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const AuditEntry& e = entries[i];
        if (e.prev_hash != head || chain_hash(head, e) != e.entry_hash)
            return {false, i};
        head = e.entry_hash;
    }
    return {true, 0};
}

std::string format_audit_line(const AuditEntry& e) {
    std::ostringstream os;
    os << e.event_type << '\t' << e.subject << '\t' << e.verdict << '\t'
       << e.timestamp << '\t' << to_hex(e.prev_hash) << '\t'
       << to_hex(e.entry_hash);
    return os.str();
}

std::optional<AuditEntry> parse_audit_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    if (fields.size() != 6) return std::nullopt;

    AuditEntry e;
    e.event_type = fields[0];
    e.subject = fields[1];
    e.verdict = fields[2];
    try {
        e.timestamp = std::stoull(fields[3]);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    auto prev = from_hex(fields[4]);
    auto cur = from_hex(fields[5]);
    if (!prev || prev->size() != 32 || !cur || cur->size() != 32)
        return std::nullopt;
    std::copy(prev->begin(), prev->end(), e.prev_hash.begin());
    std::copy(cur->begin(), cur->end(), e.entry_hash.begin());
    return e;
}

std::vector<AuditEntry> read_audit_log_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open audit log file: " + file.string());

    std::vector<AuditEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto entry = parse_audit_line(line);
        if (!entry)
            throw std::runtime_error("audit log line " + std::to_string(line_no) +
                                     ": malformed entry");
        out.push_back(std::move(*entry));
    }
    return out;
}

// An unparseable line is a chain break at that entry's index.
AuditVerification verify_audit_log_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open audit log file: " + file.string());

    std::vector<AuditEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto entry = parse_audit_line(line);
        if (!entry) return {false, entries.size()};
        entries.push_back(std::move(*entry));
    }
    return verify_audit_log(entries);
}

}  // namespace poh
