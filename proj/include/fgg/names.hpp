#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace fgg {

// Interned identifier. Comparison and hashing are O(1); the backing table
// is append-only and shared process-wide.
class Name {
public:
    Name() : id_(0) {}

    static Name of(std::string_view text);

    const std::string& str() const;
    bool empty() const { return id_ == 0; }
    std::uint32_t id() const { return id_; }

    friend bool operator==(Name a, Name b) { return a.id_ == b.id_; }
    friend bool operator!=(Name a, Name b) { return a.id_ != b.id_; }
    // Order by spelling so that sets and printed output are stable.
    friend bool operator<(Name a, Name b) { return a.str() < b.str(); }

private:
    explicit Name(std::uint32_t id) : id_(id) {}
    std::uint32_t id_;

    struct Table {
        std::mutex mu;
        std::vector<std::string> texts{""};
        std::unordered_map<std::string, std::uint32_t> ids;
    };
    static Table& table() {
        static Table t;
        return t;
    }
};

inline Name Name::of(std::string_view text) {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    auto it = t.ids.find(std::string(text));
    if (it != t.ids.end()) return Name(it->second);
    auto id = static_cast<std::uint32_t>(t.texts.size());
    t.texts.emplace_back(text);
    t.ids.emplace(std::string(text), id);
    return Name(id);
}

inline const std::string& Name::str() const {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.texts[id_];
}

struct NameHash {
    std::size_t operator()(Name n) const { return std::hash<std::uint32_t>()(n.id()); }
};

using NameSet = std::unordered_set<Name, NameHash>;

// Generates names of the form <prefix><counter>, skipping anything listed
// in `avoid`. Deterministic given the same avoid set and call sequence.
class FreshGen {
public:
    explicit FreshGen(std::string prefix = "%") : prefix_(std::move(prefix)) {}

    void avoid(Name n) { avoid_.insert(n); }
    void avoid_all(const NameSet& ns) { avoid_.insert(ns.begin(), ns.end()); }

    Name fresh() {
        for (;;) {
            Name candidate = Name::of(prefix_ + std::to_string(next_++));
            if (avoid_.find(candidate) == avoid_.end()) return candidate;
        }
    }

private:
    std::string prefix_;
    std::uint64_t next_ = 0;
    NameSet avoid_;
};

} // namespace fgg

template <>
struct std::hash<fgg::Name> {
    std::size_t operator()(fgg::Name n) const { return std::hash<std::uint32_t>()(n.id()); }
};
