#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace joinagg {

/** A scalar cell value: a 64-bit integer or an interned string.
 *
 * Strings are interned in a process-wide pool, so equality and hashing are pointer comparisons.  Ordering places every
 * integer before every string; strings compare lexicographically. */
class Value
{
    public:
    Value() = default;

    static Value integer(int64_t v) { Value x; x.int_ = v; return x; }
    static Value string(std::string_view s);

    bool is_int() const { return str_ == nullptr; }
    bool is_string() const { return str_ != nullptr; }
    int64_t as_int() const { return int_; }
    std::string_view as_string() const { return *str_; }

    std::string to_string() const;

    std::size_t hash() const
    {
        return is_int() ? std::hash<int64_t>{}(int_) * 0x9e3779b97f4a7c15ULL
                        : std::hash<const void*>{}(str_);
    }

    friend bool operator==(const Value &a, const Value &b) { return a.str_ == b.str_ and a.int_ == b.int_; }
    friend std::strong_ordering operator<=>(const Value &a, const Value &b);

    private:
    int64_t int_ = 0;
    const std::string *str_ = nullptr;
};

struct ValueHash
{
    std::size_t operator()(const Value &v) const { return v.hash(); }
};

/// Combines the hashes of a value sequence.
std::size_t hash_values(std::span<const Value> values);

/// Lexicographic comparison of two value sequences.
std::strong_ordering compare_values(std::span<const Value> a, std::span<const Value> b);

/// Renders values comma separated, e.g. `1,7,x`.
std::string join_values(std::span<const Value> values, std::string_view sep = ",");

using Tuple = std::vector<Value>;

struct TupleHash
{
    std::size_t operator()(const Tuple &t) const { return hash_values(t); }
};

}
