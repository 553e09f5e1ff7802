#include <joinagg/value.hpp>

#include <mutex>
#include <unordered_set>


namespace joinagg {

namespace {

struct StringPool
{
    std::mutex mutex;
    std::unordered_set<std::string> strings; // node-based: element addresses are stable
};

StringPool & pool()
{
    static StringPool instance;
    return instance;
}

}

Value Value::string(std::string_view s)
{
    auto &p = pool();
    std::lock_guard lock(p.mutex);
    auto it = p.strings.emplace(s).first;
    Value v;
    v.str_ = &*it;
    return v;
}

std::string Value::to_string() const
{
    if (is_int())
        return std::to_string(int_);
    return *str_;
}

std::strong_ordering operator<=>(const Value &a, const Value &b)
{
    if (a.is_int() and b.is_int())
        return a.int_ <=> b.int_;
    if (a.is_int() != b.is_int())
        return a.is_int() ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.str_ == b.str_)
        return std::strong_ordering::equal;
    int c = a.str_->compare(*b.str_);
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::size_t hash_values(std::span<const Value> values)
{
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const auto &v : values) {
        h ^= v.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

std::strong_ordering compare_values(std::span<const Value> a, std::span<const Value> b)
{
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i != n; ++i) {
        if (auto c = a[i] <=> b[i]; c != 0)
            return c;
    }
    return a.size() <=> b.size();
}

std::string join_values(std::span<const Value> values, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i != values.size(); ++i) {
        if (i) out += sep;
        out += values[i].to_string();
    }
    return out;
}

}
