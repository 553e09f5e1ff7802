#pragma once

#include <joinagg/query_spec.hpp>
#include <joinagg/value.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace joinagg {

/// Exact fraction with a positive denominator, kept in lowest terms.
struct Rational
{
    int64_t num = 0;
    int64_t den = 1;

    static Rational make(__int128 num, __int128 den);

    /// Decimal rendering rounded half away from zero to six places, e.g. `3.333333`.
    std::string to_string() const;

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b);
};

/** The running quantities propagated along the data graph.
 *
 * `count` is the number of join tuples summarized; `sum` the sum of the aggregated attribute over them; `extreme` the
 * minimum (MIN) or maximum (MAX) of the attribute, present only once the aggregated relation has been passed. */
struct Annotation
{
    uint64_t count = 0;
    int64_t sum = 0;
    std::optional<Value> extreme;

    static Annotation unit() { return {1, 0, std::nullopt}; }
    static Annotation zero() { return {}; }

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Sequential composition with a bare multiplicity: scales count and sum, leaves the extreme alone.
inline Annotation sequential(const Annotation &a, uint64_t m) { return {a.count * m, a.sum * static_cast<int64_t>(m), a.extreme}; }

/** Product of two independent annotations (sequential edges or parallel branches).  `sum` follows the product rule
 * s_a·c_b + s_b·c_a; at most one side may carry an extreme, otherwise QueryError. */
Annotation product(const Annotation &a, const Annotation &b);

/// Sum over alternative paths: counts and sums add, extremes take the min (MIN) or max (MAX) of both.
void merge_into(Annotation &into, const Annotation &b, AggregateKind kind);
inline Annotation merge(Annotation a, const Annotation &b, AggregateKind kind) { merge_into(a, b, kind); return a; }

/// int64 for COUNT and SUM, the attribute value for MIN and MAX, an exact fraction for AVG.
using AggregateValue = std::variant<int64_t, Value, Rational>;

/// Final scalar of a group.  Requires count > 0.
AggregateValue finalize(const Annotation &a, AggregateKind kind);

std::string to_string(const AggregateValue &v);

}
