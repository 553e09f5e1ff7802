#include <joinagg/aggregates.hpp>

#include <joinagg/errors.hpp>

#include <numeric>


namespace joinagg {

namespace {

__int128 gcd128(__int128 a, __int128 b)
{
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        auto t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string int128_to_string(__int128 v)
{
    if (v == 0)
        return "0";
    const bool negative = v < 0;
    std::string digits;
    while (v != 0) {
        int d = static_cast<int>(v % 10);
        digits.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
        v /= 10;
    }
    if (negative)
        digits.push_back('-');
    return {digits.rbegin(), digits.rend()};
}

}

Rational Rational::make(__int128 num, __int128 den)
{
    if (den == 0)
        throw InternalError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    auto g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {static_cast<int64_t>(num), static_cast<int64_t>(den)};
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b)
{
    const __int128 l = static_cast<__int128>(a.num) * b.den;
    const __int128 r = static_cast<__int128>(b.num) * a.den;
    return l < r ? std::strong_ordering::less : l > r ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::string Rational::to_string() const
{
    constexpr __int128 kScale = 1'000'000;
    const bool negative = num < 0;
    __int128 magnitude = negative ? -static_cast<__int128>(num) : static_cast<__int128>(num);
    __int128 scaled = (magnitude * kScale * 2 + den) / (2 * static_cast<__int128>(den));
    std::string frac = int128_to_string(scaled % kScale);
    frac.insert(frac.begin(), 6 - frac.size(), '0');
    return (negative and scaled != 0 ? "-" : "") + int128_to_string(scaled / kScale) + "." + frac;
}

Annotation product(const Annotation &a, const Annotation &b)
{
    if (a.extreme and b.extreme)
        throw QueryError("MIN/MAX over attributes from more than one relation is not supported");
    return {
        a.count * b.count,
        a.sum * static_cast<int64_t>(b.count) + b.sum * static_cast<int64_t>(a.count),
        a.extreme ? a.extreme : b.extreme,
    };
}

void merge_into(Annotation &into, const Annotation &b, AggregateKind kind)
{
    into.count += b.count;
    into.sum += b.sum;
    if (b.extreme) {
        if (not into.extreme)
            into.extreme = b.extreme;
        else if (kind == AggregateKind::kMax ? *into.extreme < *b.extreme : *b.extreme < *into.extreme)
            into.extreme = b.extreme;
    }
}

AggregateValue finalize(const Annotation &a, AggregateKind kind)
{
    if (a.count == 0)
        throw InternalError("finalizing an empty group");
    switch (kind) {
        case AggregateKind::kCountStar: return static_cast<int64_t>(a.count);
        case AggregateKind::kSum:       return a.sum;
        case AggregateKind::kMin:
        case AggregateKind::kMax:
            if (not a.extreme)
                throw InternalError("MIN/MAX group without a value");
            return *a.extreme;
        case AggregateKind::kAvg:       return Rational::make(a.sum, a.count);
    }
    throw InternalError("unknown aggregate kind");
}

std::string to_string(const AggregateValue &v)
{
    if (auto i = std::get_if<int64_t>(&v))
        return std::to_string(*i);
    if (auto x = std::get_if<Value>(&v))
        return x->to_string();
    return std::get<Rational>(v).to_string();
}

}
