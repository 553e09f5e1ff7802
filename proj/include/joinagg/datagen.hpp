#pragma once

#include <joinagg/query_spec.hpp>
#include <joinagg/relation.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace joinagg {

/** SplitMix64: 64-bit state, golden-ratio increment, murmur-style finalizer. */
class SplitMix64
{
    public:
    explicit SplitMix64(uint64_t seed) : state_(seed) { }

    uint64_t next()
    {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw from [0, bound) without modulo bias (multiply-shift with rejection).
    uint64_t bounded(uint64_t bound);

    private:
    uint64_t state_;
};

enum class Family { kSelfJoin, kChain4, kBranch };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

struct GenConfig
{
    Family family = Family::kSelfJoin;
    std::size_t n = 1000;                       ///< rows per relation
    std::vector<double> s_join = {0.01};        ///< BRANCH: {s_j, s_b}
    double s_group = 0.01;
    uint64_t seed = 42;
    std::optional<std::size_t> domain_base;     ///< value domain = round(s × base); base defaults to n
};

/// Number of distinct values a column with selectivity `s` draws from.
std::size_t domain_size(double s, std::size_t base);

struct GeneratedData
{
    std::map<std::string, RelationPtr> files;   ///< file stem -> relation
    RelationMap relations;                      ///< query alias -> relation
    QuerySpec query;
    nlohmann::json manifest;
};

/// Deterministic in (cfg): the same config always yields identical relations.
GeneratedData generate(const GenConfig &cfg);

/// Writes `<family>_<alias>.csv` files, `manifest.json` and `query.sql` into `dir`.
void write_dataset(const GeneratedData &data, const std::filesystem::path &dir);

}
