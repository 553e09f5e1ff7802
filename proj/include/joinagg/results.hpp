#pragma once

#include <joinagg/aggregates.hpp>
#include <joinagg/value.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace joinagg {

/** One output group: its values in GROUP BY order, the finalized aggregate and the number of join tuples behind it. */
struct GroupResult
{
    Tuple group;
    AggregateValue value;
    uint64_t count = 0;

    friend bool operator==(const GroupResult&, const GroupResult&) = default;
};

/// Sorts by group values.
void sort_groups(std::vector<GroupResult> &groups);

/// Index of the first position where two sorted result lists differ, if any.
std::optional<std::size_t> first_difference(const std::vector<GroupResult> &a, const std::vector<GroupResult> &b);

/// Σ count over all groups.
uint64_t total_count(const std::vector<GroupResult> &groups);

struct StageStats
{
    std::string name;
    double ms = 0;
    uint64_t rows = 0;
};

/** Instrumentation shared by every engine; the JSON rendering uses the same fields for all of them. */
struct RunStats
{
    std::string engine;
    std::vector<StageStats> stages;
    uint64_t nodes = 0;                 ///< data graph |V| (joinagg)
    uint64_t edges = 0;                 ///< data graph |E| (joinagg)
    uint64_t visits = 0;                ///< Stage 2 node visits (joinagg)
    uint64_t cpair_peak = 0;            ///< largest per-source c-pair count (joinagg)
    uint64_t max_intermediate_rows = 0; ///< largest join output (baselines)
    uint64_t peak_live_rows = 0;        ///< largest materialized row count (baselines)
    uint64_t peak_structures = 0;       ///< joinagg: |V| + |E| + live per-source entries; baselines: peak_live_rows
    uint64_t output_groups = 0;

    double total_ms() const;
    nlohmann::json to_json() const;
};

}
