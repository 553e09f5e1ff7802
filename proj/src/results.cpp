#include <joinagg/results.hpp>

#include <algorithm>
#include <numeric>


namespace joinagg {

void sort_groups(std::vector<GroupResult> &groups)
{
    std::sort(groups.begin(), groups.end(), [](const GroupResult &a, const GroupResult &b) {
        return compare_values(a.group, b.group) < 0;
    });
}

std::optional<std::size_t> first_difference(const std::vector<GroupResult> &a, const std::vector<GroupResult> &b)
{
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i != n; ++i) {
        if (not (a[i] == b[i]))
            return i;
    }
    if (a.size() != b.size())
        return n;
    return std::nullopt;
}

uint64_t total_count(const std::vector<GroupResult> &groups)
{
    return std::accumulate(groups.begin(), groups.end(), uint64_t{0},
                           [](uint64_t acc, const GroupResult &g) { return acc + g.count; });
}

double RunStats::total_ms() const
{
    return std::accumulate(stages.begin(), stages.end(), 0.0, [](double acc, const StageStats &s) { return acc + s.ms; });
}

nlohmann::json RunStats::to_json() const
{
    nlohmann::json st = nlohmann::json::array();
    for (const auto &s : stages)
        st.push_back({{"name", s.name}, {"ms", s.ms}, {"rows", s.rows}});
    return {
        {"engine", engine},
        {"stages", st},
        {"total_ms", total_ms()},
        {"nodes", nodes},
        {"edges", edges},
        {"visits", visits},
        {"cpair_peak", cpair_peak},
        {"max_intermediate_rows", max_intermediate_rows},
        {"peak_live_rows", peak_live_rows},
        {"peak_structures", peak_structures},
        {"output_groups", output_groups},
    };
}

}
