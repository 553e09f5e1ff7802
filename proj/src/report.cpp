#include <joinagg/report.hpp>

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>


namespace joinagg {

namespace {

nlohmann::json to_json(const Value &v)
{
    if (v.is_int())
        return v.as_int();
    return std::string(v.as_string());
}

nlohmann::json to_json(const AggregateValue &v)
{
    if (auto i = std::get_if<int64_t>(&v))
        return *i;
    if (auto x = std::get_if<Value>(&v))
        return to_json(*x);
    return std::get<Rational>(v).to_string();
}

std::string fixed(double ms)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", ms);
    return buf;
}

}

void write_results_csv(std::ostream &out, const QuerySpec &q, const std::vector<GroupResult> &groups, bool header)
{
    if (header) {
        for (const auto &g : q.group_by)
            out << g.to_string() << ',';
        out << q.aggregate.to_string() << '\n';
    }
    for (const auto &g : groups)
        out << join_values(g.group) << ',' << to_string(g.value) << '\n';
}

void write_results_json(std::ostream &out, const QuerySpec &q, const std::vector<GroupResult> &groups)
{
    const std::string agg = q.aggregate.to_string();
    for (const auto &g : groups) {
        nlohmann::ordered_json line;
        for (std::size_t i = 0; i != q.group_by.size(); ++i)
            line[q.group_by[i].to_string()] = to_json(g.group[i]);
        line[agg] = to_json(g.value);
        out << line.dump() << '\n';
    }
}

std::string format_comparison(const std::vector<RunStats> &runs)
{
    std::ostringstream out;
    out << std::left << std::setw(9) << "engine" << std::right << std::setw(11) << "total_ms" << std::setw(22)
        << "max_intermediate_rows" << std::setw(17) << "peak_structures" << std::setw(15) << "output_groups"
        << "  stages_ms\n";
    for (const auto &r : runs) {
        out << std::left << std::setw(9) << r.engine << std::right << std::setw(11) << fixed(r.total_ms())
            << std::setw(22) << r.max_intermediate_rows << std::setw(17) << r.peak_structures << std::setw(15)
            << r.output_groups << "  ";
        for (std::size_t i = 0; i != r.stages.size(); ++i)
            out << (i ? " " : "") << r.stages[i].name << '=' << fixed(r.stages[i].ms);
        out << '\n';
    }
    return out.str();
}

}
