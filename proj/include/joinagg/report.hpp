#pragma once

#include <joinagg/query_spec.hpp>
#include <joinagg/results.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace joinagg {

/// `g1,...,gk,agg` with a header naming the GROUP BY attributes and the aggregate.
void write_results_csv(std::ostream &out, const QuerySpec &q, const std::vector<GroupResult> &groups,
                       bool header = true);

/// One JSON object per line, keyed by attribute name and aggregate.  AVG values are rendered as decimal strings.
void write_results_json(std::ostream &out, const QuerySpec &q, const std::vector<GroupResult> &groups);

/// Side-by-side table of engine statistics.
std::string format_comparison(const std::vector<RunStats> &runs);

}
