#pragma once

#include <joinagg/query_spec.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace joinagg {

/// Column names per relation source, used to resolve unqualified column references.
using Catalog = std::map<std::string, std::vector<std::string>>;

/** Parses one statement of the supported subset:
 *
 *     SELECT <group cols>, <agg> FROM <rel [[AS] alias]>, ... [WHERE a.x = b.y [AND ...]] GROUP BY <group cols> [;]
 *
 * Keywords are case-insensitive, identifiers case-sensitive.  Unqualified columns are resolved through `catalog` (or
 * to the only relation of a single-relation query).  The result is validated: aliases resolve, the join graph is
 * connected and acyclic.  Every failure raises QueryError; syntax errors carry the byte offset. */
QuerySpec parse_sql(std::string_view text, const Catalog *catalog = nullptr);

/// Parses a query given either as SQL or as a JSON query document (leading `{`).
QuerySpec parse_query(std::string_view text, const Catalog *catalog = nullptr);

}
