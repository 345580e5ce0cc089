#pragma once

#include <map>
#include <string>
#include <vector>

#include "squill/sql.hpp"

namespace squill {

struct PatternMatch {
    std::string kind;
    sql::NodePath node_path;
    std::map<std::string, std::string> details;
};

// Registered pattern identifiers:
//   select-star              top-level bare SELECT *
//   join-nonstandard         ON with OR / IN / non-equality between columns
//   order-by-aggregate-limit aggregate in ORDER BY with LIMIT, no GROUP BY
//   strftime-misuse          bad format specifiers or numeric comparison
//   maxmin-subquery          WHERE col op (SELECT MAX/MIN(col) FROM same table)
std::vector<std::string> registered_patterns();

// All matches in document order; UnknownPatternError for unregistered kinds.
std::vector<PatternMatch> find_patterns(const sql::Node& tree, const std::string& kind);

// True when the expression contains an aggregate call, not counting
// aggregates inside nested subqueries.
bool contains_aggregate(const sql::Node& expr);
bool is_aggregate_function(const std::string& name);

}  // namespace squill
