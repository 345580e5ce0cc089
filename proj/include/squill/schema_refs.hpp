#pragma once

#include <map>
#include <string>
#include <vector>

#include "squill/catalog.hpp"
#include "squill/sql.hpp"

namespace squill {

// Alias-aware resolution of every column reference in a tree against a
// catalog. Unresolvable references are dropped and reported, never fatal.
struct ResolvedRefs {
    SchemaSubset subset;
    std::map<sql::NodePath, ColumnId> column_refs;
    std::vector<std::string> unresolved;
};

ResolvedRefs resolve_refs(const sql::Node& tree, const SchemaCatalog& catalog);

// The schema components named by a query: tables from FROM/JOIN (and
// subqueries), catalog-resolvable column references. A star contributes its
// table only.
SchemaSubset extract_schema_refs(const sql::Node& tree, const SchemaCatalog& catalog,
                                 std::vector<std::string>* unresolved = nullptr);

}  // namespace squill
