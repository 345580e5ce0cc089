#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "squill/common.hpp"
#include "squill/db.hpp"

namespace squill {

struct ColumnId {
    std::string table;
    std::string column;

    std::string qualified() const { return table + "." + column; }

    friend bool operator==(const ColumnId& a, const ColumnId& b) {
        return iequals(a.table, b.table) && iequals(a.column, b.column);
    }
    friend bool operator<(const ColumnId& a, const ColumnId& b) {
        ILess less;
        if (less(a.table, b.table)) return true;
        if (less(b.table, a.table)) return false;
        return less(a.column, b.column);
    }
};

struct ColumnInfo {
    std::string name;
    std::string declared_type;
    bool nullable = true;
    std::string description;
};

struct TableInfo {
    std::string name;
    std::vector<ColumnInfo> columns;

    const ColumnInfo* find_column(const std::string& column) const {
        for (const auto& c : columns)
            if (iequals(c.name, column)) return &c;
        return nullptr;
    }
};

struct ForeignKey {
    std::string from_table;
    std::string from_column;
    std::string to_table;
    std::string to_column;
};

struct ColumnStats {
    long long total = 0;
    long long distinct = 0;
};

struct SchemaCatalog {
    std::vector<TableInfo> tables;
    std::map<std::string, std::set<std::string, ILess>, ILess> primary_keys;
    std::vector<ForeignKey> foreign_keys;
    std::map<ColumnId, ColumnStats> column_stats;

    const TableInfo* find_table(const std::string& name) const {
        for (const auto& t : tables)
            if (iequals(t.name, name)) return &t;
        return nullptr;
    }

    // Canonical (catalog-cased) identifiers, or nullopt when absent.
    std::optional<std::string> canonical_table(const std::string& name) const {
        const TableInfo* t = find_table(name);
        if (!t) return std::nullopt;
        return t->name;
    }
    std::optional<ColumnId> canonical_column(const std::string& table,
                                             const std::string& column) const {
        const TableInfo* t = find_table(table);
        if (!t) return std::nullopt;
        const ColumnInfo* c = t->find_column(column);
        if (!c) return std::nullopt;
        return ColumnId{t->name, c->name};
    }

    bool is_primary_key(const ColumnId& id) const {
        auto it = primary_keys.find(id.table);
        return it != primary_keys.end() && it->second.count(id.column) > 0;
    }
};

// Tables and columns named by a linking strategy; every column's table is
// kept in the table set.
struct SchemaSubset {
    std::set<std::string, ILess> tables;
    std::set<ColumnId> columns;

    void add_table(std::string table) { tables.insert(std::move(table)); }
    void add_column(ColumnId id) {
        tables.insert(id.table);
        columns.insert(std::move(id));
    }
    bool empty() const { return tables.empty() && columns.empty(); }
    std::size_t size() const { return tables.size() + columns.size(); }

    bool operator==(const SchemaSubset&) const = default;
};

enum class Provenance { direct, reversed, value, closure };

const char* provenance_name(Provenance p);

struct LinkedSchema {
    SchemaSubset subset;
    // Keyed by "table" or "table.column" in catalog casing.
    std::map<std::string, std::set<Provenance>> added_by;
    bool connected = true;
    // Table partition when the catalog cannot connect the subset.
    std::vector<std::vector<std::string>> components;
};

// Reads tables, columns, PKs and FK edges from a SQLite database. When
// `with_stats` is set, also collects per-column total/distinct counts.
SchemaCatalog load_catalog(const SqliteDb& db, bool with_stats = true);

// SQLite type affinity of a declared column type.
enum class TypeAffinity { Integer, Text, Blob, Real, Numeric };
TypeAffinity type_affinity(const std::string& declared_type);

}  // namespace squill
