#include "squill/catalog.hpp"

#include "squill/sql.hpp"

namespace squill {

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::direct: return "direct";
        case Provenance::reversed: return "reversed";
        case Provenance::value: return "value";
        case Provenance::closure: return "closure";
    }
    return "unknown";
}

TypeAffinity type_affinity(const std::string& declared_type) {
    std::string t = to_upper(declared_type);
    if (t.find("INT") != std::string::npos) return TypeAffinity::Integer;
    if (t.find("CHAR") != std::string::npos || t.find("CLOB") != std::string::npos ||
        t.find("TEXT") != std::string::npos)
        return TypeAffinity::Text;
    if (t.empty() || t.find("BLOB") != std::string::npos) return TypeAffinity::Blob;
    if (t.find("REAL") != std::string::npos || t.find("FLOA") != std::string::npos ||
        t.find("DOUB") != std::string::npos)
        return TypeAffinity::Real;
    return TypeAffinity::Numeric;
}

SchemaCatalog load_catalog(const SqliteDb& db, bool with_stats) {
    SchemaCatalog catalog;
    auto table_rows = db.query(
        "SELECT name FROM sqlite_master WHERE type = 'table' "
        "AND name NOT LIKE 'sqlite_%' ORDER BY name");
    for (const auto& row : table_rows) {
        if (!row[0]) continue;
        const std::string table = *row[0];
        TableInfo info;
        info.name = table;
        auto cols = db.query("PRAGMA table_info(" + sql::quote_identifier(table) + ")");
        std::set<std::string, ILess> pks;
        for (const auto& c : cols) {
            // cid, name, type, notnull, dflt_value, pk
            ColumnInfo col;
            col.name = c[1].value_or("");
            col.declared_type = c[2].value_or("");
            col.nullable = c[3].value_or("0") == "0";
            info.columns.push_back(col);
            if (c[5] && *c[5] != "0") pks.insert(col.name);
        }
        catalog.primary_keys[table] = std::move(pks);
        catalog.tables.push_back(std::move(info));
    }
    for (const auto& table : catalog.tables) {
        auto fks = db.query("PRAGMA foreign_key_list(" + sql::quote_identifier(table.name) + ")");
        for (const auto& f : fks) {
            // id, seq, table, from, to, on_update, on_delete, match
            ForeignKey fk;
            fk.from_table = table.name;
            fk.from_column = f[3].value_or("");
            fk.to_table = f[2].value_or("");
            if (f[4]) {
                fk.to_column = *f[4];
            } else {
                // Implicit reference to the target's primary key.
                auto it = catalog.primary_keys.find(fk.to_table);
                if (it == catalog.primary_keys.end() || it->second.empty()) continue;
                fk.to_column = *it->second.begin();
            }
            // Drop edges whose endpoints do not exist (detached schemas).
            if (!catalog.canonical_column(fk.from_table, fk.from_column) ||
                !catalog.canonical_column(fk.to_table, fk.to_column))
                continue;
            catalog.foreign_keys.push_back(std::move(fk));
        }
    }
    if (with_stats) {
        for (const auto& table : catalog.tables) {
            for (const auto& col : table.columns) {
                std::string qcol = sql::quote_identifier(col.name);
                std::string qtab = sql::quote_identifier(table.name);
                auto rows = db.query("SELECT COUNT(" + qcol + "), COUNT(DISTINCT " + qcol +
                                     ") FROM " + qtab);
                ColumnStats stats;
                if (!rows.empty()) {
                    stats.total = std::stoll(rows[0][0].value_or("0"));
                    stats.distinct = std::stoll(rows[0][1].value_or("0"));
                }
                catalog.column_stats[ColumnId{table.name, col.name}] = stats;
            }
        }
    }
    return catalog;
}

}  // namespace squill
