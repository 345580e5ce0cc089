#include "squill/db.hpp"

#include <sqlite3.h>

namespace squill {

void SqliteDb::Closer::operator()(sqlite3* db) const {
    if (db) sqlite3_close_v2(db);
}

SqliteDb SqliteDb::open_read_only(const std::string& path) {
    sqlite3* raw = nullptr;
    int rc = sqlite3_open_v2(path.c_str(), &raw, SQLITE_OPEN_READONLY, nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = raw ? sqlite3_errmsg(raw) : "out of memory";
        if (raw) sqlite3_close_v2(raw);
        throw DatabaseError("cannot open database '" + path + "': " + msg);
    }
    SqliteDb db;
    db.handle_.reset(raw);
    db.path_ = path;
    return db;
}

SqliteDb SqliteDb::open_memory() {
    sqlite3* raw = nullptr;
    if (sqlite3_open_v2(":memory:", &raw, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr) !=
        SQLITE_OK) {
        if (raw) sqlite3_close_v2(raw);
        throw DatabaseError("cannot open in-memory database");
    }
    SqliteDb db;
    db.handle_.reset(raw);
    db.path_ = ":memory:";
    return db;
}

SqliteDb SqliteDb::create(const std::string& path) {
    sqlite3* raw = nullptr;
    int rc = sqlite3_open_v2(path.c_str(), &raw, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE,
                             nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = raw ? sqlite3_errmsg(raw) : "out of memory";
        if (raw) sqlite3_close_v2(raw);
        throw DatabaseError("cannot create database '" + path + "': " + msg);
    }
    SqliteDb db;
    db.handle_.reset(raw);
    db.path_ = path;
    return db;
}

void SqliteDb::exec_script(const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(raw(), sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw DatabaseError("script failed: " + msg);
    }
}

std::vector<std::vector<std::optional<std::string>>> SqliteDb::query(
    const std::string& sql) const {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(raw(), sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        throw DatabaseError(std::string("query failed: ") + sqlite3_errmsg(raw()));
    }
    std::vector<std::vector<std::optional<std::string>>> rows;
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
        std::vector<std::optional<std::string>> row;
        int cols = sqlite3_column_count(stmt);
        row.reserve(static_cast<std::size_t>(cols));
        for (int i = 0; i < cols; ++i) {
            if (sqlite3_column_type(stmt, i) == SQLITE_NULL) {
                row.emplace_back(std::nullopt);
            } else {
                const unsigned char* text = sqlite3_column_text(stmt, i);
                row.emplace_back(std::string(reinterpret_cast<const char*>(text)));
            }
        }
        rows.push_back(std::move(row));
    }
    if (rc != SQLITE_DONE) {
        std::string msg = sqlite3_errmsg(raw());
        sqlite3_finalize(stmt);
        throw DatabaseError("query failed: " + msg);
    }
    sqlite3_finalize(stmt);
    return rows;
}

std::optional<long long> SqliteDb::query_int(const std::string& sql) const {
    auto rows = query(sql);
    if (rows.empty() || rows[0].empty() || !rows[0][0].has_value()) return std::nullopt;
    return std::stoll(*rows[0][0]);
}

void create_database_from_sql(const std::string& db_path, const std::string& script) {
    SqliteDb db = SqliteDb::create(db_path);
    db.exec_script(script);
}

}  // namespace squill
