#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "squill/errors.hpp"

struct sqlite3;

namespace squill {

// Thin RAII wrapper over a SQLite connection. The pipeline only ever opens
// databases read-only; writable connections exist for fixture construction.
class SqliteDb {
public:
    static SqliteDb open_read_only(const std::string& path);
    static SqliteDb open_memory();
    static SqliteDb create(const std::string& path);

    SqliteDb() = default;
    SqliteDb(SqliteDb&&) noexcept = default;
    SqliteDb& operator=(SqliteDb&&) noexcept = default;

    sqlite3* raw() const { return handle_.get(); }
    const std::string& path() const { return path_; }
    bool valid() const { return handle_ != nullptr; }

    // Executes a script of semicolon-separated statements (DDL/DML).
    void exec_script(const std::string& sql);

    // Runs a query and returns rows as text cells (NULL -> nullopt).
    std::vector<std::vector<std::optional<std::string>>> query(const std::string& sql) const;

    std::optional<long long> query_int(const std::string& sql) const;

private:
    struct Closer {
        void operator()(sqlite3* db) const;
    };
    std::unique_ptr<sqlite3, Closer> handle_;
    std::string path_;
};

// Builds a database file from a SQL script (fixture helper).
void create_database_from_sql(const std::string& db_path, const std::string& script);

}  // namespace squill
