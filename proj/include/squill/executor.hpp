#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "squill/db.hpp"

namespace squill {

enum class ExecStatus { ok, error, timeout };

const char* exec_status_name(ExecStatus s);

// Canonical result cell. Reals are rounded to six fractional digits and kept
// as scaled micro-units; reals that round to whole numbers collapse to
// integers so 1 and 1.0 compare equal. Blobs are kept as size-tagged digests.
struct Cell {
    enum class Kind : std::uint8_t { Null, Int, Real, Text, Blob } kind = Kind::Null;
    long long ival = 0;       // Int value, or Real micro-units
    std::string sval;         // Text bytes or blob digest

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.kind == b.kind && a.ival == b.ival && a.sval == b.sval;
    }
    friend bool operator<(const Cell& a, const Cell& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.ival != b.ival) return a.ival < b.ival;
        return a.sval < b.sval;
    }
    std::string to_string() const;
};

Cell canonicalize_integer(long long v);
Cell canonicalize_real(double v);
Cell canonicalize_text(std::string v);
Cell canonicalize_blob(const void* data, std::size_t size);

// Rounds to six fractional digits (the comparison rule for reals).
double round_real(double v);

using Row = std::vector<Cell>;

struct CanonicalResult {
    int column_count = 0;
    std::vector<Row> rows;             // up to the row cap, in arrival order
    long long row_count = 0;           // all rows, including past the cap
    bool truncated = false;
    bool has_non_null_cell = false;
    std::uint64_t ordered_digest = 0;
    std::uint64_t unordered_digest = 0;

    void append(Row row);
    bool all_cells_null() const { return row_count > 0 && !has_non_null_cell; }
};

struct ExecutionOutcome {
    ExecStatus status = ExecStatus::error;
    CanonicalResult rows;          // populated when status == ok
    std::string error_message;     // populated when status == error
    std::chrono::milliseconds elapsed{0};

    bool ok() const { return status == ExecStatus::ok; }
};

struct ExecutorOptions {
    std::chrono::milliseconds timeout{30000};
    std::size_t row_cap = 10000;
};

// Sets the process-wide bound on concurrent executions (default 8).
void set_execution_limit(int limit);

// Read-only execution; all failures are encoded in the outcome, never thrown.
ExecutionOutcome execute(const std::string& sql, const SqliteDb& db,
                         const ExecutorOptions& options = {});

// Opens the database read-only and executes.
ExecutionOutcome execute_on(const std::string& db_path, const std::string& sql,
                            const ExecutorOptions& options = {});

// Unordered comparison is row-multiset equality; ordered is sequence
// equality. Column counts must match either way.
bool results_equivalent(const CanonicalResult& a, const CanonicalResult& b, bool order_sensitive);

// Engine-level prepare without execution; empty string when the statement
// compiles.
std::string prepare_error(const SqliteDb& db, const std::string& sql);

}  // namespace squill
