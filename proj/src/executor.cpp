#include "squill/executor.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <mutex>

#include "squill/common.hpp"

namespace squill {

namespace {

// Dynamic-limit semaphore bounding concurrent executions.
class ExecutionGate {
public:
    void set_limit(int limit) {
        std::lock_guard lock(mu_);
        limit_ = std::max(1, limit);
        cv_.notify_all();
    }
    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }
    void release() {
        std::lock_guard lock(mu_);
        --active_;
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int limit_ = 8;
    int active_ = 0;
};

ExecutionGate& gate() {
    static ExecutionGate g;
    return g;
}

struct GateToken {
    GateToken() { gate().acquire(); }
    ~GateToken() { gate().release(); }
};

struct Deadline {
    std::chrono::steady_clock::time_point at;
    bool expired() const { return std::chrono::steady_clock::now() >= at; }
};

int progress_callback(void* ctx) {
    return static_cast<Deadline*>(ctx)->expired() ? 1 : 0;
}

std::uint64_t cell_hash(const Cell& c) {
    std::uint64_t h = fnv1a64(c.sval, 0x100001b3u + static_cast<std::uint64_t>(c.kind));
    h ^= static_cast<std::uint64_t>(c.ival) * 0x9e3779b97f4a7c15ull;
    return h;
}

std::uint64_t row_hash(const Row& row) {
    std::uint64_t h = 1469598103934665603ull;
    for (const Cell& c : row) {
        std::uint64_t ch = cell_hash(c);
        h = (h ^ ch) * 1099511628211ull;
    }
    return h;
}

}  // namespace

const char* exec_status_name(ExecStatus s) {
    switch (s) {
        case ExecStatus::ok: return "ok";
        case ExecStatus::error: return "error";
        case ExecStatus::timeout: return "timeout";
    }
    return "unknown";
}

double round_real(double v) {
    if (!std::isfinite(v)) return v;
    return std::round(v * 1e6) / 1e6;
}

Cell canonicalize_integer(long long v) {
    Cell c;
    c.kind = Cell::Kind::Int;
    c.ival = v;
    return c;
}

Cell canonicalize_real(double v) {
    Cell c;
    if (!std::isfinite(v)) {
        c.kind = Cell::Kind::Text;
        c.sval = std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
        return c;
    }
    double r = std::round(v * 1e6);
    // Whole numbers collapse to integer cells so 1 == 1.0.
    if (std::abs(r) < 9.0e15) {
        long long micros = static_cast<long long>(r);
        if (micros % 1000000 == 0) return canonicalize_integer(micros / 1000000);
        c.kind = Cell::Kind::Real;
        c.ival = micros;
        return c;
    }
    c.kind = Cell::Kind::Real;
    c.ival = 0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    c.sval = buf;
    return c;
}

Cell canonicalize_text(std::string v) {
    Cell c;
    c.kind = Cell::Kind::Text;
    c.sval = std::move(v);
    return c;
}

Cell canonicalize_blob(const void* data, std::size_t size) {
    Cell c;
    c.kind = Cell::Kind::Blob;
    std::uint64_t digest =
        fnv1a64(std::string_view(static_cast<const char*>(data), size));
    char buf[48];
    std::snprintf(buf, sizeof(buf), "blob:%016llx:%zu", static_cast<unsigned long long>(digest),
                  size);
    c.sval = buf;
    return c;
}

std::string Cell::to_string() const {
    switch (kind) {
        case Kind::Null:
            return "NULL";
        case Kind::Int:
            return std::to_string(ival);
        case Kind::Real: {
            if (!sval.empty()) return sval;
            long long whole = ival / 1000000;
            long long frac = std::llabs(ival % 1000000);
            char buf[48];
            std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", (ival < 0 && whole == 0) ? "-" : "",
                          whole, frac);
            std::string s = buf;
            while (s.back() == '0') s.pop_back();
            if (s.back() == '.') s.pop_back();
            return s;
        }
        case Kind::Text:
            return sval;
        case Kind::Blob:
            return sval;
    }
    return "";
}

void CanonicalResult::append(Row row) {
    std::uint64_t rh = row_hash(row);
    ordered_digest = (ordered_digest ^ rh) * 1099511628211ull + 0x9e3779b9u;
    unordered_digest += rh;
    for (const Cell& c : row)
        if (c.kind != Cell::Kind::Null) has_non_null_cell = true;
    ++row_count;
    if (!truncated) rows.push_back(std::move(row));
}

namespace {

ExecutionOutcome run_statement(const std::string& sql, const SqliteDb& db,
                               const ExecutorOptions& options) {
    ExecutionOutcome outcome;
    sqlite3* handle = db.raw();
    sqlite3_stmt* stmt = nullptr;
    const char* tail = nullptr;
    if (sqlite3_prepare_v2(handle, sql.c_str(), -1, &stmt, &tail) != SQLITE_OK) {
        outcome.status = ExecStatus::error;
        outcome.error_message = sqlite3_errmsg(handle);
        return outcome;
    }
    if (!stmt) {
        outcome.status = ExecStatus::error;
        outcome.error_message = "empty statement";
        return outcome;
    }
    if (tail) {
        std::string rest = trim(tail);
        if (!rest.empty() && rest != ";") {
            sqlite3_finalize(stmt);
            outcome.status = ExecStatus::error;
            outcome.error_message = "multiple statements are not allowed";
            return outcome;
        }
    }
    if (!sqlite3_stmt_readonly(stmt)) {
        sqlite3_finalize(stmt);
        outcome.status = ExecStatus::error;
        outcome.error_message = "write statements are rejected";
        return outcome;
    }

    Deadline deadline{std::chrono::steady_clock::now() + options.timeout};
    sqlite3_progress_handler(handle, 1000, progress_callback, &deadline);

    CanonicalResult result;
    result.column_count = sqlite3_column_count(stmt);
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
        Row row;
        row.reserve(static_cast<std::size_t>(result.column_count));
        for (int i = 0; i < result.column_count; ++i) {
            switch (sqlite3_column_type(stmt, i)) {
                case SQLITE_NULL:
                    row.push_back(Cell{});
                    break;
                case SQLITE_INTEGER:
                    row.push_back(canonicalize_integer(sqlite3_column_int64(stmt, i)));
                    break;
                case SQLITE_FLOAT:
                    row.push_back(canonicalize_real(sqlite3_column_double(stmt, i)));
                    break;
                case SQLITE_TEXT: {
                    const unsigned char* text = sqlite3_column_text(stmt, i);
                    row.push_back(canonicalize_text(reinterpret_cast<const char*>(text)));
                    break;
                }
                case SQLITE_BLOB: {
                    const void* blob = sqlite3_column_blob(stmt, i);
                    int size = sqlite3_column_bytes(stmt, i);
                    row.push_back(canonicalize_blob(blob, static_cast<std::size_t>(size)));
                    break;
                }
                default:
                    row.push_back(Cell{});
            }
        }
        if (result.rows.size() >= options.row_cap) result.truncated = true;
        result.append(std::move(row));
    }
    sqlite3_progress_handler(handle, 0, nullptr, nullptr);
    sqlite3_finalize(stmt);

    if (rc == SQLITE_DONE) {
        outcome.status = ExecStatus::ok;
        outcome.rows = std::move(result);
    } else if (rc == SQLITE_INTERRUPT || deadline.expired()) {
        outcome.status = ExecStatus::timeout;
    } else {
        outcome.status = ExecStatus::error;
        outcome.error_message = sqlite3_errmsg(handle);
    }
    return outcome;
}

}  // namespace

void set_execution_limit(int limit) { gate().set_limit(limit); }

ExecutionOutcome execute(const std::string& sql, const SqliteDb& db,
                         const ExecutorOptions& options) {
    GateToken token;
    auto start = std::chrono::steady_clock::now();
    ExecutionOutcome outcome = run_statement(sql, db, options);
    outcome.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return outcome;
}

ExecutionOutcome execute_on(const std::string& db_path, const std::string& sql,
                            const ExecutorOptions& options) {
    try {
        SqliteDb db = SqliteDb::open_read_only(db_path);
        return execute(sql, db, options);
    } catch (const DatabaseError& e) {
        ExecutionOutcome outcome;
        outcome.status = ExecStatus::error;
        outcome.error_message = e.what();
        return outcome;
    }
}

bool results_equivalent(const CanonicalResult& a, const CanonicalResult& b,
                        bool order_sensitive) {
    if (a.column_count != b.column_count) return false;
    if (a.row_count != b.row_count) return false;
    if (a.truncated || b.truncated) {
        // Past the row cap, fall back to streaming digests.
        return order_sensitive ? a.ordered_digest == b.ordered_digest
                               : a.unordered_digest == b.unordered_digest;
    }
    if (order_sensitive) return a.rows == b.rows;
    std::vector<Row> left = a.rows;
    std::vector<Row> right = b.rows;
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    return left == right;
}

std::string prepare_error(const SqliteDb& db, const std::string& sql) {
    sqlite3_stmt* stmt = nullptr;
    const char* tail = nullptr;
    if (sqlite3_prepare_v2(db.raw(), sql.c_str(), -1, &stmt, &tail) != SQLITE_OK) {
        return sqlite3_errmsg(db.raw());
    }
    std::string rest = tail ? trim(tail) : "";
    sqlite3_finalize(stmt);
    if (!rest.empty() && rest != ";") return "multiple statements are not allowed";
    return "";
}

}  // namespace squill
