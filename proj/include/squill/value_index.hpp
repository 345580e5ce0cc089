#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "squill/catalog.hpp"
#include "squill/embedder.hpp"

namespace squill {

enum class SkipReason { non_text, id_like, uuid_like, numeric_text, too_many_distinct };
const char* skip_reason_name(SkipReason r);

struct ColumnProfile {
    ColumnId column;
    long long row_count = 0;      // non-NULL values
    long long distinct_count = 0;
    bool indexable = false;
    std::optional<SkipReason> skip_reason;
};

struct ProfileOptions {
    long long distinct_cap = 500000;
    long long sample_limit = 1000;
    double heuristic_share = 0.95;  // uuid-like / numeric-text trigger share
};

// One vector index per indexed column: distinct values with unit-norm
// embeddings of a common dimension.
struct ValueIndexShard {
    ColumnId column;
    std::size_t dimension = 0;
    std::vector<std::string> values;  // distinct, ascending
    std::vector<float> vectors;       // row-major, values.size() x dimension

    const float* vector_at(std::size_t i) const { return vectors.data() + i * dimension; }
};

struct ScoredValue {
    std::string value;
    double score = 0.0;
};

struct RetrievedValuesMap {
    std::map<ColumnId, std::vector<ScoredValue>> entries;
    std::vector<std::string> warnings;
};

struct KeywordSet {
    std::vector<std::string> keywords;
};

std::vector<ColumnProfile> profile_columns(const SqliteDb& db, const SchemaCatalog& catalog,
                                           const ProfileOptions& options = {});

// Builds one shard per indexable profile. Values are the column's distinct
// non-NULL texts, sorted, embedded in deterministic batches.
std::vector<ValueIndexShard> build_index(const SqliteDb& db,
                                         const std::vector<ColumnProfile>& profiles,
                                         Embedder& embedder);

// Shard files: magic "SQVI", u32 version, u32 dimension, u64 count, then
// per value a u32 byte length, UTF-8 bytes, and dimension little-endian
// 32-bit floats. Rebuilding unchanged data is byte-identical.
void save_shard(const ValueIndexShard& shard, const std::string& dir);
ValueIndexShard load_shard(const std::string& file);
std::vector<ValueIndexShard> load_shards(const std::string& dir);
std::string shard_filename(const ColumnId& column);

// Exact top-K by cosine similarity; ties by value text ascending. Returns
// min(K, |shard|) results.
std::vector<ScoredValue> nearest_values(const ValueIndexShard& shard,
                                        const std::vector<float>& query, std::size_t k);

// Pools every keyword's top-K per column, sorts globally by score, keeps the
// top-K unique values. Columns are independent.
RetrievedValuesMap retrieve_values(const std::vector<ValueIndexShard>& shards,
                                   const KeywordSet& keywords, Embedder& embedder, std::size_t k,
                                   int workers = 1);

// Parses a Python-style list of strings (the keyword prompt's payload).
std::optional<std::vector<std::string>> parse_python_string_list(const std::string& text);

}  // namespace squill
