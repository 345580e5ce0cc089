#include "squill/value_index.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <numeric>
#include <regex>

#include "squill/sql.hpp"

namespace squill {

namespace {

bool id_like_name(const std::string& name) {
    static const std::regex pattern("(^|_)(id|uuid|guid|hash|code)$",
                                    std::regex::icase | std::regex::optimize);
    return std::regex_search(name, pattern);
}

bool uuid_like_value(const std::string& v) {
    static const std::regex pattern(
        "^[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}$",
        std::regex::optimize);
    return std::regex_match(v, pattern);
}

bool numeric_value(const std::string& v) {
    if (v.empty()) return false;
    char* end = nullptr;
    std::strtod(v.c_str(), &end);
    return end && *end == '\0';
}

std::string percent_encode(const std::string& name) {
    std::string out;
    for (unsigned char c : name) {
        if (std::isalnum(c) || c == '_' || c == '-') {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

void write_u32(std::ofstream& f, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    f.write(reinterpret_cast<const char*>(buf), 4);
}

void write_u64(std::ofstream& f, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    f.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint32_t read_u32(std::ifstream& f) {
    unsigned char buf[4];
    f.read(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::ifstream& f) {
    unsigned char buf[8];
    f.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

const char* skip_reason_name(SkipReason r) {
    switch (r) {
        case SkipReason::non_text: return "non-text";
        case SkipReason::id_like: return "id-like";
        case SkipReason::uuid_like: return "uuid-like";
        case SkipReason::numeric_text: return "numeric-text";
        case SkipReason::too_many_distinct: return "too-many-distinct";
    }
    return "unknown";
}

std::vector<ColumnProfile> profile_columns(const SqliteDb& db, const SchemaCatalog& catalog,
                                           const ProfileOptions& options) {
    if (!db.valid()) throw DatabaseError("database handle is not open");
    std::vector<ColumnProfile> profiles;
    for (const TableInfo& table : catalog.tables) {
        for (const ColumnInfo& column : table.columns) {
            ColumnProfile p;
            p.column = ColumnId{table.name, column.name};
            std::string qcol = sql::quote_identifier(column.name);
            std::string qtab = sql::quote_identifier(table.name);
            auto rows = db.query("SELECT COUNT(" + qcol + "), COUNT(DISTINCT " + qcol +
                                 ") FROM " + qtab);
            if (!rows.empty()) {
                p.row_count = std::stoll(rows[0][0].value_or("0"));
                p.distinct_count = std::stoll(rows[0][1].value_or("0"));
            }
            if (type_affinity(column.declared_type) != TypeAffinity::Text) {
                p.skip_reason = SkipReason::non_text;
                profiles.push_back(std::move(p));
                continue;
            }
            if (id_like_name(column.name) && p.row_count > 0 &&
                p.distinct_count == p.row_count) {
                p.skip_reason = SkipReason::id_like;
                profiles.push_back(std::move(p));
                continue;
            }
            if (p.distinct_count > 0) {
                long long limit = std::min(p.distinct_count, options.sample_limit);
                auto sample = db.query("SELECT DISTINCT " + qcol + " FROM " + qtab + " WHERE " +
                                       qcol + " IS NOT NULL ORDER BY " + qcol + " LIMIT " +
                                       std::to_string(limit));
                long long uuid_hits = 0;
                long long numeric_hits = 0;
                for (const auto& row : sample) {
                    const std::string& v = row[0].value_or("");
                    if (uuid_like_value(v)) ++uuid_hits;
                    if (numeric_value(v)) ++numeric_hits;
                }
                double n = static_cast<double>(sample.size());
                if (n > 0 && uuid_hits >= options.heuristic_share * n) {
                    p.skip_reason = SkipReason::uuid_like;
                    profiles.push_back(std::move(p));
                    continue;
                }
                if (n > 0 && numeric_hits >= options.heuristic_share * n) {
                    p.skip_reason = SkipReason::numeric_text;
                    profiles.push_back(std::move(p));
                    continue;
                }
            }
            if (p.distinct_count > options.distinct_cap) {
                p.skip_reason = SkipReason::too_many_distinct;
                profiles.push_back(std::move(p));
                continue;
            }
            p.indexable = true;
            profiles.push_back(std::move(p));
        }
    }
    return profiles;
}

std::vector<ValueIndexShard> build_index(const SqliteDb& db,
                                         const std::vector<ColumnProfile>& profiles,
                                         Embedder& embedder) {
    std::vector<ValueIndexShard> shards;
    for (const ColumnProfile& profile : profiles) {
        if (!profile.indexable) continue;
        ValueIndexShard shard;
        shard.column = profile.column;
        shard.dimension = embedder.dimension();
        std::string qcol = sql::quote_identifier(profile.column.column);
        std::string qtab = sql::quote_identifier(profile.column.table);
        auto rows = db.query("SELECT DISTINCT " + qcol + " FROM " + qtab + " WHERE " + qcol +
                             " IS NOT NULL ORDER BY " + qcol);
        shard.values.reserve(rows.size());
        for (const auto& row : rows) shard.values.push_back(row[0].value_or(""));
        if (!shard.values.empty()) {
            auto vectors = embedder.embed(shard.values);
            shard.vectors.reserve(shard.values.size() * shard.dimension);
            for (const auto& v : vectors) {
                if (v.size() != shard.dimension)
                    throw EmbeddingBackendError("embedding dimension mismatch");
                shard.vectors.insert(shard.vectors.end(), v.begin(), v.end());
            }
        }
        shards.push_back(std::move(shard));
    }
    return shards;
}

std::string shard_filename(const ColumnId& column) {
    return percent_encode(column.table) + "." + percent_encode(column.column) + ".shard";
}

void save_shard(const ValueIndexShard& shard, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::string path = dir + "/" + shard_filename(shard.column);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DatabaseError("cannot write shard file " + path);
    f.write("SQVI", 4);
    write_u32(f, 1);
    write_u32(f, static_cast<std::uint32_t>(shard.dimension));
    write_u64(f, shard.values.size());
    // Column identity, for loaders that only see the file.
    write_u32(f, static_cast<std::uint32_t>(shard.column.table.size()));
    f.write(shard.column.table.data(), static_cast<std::streamsize>(shard.column.table.size()));
    write_u32(f, static_cast<std::uint32_t>(shard.column.column.size()));
    f.write(shard.column.column.data(),
            static_cast<std::streamsize>(shard.column.column.size()));
    for (std::size_t i = 0; i < shard.values.size(); ++i) {
        const std::string& v = shard.values[i];
        write_u32(f, static_cast<std::uint32_t>(v.size()));
        f.write(v.data(), static_cast<std::streamsize>(v.size()));
        const float* vec = shard.vector_at(i);
        for (std::size_t d = 0; d < shard.dimension; ++d) {
            std::uint32_t bits;
            std::memcpy(&bits, &vec[d], 4);
            write_u32(f, bits);
        }
    }
}

ValueIndexShard load_shard(const std::string& file) {
    std::ifstream f(file, std::ios::binary);
    if (!f) throw DatabaseError("cannot open shard file " + file);
    char magic[4];
    f.read(magic, 4);
    if (std::string(magic, 4) != "SQVI") throw FormatError("bad shard magic in " + file);
    std::uint32_t version = read_u32(f);
    if (version != 1) throw FormatError("unsupported shard version in " + file);
    ValueIndexShard shard;
    shard.dimension = read_u32(f);
    std::uint64_t count = read_u64(f);
    std::uint32_t table_len = read_u32(f);
    shard.column.table.resize(table_len);
    f.read(shard.column.table.data(), table_len);
    std::uint32_t column_len = read_u32(f);
    shard.column.column.resize(column_len);
    f.read(shard.column.column.data(), column_len);
    shard.values.reserve(count);
    shard.vectors.reserve(count * shard.dimension);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint32_t len = read_u32(f);
        std::string value(len, '\0');
        f.read(value.data(), len);
        shard.values.push_back(std::move(value));
        for (std::size_t d = 0; d < shard.dimension; ++d) {
            std::uint32_t bits = read_u32(f);
            float x;
            std::memcpy(&x, &bits, 4);
            shard.vectors.push_back(x);
        }
        if (!f) throw FormatError("truncated shard file " + file);
    }
    return shard;
}

std::vector<ValueIndexShard> load_shards(const std::string& dir) {
    std::vector<ValueIndexShard> shards;
    if (!std::filesystem::is_directory(dir)) return shards;
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".shard") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    for (const std::string& file : files) shards.push_back(load_shard(file));
    return shards;
}

std::vector<ScoredValue> nearest_values(const ValueIndexShard& shard,
                                        const std::vector<float>& query, std::size_t k) {
    if (query.size() != shard.dimension)
        throw DimensionMismatchError("query dimension " + std::to_string(query.size()) +
                                     " does not match shard dimension " +
                                     std::to_string(shard.dimension));
    std::vector<ScoredValue> scored;
    scored.reserve(shard.values.size());
    for (std::size_t i = 0; i < shard.values.size(); ++i) {
        const float* vec = shard.vector_at(i);
        double dot = 0.0;
        for (std::size_t d = 0; d < shard.dimension; ++d)
            dot += static_cast<double>(query[d]) * vec[d];
        scored.push_back({shard.values[i], dot});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredValue& a, const ScoredValue& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.value < b.value;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

RetrievedValuesMap retrieve_values(const std::vector<ValueIndexShard>& shards,
                                   const KeywordSet& keywords, Embedder& embedder, std::size_t k,
                                   int workers) {
    RetrievedValuesMap map;
    if (shards.empty()) return map;
    std::vector<std::vector<float>> keyword_vectors;
    if (!keywords.keywords.empty()) keyword_vectors = embedder.embed(keywords.keywords);

    auto retrieve_column = [&](const ValueIndexShard& shard) -> std::vector<ScoredValue> {
        // Pool the per-keyword top-K, keep each value's best score.
        std::map<std::string, double> best;
        for (const auto& qv : keyword_vectors) {
            for (ScoredValue& sv : nearest_values(shard, qv, k)) {
                auto it = best.find(sv.value);
                if (it == best.end() || sv.score > it->second) best[sv.value] = sv.score;
            }
        }
        std::vector<ScoredValue> pooled;
        pooled.reserve(best.size());
        for (auto& [value, score] : best) pooled.push_back({value, score});
        std::sort(pooled.begin(), pooled.end(), [](const ScoredValue& a, const ScoredValue& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.value < b.value;
        });
        if (pooled.size() > k) pooled.resize(k);
        return pooled;
    };

    if (workers > 1) {
        std::vector<std::future<std::vector<ScoredValue>>> futures;
        futures.reserve(shards.size());
        for (const auto& shard : shards)
            futures.push_back(std::async(std::launch::async,
                                         [&retrieve_column, &shard] { return retrieve_column(shard); }));
        for (std::size_t i = 0; i < shards.size(); ++i) {
            try {
                map.entries[shards[i].column] = futures[i].get();
            } catch (const Error& e) {
                map.entries[shards[i].column] = {};
                map.warnings.push_back("retrieval failed for " + shards[i].column.qualified() +
                                       ": " + e.what());
            }
        }
    } else {
        for (const auto& shard : shards) {
            try {
                map.entries[shard.column] = retrieve_column(shard);
            } catch (const Error& e) {
                map.entries[shard.column] = {};
                map.warnings.push_back("retrieval failed for " + shard.column.qualified() + ": " +
                                       e.what());
            }
        }
    }
    return map;
}

std::optional<std::vector<std::string>> parse_python_string_list(const std::string& text) {
    std::size_t open = text.find('[');
    std::size_t close = text.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close <= open)
        return std::nullopt;
    std::string body = text.substr(open + 1, close - open - 1);
    std::vector<std::string> items;
    std::size_t i = 0;
    const std::size_t n = body.size();
    auto skip_ws = [&] {
        while (i < n && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    };
    skip_ws();
    while (i < n) {
        char quote = body[i];
        std::string item;
        if (quote == '\'' || quote == '"') {
            ++i;
            bool closed = false;
            while (i < n) {
                char c = body[i];
                if (c == '\\' && i + 1 < n) {
                    item += body[i + 1];
                    i += 2;
                    continue;
                }
                if (c == quote) {
                    // Doubled quote inside a same-quoted string.
                    if (i + 1 < n && body[i + 1] == quote) {
                        item += quote;
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                item += c;
                ++i;
            }
            if (!closed) return std::nullopt;
        } else {
            // Bare token until comma.
            while (i < n && body[i] != ',') item += body[i++];
            item = trim(item);
            if (item.empty()) break;
        }
        items.push_back(item);
        skip_ws();
        if (i < n && body[i] == ',') {
            ++i;
            skip_ws();
            continue;
        }
        break;
    }
    return items;
}

}  // namespace squill
