#pragma once

#include <optional>
#include <string>
#include <vector>

#include "squill/catalog.hpp"
#include "squill/llm.hpp"
#include "squill/value_index.hpp"

namespace squill {

enum class GeneratorKind { skeleton, icl, divide_conquer };
const char* generator_name(GeneratorKind kind);
const char* generator_template(GeneratorKind kind);

struct SqlCandidate {
    std::string sql;
    GeneratorKind generator = GeneratorKind::skeleton;
    int sample_index = 0;

    struct Revision {
        std::string checker;
        std::string directive;
        std::string old_sql;
    };
    std::vector<Revision> revisions;

    long long input_tokens = 0;
    long long output_tokens = 0;
};

struct FewShotExample {
    std::string question;
    std::string masked_question;
    std::string sql;
};

// JSON-lines corpus of {"question": ..., "sql": ...} records. Entries whose
// SQL does not parse are dropped at load with a warning.
class ExampleStore {
public:
    ExampleStore() = default;
    explicit ExampleStore(std::vector<FewShotExample> examples)
        : examples_(std::move(examples)) {}

    static ExampleStore load_jsonl(const std::string& path,
                                   std::vector<std::string>* warnings = nullptr);

    const std::vector<FewShotExample>& examples() const { return examples_; }
    bool empty() const { return examples_.empty(); }

private:
    std::vector<FewShotExample> examples_;
};

struct RenderedSchemaContext {
    std::string text;
};

// Prompt-ready description of exactly the linked subset: per table a typed
// column list with PK/FK notes, column stats, and per-column value examples.
RenderedSchemaContext render_schema_context(const LinkedSchema& linked,
                                            const SchemaCatalog& catalog,
                                            const RetrievedValuesMap& values);

LinkedSchema full_schema(const SchemaCatalog& catalog);

// DAIL-SQL-style question masking: schema mentions become <tab>/<col>,
// quoted literals and numbers become <val>.
std::string mask_question(const std::string& question, const SchemaCatalog& catalog);
std::string mask_with_names(const std::string& question, const std::vector<std::string>& tables,
                            const std::vector<std::string>& columns);

// Ranks the store by masked-question similarity; deterministic ties by
// corpus index. An empty store yields an empty sequence.
std::vector<FewShotExample> retrieve_fewshot(const std::string& question,
                                             const ExampleStore& store, std::size_t n,
                                             const SchemaCatalog* catalog = nullptr);

std::string format_fewshot_block(const std::vector<FewShotExample>& examples);

struct GenerationOptions {
    int budget = 8;
    double temperature = 0.7;
    int max_output_tokens = 4096;
    int fewshot_n = 3;
    int workers = 1;
};

// One backend call per sample with the strategy's template; each sample's
// <result> payload becomes a candidate. Samples with no extractable SQL are
// discarded; zero surviving samples is an error.
std::vector<SqlCandidate> generate(GeneratorKind kind, const std::string& question,
                                   const std::string& hint,
                                   const RenderedSchemaContext& context,
                                   const std::vector<FewShotExample>& examples, LlmGateway& llm,
                                   const GenerationOptions& options,
                                   Stage stage = Stage::generation);

struct NVersionResult {
    std::vector<SqlCandidate> candidates;
    std::vector<std::string> warnings;
};

// The three generators over common inputs; per-generator failure degrades to
// the survivors, total failure throws AllGeneratorsFailed.
NVersionResult nversion_generate(const std::string& question, const std::string& hint,
                                 const LinkedSchema& linked, const SchemaCatalog& catalog,
                                 const RetrievedValuesMap& values, const ExampleStore& store,
                                 LlmGateway& llm, const GenerationOptions& options);

// SQL extraction rule shared by generators and revision: the last <result>
// block, trimmed, trailing semicolons stripped; payloads with XML entities
// are rejected.
std::optional<std::string> extract_sql_payload(const std::string& completion);

}  // namespace squill
