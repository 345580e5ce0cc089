#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "squill/errors.hpp"

namespace squill {

enum class Stage { value_retrieval, schema_linking, generation, toolchain, selection };
const char* stage_name(Stage s);

struct LlmRequest {
    std::string template_id;
    std::map<std::string, std::string> placeholders;
    int samples = 1;
    double temperature = 0.0;
    int max_output_tokens = 4096;
    Stage stage = Stage::generation;
};

struct SampleUsage {
    long long input_tokens = 0;
    long long output_tokens = 0;
    bool estimated = false;
};

struct LlmResponse {
    std::vector<std::string> texts;    // one per completed sample
    std::vector<SampleUsage> usage;    // parallel to texts
};

struct StageTotals {
    long long calls = 0;
    long long input_tokens = 0;
    long long output_tokens = 0;

    StageTotals& operator+=(const StageTotals& other) {
        calls += other.calls;
        input_tokens += other.input_tokens;
        output_tokens += other.output_tokens;
        return *this;
    }
    bool operator==(const StageTotals&) const = default;
};

struct RequestLogEntry {
    Stage stage = Stage::generation;
    std::string template_id;
    long long calls = 0;  // completed samples
    long long input_tokens = 0;
    long long output_tokens = 0;
};

// Per-stage token and call accounting. Every request the gateway performs is
// attributed to exactly one stage; totals are exact integer sums.
class TokenLedger {
public:
    void record(const RequestLogEntry& entry);
    StageTotals stage_totals(Stage stage) const;
    StageTotals overall() const;
    std::vector<RequestLogEntry> log() const;
    void merge_from(const TokenLedger& other);
    void reset();

private:
    mutable std::mutex mu_;
    std::map<int, StageTotals> per_stage_;
    std::vector<RequestLogEntry> log_;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // `samples` independent completions of one prompt. The template id is
    // carried for scripted matching; remote backends ignore it.
    virtual LlmResponse complete(const std::string& template_id, const std::string& prompt,
                                 int samples, double temperature, int max_output_tokens) = 0;
};

// Canned-response backend driven by an ordered script of matchers. An entry
// matches when its template id equals the request's and its `contains`
// substring occurs in the rendered prompt. Completions are cycled when a
// request asks for more samples than the entry provides.
class ScriptedBackend : public ChatBackend {
public:
    struct Entry {
        std::string template_id;  // empty = any
        std::string contains;     // empty = any
        std::vector<std::string> completions;
        bool once = false;
        bool used = false;
    };

    static std::shared_ptr<ScriptedBackend> from_file(const std::string& path);
    static std::shared_ptr<ScriptedBackend> from_json_text(const std::string& json_text);
    ScriptedBackend(std::vector<Entry> entries, bool estimate_usage)
        : entries_(std::move(entries)), estimate_usage_(estimate_usage) {}

    LlmResponse complete(const std::string& template_id, const std::string& prompt, int samples,
                         double temperature, int max_output_tokens) override;

private:
    std::mutex mu_;
    std::vector<Entry> entries_;
    bool estimate_usage_ = false;
};

// Loads prompt template files (<dir>/<id>.txt) and substitutes {NAME}
// placeholders. Unfilled placeholders are an error.
class TemplateStore {
public:
    explicit TemplateStore(std::string dir) : dir_(std::move(dir)) {}

    const std::string& raw(const std::string& template_id) const;
    std::string render(const std::string& template_id,
                       const std::map<std::string, std::string>& placeholders) const;

private:
    std::string dir_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::string> cache_;
};

struct GatewayOptions {
    int retries = 2;
    int backoff_ms = 100;
    int inflight_limit = 16;
};

// Renders, dispatches with retry on transport failures, and accounts usage.
class LlmGateway {
public:
    LlmGateway(std::shared_ptr<ChatBackend> backend, std::shared_ptr<const TemplateStore> templates,
               GatewayOptions options = {});

    LlmResponse complete(const LlmRequest& request);

    TokenLedger& ledger() { return ledger_; }
    const TokenLedger& ledger() const { return ledger_; }
    const TemplateStore& templates() const { return *templates_; }
    std::shared_ptr<ChatBackend> backend() const { return backend_; }
    std::shared_ptr<const TemplateStore> templates_ptr() const { return templates_; }
    const GatewayOptions& options() const { return options_; }

private:
    std::shared_ptr<ChatBackend> backend_;
    std::shared_ptr<const TemplateStore> templates_;
    GatewayOptions options_;
    TokenLedger ledger_;
};

// Content of the LAST well-formed <tag>...</tag> block, trimmed. Backend
// output is frequently not well-formed XML, so this scans rather than parses.
std::string extract_tagged(const std::string& text, const std::string& tag);
bool has_tagged(const std::string& text, const std::string& tag);

// chars/4 heuristic used when a backend reports no usage.
long long estimate_tokens(const std::string& text);

std::shared_ptr<ChatBackend> make_http_chat_backend(const std::string& base_url,
                                                    const std::string& model,
                                                    const std::string& api_key);

}  // namespace squill
