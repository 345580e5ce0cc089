#include "squill/llm.hpp"

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "squill/common.hpp"

namespace squill {

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::value_retrieval: return "value_retrieval";
        case Stage::schema_linking: return "schema_linking";
        case Stage::generation: return "generation";
        case Stage::toolchain: return "toolchain";
        case Stage::selection: return "selection";
    }
    return "unknown";
}

void TokenLedger::record(const RequestLogEntry& entry) {
    std::lock_guard lock(mu_);
    StageTotals& totals = per_stage_[static_cast<int>(entry.stage)];
    totals.calls += entry.calls;
    totals.input_tokens += entry.input_tokens;
    totals.output_tokens += entry.output_tokens;
    log_.push_back(entry);
}

StageTotals TokenLedger::stage_totals(Stage stage) const {
    std::lock_guard lock(mu_);
    auto it = per_stage_.find(static_cast<int>(stage));
    return it == per_stage_.end() ? StageTotals{} : it->second;
}

StageTotals TokenLedger::overall() const {
    std::lock_guard lock(mu_);
    StageTotals sum;
    for (const auto& [stage, totals] : per_stage_) sum += totals;
    return sum;
}

std::vector<RequestLogEntry> TokenLedger::log() const {
    std::lock_guard lock(mu_);
    return log_;
}

void TokenLedger::merge_from(const TokenLedger& other) {
    for (const RequestLogEntry& entry : other.log()) record(entry);
}

void TokenLedger::reset() {
    std::lock_guard lock(mu_);
    per_stage_.clear();
    log_.clear();
}

long long estimate_tokens(const std::string& text) {
    return static_cast<long long>((text.size() + 3) / 4);
}

// ----- scripted backend -----

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open scripted backend file " + path);
    std::stringstream buffer;
    buffer << f.rdbuf();
    return from_json_text(buffer.str());
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json_text(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid scripted backend JSON: ") + e.what());
    }
    std::vector<Entry> entries;
    bool estimate = doc.value("estimate_usage", false);
    for (const auto& item : doc.value("entries", nlohmann::json::array())) {
        Entry entry;
        entry.template_id = item.value("template", "");
        entry.contains = item.value("contains", "");
        entry.once = item.value("once", false);
        for (const auto& c : item.value("completions", nlohmann::json::array()))
            entry.completions.push_back(c.get<std::string>());
        if (entry.completions.empty())
            throw ConfigError("scripted entry without completions");
        entries.push_back(std::move(entry));
    }
    return std::make_shared<ScriptedBackend>(std::move(entries), estimate);
}

LlmResponse ScriptedBackend::complete(const std::string& template_id, const std::string& prompt,
                                      int samples, double, int) {
    std::lock_guard lock(mu_);
    for (Entry& entry : entries_) {
        if (entry.once && entry.used) continue;
        if (!entry.template_id.empty() && entry.template_id != template_id) continue;
        if (!entry.contains.empty() && prompt.find(entry.contains) == std::string::npos) continue;
        entry.used = true;
        LlmResponse response;
        for (int i = 0; i < samples; ++i) {
            const std::string& text =
                entry.completions[static_cast<std::size_t>(i) % entry.completions.size()];
            response.texts.push_back(text);
            SampleUsage usage;
            if (estimate_usage_) {
                usage.input_tokens = estimate_tokens(prompt);
                usage.output_tokens = estimate_tokens(text);
                usage.estimated = true;
            }
            response.usage.push_back(usage);
        }
        return response;
    }
    throw Error("scripted backend has no entry for template '" + template_id +
                "' with this prompt");
}

// ----- template store -----

const std::string& TemplateStore::raw(const std::string& template_id) const {
    std::lock_guard lock(mu_);
    auto it = cache_.find(template_id);
    if (it != cache_.end()) return it->second;
    std::string path = dir_ + "/" + template_id + ".txt";
    std::ifstream f(path);
    if (!f) throw ConfigError("missing prompt template " + path);
    std::stringstream buffer;
    buffer << f.rdbuf();
    return cache_.emplace(template_id, buffer.str()).first->second;
}

std::string TemplateStore::render(
    const std::string& template_id,
    const std::map<std::string, std::string>& placeholders) const {
    std::string text = raw(template_id);
    for (const auto& [name, value] : placeholders) {
        const std::string needle = "{" + name + "}";
        std::size_t pos = 0;
        while ((pos = text.find(needle, pos)) != std::string::npos) {
            text.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    // Any placeholder left unfilled is a caller bug.
    std::size_t open = 0;
    while ((open = text.find('{', open)) != std::string::npos) {
        std::size_t close = text.find('}', open);
        if (close == std::string::npos) break;
        std::string inner = text.substr(open + 1, close - open - 1);
        bool placeholder_like = !inner.empty() && inner.size() <= 40;
        for (char c : inner) {
            if (!std::isupper(static_cast<unsigned char>(c)) && c != '_')
                placeholder_like = false;
        }
        if (placeholder_like)
            throw ConfigError("unfilled placeholder {" + inner + "} in template " + template_id);
        open = close + 1;
    }
    return text;
}

// ----- gateway -----

namespace {

// Process-global in-flight request bound shared by all gateways.
class InflightGate {
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
    int limit_ = 16;
    int active_ = 0;
};

InflightGate& inflight_gate() {
    static InflightGate gate;
    return gate;
}

}  // namespace

LlmGateway::LlmGateway(std::shared_ptr<ChatBackend> backend,
                       std::shared_ptr<const TemplateStore> templates, GatewayOptions options)
    : backend_(std::move(backend)), templates_(std::move(templates)), options_(options) {
    inflight_gate().set_limit(options_.inflight_limit);
}

LlmResponse LlmGateway::complete(const LlmRequest& request) {
    InflightGate* gate = &inflight_gate();
    std::string prompt = templates_->render(request.template_id, request.placeholders);
    LlmResponse response;
    int attempts = options_.retries + 1;
    std::string last_error;
    bool done = false;
    for (int attempt = 0; attempt < attempts && !done; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(options_.backoff_ms * (1 << (attempt - 1))));
        }
        gate->acquire();
        try {
            response = backend_->complete(request.template_id, prompt, request.samples,
                                          request.temperature, request.max_output_tokens);
            done = true;
        } catch (const TransportError& e) {
            last_error = e.what();
        } catch (...) {
            gate->release();
            throw;
        }
        gate->release();
    }
    if (!done)
        throw BackendUnavailableError("backend unavailable after " + std::to_string(attempts) +
                                      " attempts: " + last_error);

    RequestLogEntry entry;
    entry.stage = request.stage;
    entry.template_id = request.template_id;
    entry.calls = static_cast<long long>(response.texts.size());
    for (const SampleUsage& usage : response.usage) {
        entry.input_tokens += usage.input_tokens;
        entry.output_tokens += usage.output_tokens;
    }
    ledger_.record(entry);
    return response;
}

// ----- tag extraction -----

std::string extract_tagged(const std::string& text, const std::string& tag) {
    const std::string open = "<" + tag + ">";
    const std::string close = "</" + tag + ">";
    std::size_t best_payload = std::string::npos;
    std::size_t best_len = 0;
    std::size_t pos = 0;
    while (true) {
        std::size_t start = text.find(open, pos);
        if (start == std::string::npos) break;
        std::size_t payload = start + open.size();
        std::size_t end = text.find(close, payload);
        if (end == std::string::npos) break;
        best_payload = payload;
        best_len = end - payload;
        pos = end + close.size();
    }
    if (best_payload == std::string::npos)
        throw TagMissingError("no <" + tag + "> block in backend output");
    return trim(text.substr(best_payload, best_len));
}

bool has_tagged(const std::string& text, const std::string& tag) {
    try {
        extract_tagged(text, tag);
        return true;
    } catch (const TagMissingError&) {
        return false;
    }
}

}  // namespace squill
