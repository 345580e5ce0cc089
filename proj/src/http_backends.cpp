#include <json.hpp>

#define CPPHTTPLIB_NO_EXCEPTIONS 0
#include <httplib.h>

#include "squill/embedder.hpp"
#include "squill/llm.hpp"

namespace squill {

namespace {

// Splits "http://host:port/base" into client target and path prefix.
struct ParsedUrl {
    std::string host_port;
    std::string prefix;
};

ParsedUrl parse_url(const std::string& url) {
    std::string rest = url;
    auto scheme = rest.find("://");
    std::string scheme_part = "http://";
    if (scheme != std::string::npos) {
        scheme_part = rest.substr(0, scheme + 3);
        rest = rest.substr(scheme + 3);
    }
    auto slash = rest.find('/');
    ParsedUrl parsed;
    if (slash == std::string::npos) {
        parsed.host_port = scheme_part + rest;
        parsed.prefix = "";
    } else {
        parsed.host_port = scheme_part + rest.substr(0, slash);
        parsed.prefix = rest.substr(slash);
        if (parsed.prefix == "/") parsed.prefix = "";
    }
    return parsed;
}

class HttpChatBackend : public ChatBackend {
public:
    HttpChatBackend(std::string base_url, std::string model, std::string api_key)
        : url_(parse_url(base_url)), model_(std::move(model)), api_key_(std::move(api_key)) {}

    LlmResponse complete(const std::string&, const std::string& prompt, int samples,
                         double temperature, int max_output_tokens) override {
        nlohmann::json body = {
            {"model", model_},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
            {"temperature", temperature},
            {"max_tokens", max_output_tokens},
            {"n", samples},
        };
        httplib::Client client(url_.host_port);
        client.set_read_timeout(300, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post(url_.prefix + "/chat/completions", headers, body.dump(),
                               "application/json");
        if (!res) throw TransportError("chat backend unreachable: " + url_.host_port);
        if (res->status >= 500) throw TransportError("chat backend error " +
                                                     std::to_string(res->status));
        if (res->status != 200)
            throw BackendUnavailableError("chat backend returned status " +
                                          std::to_string(res->status) + ": " + res->body);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("chat backend returned invalid JSON: ") + e.what());
        }
        LlmResponse response;
        long long prompt_tokens = -1;
        long long completion_tokens = -1;
        if (doc.contains("usage")) {
            prompt_tokens = doc["usage"].value("prompt_tokens", -1);
            completion_tokens = doc["usage"].value("completion_tokens", -1);
        }
        auto choices = doc.value("choices", nlohmann::json::array());
        for (const auto& choice : choices) {
            std::string text = choice.contains("message")
                                   ? choice["message"].value("content", "")
                                   : choice.value("text", "");
            response.texts.push_back(text);
        }
        long long n = static_cast<long long>(response.texts.size());
        for (long long i = 0; i < n; ++i) {
            SampleUsage usage;
            if (prompt_tokens >= 0 && completion_tokens >= 0) {
                // Response usage covers the whole request; spread evenly.
                usage.input_tokens = prompt_tokens / std::max(1ll, n);
                usage.output_tokens = completion_tokens / std::max(1ll, n);
            } else {
                usage.input_tokens = estimate_tokens(prompt);
                usage.output_tokens = estimate_tokens(response.texts[static_cast<std::size_t>(i)]);
                usage.estimated = true;
            }
            response.usage.push_back(usage);
        }
        return response;
    }

private:
    ParsedUrl url_;
    std::string model_;
    std::string api_key_;
};

// Embedding protocol: POST {base}/embed with {"texts": [...]} returning
// {"vectors": [[...], ...]} of equal-length float vectors.
class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(std::string base_url, std::size_t dimension)
        : url_(parse_url(base_url)), dimension_(dimension) {}

    std::size_t dimension() const override { return dimension_; }

    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override {
        nlohmann::json body = {{"texts", texts}};
        httplib::Client client(url_.host_port);
        client.set_read_timeout(300, 0);
        auto res = client.Post(url_.prefix + "/embed", body.dump(), "application/json");
        if (!res) throw EmbeddingBackendError("embedding backend unreachable: " + url_.host_port);
        if (res->status != 200)
            throw EmbeddingBackendError("embedding backend returned status " +
                                        std::to_string(res->status));
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw EmbeddingBackendError(std::string("invalid embedding JSON: ") + e.what());
        }
        std::vector<std::vector<float>> out;
        for (const auto& vec : doc.value("vectors", nlohmann::json::array())) {
            std::vector<float> v;
            for (const auto& x : vec) v.push_back(x.get<float>());
            if (v.size() != dimension_)
                throw EmbeddingBackendError("embedding dimension mismatch: got " +
                                            std::to_string(v.size()));
            out.push_back(std::move(v));
        }
        if (out.size() != texts.size())
            throw EmbeddingBackendError("embedding count mismatch");
        return out;
    }

private:
    ParsedUrl url_;
    std::size_t dimension_;
};

}  // namespace

std::shared_ptr<ChatBackend> make_http_chat_backend(const std::string& base_url,
                                                    const std::string& model,
                                                    const std::string& api_key) {
    return std::make_shared<HttpChatBackend>(base_url, model, api_key);
}

std::unique_ptr<Embedder> make_http_embedder(const std::string& base_url,
                                             std::size_t dimension) {
    return std::make_unique<HttpEmbedder>(base_url, dimension);
}

}  // namespace squill
