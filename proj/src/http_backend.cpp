#include "datscore/http_backend.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <thread>

#include "datscore/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace datscore {
namespace {

using nlohmann::json;

// Raised inside the retry loop for responses that are retryable.
struct TransientFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-retryable rejection (4xx) from the bridge.
struct Rejection {
  int status;
  std::string message;
};

Error rejection_error(const Rejection& r) {
  std::string lowered = r.message;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto what = "bridge rejected request (" + std::to_string(r.status) + "): " + r.message;
  if (lowered.find("language") != std::string::npos) return Error(ErrorCode::UnsupportedLanguage, what);
  if (lowered.find("empty") != std::string::npos) return Error(ErrorCode::EmptyInput, what);
  return Error(ErrorCode::BackendUnavailable, what);
}

TokenTrace trace_from_json(const json& obj, std::optional<std::size_t> vocab_size) {
  if (!obj.is_object()) throw TransientFailure("score response is not an object");
  TokenTrace trace;
  try {
    trace.tokens = obj.at("tokens").get<std::vector<std::string>>();
    const auto lp = obj.at("logprobs").get<std::vector<double>>();
    const auto h = obj.at("entropies").get<std::vector<double>>();
    trace.logprobs = Eigen::Map<const Eigen::VectorXd>(lp.data(), static_cast<Eigen::Index>(lp.size()));
    trace.entropies = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
  } catch (const json::exception& e) {
    throw TransientFailure(std::string("malformed score response: ") + e.what());
  }
  try {
    validate_trace(trace, vocab_size);
  } catch (const Error& e) {
    throw TransientFailure(std::string("score response violates trace invariants: ") + e.what());
  }
  return trace;
}

}  // namespace

class HttpBackend::Batcher {
 public:
  using Sender = std::function<std::vector<json>(const std::vector<json>&)>;

  Batcher(Sender send, std::size_t max_batch)
      : send_(std::move(send)), max_batch_(std::max<std::size_t>(1, max_batch)),
        worker_([this] { run(); }) {}

  ~Batcher() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    worker_.join();
  }

  json submit(json body) {
    std::promise<json> promise;
    auto result = promise.get_future();
    {
      std::lock_guard lock(mu_);
      queue_.push_back({std::move(body), std::move(promise)});
    }
    cv_.notify_all();
    return result.get();
  }

 private:
  struct Pending {
    json body;
    std::promise<json> promise;
  };

  void run() {
    for (;;) {
      std::vector<Pending> batch;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        // Give concurrent callers a moment to join the batch.
        cv_.wait_for(lock, std::chrono::milliseconds(2),
                     [&] { return stopping_ || queue_.size() >= max_batch_; });
        while (!queue_.empty() && batch.size() < max_batch_) {
          batch.push_back(std::move(queue_.front()));
          queue_.pop_front();
        }
      }
      std::vector<json> bodies;
      bodies.reserve(batch.size());
      for (auto& p : batch) bodies.push_back(std::move(p.body));
      try {
        auto results = send_(bodies);
        for (std::size_t i = 0; i < batch.size(); ++i) batch[i].promise.set_value(std::move(results[i]));
      } catch (...) {
        for (auto& p : batch) p.promise.set_exception(std::current_exception());
      }
    }
  }

  Sender send_;
  std::size_t max_batch_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Pending> queue_;
  bool stopping_ = false;
  std::thread worker_;
};

namespace {

// POST with retries. `check` throws TransientFailure for unusable payloads.
json post_with_retry(const std::string& base_url, const HttpOptions& options, const std::string& path,
                     const json& payload, const std::function<void(const json&)>& check) {
  std::string last_error = "no attempt made";
  const int attempts = std::max(1, options.attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options.backoff * (1 << (attempt - 1)));

    httplib::Client client(base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout).count();
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    auto res = client.Post(path, payload.dump(), "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 400 && res->status < 500) {
      std::string message = res->body;
      try {
        message = json::parse(res->body).at("error").get<std::string>();
      } catch (const json::exception&) {
      }
      throw Rejection{res->status, message};
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      auto body = json::parse(res->body);
      check(body);
      return body;
    } catch (const json::exception& e) {
      last_error = std::string("protocol failure: ") + e.what();
    } catch (const TransientFailure& e) {
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::BackendUnavailable, base_url + path + " unavailable after " +
                                                 std::to_string(attempts) + " attempts: " + last_error);
}

// Sends one item as an object and several as an array; falls back to single
// requests when a batch is rejected so one bad item does not fail the rest.
std::vector<json> send_batch(const std::string& base_url, const HttpOptions& options,
                             const std::string& path, const std::vector<json>& bodies,
                             const std::function<void(const json&)>& check_item) {
  if (bodies.size() == 1) {
    try {
      return {post_with_retry(base_url, options, path, bodies.front(), check_item)};
    } catch (const Rejection& r) {
      throw rejection_error(r);
    }
  }
  const auto check_array = [&](const json& body) {
    if (!body.is_array() || body.size() != bodies.size()) {
      throw TransientFailure("batch response is not an array of " + std::to_string(bodies.size()));
    }
    for (const auto& item : body) check_item(item);
  };
  try {
    auto body = post_with_retry(base_url, options, path, json(bodies), check_array);
    return std::vector<json>(body.begin(), body.end());
  } catch (const Rejection&) {
  }
  std::vector<json> out;
  for (const auto& b : bodies) out.push_back(send_batch(base_url, options, path, {b}, check_item).front());
  return out;
}

}  // namespace

HttpBackend::HttpBackend(std::string base_url, HttpOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  score_batcher_ = std::make_unique<Batcher>(
      [this](const std::vector<json>& bodies) {
        return send_batch(base_url_, options_, "/v1/score", bodies,
                          [this](const json& item) { trace_from_json(item, options_.vocab_size); });
      },
      options_.batch_size);
  translate_batcher_ = std::make_unique<Batcher>(
      [this](const std::vector<json>& bodies) {
        return send_batch(base_url_, options_, "/v1/translate", bodies, [](const json& item) {
          if (!item.is_object() || !item.contains("translation") || !item["translation"].is_string() ||
              item["translation"].get<std::string>().empty()) {
            throw TransientFailure("translate response lacks a non-empty \"translation\"");
          }
        });
      },
      options_.batch_size);
}

HttpBackend::~HttpBackend() = default;

TokenTrace HttpBackend::forced_score(const ScoreRequest& request) const {
  if (request.input_text.empty() || request.output_text.empty()) {
    throw Error(ErrorCode::EmptyInput, "score request with empty text");
  }
  json body = {{"input_text", request.input_text},
               {"input_lang", request.input_lang.str()},
               {"output_text", request.output_text},
               {"output_lang", request.output_lang.str()}};
  return trace_from_json(score_batcher_->submit(std::move(body)), options_.vocab_size);
}

std::string HttpBackend::translate(const std::string& text, const LanguageCode& src_lang,
                                   const LanguageCode& tgt_lang) const {
  if (text.empty()) throw Error(ErrorCode::EmptyInput, "translate request with empty text");
  json body = {{"text", text}, {"src_lang", src_lang.str()}, {"tgt_lang", tgt_lang.str()}};
  return translate_batcher_->submit(std::move(body)).at("translation").get<std::string>();
}

}  // namespace datscore
