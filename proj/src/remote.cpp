// Copyright 2026 The mlsumeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mlsumeval/remote.hpp"

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace mlsumeval {

using json = nlohmann::json;

namespace {

class Limiter {
 public:
  explicit Limiter(std::size_t limit) : limit_(limit ? limit : 1) {}
  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < limit_; });
    ++in_flight_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      --in_flight_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::size_t limit_;
};

class LimiterGuard {
 public:
  explicit LimiterGuard(Limiter& l) : l_(l) { l_.acquire(); }
  ~LimiterGuard() { l_.release(); }
  LimiterGuard(const LimiterGuard&) = delete;
  LimiterGuard& operator=(const LimiterGuard&) = delete;

 private:
  Limiter& l_;
};

Limiter& limiter_for(const std::string& endpoint, std::size_t limit) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<Limiter>> limiters;
  std::lock_guard lock(mu);
  auto& slot = limiters[endpoint];
  if (!slot) slot = std::make_unique<Limiter>(limit);
  return *slot;
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix, no trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw ValidationError("embedding endpoint must be an http:// URL: " + url);
  }
  const auto slash = url.find('/', scheme.size());
  Endpoint e;
  e.origin = url.substr(0, slash);
  e.path = slash == std::string::npos ? "" : url.substr(slash);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  if (e.origin.size() == scheme.size()) {
    throw ValidationError("embedding endpoint has no host: " + url);
  }
  return e;
}

}  // namespace

std::string embed_request_body(const std::vector<std::string>& texts,
                               std::optional<int> layer) {
  nlohmann::ordered_json j;
  j["texts"] = texts;
  j["layer"] = layer ? json(*layer) : json(nullptr);
  return j.dump();
}

std::vector<EmbeddedText> parse_embed_response(const std::string& body,
                                               std::size_t expected) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer() ||
      !j.contains("items") || !j["items"].is_array()) {
    throw SchemaError("response must be {\"dim\": int, \"items\": [...]}");
  }
  const long long dim = j["dim"].get<long long>();
  if (dim < 1) throw SchemaError("response dim must be at least 1");
  const auto& items = j["items"];
  if (items.size() != expected) {
    throw SchemaError("response has " + std::to_string(items.size()) +
                      " items for " + std::to_string(expected) + " texts");
  }
  std::vector<EmbeddedText> out;
  out.reserve(items.size());
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& item = items[k];
    const std::string where = "response item " + std::to_string(k);
    if (!item.is_object() || !item.contains("tokens") ||
        !item["tokens"].is_array() || !item.contains("vectors") ||
        !item["vectors"].is_array()) {
      throw SchemaError(where + ": needs \"tokens\" and \"vectors\" arrays");
    }
    EmbeddedText t;
    for (const auto& tok : item["tokens"]) {
      if (!tok.is_string()) throw SchemaError(where + ": token must be a string");
      t.tokens.push_back(tok.get<std::string>());
    }
    const auto& vecs = item["vectors"];
    if (vecs.size() != t.tokens.size()) {
      throw SchemaError(where + ": token/vector count mismatch");
    }
    t.vectors.resize(static_cast<Eigen::Index>(vecs.size()),
                     static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      const auto& row = vecs[i];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(dim)) {
        throw SchemaError(where + ": vector length differs from dim");
      }
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!row[c].is_number()) throw SchemaError(where + ": non-numeric entry");
        t.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            row[c].get<double>();
      }
    }
    if (!t.vectors.allFinite()) throw SchemaError(where + ": non-finite entry");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<EmbeddedText> remote_embed(const std::string& endpoint,
                                       const std::vector<std::string>& texts,
                                       const RemoteOptions& options) {
  const Endpoint ep = split_endpoint(endpoint);
  const std::string body = embed_request_body(texts, options.layer);
  Limiter& limiter = limiter_for(endpoint, options.max_concurrent);

  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  auto backoff = options.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    const bool last = attempt >= options.max_retries;
    httplib::Result res;
    {
      LimiterGuard guard(limiter);
      httplib::Client client(ep.origin);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());
      res = client.Post(ep.path + "/embed", body, "application/json");
    }
    if (!res) {
      const auto err = res.error();
      if (last) {
        if (err == httplib::Error::Read || err == httplib::Error::Write) {
          throw TimeoutError("embedding request to " + endpoint +
                             " timed out after " + std::to_string(attempt + 1) +
                             " attempt(s)");
        }
        throw ConnectivityError("cannot reach " + endpoint + " after " +
                                std::to_string(attempt + 1) + " attempt(s): " +
                                httplib::to_string(err));
      }
    } else if (res->status >= 500 && !last) {
      // retried below
    } else if (res->status < 200 || res->status >= 300) {
      throw HttpStatusError(res->status, res->body);
    } else {
      return parse_embed_response(res->body, texts.size());
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

}  // namespace mlsumeval
