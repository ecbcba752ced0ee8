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

#ifndef MLSUMEVAL_REMOTE_HPP_
#define MLSUMEVAL_REMOTE_HPP_

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mlsumeval/embedding.hpp"

namespace mlsumeval {

struct RemoteOptions {
  std::chrono::milliseconds timeout{30000};
  std::optional<int> layer;  // null: the sidecar's default (last) layer
  int max_retries = 2;
  std::chrono::milliseconds initial_backoff{100};  // doubled per retry
  /// Concurrent requests allowed per endpoint. The first call for an
  /// endpoint fixes its limit for the life of the process.
  std::size_t max_concurrent = 4;
};

/// POSTs {"texts": [...], "layer": ...} to <endpoint>/embed and validates
/// the {"dim", "items"} response. Connection failures and timeouts (and
/// 5xx responses) are retried max_retries times with exponential backoff.
/// Throws ConnectivityError, TimeoutError, HttpStatusError or SchemaError.
std::vector<EmbeddedText> remote_embed(const std::string& endpoint,
                                       const std::vector<std::string>& texts,
                                       const RemoteOptions& options = {});

/// Request body for a batch of texts.
std::string embed_request_body(const std::vector<std::string>& texts,
                               std::optional<int> layer);

/// Parses and validates a response body for `expected` texts.
std::vector<EmbeddedText> parse_embed_response(const std::string& body,
                                               std::size_t expected);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_REMOTE_HPP_
