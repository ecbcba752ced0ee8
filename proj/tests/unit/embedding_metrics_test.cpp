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

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mlsumeval/embedding.hpp"
#include "mlsumeval/error.hpp"
#include "mlsumeval/remote.hpp"
#include "mlsumeval/transport.hpp"
#include "oracles/lp_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/ot_instances.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `_res` macro
// that collides with Eigen parameter names.
#include <httplib.h>

namespace mlsumeval {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::Instance;
using testing::lp_cost;
using testing::random_instance;
using testing::random_simplex;

EmbeddedText embedded(std::vector<std::string> tokens, MatrixXd vectors) {
  return {std::move(tokens), std::move(vectors)};
}

TEST(LpOracle, SmallHandInstance) {
  // Two sources, two sinks: moving everything straight costs 0.
  const auto r = oracle::transport_lp({0.5, 0.5}, {0.5, 0.5},
                                      {{0.0, 1.0}, {1.0, 0.0}});
  EXPECT_NEAR(static_cast<double>(r.cost), 0.0, 1e-15);
  // Forced crossing: row 0 must ship 0.25 to column 1 at cost 2.
  const auto s = oracle::transport_lp({0.75, 0.25}, {0.5, 0.5},
                                      {{0.0, 2.0}, {1.0, 0.0}});
  EXPECT_NEAR(static_cast<double>(s.cost), 0.5, 1e-15);
}

TEST(WmdExact, MatchesLpOracle) {
  std::mt19937_64 gen(2024);
  for (int k = 0; k < 200; ++k) {
    const auto inst = random_instance(gen);
    const auto tp = wmd_exact<double>(inst.a, inst.b, inst.cost);
    EXPECT_NEAR(tp.cost, static_cast<double>(lp_cost(inst)), 1e-9) << k;
    EXPECT_LT(tp.marginal_error, 1e-12);
    EXPECT_GE(tp.plan.minCoeff(), 0.0);
  }
}

TEST(WmdExact, Examples) {
  const VectorXd a = (VectorXd(3) << 0.2, 0.3, 0.5).finished();
  MatrixXd c = MatrixXd::Constant(3, 3, 1.0);
  c.diagonal().setZero();
  const auto id = wmd_exact<double>(a, a, c);
  EXPECT_EQ(id.cost, 0.0);
  EXPECT_TRUE(id.plan.isApprox(MatrixXd(a.asDiagonal())));

  const VectorXd one = VectorXd::Ones(1);
  const auto single = wmd_exact<double>(one, one, MatrixXd::Constant(1, 1, 2.5));
  EXPECT_EQ(single.cost, 2.5);
}

TEST(WmdExact, Errors) {
  const VectorXd big = VectorXd::Constant(65, 1.0 / 65);
  EXPECT_THROW(wmd_exact<double>(big, big, MatrixXd::Zero(65, 65)),
               ValidationError);
  const VectorXd off = (VectorXd(2) << 0.5, 0.6).finished();
  const VectorXd ok = (VectorXd(2) << 0.5, 0.5).finished();
  EXPECT_THROW(wmd_exact<double>(off, ok, MatrixXd::Zero(2, 2)),
               ValidationError);
  EXPECT_THROW(wmd_exact<double>(ok, ok, MatrixXd::Constant(2, 2, -1.0)),
               ValidationError);
  EXPECT_THROW(wmd_exact<double>(ok, ok, MatrixXd::Zero(2, 3)),
               ValidationError);
}

TEST(WmdSinkhorn, Examples) {
  const VectorXd one = VectorXd::Ones(1);
  const auto trivial =
      wmd_sinkhorn<double>(one, one, MatrixXd::Zero(1, 1), 0.1);
  EXPECT_EQ(trivial.cost, 0.0);
  EXPECT_TRUE(trivial.converged);

  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const VectorXd a = random_simplex(gen, 3, false);
  const VectorXd b = random_simplex(gen, 3, false);
  MatrixXd c(3, 3);
  for (Eigen::Index i = 0; i < 9; ++i) c.data()[i] = u(gen);
  const auto exact = wmd_exact<double>(a, b, c);
  const auto approx = wmd_sinkhorn<double>(a, b, c, 0.01 * c.mean());
  EXPECT_NEAR(approx.cost, exact.cost, 1e-2 * exact.cost);
  EXPECT_GE(approx.cost, exact.cost - 1e-9);

  // Entropic limit: the plan approaches the independent coupling.
  const auto flat = wmd_sinkhorn<double>(a, b, c, 1e6 * c.mean());
  EXPECT_TRUE(flat.converged);
  EXPECT_LT((flat.plan - a * b.transpose()).cwiseAbs().maxCoeff(), 1e-6);

  EXPECT_THROW(wmd_sinkhorn<double>(a, b, c, 0.0), DomainError);
}

TEST(WmdSinkhorn, ReportsNonConvergence) {
  const VectorXd a = (VectorXd(2) << 0.5, 0.5).finished();
  const VectorXd b = (VectorXd(2) << 0.9, 0.1).finished();
  const MatrixXd c = (MatrixXd(2, 2) << 0.0, 1.0, 1.0, 0.0).finished();
  const auto tp = wmd_sinkhorn<double>(a, b, c, 1e-3, 1, 1e-15);
  EXPECT_FALSE(tp.converged);
  EXPECT_EQ(tp.iterations, 1u);
}

TEST(WmdSinkhorn, MarginalsOnConvergence) {
  std::mt19937_64 gen(17);
  for (int k = 0; k < 50; ++k) {
    const auto inst = random_instance(gen);
    const double mean = inst.cost.mean();
    const double eps = 0.01 * (mean > 0 ? mean : 1.0);
    const auto tp = wmd_sinkhorn<double>(inst.a, inst.b, inst.cost, eps);
    if (!tp.converged) continue;
    EXPECT_LT((tp.plan.rowwise().sum() - inst.a).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((tp.plan.colwise().sum().transpose() - inst.b).cwiseAbs().maxCoeff(),
              1e-6);
  }
}

TEST(BertScore, Examples) {
  const MatrixXd e = MatrixXd::Identity(2, 2);
  const auto same = bertscore(embedded({"a", "b"}, e), embedded({"a", "b"}, e));
  EXPECT_NEAR(same.f1, 1.0, 1e-12);

  const auto orth = bertscore(embedded({"a"}, e.row(0)), embedded({"b"}, e.row(1)));
  EXPECT_EQ(orth.precision, 0.0);
  EXPECT_EQ(orth.recall, 0.0);
  EXPECT_EQ(orth.f1, 0.0);

  const auto s = bertscore(embedded({"a", "b"}, e), embedded({"a"}, e.row(0)));
  EXPECT_NEAR(s.recall, 1.0, 1e-12);
  EXPECT_NEAR(s.precision, 0.5, 1e-12);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-12);
}

TEST(BertScore, Invariances) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> g;
  MatrixXd c(4, 5), r(3, 5);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = g(gen);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = g(gen);
  const auto cand = embedded({"w", "x", "y", "z"}, c);
  const auto base = bertscore(cand, embedded({"p", "q", "s"}, r));
  MatrixXd permuted(3, 5);
  permuted << r.row(2), r.row(0), r.row(1);
  MatrixXd scaled = r;
  scaled.row(1) *= 7.5;
  const auto p = bertscore(cand, embedded({"s", "p", "q"}, permuted));
  const auto s = bertscore(cand, embedded({"p", "q", "s"}, scaled));
  EXPECT_NEAR(p.f1, base.f1, 1e-12);
  EXPECT_NEAR(s.f1, base.f1, 1e-12);
}

TEST(BertScore, Idf) {
  const auto idf = compute_idf({{"a", "b", "a"}, {"a"}});
  EXPECT_EQ(idf.n_docs, 2u);
  EXPECT_NEAR(idf.weight("a"), std::log(3.0 / 3.0), 1e-15);
  EXPECT_NEAR(idf.weight("b"), std::log(3.0 / 2.0), 1e-15);
  EXPECT_NEAR(idf.weight("zzz"), std::log(3.0), 1e-15);

  // Reference {b: e1, c: e2}; candidate {b: e1}. With IDF weights, recall is
  // w_b / (w_b + w_c).
  const MatrixXd e = MatrixXd::Identity(2, 2);
  const auto weights = compute_idf({{"b"}, {"c"}, {"c"}});
  const auto s = bertscore(embedded({"b"}, e.row(0)), embedded({"b", "c"}, e),
                           &weights);
  const double wb = std::log(4.0 / 2.0), wc = std::log(4.0 / 3.0);
  EXPECT_NEAR(s.recall, wb / (wb + wc), 1e-12);
  EXPECT_NEAR(s.precision, 1.0, 1e-12);
}

TEST(BertScore, Errors) {
  const MatrixXd e = MatrixXd::Identity(2, 2);
  EXPECT_THROW(bertscore(embedded({}, MatrixXd(0, 2)), embedded({"a"}, e.row(0))),
               ValidationError);
  EXPECT_THROW(bertscore(embedded({"a"}, MatrixXd::Ones(1, 3)),
                         embedded({"a"}, e.row(0))),
               ValidationError);
}

TEST(MoverScore, Examples) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> g;
  MatrixXd x(4, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(gen);
  const auto t = embedded({"a", "b", "c", "d"}, x);
  EXPECT_NEAR(moverscore(t, t), 0.0, 1e-12);

  const MatrixXd p = (MatrixXd(1, 2) << 0.0, 0.0).finished();
  const MatrixXd q = (MatrixXd(1, 2) << 3.0, 0.0).finished();
  EXPECT_NEAR(moverscore(embedded({"a"}, p), embedded({"b"}, q)), -3.0, 1e-12);

  MatrixXd y(3, 3);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = g(gen);
  const auto ref = embedded({"u", "v", "w"}, y);
  MatrixXd xp(4, 3);
  xp << x.row(3), x.row(1), x.row(0), x.row(2);
  const double base = moverscore(t, ref);
  EXPECT_NEAR(moverscore(embedded({"d", "b", "a", "c"}, xp), ref), base, 1e-12);
  EXPECT_LE(base, 0.0);
}

TEST(MoverScore, LargeInputsUseSinkhorn) {
  std::mt19937_64 gen(10);
  std::normal_distribution<double> g;
  MatrixXd x(70, 4), y(70, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(gen);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = g(gen);
  std::vector<std::string> tokens(70, "t");
  const auto r = moverscore_detail(embedded(tokens, x), embedded(tokens, y));
  EXPECT_FALSE(r.exact);
  EXPECT_LT(r.score, 0.0);
  const auto same = moverscore_detail(embedded(tokens, x), embedded(tokens, x));
  EXPECT_NEAR(same.score, 0.0, 1e-2 * std::abs(r.score));
}

TEST(EmbeddingFile, RoundTrip) {
  const MatrixXd e = (MatrixXd(2, 3) << 1, 2, 3, 4, 5, 6).finished();
  std::string text;
  for (const char* item : {"i1", "i2"}) {
    text += serialize_embedding_line(item, "candidate", "", embedded({"a", "b"}, e)) + "\n";
    text += serialize_embedding_line(item, "reference", "", embedded({"a", "b"}, e)) + "\n";
  }
  std::istringstream in(text);
  const auto store = parse_embeddings(in);
  EXPECT_EQ(store.items(), (std::vector<std::string>{"i1", "i2"}));
  EXPECT_EQ(store.dim(), 3);
  ASSERT_TRUE(store.candidate("i1", "any-system"));
  EXPECT_EQ(store.candidate("i1")->vectors, e);
  EXPECT_EQ(store.reference("i2")->tokens, (std::vector<std::string>{"a", "b"}));
}

TEST(EmbeddingFile, FailsClosed) {
  const MatrixXd e = (MatrixXd(1, 2) << 1, 2).finished();
  const std::string cand =
      serialize_embedding_line("i1", "candidate", "s", embedded({"a"}, e));
  const std::string ref =
      serialize_embedding_line("i1", "reference", "", embedded({"a"}, e));
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_embeddings(in);
  };
  // Truncated in the middle of the last line.
  EXPECT_THROW(parse(cand + "\n" + ref.substr(0, ref.size() / 2)), Error);
  // Missing side.
  EXPECT_THROW(parse(cand + "\n"), ValidationError);
  // Row/token mismatch names the item.
  try {
    parse(R"({"item_id": "bad", "side": "reference", "tokens": ["a", "b"], )"
          R"("vectors": [[1, 2]]})" "\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
  }
  // Dimension differs between lines.
  EXPECT_THROW(parse(cand + "\n" +
                     R"({"item_id": "i1", "side": "reference", "tokens": ["a"], )"
                     R"("vectors": [[1, 2, 3]]})" "\n"),
               ValidationError);
}

TEST(EmbeddingFile, ZeroRowsWarned) {
  const std::string text =
      R"({"item_id": "i", "side": "candidate", "tokens": ["a", "b"], )"
      R"("vectors": [[0, 0], [1, 0]]})" "\n"
      R"({"item_id": "i", "side": "reference", "tokens": ["a"], )"
      R"("vectors": [[0, 0]]})" "\n";
  std::istringstream in(text);
  Diagnostics diag;
  const auto store = parse_embeddings(in, &diag);
  EXPECT_EQ(store.zero_rows(), 2u);
  ASSERT_EQ(diag.warnings().size(), 1u);
  EXPECT_NE(diag.warnings()[0].find("2 zero-vector"), std::string::npos);
}

TEST(EmbeddingFile, ToyFile) {
  const auto store = load_embeddings(testing::toy_dir() / "embeddings.jsonl");
  EXPECT_EQ(store.items().size(), 20u);
  EXPECT_EQ(store.dim(), 8);
}

// Local stand-in for the embedding sidecar: tokens are whitespace-split
// words and vector k of a token is (length, k-th byte, 1).
class MockSidecar {
 public:
  MockSidecar() {
    server_.new_task_queue = [] { return new httplib::ThreadPool(8); };
    server_.Post("/embed", [this](const httplib::Request& req,
                                  httplib::Response& res) { handle(req, res); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockSidecar() { stop(); }
  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> requests{0};
  std::atomic<int> fail_first{0};       // leading requests answered 503
  std::atomic<int> status_override{0};  // nonzero: answer with this status
  std::atomic<int> delay_ms{0};
  std::atomic<bool> zero_dim{false};
  std::atomic<int> in_flight{0};
  std::atomic<int> max_in_flight{0};
  std::mutex mu;
  std::string last_body;

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    const int n = ++requests;
    const int now = ++in_flight;
    for (int seen = max_in_flight; now > seen && !max_in_flight.compare_exchange_weak(seen, now);) {
    }
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    --in_flight;
    {
      std::lock_guard lock(mu);
      last_body = req.body;
    }
    if (n <= fail_first) {
      res.status = 503;
      return;
    }
    if (status_override) {
      res.status = status_override;
      res.set_content("nope", "text/plain");
      return;
    }
    const auto j = nlohmann::json::parse(req.body);
    nlohmann::json out;
    out["dim"] = zero_dim ? 0 : 3;
    out["items"] = nlohmann::json::array();
    for (const auto& t : j["texts"]) {
      nlohmann::json item;
      item["tokens"] = testing::words(t.get<std::string>());
      item["vectors"] = nlohmann::json::array();
      for (const auto& w : testing::words(t.get<std::string>())) {
        item["vectors"].push_back(
            {static_cast<double>(w.size()), static_cast<double>(w[0]), 1.0});
      }
      out["items"].push_back(item);
    }
    res.set_content(out.dump(), "application/json");
  }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RemoteOptions fast_options() {
  RemoteOptions o;
  o.timeout = std::chrono::milliseconds(2000);
  o.initial_backoff = std::chrono::milliseconds(1);
  return o;
}

TEST(RemoteEmbed, WireSchema) {
  EXPECT_EQ(embed_request_body({"a b"}, std::nullopt),
            R"({"texts":["a b"],"layer":null})");
  EXPECT_EQ(embed_request_body({"x", "y"}, 7),
            R"({"texts":["x","y"],"layer":7})");
  EXPECT_THROW(parse_embed_response(R"({"dim": 0, "items": [{"tokens": [], "vectors": []}]})", 1),
               SchemaError);
  EXPECT_THROW(parse_embed_response(R"({"items": []})", 0), SchemaError);
  EXPECT_THROW(parse_embed_response("not json", 0), SchemaError);
  EXPECT_THROW(parse_embed_response(
                   R"({"dim": 2, "items": [{"tokens": ["a"], "vectors": [[1]]}]})", 1),
               SchemaError);
  EXPECT_THROW(parse_embed_response(R"({"dim": 2, "items": []})", 1), SchemaError);
  const auto ok = parse_embed_response(
      R"({"dim": 2, "items": [{"tokens": ["a"], "vectors": [[1, 2]]}]})", 1);
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_EQ(ok[0].vectors(0, 1), 2.0);
}

TEST(RemoteEmbed, EchoOneToken) {
  MockSidecar server;
  auto opts = fast_options();
  opts.layer = 4;
  const auto out = remote_embed(server.url(), {"hola"}, opts);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].vectors.rows(), 1);
  EXPECT_EQ(out[0].tokens, (std::vector<std::string>{"hola"}));
  std::lock_guard lock(server.mu);
  const auto body = nlohmann::json::parse(server.last_body);
  EXPECT_EQ(body["layer"], 4);
  EXPECT_EQ(body["texts"][0], "hola");
}

TEST(RemoteEmbed, IdenticalTextsBertScoreOne) {
  MockSidecar server;
  const auto out =
      remote_embed(server.url(), {"the cat sat", "the cat sat"}, fast_options());
  EXPECT_NEAR(bertscore(out[0], out[1]).f1, 1.0, 1e-9);
}

TEST(RemoteEmbed, ZeroDimIsSchemaError) {
  MockSidecar server;
  server.zero_dim = true;
  EXPECT_THROW(remote_embed(server.url(), {"a"}, fast_options()), SchemaError);
}

TEST(RemoteEmbed, RetriesServerErrors) {
  MockSidecar server;
  server.fail_first = 2;
  const auto out = remote_embed(server.url(), {"a b"}, fast_options());
  EXPECT_EQ(out[0].tokens.size(), 2u);
  EXPECT_EQ(server.requests, 3);

  MockSidecar always;
  always.fail_first = 100;
  try {
    remote_embed(always.url(), {"a"}, fast_options());
    FAIL();
  } catch (const HttpStatusError& e) {
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(always.requests, 3);  // initial attempt + 2 retries
}

TEST(RemoteEmbed, ClientErrorsAreNotRetried) {
  MockSidecar server;
  server.status_override = 404;
  EXPECT_THROW(remote_embed(server.url(), {"a"}, fast_options()), HttpStatusError);
  EXPECT_EQ(server.requests, 1);
}

TEST(RemoteEmbed, UnreachableEndpoint) {
  std::string url;
  {
    MockSidecar server;
    url = server.url();
  }
  EXPECT_THROW(remote_embed(url, {"a"}, fast_options()), ConnectivityError);
  EXPECT_THROW(remote_embed("ftp://host", {"a"}, fast_options()), ValidationError);
}

TEST(RemoteEmbed, Timeout) {
  MockSidecar server;
  server.delay_ms = 600;
  auto opts = fast_options();
  opts.timeout = std::chrono::milliseconds(150);
  opts.max_retries = 0;
  EXPECT_THROW(remote_embed(server.url(), {"a"}, opts), TimeoutError);
}

TEST(RemoteEmbed, ConcurrentCallsRespectLimit) {
  MockSidecar server;
  server.delay_ms = 40;
  auto opts = fast_options();
  opts.max_concurrent = 2;
  std::vector<std::thread> threads;
  std::vector<std::vector<EmbeddedText>> results(8);
  for (std::size_t t = 0; t < results.size(); ++t) {
    threads.emplace_back([&, t] {
      results[t] = remote_embed(server.url(),
                                {"text number " + std::to_string(t)}, opts);
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(server.requests, 8);
  EXPECT_LE(server.max_in_flight, 2);
  for (std::size_t t = 0; t < results.size(); ++t) {
    ASSERT_EQ(results[t].size(), 1u);
    EXPECT_EQ(results[t][0].tokens.back(), std::to_string(t));
  }
}

}  // namespace
}  // namespace mlsumeval
