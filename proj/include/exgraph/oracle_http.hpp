#pragma once

#include <chrono>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "exgraph/codec.hpp"
#include "exgraph/metrics.hpp"

namespace exgraph {

struct HttpEndpoint {
  std::string base_url;  // scheme://host[:port]
  std::string path;
  int timeout_ms = 10000;
};

namespace detail {

inline nlohmann::json post_json(const HttpEndpoint& ep, const nlohmann::json& body) {
  httplib::Client client(ep.base_url);
  const auto timeout = std::chrono::milliseconds(ep.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(ep.path, body.dump(), "application/json");
  if (!res) {
    throw OracleUnavailable(ep.base_url + ep.path + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw OracleUnavailable(ep.base_url + ep.path + ": HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw OracleError(ep.base_url + ep.path + ": malformed response: " + e.what());
  }
}

}  // namespace detail

/// Client for a remote stance classifier.
/// Request {"belief", "graph": linearized} -> {"probs": {"support", "counter", "incorrect"}}.
inline StanceOracle make_http_stance_oracle(HttpEndpoint ep) {
  if (ep.path.empty()) ep.path = "/stance";
  return [ep](std::string_view belief, const Graph& graph) {
    nlohmann::json req{{"belief", std::string(belief)}, {"graph", serialize_linearized(graph)}};
    const nlohmann::json res = detail::post_json(ep, req);
    try {
      const auto& probs = res.at("probs");
      StanceProbs p{probs.at("support").get<double>(), probs.at("counter").get<double>(),
                    probs.at("incorrect").get<double>()};
      return check_probs(p);
    } catch (const nlohmann::json::exception& e) {
      throw OracleError("stance response missing fields: " + std::string(e.what()));
    }
  };
}

/// Client for a remote sentence-pair scorer (e.g. an embedding-based F1).
/// Request {"sentence_a", "sentence_b"} -> {"score"}.
inline EdgeSimilarity make_http_edge_scorer(HttpEndpoint ep) {
  if (ep.path.empty()) ep.path = "/score";
  return [ep](std::string_view a, std::string_view b) {
    nlohmann::json req{{"sentence_a", std::string(a)}, {"sentence_b", std::string(b)}};
    const nlohmann::json res = detail::post_json(ep, req);
    try {
      return res.at("score").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw OracleError("score response missing 'score': " + std::string(e.what()));
    }
  };
}

}  // namespace exgraph
