#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "exgraph/codec.hpp"
#include "exgraph/config.hpp"
#include "exgraph/dataset.hpp"
#include "exgraph/ged.hpp"
#include "exgraph/lexicon.hpp"
#include "exgraph/losses.hpp"
#include "exgraph/metrics.hpp"
#include "exgraph/negfilter.hpp"
#include "exgraph/oracle_http.hpp"
#include "exgraph/perturb.hpp"
#include "exgraph/rng.hpp"

namespace exgraph {

inline constexpr std::string_view kRefinePrefix = "Refine the Explanation Graph for";
inline constexpr const char* kStanceUrlEnv = "EXGRAPH_STANCE_URL";
inline constexpr const char* kScorerUrlEnv = "EXGRAPH_SCORER_URL";

enum class SampleLabel { positive, negative };

inline std::string_view to_string(SampleLabel l) {
  return l == SampleLabel::positive ? "positive" : "negative";
}

/// One generated training graph. `kind` is a PerturbationKind name, "huse"
/// (human refinement history) or "huse_gen" (assembled from candidate edges).
struct AugmentedRecord {
  std::string source_id;
  std::size_t source_index = 0;
  std::string kind;
  std::size_t attempt = 0;
  SampleLabel label = SampleLabel::negative;
  Graph graph;
};

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  Seed seed = kDefaultSeed;
  DatasetFormat format = DatasetFormat::explagraphs;
  TsvColumns columns;
  std::map<PerturbationKind, std::size_t> multiplicity;
  FilterThresholds thresholds;
  FilterStrategy filter_strategy = FilterStrategy::ae;
  std::string relations_path;
  std::string lexicon_path;
  std::string embeddings_path;
  std::optional<HttpEndpoint> stance_endpoint;
  std::optional<HttpEndpoint> scorer_endpoint;
  std::string similarity = "token-f1";  // exact | token-f1 | http
  GedOptions ged;
  LossConfig loss;
  double temperature = kDefaultTemperature;
  unsigned threads = 1;

  static std::map<PerturbationKind, std::size_t> default_multiplicity(DatasetFormat f,
                                                                     bool have_lexicon) {
    using K = PerturbationKind;
    if (f == DatasetFormat::temporal_dot) return {{K::temporal_positive, 1}, {K::temporal_negative, 1}};
    std::map<K, std::size_t> m{{K::disconnect, 1},   {K::make_cyclic, 1},
                               {K::disconnect_and_cyclic, 1}, {K::node_removal, 1},
                               {K::relation_swap, 1}};
    if (have_lexicon) m[K::positive] = 1;
    return m;
  }

  /// Builds a validated configuration. `getenv` is injectable for tests.
  static RunConfig from(const Config& cfg, const std::string& config_path = "",
                        const std::function<const char*(const char*)>& getenv = ::getenv) {
    RunConfig rc;
    rc.seed = static_cast<Seed>(cfg.get_int("seed", static_cast<long long>(kDefaultSeed)));
    if (auto f = cfg.get("format")) {
      auto parsed = parse_dataset_format(*f);
      if (!parsed) throw ConfigError("unknown format '" + *f + "'");
      rc.format = *parsed;
    }
    rc.columns = TsvColumns::from_config(cfg, rc.format);
    auto path = [&](const std::string& key) {
      std::string p = resolve_path(config_path, cfg.get_string(key));
      require_file(key, p);
      return p;
    };
    rc.relations_path = path("relations");
    rc.lexicon_path = path("lexicon");
    rc.embeddings_path = path("embeddings");
    if (rc.lexicon_path.empty() != rc.embeddings_path.empty())
      throw ConfigError("'lexicon' and 'embeddings' must be given together");

    rc.multiplicity = default_multiplicity(rc.format, !rc.lexicon_path.empty());
    for (PerturbationKind k : kAllPerturbationKinds) {
      const std::string key = "multiplicity." + std::string(to_string(k));
      if (cfg.has(key)) {
        const long long m = cfg.get_int(key, 0);
        if (m < 0) throw ConfigError(key + " must be >= 0");
        rc.multiplicity[k] = static_cast<std::size_t>(m);
      }
    }
    if (rc.multiplicity.count(PerturbationKind::positive) &&
        rc.multiplicity[PerturbationKind::positive] > 0 && rc.lexicon_path.empty())
      throw ConfigError("positive perturbation needs 'lexicon' and 'embeddings'");

    rc.thresholds.delta = cfg.get_double("thresholds.delta", rc.thresholds.delta);
    rc.thresholds.gamma = cfg.get_double("thresholds.gamma", rc.thresholds.gamma);
    for (double t : {rc.thresholds.delta, rc.thresholds.gamma})
      if (t < 0.0 || t > 1.0) throw ConfigError("thresholds must lie in [0, 1]");
    const std::string strategy = cfg.get_string("thresholds.strategy", "ae");
    if (strategy == "ae") rc.filter_strategy = FilterStrategy::ae;
    else if (strategy == "ip") rc.filter_strategy = FilterStrategy::ip;
    else if (strategy == "both") rc.filter_strategy = FilterStrategy::both;
    else throw ConfigError("thresholds.strategy must be ae, ip or both");

    const int timeout = static_cast<int>(cfg.get_int("oracle.timeout_ms", 10000));
    auto endpoint = [&](const std::string& key, const char* env,
                        const std::string& path_key) -> std::optional<HttpEndpoint> {
      std::string url = cfg.get_string(key);
      if (const char* v = getenv(env); v && *v) url = v;
      if (url.empty()) return std::nullopt;
      return HttpEndpoint{url, cfg.get_string(path_key), timeout};
    };
    rc.stance_endpoint = endpoint("oracle.stance_url", kStanceUrlEnv, "oracle.stance_path");
    rc.scorer_endpoint = endpoint("oracle.scorer_url", kScorerUrlEnv, "oracle.scorer_path");

    rc.similarity = cfg.get_string("metrics.similarity", rc.similarity);
    if (rc.similarity != "exact" && rc.similarity != "token-f1" && rc.similarity != "http")
      throw ConfigError("metrics.similarity must be exact, token-f1 or http");
    if (rc.similarity == "http" && !rc.scorer_endpoint)
      throw ConfigError("metrics.similarity = http needs oracle.scorer_url");
    const long long cap = cfg.get_int("metrics.ged_max_nodes", 8);
    if (cap < 1) throw ConfigError("metrics.ged_max_nodes must be >= 1");
    rc.ged.max_nodes = static_cast<std::size_t>(cap);

    rc.loss.alpha = cfg.get_double("loss.alpha", rc.loss.alpha);
    rc.loss.beta = cfg.get_double("loss.beta", rc.loss.beta);
    if (rc.loss.alpha < 0 || rc.loss.beta < 0) throw ConfigError("loss.alpha and loss.beta must be >= 0");
    const std::string mode = cfg.get_string("loss.mm_mode", "conventional-hinge");
    if (mode == "conventional-hinge") rc.loss.mm_mode = MarginMode::conventional_hinge;
    else if (mode == "paper-verbatim") rc.loss.mm_mode = MarginMode::paper_verbatim;
    else throw ConfigError("loss.mm_mode must be conventional-hinge or paper-verbatim");
    rc.temperature = cfg.get_double("loss.temperature", rc.temperature);
    if (!(rc.temperature > 0)) throw ConfigError("loss.temperature must be > 0");

    const long long threads = cfg.get_int("threads", 1);
    if (threads < 1) throw ConfigError("threads must be >= 1");
    rc.threads = static_cast<unsigned>(threads);
    return rc;
  }
};

// ---------------------------------------------------------------------------
// Resources shared by a run

struct Resources {
  RelationSet relations;
  std::optional<Lexicon> lexicon;
  std::optional<EmbeddingTable> embeddings;

  static Resources load(const RunConfig& rc) {
    Resources r;
    try {
      if (!rc.relations_path.empty()) r.relations = load_relation_set(rc.relations_path);
      else if (rc.format == DatasetFormat::temporal_dot) r.relations = temporal_relations();
      else throw ConfigError("config key 'relations' is required");
      if (!rc.lexicon_path.empty()) {
        r.lexicon = load_lexicon(rc.lexicon_path);
        r.embeddings = load_embeddings(rc.embeddings_path);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    return r;
  }
};

/// Validator view used for a dataset: temporal graphs carry no provenance, so
/// their "correct" means connected, acyclic and well-labeled.
inline bool source_is_valid(const DatasetRecord& rec, DatasetFormat format,
                            const RelationSet& relations) {
  const ValidationReport r = validate_structure(rec.gold_graph, relations);
  if (format == DatasetFormat::temporal_dot) return r.connected && r.acyclic && r.relations_valid;
  return r.structurally_correct();
}

// ---------------------------------------------------------------------------
// Augmentation

struct KindAttrition {
  std::size_t attempts = 0;
  std::size_t emitted = 0;
  std::size_t inapplicable = 0;
  std::size_t invalid_source = 0;
  std::size_t guarantee_failures = 0;

  bool balanced() const {
    return attempts == emitted + inapplicable + invalid_source + guarantee_failures;
  }
  KindAttrition& operator+=(const KindAttrition& o) {
    attempts += o.attempts;
    emitted += o.emitted;
    inapplicable += o.inapplicable;
    invalid_source += o.invalid_source;
    guarantee_failures += o.guarantee_failures;
    return *this;
  }
};

struct AttritionReport {
  std::map<PerturbationKind, KindAttrition> per_kind;

  std::size_t emitted_structural() const {
    std::size_t n = 0;
    for (const auto& [k, a] : per_kind)
      if (is_structural(k)) n += a.emitted;
    return n;
  }
};

struct AugmentResult {
  std::vector<AugmentedRecord> records;
  AttritionReport attrition;
};

/// Seed used for attempt `attempt` of `kind` on record `index`.
inline Seed attempt_seed(Seed master, std::size_t index, PerturbationKind kind, std::size_t attempt) {
  const Seed record = mix_seed(master, index);
  return mix_seed(mix_seed(record, static_cast<std::uint64_t>(kind) + 1), attempt);
}

namespace detail {

struct RecordOutput {
  std::vector<AugmentedRecord> records;
  std::map<PerturbationKind, KindAttrition> attrition;
};

inline std::optional<Graph> generate(const DatasetRecord& rec, PerturbationKind kind,
                                     const Resources& res, Seed seed) {
  // Kind-level preconditions the record cannot meet (no edges, non-temporal
  // relations in a temporal run) count as inapplicable, not as failures.
  try {
    switch (kind) {
      case PerturbationKind::positive:
        return perturb_positive(rec.gold_graph, rec.belief, rec.argument, *res.lexicon,
                                *res.embeddings, seed);
      case PerturbationKind::relation_swap:
        return perturb_semantic(rec.gold_graph, res.relations, seed);
      case PerturbationKind::temporal_positive:
      case PerturbationKind::temporal_negative:
        return perturb_temporal(rec.gold_graph, kind, seed);
      default:
        return perturb_structural(rec.gold_graph, kind, res.relations, seed);
    }
  } catch (const InapplicableError&) {
    return std::nullopt;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

inline RecordOutput augment_one(const DatasetRecord& rec, std::size_t index, const RunConfig& rc,
                                const Resources& res) {
  RecordOutput out;
  const bool valid = source_is_valid(rec, rc.format, res.relations);
  for (const auto& [kind, count] : rc.multiplicity) {
    KindAttrition& a = out.attrition[kind];
    for (std::size_t attempt = 0; attempt < count; ++attempt) {
      ++a.attempts;
      if (!valid) {
        ++a.invalid_source;
        continue;
      }
      auto g = generate(rec, kind, res, attempt_seed(rc.seed, index, kind, attempt));
      if (!g) {
        ++a.inapplicable;
        continue;
      }
      if (!satisfies_guarantee(kind, validate_structure(*g, res.relations))) {
        ++a.guarantee_failures;
        continue;
      }
      ++a.emitted;
      out.records.push_back(AugmentedRecord{rec.id, index, std::string(to_string(kind)), attempt,
                                            is_positive(kind) ? SampleLabel::positive
                                                              : SampleLabel::negative,
                                            std::move(*g)});
    }
  }
  return out;
}

}  // namespace detail

/// Runs every enabled perturbation kind at its multiplicity over every record.
/// Records are processed in parallel with per-record seeds; output order is
/// (record, kind, attempt) regardless of thread count.
inline AugmentResult augment(const std::vector<DatasetRecord>& records, const RunConfig& rc,
                             const Resources& res) {
  if (rc.multiplicity.count(PerturbationKind::positive) &&
      rc.multiplicity.at(PerturbationKind::positive) > 0 && (!res.lexicon || !res.embeddings))
    throw ConfigError("positive perturbation needs a lexicon and embeddings");

  std::vector<detail::RecordOutput> slots(records.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(rc.threads, static_cast<unsigned>(records.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) slots[i] = detail::augment_one(records[i], i, rc, res);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < records.size(); i += workers)
          slots[i] = detail::augment_one(records[i], i, rc, res);
      });
    }
    for (auto& t : pool) t.join();
  }

  AugmentResult result;
  for (PerturbationKind k : kAllPerturbationKinds)
    if (rc.multiplicity.count(k)) result.attrition.per_kind[k];
  for (auto& slot : slots) {
    for (auto& r : slot.records) result.records.push_back(std::move(r));
    for (const auto& [k, a] : slot.attrition) result.attrition.per_kind[k] += a;
  }
  return result;
}

/// Human refinement history: every non-final graph of a chain is a negative.
inline std::vector<AugmentedRecord> extract_huse(const std::vector<DatasetRecord>& records) {
  std::vector<AugmentedRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& chain = records[i].refinement_chain;
    for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
      out.push_back(AugmentedRecord{records[i].id, i, "huse", j, SampleLabel::negative, chain[j]});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

inline EdgeSimilarity make_similarity(const RunConfig& rc) {
  if (rc.similarity == "exact") return exact_match_similarity;
  if (rc.similarity == "http") return make_http_edge_scorer(*rc.scorer_endpoint);
  return token_f1_similarity;
}

struct ItemScores {
  bool parsed = false;
  ValidationReport report;
  double g_bs = 0.0;
  double ged = 1.0;
  std::optional<bool> semantic;
  std::optional<double> ea;
};

struct EvaluationResult {
  MetricReport report;
  std::vector<ItemScores> items;
};

/// Scores predictions (one per gold record, aligned by position). Unparseable
/// predictions count as structurally incorrect and are scored as the empty
/// graph. SeCA and EA are filled only when an oracle is supplied.
inline EvaluationResult evaluate(const std::vector<std::optional<Graph>>& predictions,
                                 const std::vector<DatasetRecord>& gold,
                                 const RelationSet& relations, const EdgeSimilarity& sim,
                                 const GedOptions& ged, const StanceOracle* oracle = nullptr) {
  if (predictions.size() != gold.size()) {
    throw DataError("prediction count " + std::to_string(predictions.size()) +
                    " does not match gold count " + std::to_string(gold.size()));
  }
  if (gold.empty()) throw DataError("nothing to evaluate");
  EvaluationResult out;
  std::size_t stca = 0, seca = 0;
  double gbs = 0, ged_sum = 0, ea = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const DatasetRecord& rec = gold[i];
    ItemScores s;
    Graph pred;
    if (predictions[i]) {
      s.parsed = true;
      pred = tag_provenance(*predictions[i], rec.belief, rec.argument);
      s.report = validate_structure(pred, relations);
    }
    s.g_bs = graph_bertscore(pred, rec.gold_graph, sim);
    s.ged = graph_edit_distance(pred, rec.gold_graph, ged);
    if (oracle && rec.stance) {
      s.semantic = s.parsed && semantically_correct({rec.belief, pred, *rec.stance, s.report}, *oracle);
      s.ea = s.parsed ? edge_accuracy(pred, rec.belief, *rec.stance, *oracle) : 0.0;
    }
    stca += s.report.structurally_correct();
    seca += s.semantic.value_or(false);
    gbs += s.g_bs;
    ged_sum += s.ged;
    ea += s.ea.value_or(0.0);
    out.items.push_back(s);
  }
  const double n = static_cast<double>(gold.size());
  out.report.count = gold.size();
  out.report.stca = static_cast<double>(stca) / n;
  out.report.g_bs = gbs / n;
  out.report.ged = ged_sum / n;
  if (oracle) {
    out.report.seca = static_cast<double>(seca) / n;
    out.report.ea = ea / n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission

enum class OutputFormat { jsonl, tsv };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "jsonl") return OutputFormat::jsonl;
  if (s == "tsv") return OutputFormat::tsv;
  return std::nullopt;
}

inline std::size_t kind_rank(const std::string& kind) {
  std::size_t i = 0;
  for (PerturbationKind k : kAllPerturbationKinds) {
    if (to_string(k) == kind) return i;
    ++i;
  }
  return kind == "huse" ? i : i + 1;
}

inline void sort_records(std::vector<AugmentedRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const AugmentedRecord& a, const AugmentedRecord& b) {
    return std::make_tuple(a.source_index, kind_rank(a.kind), a.attempt) <
           std::make_tuple(b.source_index, kind_rank(b.kind), b.attempt);
  });
}

inline nlohmann::ordered_json to_json(const AugmentedRecord& r) {
  return {{"source_id", r.source_id}, {"kind", r.kind}, {"attempt", r.attempt},
          {"label", std::string(to_string(r.label))}, {"graph", serialize_linearized(r.graph)}};
}

inline void write_records(std::ostream& out, std::vector<AugmentedRecord> records, OutputFormat fmt) {
  sort_records(records);
  for (const auto& r : records) {
    if (fmt == OutputFormat::jsonl) {
      out << to_json(r).dump() << '\n';
    } else {
      out << r.source_id << '\t' << r.kind << '\t' << r.attempt << '\t' << to_string(r.label)
          << '\t' << serialize_linearized(r.graph) << '\n';
    }
  }
}

inline nlohmann::ordered_json to_json(const MetricReport& m) {
  nlohmann::ordered_json j;
  j["count"] = m.count;
  j["stca"] = m.stca;
  j["seca"] = m.seca ? nlohmann::ordered_json(*m.seca) : nlohmann::ordered_json(nullptr);
  j["g_bs"] = m.g_bs;
  j["ged"] = m.ged;
  j["ea"] = m.ea ? nlohmann::ordered_json(*m.ea) : nlohmann::ordered_json(nullptr);
  return j;
}

inline MetricReport report_from_json(const nlohmann::json& j) {
  MetricReport m;
  m.count = j.at("count").get<std::size_t>();
  m.stca = j.at("stca").get<double>();
  if (j.contains("seca") && !j["seca"].is_null()) m.seca = j["seca"].get<double>();
  m.g_bs = j.at("g_bs").get<double>();
  m.ged = j.at("ged").get<double>();
  if (j.contains("ea") && !j["ea"].is_null()) m.ea = j["ea"].get<double>();
  return m;
}

inline void write_report(std::ostream& out, const MetricReport& m, OutputFormat fmt) {
  if (fmt == OutputFormat::jsonl) {
    out << to_json(m).dump() << '\n';
    return;
  }
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v).dump() : std::string("NA");
  };
  out << "count\tstca\tseca\tg_bs\tged\tea\n";
  out << m.count << '\t' << nlohmann::json(m.stca).dump() << '\t' << opt(m.seca) << '\t'
      << nlohmann::json(m.g_bs).dump() << '\t' << nlohmann::json(m.ged).dump() << '\t' << opt(m.ea)
      << '\n';
}

inline MetricReport read_report(std::istream& in, OutputFormat fmt) {
  std::string line;
  if (fmt == OutputFormat::jsonl) {
    if (!std::getline(in, line)) throw DataError("empty report");
    return report_from_json(nlohmann::json::parse(line));
  }
  std::getline(in, line);  // header
  if (!std::getline(in, line)) throw DataError("report has no data row");
  auto c = split(line, '\t');
  if (c.size() != 6) throw DataError("report row must have 6 columns");
  auto opt = [](const std::string& s) -> std::optional<double> {
    if (s == "NA") return std::nullopt;
    return nlohmann::json::parse(s).get<double>();
  };
  MetricReport m;
  m.count = static_cast<std::size_t>(std::stoull(c[0]));
  m.stca = nlohmann::json::parse(c[1]).get<double>();
  m.seca = opt(c[2]);
  m.g_bs = nlohmann::json::parse(c[3]).get<double>();
  m.ged = nlohmann::json::parse(c[4]).get<double>();
  m.ea = opt(c[5]);
  return m;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

// ---------------------------------------------------------------------------
// Refinement training pairs: every perturbed or human graph becomes the noisy
// input of a (context + graph -> gold graph) example for an external refiner.

inline nlohmann::ordered_json refine_pair(const AugmentedRecord& sample, const DatasetRecord& rec) {
  return {{"source_id", sample.source_id},
          {"input_kind", sample.kind},
          {"prefix", std::string(kRefinePrefix)},
          {"belief", rec.belief},
          {"argument", rec.argument},
          {"stance", rec.stance ? std::string(to_string(*rec.stance)) : std::string()},
          {"input_graph", serialize_linearized(sample.graph)},
          {"target_graph", serialize_linearized(rec.gold_graph)}};
}

inline void write_refine_pairs(std::ostream& out, std::vector<AugmentedRecord> samples,
                               const std::vector<DatasetRecord>& records) {
  sort_records(samples);
  for (const auto& s : samples) out << refine_pair(s, records.at(s.source_index)).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Generated human-like negatives

struct CandidateRecord {
  std::string id;
  CandidateEdgeSet edges;
};

/// JSONL: {"id": ..., "edges": [[src, rel, dst], ...]} per line.
inline std::vector<CandidateRecord> read_candidates(std::istream& in) {
  std::vector<CandidateRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      CandidateRecord c;
      c.id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw DataError("edge must be [src, rel, dst]");
        c.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<std::string>()});
      }
      out.push_back(std::move(c));
    } catch (const std::exception& e) {
      throw DataError("candidates line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

struct HuseGenResult {
  std::string id;
  std::size_t source_index = 0;
  double ae = 0.0;
  std::optional<double> ip;
  std::optional<Graph> graph;  // empty when assembly was rejected
  bool kept = false;
};

/// Scores, assembles and filters generated negatives for their source records
/// (matched by record id). IP comes from the oracle's "incorrect" probability.
inline std::vector<HuseGenResult> run_huse_gen(const std::vector<DatasetRecord>& records,
                                               const std::vector<CandidateRecord>& candidates,
                                               const RelationSet& relations,
                                               FilterStrategy strategy,
                                               const FilterThresholds& thresholds,
                                               const StanceOracle* oracle) {
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < records.size(); ++i) by_id[records[i].id] = i;
  std::vector<HuseGenResult> out;
  for (const auto& c : candidates) {
    auto it = by_id.find(c.id);
    if (it == by_id.end()) throw DataError("candidate id '" + c.id + "' matches no record");
    const DatasetRecord& rec = records[it->second];
    HuseGenResult r;
    r.id = c.id;
    r.source_index = it->second;
    r.ae = acceptable_edge_fraction(c.edges, rec.gold_graph, relations);
    try {
      r.graph = assemble_negative(rec.gold_graph, c.edges, relations);
    } catch (const RejectedError&) {
    }
    if (strategy != FilterStrategy::ae) {
      if (!oracle) throw OracleUnavailable("IP filtering requires a stance oracle");
      if (r.graph) r.ip = check_probs((*oracle)(rec.belief, *r.graph)).incorrect;
      else r.ip = 0.0;
    }
    r.kept = r.graph && keep_negative({r.id, r.ae, r.ip}, strategy, thresholds);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loss records produced by an external LM harness.

struct LossRecord {
  std::vector<double> gold;
  std::vector<std::vector<double>> negatives;  // token log-probs per negative graph
  std::vector<Vector> gold_tokens;
  std::vector<Vector> positive_tokens;
  std::vector<std::vector<Vector>> negative_tokens;
  std::optional<double> temperature;
};

inline LossRecord loss_record_from_json(const nlohmann::json& j) {
  LossRecord r;
  r.gold = j.at("gold").get<std::vector<double>>();
  if (j.contains("negatives")) r.negatives = j["negatives"].get<std::vector<std::vector<double>>>();
  if (j.contains("gold_tokens")) r.gold_tokens = j["gold_tokens"].get<std::vector<Vector>>();
  if (j.contains("positive_tokens")) r.positive_tokens = j["positive_tokens"].get<std::vector<Vector>>();
  if (j.contains("negative_tokens"))
    r.negative_tokens = j["negative_tokens"].get<std::vector<std::vector<Vector>>>();
  if (j.contains("temperature")) r.temperature = j["temperature"].get<double>();
  return r;
}

/// CE always; max-margin (mean over negatives) when negative log-probs are
/// present; InfoNCE when gold, positive and negative token vectors are present.
inline nlohmann::ordered_json compute_losses(const LossRecord& r, const LossConfig& cfg,
                                             double temperature) {
  nlohmann::ordered_json out;
  const double ce = cross_entropy(r.gold);
  out["ce"] = ce;
  if (!r.negatives.empty()) {
    double mm = 0;
    for (const auto& n : r.negatives) mm += max_margin(r.gold, n, cfg.beta, cfg.mm_mode);
    mm /= static_cast<double>(r.negatives.size());
    out["mm"] = mm;
    out["loss_mm"] = combined_loss(ce, mm, cfg.alpha);
  }
  if (!r.gold_tokens.empty() && !r.positive_tokens.empty() && !r.negative_tokens.empty()) {
    ContrastiveBatch b;
    b.gold = pool_representation(r.gold_tokens);
    b.positive = pool_representation(r.positive_tokens);
    for (const auto& n : r.negative_tokens) b.negatives.push_back(pool_representation(n));
    b.temperature = r.temperature.value_or(temperature);
    const double cl = info_nce(b).value;
    out["cl"] = cl;
    out["loss_cl"] = combined_loss(ce, cl, cfg.alpha);
  }
  return out;
}

}  // namespace exgraph
