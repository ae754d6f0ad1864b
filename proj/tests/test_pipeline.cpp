#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace exgraph;
using namespace testsupport;

namespace {

const std::string kRow1 =
    "Fast food should be banned\tFast food is greasy and fattening and causes obesity\tsupport\t"
    "(fast food; has property; greasy and fattening)(greasy and fattening; causes; obesity)"
    "(obesity; causes; bad health)(bad health; desires; banned)";

Config parse_config(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

const char* no_env(const char*) { return nullptr; }

RunConfig sample_config(unsigned threads = 1) {
  const std::string path = source_path("samples/config.toml");
  Config cfg = Config::load(path);
  cfg.set("threads", std::to_string(threads));
  return RunConfig::from(cfg, path, no_env);
}

std::vector<DatasetRecord> sample_records() {
  return ingest_file(source_path("samples/train.tsv"), DatasetFormat::explagraphs, TsvColumns{}).records;
}

}  // namespace

TEST(Config, ParsesSectionsQuotesAndComments) {
  Config c = parse_config("seed = 7 # trailing\n[a]\nname = \"x # y\"\nflag = true\n[b]\nn = 2.5\n");
  EXPECT_EQ(c.get_int("seed", 0), 7);
  EXPECT_EQ(c.get_string("a.name"), "x # y");
  EXPECT_TRUE(c.get_bool("a.flag", false));
  EXPECT_DOUBLE_EQ(c.get_double("b.n", 0), 2.5);
  EXPECT_EQ(c.get_int("missing", 3), 3);
  EXPECT_THROW(c.get_int("b.n", 0), ConfigError);
  EXPECT_THROW(parse_config("[open\n"), ConfigError);
  EXPECT_THROW(parse_config("novalue\n"), ConfigError);
}

TEST(RunConfig, DefaultsAndSampleFile) {
  RunConfig d = RunConfig::from(Config{}, "", no_env);
  EXPECT_EQ(d.seed, 42u);
  EXPECT_EQ(d.format, DatasetFormat::explagraphs);
  EXPECT_EQ(d.multiplicity.count(PerturbationKind::positive), 0u);  // no lexicon configured
  EXPECT_EQ(d.multiplicity.at(PerturbationKind::relation_swap), 1u);

  RunConfig s = sample_config();
  EXPECT_EQ(s.multiplicity.at(PerturbationKind::relation_swap), 2u);
  EXPECT_EQ(s.multiplicity.at(PerturbationKind::positive), 1u);
  EXPECT_DOUBLE_EQ(s.thresholds.delta, 0.4);
  EXPECT_DOUBLE_EQ(s.loss.alpha, 0.1);
  EXPECT_FALSE(s.stance_endpoint);
}

TEST(RunConfig, ReferencedFilesMustExist) {
  EXPECT_THROW(RunConfig::from(parse_config("relations = /no/such/file\n"), "", no_env), ConfigError);
  EXPECT_THROW(RunConfig::from(parse_config("format = xml\n"), "", no_env), ConfigError);
  EXPECT_THROW(RunConfig::from(parse_config("[multiplicity]\npositive = 1\n"), "", no_env), ConfigError);
  EXPECT_THROW(RunConfig::from(parse_config("[thresholds]\ndelta = 1.5\n"), "", no_env), ConfigError);
}

TEST(RunConfig, EnvironmentOverridesOracleEndpoints) {
  auto env = [](const char* name) -> const char* {
    return std::string(name) == kStanceUrlEnv ? "http://env:1" : nullptr;
  };
  RunConfig rc = RunConfig::from(parse_config("[oracle]\nstance_url = http://cfg:2\n"), "", env);
  ASSERT_TRUE(rc.stance_endpoint);
  EXPECT_EQ(rc.stance_endpoint->base_url, "http://env:1");
  EXPECT_THROW(RunConfig::from(parse_config("[metrics]\nsimilarity = http\n"), "", no_env), ConfigError);
}

TEST(Ingest, ExplaGraphsRow) {
  std::istringstream in(kRow1 + "\n");
  auto r = ingest(in, DatasetFormat::explagraphs, TsvColumns{});
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_TRUE(r.errors.empty());
  const auto& rec = r.records[0];
  EXPECT_EQ(rec.stance, Stance::support);
  EXPECT_EQ(rec.gold_graph.edge_count(), 4u);
  EXPECT_EQ(rec.gold_graph.count(Provenance::belief), 2u);
  EXPECT_EQ(rec.id, "1");
}

TEST(Ingest, RefinementChainAndMalformedLines) {
  auto r = ingest_file(source_path("samples/refinement.tsv"), DatasetFormat::refinement, TsvColumns{});
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[0].refinement_chain.size(), 3u);
  EXPECT_EQ(r.records[1].refinement_chain.size(), 2u);
  EXPECT_EQ(r.records[2].refinement_chain.size(), 1u);
  EXPECT_EQ(r.records[0].gold_graph, r.records[0].refinement_chain.back());

  std::istringstream bad(kRow1 + "\nb\ta\tsupport\t(x; r; y\nb\ta\tmaybe\t(x; r; y)\nonly one column\n" + kRow1 + "\n");
  auto m = ingest(bad, DatasetFormat::explagraphs, TsvColumns{}, "dev");
  EXPECT_EQ(m.records.size(), 2u);
  ASSERT_EQ(m.errors.size(), 3u);
  EXPECT_EQ(m.errors[0].line, 2u);
  EXPECT_EQ(m.records[1].id, "dev:5");
}

TEST(Ingest, HeaderAndColumnMapping) {
  Config cfg = parse_config("[tsv]\nheader = true\ngraph = 0\nbelief = 1\nargument = 2\nstance = 3\n");
  TsvColumns cols = TsvColumns::from_config(cfg, DatasetFormat::explagraphs);
  std::istringstream in("graph\tbelief\targument\tstance\n(b0; r; a0)\tb0 x\ta0 y\tcounter\n");
  auto r = ingest(in, DatasetFormat::explagraphs, cols);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].stance, Stance::counter);
  EXPECT_EQ(r.records[0].belief, "b0 x");
}

TEST(Ingest, ZeroRecordsIsFatal) {
  EXPECT_THROW(ingest_file(source_path("samples/lexicon.tsv"), DatasetFormat::explagraphs, TsvColumns{}),
               DataError);
  EXPECT_THROW(ingest_file("/no/such.tsv", DatasetFormat::explagraphs, TsvColumns{}), DataError);
}

TEST(Ingest, TemporalDot) {
  auto r = ingest_file(source_path("samples/temporal.tsv"), DatasetFormat::temporal_dot,
                       TsvColumns::defaults(DatasetFormat::temporal_dot));
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_FALSE(r.records[0].stance);
  EXPECT_EQ(r.records[0].gold_graph.edge_count(), 3u);
}

TEST(ExtractHuse, ChainsOfEachLength) {
  auto r = ingest_file(source_path("samples/refinement.tsv"), DatasetFormat::refinement, TsvColumns{});
  auto h = extract_huse(r.records);
  ASSERT_EQ(h.size(), 3u);  // 2 + 1 + 0
  EXPECT_EQ(h[0].graph, r.records[0].refinement_chain[0]);
  EXPECT_EQ(h[1].graph, r.records[0].refinement_chain[1]);
  EXPECT_EQ(h[2].source_id, r.records[1].id);
  for (const auto& x : h) {
    EXPECT_EQ(x.label, SampleLabel::negative);
    EXPECT_EQ(x.kind, "huse");
  }
}

TEST(Augment, AccountingGuaranteesAndLabels) {
  const RunConfig rc = sample_config();
  const Resources res = Resources::load(rc);
  const auto records = sample_records();
  AugmentResult out = augment(records, rc, res);
  for (const auto& [kind, a] : out.attrition.per_kind) {
    EXPECT_TRUE(a.balanced()) << to_string(kind);
    EXPECT_EQ(a.guarantee_failures, 0u);
    EXPECT_EQ(a.attempts, records.size() * rc.multiplicity.at(kind));
  }
  EXPECT_EQ(out.attrition.per_kind.at(PerturbationKind::relation_swap).emitted, 2 * records.size());
  for (const auto& r : out.records) {
    auto kind = parse_perturbation_kind(r.kind);
    ASSERT_TRUE(kind);
    EXPECT_EQ(r.label == SampleLabel::positive, is_positive(*kind));
    EXPECT_TRUE(satisfies_guarantee(*kind, validate_structure(r.graph, res.relations)));
  }
  // The factory-farming record has a commonsense node the lexicon covers.
  EXPECT_GE(out.attrition.per_kind.at(PerturbationKind::positive).emitted, 1u);
}

TEST(Augment, NoBridgeCountsAsDisconnectAttrition) {
  RunConfig rc = RunConfig::from(parse_config("[multiplicity]\nmake_cyclic = 0\ndisconnect_and_cyclic = 0\n"
                                              "node_removal = 0\nrelation_swap = 0\n"),
                                 "", no_env);
  Resources res;
  res.relations = explagraphs_relations();
  std::istringstream in("b0 b1\ta0 a1\tsupport\t(b0; causes; a0)(a0; causes; b1)(b1; causes; a1)"
                        "(b0; is a; a0)(a0; is a; b1)(b1; is a; a1)\n");
  auto recs = ingest(in, DatasetFormat::explagraphs, TsvColumns{}).records;
  ASSERT_EQ(recs.size(), 1u);
  AugmentResult out = augment(recs, rc, res);
  const auto& a = out.attrition.per_kind.at(PerturbationKind::disconnect);
  EXPECT_EQ(a.attempts, 1u);
  EXPECT_EQ(a.inapplicable, 1u);
  EXPECT_TRUE(out.records.empty());
}

TEST(Augment, InvalidSourceIsCounted) {
  RunConfig rc = RunConfig::from(Config{}, "", no_env);
  Resources res;
  res.relations = explagraphs_relations();
  std::istringstream in("x\ty\tsupport\t(p; causes; q)\n");
  auto recs = ingest(in, DatasetFormat::explagraphs, TsvColumns{}).records;
  AugmentResult out = augment(recs, rc, res);
  for (const auto& [kind, a] : out.attrition.per_kind) EXPECT_EQ(a.invalid_source, a.attempts);
}

TEST(Augment, DeterministicAcrossRunsAndThreadCounts) {
  const auto records = sample_records();
  auto run = [&](unsigned threads) {
    const RunConfig rc = sample_config(threads);
    AugmentResult out = augment(records, rc, Resources::load(rc));
    std::ostringstream os;
    write_records(os, out.records, OutputFormat::jsonl);
    return os.str();
  };
  const std::string a = run(1);
  EXPECT_EQ(a, run(1));
  EXPECT_EQ(a, run(3));
  EXPECT_FALSE(a.empty());
}

TEST(Augment, SeedChangesOutput) {
  const auto records = sample_records();
  RunConfig rc = sample_config();
  const Resources res = Resources::load(rc);
  std::ostringstream a, b;
  write_records(a, augment(records, rc, res).records, OutputFormat::tsv);
  rc.seed = 43;
  write_records(b, augment(records, rc, res).records, OutputFormat::tsv);
  EXPECT_NE(a.str(), b.str());
}

TEST(Augment, TemporalRun) {
  const std::string path = source_path("samples/temporal.toml");
  RunConfig rc = RunConfig::from(Config::load(path), path, no_env);
  const Resources res = Resources::load(rc);
  auto recs = ingest_file(source_path("samples/temporal.tsv"), rc.format, rc.columns).records;
  AugmentResult out = augment(recs, rc, res);
  EXPECT_EQ(out.attrition.per_kind.at(PerturbationKind::temporal_positive).emitted, 2 * recs.size());
  EXPECT_EQ(out.attrition.per_kind.at(PerturbationKind::temporal_negative).emitted, 2 * recs.size());
}

TEST(Evaluate, IdenticalPredictions) {
  const auto records = sample_records();
  const RelationSet rel = explagraphs_relations();
  std::vector<std::optional<Graph>> preds;
  std::vector<ValidationReport> reports;
  for (const auto& r : records) {
    preds.emplace_back(r.gold_graph);
    reports.push_back(validate_structure(r.gold_graph, rel));
  }
  auto res = evaluate(preds, records, rel, exact_match_similarity, GedOptions{});
  EXPECT_DOUBLE_EQ(res.report.stca, structural_accuracy(reports));
  EXPECT_DOUBLE_EQ(res.report.g_bs, 1.0);
  EXPECT_DOUBLE_EQ(res.report.ged, 0.0);
  EXPECT_FALSE(res.report.seca);
  EXPECT_FALSE(res.report.ea);
}

TEST(Evaluate, CountMismatchAndUnparsed) {
  const auto records = sample_records();
  const RelationSet rel = explagraphs_relations();
  EXPECT_THROW(evaluate({}, records, rel, exact_match_similarity, GedOptions{}), DataError);

  std::vector<std::optional<Graph>> preds(records.size());
  StanceOracle oracle = [](std::string_view, const Graph&) { return StanceProbs{0.6, 0.3, 0.1}; };
  auto res = evaluate(preds, records, rel, exact_match_similarity, GedOptions{}, &oracle);
  EXPECT_EQ(res.report.stca, 0.0);
  EXPECT_EQ(res.report.g_bs, 0.0);
  EXPECT_EQ(res.report.ged, 1.0);
  EXPECT_EQ(res.report.seca, 0.0);
  EXPECT_EQ(res.report.ea, 0.0);
}

TEST(Evaluate, AggregateIsMeanOfItems) {
  const auto records = sample_records();
  const RelationSet rel = explagraphs_relations();
  std::vector<std::optional<Graph>> preds;
  Rng rng(3);
  for (const auto& r : records) preds.emplace_back(perturb_semantic(r.gold_graph, rel, rng.next()));
  auto res = evaluate(preds, records, rel, token_f1_similarity, GedOptions{});
  double g = 0, d = 0;
  for (const auto& it : res.items) {
    g += it.g_bs;
    d += it.ged;
  }
  EXPECT_NEAR(res.report.g_bs, g / records.size(), 1e-12);
  EXPECT_NEAR(res.report.ged, d / records.size(), 1e-12);
}

TEST(Report, RoundTripsInBothFormats) {
  for (const MetricReport& m : {MetricReport{5, 0.6, 0.4, 0.123456789012345, 1.0 / 3.0, std::nullopt},
                                MetricReport{1, 1.0, std::nullopt, 1.0, 0.0, 0.25}}) {
    for (OutputFormat f : {OutputFormat::jsonl, OutputFormat::tsv}) {
      std::stringstream ss;
      write_report(ss, m, f);
      EXPECT_EQ(read_report(ss, f), m);
    }
  }
}

TEST(Emit, SortedAndLinearized) {
  Graph g = parse_linearized("(b; r; c)(a; r; b)");
  std::vector<AugmentedRecord> recs{{"2", 1, "relation_swap", 0, SampleLabel::negative, g},
                                    {"1", 0, "huse", 0, SampleLabel::negative, g},
                                    {"1", 0, "disconnect", 1, SampleLabel::negative, g},
                                    {"1", 0, "disconnect", 0, SampleLabel::negative, g}};
  std::ostringstream os;
  write_records(os, recs, OutputFormat::tsv);
  EXPECT_EQ(os.str(),
            "1\tdisconnect\t0\tnegative\t(a; r; b)(b; r; c)\n"
            "1\tdisconnect\t1\tnegative\t(a; r; b)(b; r; c)\n"
            "1\thuse\t0\tnegative\t(a; r; b)(b; r; c)\n"
            "2\trelation_swap\t0\tnegative\t(a; r; b)(b; r; c)\n");
  std::ostringstream js;
  write_records(js, {recs[1]}, OutputFormat::jsonl);
  EXPECT_EQ(js.str(),
            R"x({"source_id":"1","kind":"huse","attempt":0,"label":"negative","graph":"(a; r; b)(b; r; c)"})x"
            "\n");
}

TEST(RefinePairs, CarryPrefixAndTarget) {
  const auto records = sample_records();
  AugmentedRecord s{records[0].id, 0, "relation_swap", 0, SampleLabel::negative,
                    perturb_semantic(records[0].gold_graph, explagraphs_relations(), 1)};
  auto j = refine_pair(s, records[0]);
  EXPECT_EQ(j["prefix"], std::string(kRefinePrefix));
  EXPECT_EQ(j["target_graph"], serialize_linearized(records[0].gold_graph));
  EXPECT_EQ(j["stance"], "support");
}

TEST(HuseGen, AssembleScoreAndFilter) {
  const auto records = sample_records();
  std::ifstream in(source_path("samples/candidates.jsonl"));
  const auto cands = read_candidates(in);
  ASSERT_EQ(cands.size(), 3u);
  auto out = run_huse_gen(records, cands, explagraphs_relations(), FilterStrategy::ae, {0.4, 0.5}, nullptr);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_NEAR(out[0].ae, 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(out[0].kept);
  EXPECT_FALSE(out[2].graph);  // its only candidate closes a cycle
  EXPECT_FALSE(out[2].kept);
  EXPECT_THROW(run_huse_gen(records, cands, explagraphs_relations(), FilterStrategy::ip, {}, nullptr),
               OracleUnavailable);
  StanceOracle o = [](std::string_view, const Graph&) { return StanceProbs{0.2, 0.2, 0.6}; };
  auto ip = run_huse_gen(records, cands, explagraphs_relations(), FilterStrategy::both, {0.4, 0.5}, &o);
  EXPECT_EQ(ip[0].ip, 0.6);
  EXPECT_TRUE(ip[0].kept);

  std::istringstream bad(R"({"id": "1", "edges": [["a", "b"]]})");
  EXPECT_THROW(read_candidates(bad), DataError);
}

TEST(Losses, ComputeFromRecords) {
  std::ifstream in(source_path("samples/losses.jsonl"));
  std::string line;
  std::getline(in, line);
  auto a = compute_losses(loss_record_from_json(nlohmann::json::parse(line)), LossConfig{}, 1.0);
  EXPECT_NEAR(a["ce"].get<double>(), 0.35, 1e-12);
  // Negative 1 gaps: 1.4, 1.8, 0.85 -> hinge 0.15; negative 2 gaps: 0.2, 0.2 -> 1.6. Mean 0.875.
  EXPECT_NEAR(a["mm"].get<double>(), 0.875, 1e-12);
  EXPECT_NEAR(a["loss_mm"].get<double>(), 0.35 + 0.875, 1e-12);
  std::getline(in, line);
  auto b = compute_losses(loss_record_from_json(nlohmann::json::parse(line)), LossConfig{}, 1.0);
  EXPECT_NEAR(b["cl"].get<double>(), 0.31326, 1e-5);
}
