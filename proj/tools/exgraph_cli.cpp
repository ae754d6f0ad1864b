// exgraph: dataset validation, augmentation, evaluation and loss utilities.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "exgraph/exgraph.hpp"

namespace {

using namespace exgraph;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

struct Common {
  std::string config_path;
  std::optional<Seed> seed;
  std::string format;
  std::string input;
  std::string output = "-";
  std::string emit = "jsonl";
};

RunConfig load_run_config(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : Config::load(c.config_path);
  if (c.seed) cfg.set("seed", std::to_string(*c.seed));
  if (!c.format.empty()) cfg.set("format", c.format);
  return RunConfig::from(cfg, c.config_path);
}

OutputFormat emit_format(const std::string& s) {
  auto f = parse_output_format(s);
  if (!f) throw ConfigError("unknown output format '" + s + "' (jsonl or tsv)");
  return *f;
}

// "-" is stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") file_ = std::make_unique<std::ofstream>(open_output(path));
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<DatasetRecord> load_records(const Common& c, const RunConfig& rc) {
  auto result = ingest_file(c.input, rc.format, rc.columns);
  for (const auto& e : result.errors)
    std::cerr << c.input << ":" << e.line << ": skipped: " << e.message << '\n';
  return std::move(result.records);
}

std::optional<StanceOracle> stance_oracle(const RunConfig& rc) {
  if (!rc.stance_endpoint) return std::nullopt;
  return make_http_stance_oracle(*rc.stance_endpoint);
}

int cmd_validate(const Common& c) {
  const RunConfig rc = load_run_config(c);
  const Resources res = Resources::load(rc);
  const auto records = load_records(c, rc);
  Output out(c.output);
  std::size_t valid = 0;
  for (const auto& r : records) {
    const ValidationReport v = validate_structure(r.gold_graph, res.relations);
    const bool ok = source_is_valid(r, rc.format, res.relations);
    valid += ok;
    nlohmann::ordered_json j{{"id", r.id},
                             {"connected", v.connected},
                             {"acyclic", v.acyclic},
                             {"relations_valid", v.relations_valid},
                             {"provenance_ok", v.provenance_ok},
                             {"valid", ok}};
    out.stream() << j.dump() << '\n';
  }
  std::cerr << valid << "/" << records.size() << " graphs valid\n";
  return kExitOk;
}

void write_attrition(const AttritionReport& a, const std::string& path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [kind, k] : a.per_kind) {
    j[std::string(to_string(kind))] = {{"attempts", k.attempts},
                                       {"emitted", k.emitted},
                                       {"inapplicable", k.inapplicable},
                                       {"invalid_source", k.invalid_source},
                                       {"guarantee_failures", k.guarantee_failures}};
  }
  if (path.empty()) {
    std::cerr << j.dump(2) << '\n';
  } else {
    Output out(path);
    out.stream() << j.dump(2) << '\n';
  }
}

int cmd_augment(const Common& c, const std::string& attrition_path, const std::string& refine_path) {
  const RunConfig rc = load_run_config(c);
  const OutputFormat fmt = emit_format(c.emit);
  const Resources res = Resources::load(rc);
  const auto records = load_records(c, rc);
  AugmentResult result = augment(records, rc, res);
  {
    Output out(c.output);
    write_records(out.stream(), result.records, fmt);
  }
  if (!refine_path.empty()) {
    Output out(refine_path);
    write_refine_pairs(out.stream(), result.records, records);
  }
  write_attrition(result.attrition, attrition_path);
  return kExitOk;
}

int cmd_extract_huse(const Common& c, const std::string& refine_path) {
  Common cc = c;
  if (cc.format.empty()) cc.format = "refinement";
  const RunConfig rc = load_run_config(cc);
  if (rc.format != DatasetFormat::refinement)
    throw ConfigError("extract-huse needs format = refinement");
  const auto records = load_records(cc, rc);
  const auto huse = extract_huse(records);
  {
    Output out(c.output);
    write_records(out.stream(), huse, emit_format(c.emit));
  }
  if (!refine_path.empty()) {
    Output out(refine_path);
    write_refine_pairs(out.stream(), huse, records);
  }
  std::cerr << huse.size() << " negatives from " << records.size() << " records\n";
  return kExitOk;
}

int cmd_evaluate(const Common& c, const std::string& pred_path) {
  const RunConfig rc = load_run_config(c);
  const Resources res = Resources::load(rc);
  const auto gold = load_records(c, rc);
  std::ifstream in(pred_path);
  if (!in) throw DataError("cannot open predictions '" + pred_path + "'");
  std::vector<std::optional<Graph>> preds;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      preds.emplace_back(parse_graph(line, graph_format_for(rc.format)));
    } catch (const ParseError& e) {
      std::cerr << pred_path << ":" << preds.size() + 1 << ": unparseable: " << e.what() << '\n';
      preds.emplace_back(std::nullopt);
    }
  }
  const auto oracle = stance_oracle(rc);
  const auto result = evaluate(preds, gold, res.relations, make_similarity(rc), rc.ged,
                               oracle ? &*oracle : nullptr);
  Output out(c.output);
  write_report(out.stream(), result.report, emit_format(c.emit));
  return kExitOk;
}

int cmd_filter(const Common& c, const std::string& candidates_path, bool kept_only) {
  const RunConfig rc = load_run_config(c);
  const Resources res = Resources::load(rc);
  const auto records = load_records(c, rc);
  std::ifstream in(candidates_path);
  if (!in) throw DataError("cannot open candidates '" + candidates_path + "'");
  const auto candidates = read_candidates(in);
  const auto oracle = stance_oracle(rc);
  const auto results = run_huse_gen(records, candidates, res.relations, rc.filter_strategy,
                                    rc.thresholds, oracle ? &*oracle : nullptr);
  Output out(c.output);
  std::size_t kept = 0;
  for (const auto& r : results) {
    kept += r.kept;
    if (kept_only && !r.kept) continue;
    nlohmann::ordered_json j{{"id", r.id},
                             {"ae", r.ae},
                             {"ip", r.ip ? nlohmann::ordered_json(*r.ip) : nlohmann::ordered_json()},
                             {"kept", r.kept},
                             {"graph", r.graph ? serialize_linearized(*r.graph) : std::string()}};
    out.stream() << j.dump() << '\n';
  }
  std::cerr << kept << "/" << results.size() << " candidate sets kept\n";
  return kExitOk;
}

int cmd_loss(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : Config::load(c.config_path);
  // Loss settings only; dataset keys are irrelevant here.
  LossConfig lc;
  lc.alpha = cfg.get_double("loss.alpha", lc.alpha);
  lc.beta = cfg.get_double("loss.beta", lc.beta);
  const std::string mode = cfg.get_string("loss.mm_mode", "conventional-hinge");
  if (mode == "paper-verbatim") lc.mm_mode = MarginMode::paper_verbatim;
  else if (mode != "conventional-hinge") throw ConfigError("loss.mm_mode must be conventional-hinge or paper-verbatim");
  const double tau = cfg.get_double("loss.temperature", kDefaultTemperature);

  std::ifstream in(c.input);
  if (!in) throw DataError("cannot open '" + c.input + "'");
  Output out(c.output);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.stream() << compute_losses(loss_record_from_json(nlohmann::json::parse(line)), lc, tau).dump()
                   << '\n';
    } catch (const std::exception& e) {
      throw DataError(c.input + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explanation-graph toolkit: validation, augmentation, evaluation, losses"};
  app.require_subcommand(1);
  Common c;
  std::string attrition_path, refine_path, pred_path, candidates_path;
  bool kept_only = false;

  auto common = [&c](CLI::App* sub, bool needs_input = true) {
    sub->add_option("--config", c.config_path, "TOML-style config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "Master seed (overrides config)");
    sub->add_option("--format", c.format, "explagraphs | refinement | temporal-dot");
    auto* in = sub->add_option("-i,--input", c.input, "Input file")->check(CLI::ExistingFile);
    if (needs_input) in->required();
    sub->add_option("-o,--output", c.output, "Output file ('-' for stdout)");
    sub->add_option("--emit", c.emit, "jsonl | tsv");
  };

  auto* validate = app.add_subcommand("validate", "Check dataset graphs against the structural constraints");
  common(validate);
  auto* aug = app.add_subcommand("augment", "Generate positive and negative graphs");
  common(aug);
  aug->add_option("--attrition", attrition_path, "Write per-kind attrition JSON here (default stderr)");
  aug->add_option("--refine-pairs", refine_path, "Also write refinement training pairs (JSONL)");
  auto* huse = app.add_subcommand("extract-huse", "Negatives from human refinement history");
  common(huse);
  huse->add_option("--refine-pairs", refine_path, "Also write refinement training pairs (JSONL)");
  auto* eval = app.add_subcommand("evaluate", "Score predicted graphs against gold records");
  common(eval);
  eval->add_option("-p,--predictions", pred_path, "One predicted graph per line")->required();
  auto* filt = app.add_subcommand("filter", "Assemble and filter generated negatives");
  common(filt);
  filt->add_option("--candidates", candidates_path, "Candidate edges JSONL")->required()->check(CLI::ExistingFile);
  filt->add_flag("--kept-only", kept_only, "Emit only kept sets");
  auto* loss = app.add_subcommand("loss", "Compute training losses from log-prob records");
  common(loss);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*validate) return cmd_validate(c);
    if (*aug) return cmd_augment(c, attrition_path, refine_path);
    if (*huse) return cmd_extract_huse(c, refine_path);
    if (*eval) return cmd_evaluate(c, pred_path);
    if (*filt) return cmd_filter(c, candidates_path, kept_only);
    if (*loss) return cmd_loss(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
