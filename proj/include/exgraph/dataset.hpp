#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exgraph/codec.hpp"
#include "exgraph/config.hpp"
#include "exgraph/graph.hpp"
#include "exgraph/metrics.hpp"
#include "exgraph/structure.hpp"

namespace exgraph {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DatasetFormat { explagraphs, refinement, temporal_dot };

inline std::optional<DatasetFormat> parse_dataset_format(std::string_view s) {
  if (s == "explagraphs") return DatasetFormat::explagraphs;
  if (s == "refinement") return DatasetFormat::refinement;
  if (s == "temporal-dot") return DatasetFormat::temporal_dot;
  return std::nullopt;
}

inline std::string_view to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::explagraphs: return "explagraphs";
    case DatasetFormat::refinement: return "refinement";
    case DatasetFormat::temporal_dot: return "temporal-dot";
  }
  return "";
}

/// Zero-based TSV column positions; -1 marks an absent column. For the
/// refinement format every column from `graph` onward holds one graph of the
/// refinement chain (G1, G2, ...), the last non-empty one being final.
struct TsvColumns {
  int belief = 0;
  int argument = 1;
  int stance = 2;
  int graph = 3;
  bool header = false;

  static TsvColumns defaults(DatasetFormat f) {
    if (f == DatasetFormat::temporal_dot) return TsvColumns{0, -1, -1, 1, false};
    return TsvColumns{};
  }

  // Overrides from a `[tsv]` config block.
  static TsvColumns from_config(const Config& cfg, DatasetFormat f) {
    TsvColumns c = defaults(f);
    c.belief = static_cast<int>(cfg.get_int("tsv.belief", c.belief));
    c.argument = static_cast<int>(cfg.get_int("tsv.argument", c.argument));
    c.stance = static_cast<int>(cfg.get_int("tsv.stance", c.stance));
    c.graph = static_cast<int>(cfg.get_int("tsv.graph", c.graph));
    c.header = cfg.get_bool("tsv.header", c.header);
    if (c.graph < 0) throw ConfigError("tsv.graph must be a column index");
    return c;
  }
};

struct DatasetRecord {
  std::string id;
  std::string belief;
  std::string argument;
  std::optional<Stance> stance;
  Graph gold_graph;
  /// Successive refinements G1, G2, ...; the final entry equals gold_graph.
  std::vector<Graph> refinement_chain;
};

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<DatasetRecord> records;
  std::vector<LineError> errors;
};

inline GraphFormat graph_format_for(DatasetFormat f) {
  return f == DatasetFormat::temporal_dot ? GraphFormat::dot : GraphFormat::linearized;
}

/// Reads one record per line. Malformed lines are reported in `errors` and
/// skipped; nothing is thrown for per-line problems.
inline IngestResult ingest(std::istream& in, DatasetFormat format, const TsvColumns& cols,
                           const std::string& source = "") {
  IngestResult result;
  std::string line;
  std::size_t lineno = 0;
  auto column = [](const std::vector<std::string>& c, int idx) -> std::string {
    if (idx < 0) return {};
    if (static_cast<std::size_t>(idx) >= c.size())
      throw DataError("missing column " + std::to_string(idx));
    return c[static_cast<std::size_t>(idx)];
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && cols.header) continue;
    if (trim(line).empty()) continue;
    try {
      auto c = split(line, '\t');
      DatasetRecord r;
      r.id = (source.empty() ? std::string() : source + ":") + std::to_string(lineno);
      r.belief = column(c, cols.belief);
      r.argument = column(c, cols.argument);
      if (cols.stance >= 0) {
        const std::string s = column(c, cols.stance);
        r.stance = parse_stance(s);
        if (!r.stance || *r.stance == Stance::incorrect)
          throw DataError("unknown stance '" + s + "'");
      }
      const GraphFormat gf = graph_format_for(format);
      if (format == DatasetFormat::refinement) {
        for (std::size_t i = static_cast<std::size_t>(cols.graph); i < c.size(); ++i) {
          if (trim(c[i]).empty()) continue;
          r.refinement_chain.push_back(
              tag_provenance(parse_graph(c[i], gf), r.belief, r.argument));
        }
        if (r.refinement_chain.empty()) throw DataError("no graph columns");
        r.gold_graph = r.refinement_chain.back();
      } else {
        r.gold_graph = tag_provenance(parse_graph(column(c, cols.graph), gf), r.belief, r.argument);
      }
      if (r.gold_graph.edge_count() == 0) throw DataError("empty graph");
      result.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      result.errors.push_back({lineno, e.what()});
    }
  }
  return result;
}

/// File variant; fails only when no line parses.
inline IngestResult ingest_file(const std::string& path, DatasetFormat format,
                                const TsvColumns& cols) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  auto result = ingest(in, format, cols);
  if (result.records.empty()) {
    std::string why = result.errors.empty() ? "file is empty" : result.errors.front().message;
    throw DataError("'" + path + "': no records parsed (" + why + ")");
  }
  return result;
}

}  // namespace exgraph
