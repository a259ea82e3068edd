#pragma once

#include "monofam/isomorphism.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace monofam {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

inline json exponent_to_json(double q) {
  if (q == kInfExp) return json("inf");
  return json(q);
}

inline double exponent_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfExp;
    throw std::invalid_argument("exponent: expected a number or \"inf\"");
  }
  return j.get<double>();
}

inline json to_json(const TimeGrid& g) {
  return json{{"t_start", g.t_start}, {"t_end", g.t_end}, {"nodes", g.nodes}};
}

inline TimeGrid grid_from_json(const json& j) {
  return TimeGrid(j.at("t_start").get<double>(), j.at("t_end").get<double>(),
                  j.at("nodes").get<std::vector<double>>());
}

inline json to_json(const NormedNode& n) {
  json out;
  out["dim"] = n.dim;
  if (const auto* lq = std::get_if<WeightedLq>(&n.kind)) {
    out["kind"] = "weighted_lq";
    out["q"] = exponent_to_json(lq->q);
    out["weights"] = std::vector<double>(lq->weights.begin(), lq->weights.end());
  } else {
    const auto& h1 = std::get<DiscreteH1>(n.kind);
    out["kind"] = "discrete_h1";
    out["dx"] = h1.dx;
    out["cell_weights"] =
        std::vector<double>(h1.cell_weights.begin(), h1.cell_weights.end());
  }
  return out;
}

inline NormedNode node_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "weighted_lq") {
    auto w = j.at("weights").get<std::vector<double>>();
    return NormedNode::weighted_lq(exponent_from_json(j.at("q")),
                                   Eigen::Map<Vector>(w.data(), w.size()));
  }
  if (kind == "discrete_h1") {
    auto w = j.at("cell_weights").get<std::vector<double>>();
    return NormedNode::discrete_h1(j.at("dx").get<double>(),
                                   Eigen::Map<Vector>(w.data(), w.size()));
  }
  throw std::invalid_argument("node: unknown norm kind '" + kind + "'");
}

/// Family descriptor: named builder, or explicit nodes plus adjacent
/// row-major dense transition matrices.
inline MonotoneFamily family_from_json(const json& j) {
  TimeGrid grid = grid_from_json(j.at("grid"));
  const std::string label = j.value("label", std::string("family"));

  if (j.contains("builder")) {
    const json& b = j.at("builder");
    const std::string kind = b.at("kind").get<std::string>();
    const json params = b.value("params", json::object());
    const int mesh = params.value("mesh", 64);
    auto lengths_fn = [&params](const char* key) -> std::function<double(double)> {
      if (params.contains(key)) {
        const std::string name = params.at(key).get<std::string>();
        if (name == "one_minus_half_t") return [](double t) { return 1.0 - 0.5 * t; };
        if (name == "constant") return [](double) { return 1.0; };
        throw std::invalid_argument("builder: unknown lengths rule '" + name + "'");
      }
      return [](double t) { return 1.0 - 0.5 * t; };
    };
    MonotoneFamily f;
    if (kind == "nested_lq") {
      f = build_nested_lq(lengths_fn("lengths"), exponent_from_json(params.value("q", json(2.0))),
                          mesh, std::move(grid));
    } else if (kind == "sup_counterexample") {
      f = build_sup_counterexample(mesh, std::move(grid));
    } else if (kind == "affine_composition") {
      f = build_affine_composition(mesh, std::move(grid));
    } else if (kind == "weighted_hilbert") {
      f = build_weighted_hilbert(mesh, std::move(grid));
    } else {
      throw std::invalid_argument("builder: unknown kind '" + kind + "'");
    }
    f.label = label;
    return f;
  }

  std::vector<NormedNode> nodes;
  for (const json& nj : j.at("nodes")) nodes.push_back(node_from_json(nj));
  std::vector<TransitionOp> adjacent;
  for (const json& tj : j.at("transitions")) {
    const size_t to = adjacent.size() + 1;
    if (to >= nodes.size())
      throw std::invalid_argument("family: more transitions than grid cells");
    const int rows = nodes[to].dim, cols = nodes[to - 1].dim;
    auto flat = tj.get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != rows * cols)
      throw std::invalid_argument("family: transition matrix has wrong size");
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = flat[r * cols + c];
    adjacent.push_back(TransitionOp::dense_map(std::move(m)));
  }
  return build_explicit(std::move(grid), std::move(nodes), std::move(adjacent), label);
}

inline json to_json(const MonotoneFamily& f) {
  json out;
  out["label"] = f.label;
  out["grid"] = to_json(f.grid);
  out["reversed_orientation"] = f.reversed_orientation;
  json nodes = json::array();
  for (const auto& n : f.node_spaces) nodes.push_back(to_json(n));
  out["nodes"] = nodes;
  json trans = json::array();
  for (size_t k = 0; k < f.adjacent.size(); ++k) {
    Matrix m = f.adjacent[k].as_matrix(f.node_spaces[k].dim);
    std::vector<double> flat;
    flat.reserve(m.size());
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    trans.push_back(flat);
  }
  out["transitions"] = trans;
  return out;
}

inline json to_json(const Section& s, const std::string& family_ref) {
  json vals = json::array();
  for (const auto& v : s.values) vals.push_back(std::vector<double>(v.begin(), v.end()));
  return json{{"family_ref", family_ref}, {"values", vals}};
}

inline Section section_from_json(const json& j, FamilyPtr family) {
  Section s;
  s.family = std::move(family);
  for (const json& vj : j.at("values")) {
    auto flat = vj.get<std::vector<double>>();
    s.values.push_back(Eigen::Map<Vector>(flat.data(), flat.size()));
  }
  s.validate();
  return s;
}

/// Isomorphism descriptor: {kind:"identity"} or {kind:"weight", w:...} with w
/// a named rule ("affine" = 1+t/2, "step" = 1 before 0.5 and 2 after) or a
/// per-node array.
inline FamilyIsomorphism iso_from_json(const json& j, const MonotoneFamily& fam) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") return identity_isomorphism(fam);
  if (kind != "weight") throw std::invalid_argument("iso: unknown kind '" + kind + "'");
  const json& wj = j.at("w");
  if (wj.is_string()) {
    const std::string name = wj.get<std::string>();
    if (name == "affine")
      return weight_isomorphism(fam, [](double t) { return 1.0 + 0.5 * t; });
    if (name == "step")
      return weight_isomorphism(fam, [](double t) { return t < 0.5 ? 1.0 : 2.0; });
    throw std::invalid_argument("iso: unknown weight rule '" + name + "'");
  }
  return weight_isomorphism(fam, wj.get<std::vector<double>>());
}

inline json to_json(const VerificationReport& r) {
  json out;
  out["property_name"] = r.property_name;
  out["status"] = to_string(r.status);
  out["worst_residual"] = r.worst_residual;
  if (r.witness) {
    out["witness"] = json{{"indices", r.witness->indices}, {"note", r.witness->note}};
  }
  if (!r.metrics.empty()) out["metrics"] = r.metrics;
  return out;  // runtime_ms stays out of serialized reports on purpose
}

inline json to_json(const IsomorphismReport& r) {
  json pairs = json::array();
  for (const auto& pr : r.per_pair_ratios)
    pairs.push_back(json{{"i", pr.i}, {"j", pr.j}, {"forward", pr.forward},
                         {"inverse", pr.inverse}});
  return json{{"sup_forward", r.sup_forward},
              {"sup_inverse", r.sup_inverse},
              {"M_forward", r.M_forward},
              {"M_inverse", r.M_inverse},
              {"per_pair_ratios", pairs}};
}

inline json to_json(const BlowupTable& tb) {
  json rows = json::array();
  for (const auto& r : tb.rows)
    rows.push_back(
        json{{"n", r.n}, {"matched_ratio", r.matched_ratio}, {"fixed_ratio", r.fixed_ratio}});
  return json{{"s", tb.s},           {"t", tb.t},       {"a", tb.a},
              {"mesh", tb.mesh},     {"cusp_exponent", tb.cusp_exponent},
              {"rows", rows}};
}

// ---------------------------------------------------------------------------
// files
// ---------------------------------------------------------------------------

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // map the byte offset to line/column for the CLI's usage errors
    size_t line = 1, col = 1;
    for (size_t k = 0; k < std::min(text.size(), e.byte); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::invalid_argument(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

inline std::string csv_format(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string section_norms_csv(const Section& u) {
  std::string out = "t,node_norm\n";
  for (int i = 0; i < u.size(); ++i)
    out += csv_format(u.fam().grid.node(i)) + "," + csv_format(u.node_norm(i)) + "\n";
  return out;
}

inline std::string gradient_csv(const TimeGrid& g, const UpperGradient& ug) {
  std::string out = "cell,t_left,t_right,g\n";
  for (int k = 0; k < ug.cell_values.size(); ++k)
    out += std::to_string(k) + "," + csv_format(g.node(k)) + "," + csv_format(g.node(k + 1)) +
           "," + csv_format(ug.cell_values[k]) + "\n";
  return out;
}

inline std::string pair_ratios_csv(const TimeGrid& g, const IsomorphismReport& rep) {
  std::string out = "s,t,forward_ratio,inverse_ratio\n";
  for (const auto& pr : rep.per_pair_ratios)
    out += csv_format(g.node(pr.i)) + "," + csv_format(g.node(pr.j)) + "," +
           csv_format(pr.forward) + "," + csv_format(pr.inverse) + "\n";
  return out;
}

inline std::string blowup_csv(const BlowupTable& tb) {
  std::string out = "n,matched_ratio,fixed_ratio\n";
  for (const auto& r : tb.rows)
    out += std::to_string(r.n) + "," + csv_format(r.matched_ratio) + "," +
           csv_format(r.fixed_ratio) + "\n";
  return out;
}

}  // namespace monofam
