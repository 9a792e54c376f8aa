// Command-line front end: decide, maxmean, parametric, bicriterion, oracle
// and validate subcommands over tree files (or standard input with `-`).
//
// Exit codes: 0 success, 1 false decision answer, 2 usage error,
// 3 input or precondition error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subtreeopt/bicriterion.hpp"
#include "subtreeopt/decision.hpp"
#include "subtreeopt/maxmean.hpp"
#include "subtreeopt/oracle.hpp"
#include "subtreeopt/parametric.hpp"
#include "subtreeopt/tree.hpp"

namespace {

using nlohmann::json;
using namespace subtreeopt;

constexpr int kExitOk = 0;
constexpr int kExitFalse = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) { return detail::format_double(v); }

bool g_json = false;

void emit(const json& j, const std::string& text) {
  if (g_json)
    std::cout << j.dump() << "\n";
  else
    std::cout << text << "\n";
}

std::string id_list(const std::vector<NodeId>& ids) {
  std::string s;
  for (NodeId v : ids) {
    if (!s.empty()) s += ' ';
    s += std::to_string(v);
  }
  return s;
}

std::vector<NodeId> kept_nodes(const RootedTree& t, const PruneSet& p) {
  std::vector<char> pruned(t.node_count(), 0);
  for (NodeId v : p.roots) pruned[v] = 1;
  std::vector<NodeId> kept, stack{0};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    kept.push_back(u);
    for (NodeId c : t.children(u))
      if (!pruned[c]) stack.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!detail::parse_double(item, v))
      throw PreconditionError("bad value in list: " + item);
    out.push_back(v);
  }
  return out;
}

int run_decide(const std::string& path, double cutoff, bool strict) {
  RootedTree t = parse_tree(read_input(path));
  DecisionResult r = strict ? has_average_greater_than(t, cutoff)
                            : has_average_at_least(t, cutoff);
  emit(json{{"answer", r.answer}, {"prune", r.prune.roots}},
       std::string(r.answer ? "true" : "false"));
  if (!g_json) std::cout << "prune " << id_list(r.prune.roots) << "\n";
  return r.answer ? kExitOk : kExitFalse;
}

int run_maxmean(const std::string& path, bool stats, MaxMeanOptions opts) {
  RootedTree t = parse_tree(read_input(path));
  MaxMeanResult r = solve_max_mean(t, opts);
  auto nodes = kept_nodes(t, r.prune);
  json j{{"optavg", r.optavg}, {"nodes", nodes}, {"prune", r.prune.roots}};
  if (stats) {
    j["iterations"] = r.iterations;
    json phis = json::array();
    for (const auto& it : r.trace)
      phis.push_back({{"live", it.live},
                      {"in_range", it.in_range},
                      {"phi", it.live + it.in_range},
                      {"touched", it.touched}});
    j["trace"] = phis;
  }
  emit(j, "optavg=" + fmt(r.optavg));
  if (!g_json) {
    std::cout << "nodes " << id_list(nodes) << "\n";
    if (stats) {
      std::cout << "iterations " << r.iterations << "\n";
      for (std::size_t k = 0; k < r.trace.size(); ++k) {
        const auto& it = r.trace[k];
        std::cout << "iter " << k << " live " << it.live << " in_range "
                  << it.in_range << " phi " << it.live + it.in_range
                  << " touched " << it.touched << "\n";
      }
    }
  }
  return kExitOk;
}

int run_parametric(const std::string& path, bool events, double at,
                   bool has_at, bool clamp_root) {
  RootedTree t = parse_tree(read_input(path));
  if (has_at) {
    auto [prune, weight] = max_subtree_at(t, at);
    auto nodes = kept_nodes(t, prune);
    emit(json{{"lambda", at}, {"weight", weight}, {"nodes", nodes}},
         "weight=" + fmt(weight));
    if (!g_json) std::cout << "nodes " << id_list(nodes) << "\n";
    return kExitOk;
  }
  ParametricSolution sol = solve_parametric(t, ParametricOptions{clamp_root});
  for (const EnvelopeSegment& s : sol.envelope)
    emit(json{{"lambda_start", s.lambda_start},
              {"lambda_end",
               std::isfinite(s.lambda_end) ? json(s.lambda_end) : json()},
              {"slope", s.slope},
              {"intercept", s.intercept}},
         fmt(s.lambda_start) + " " + fmt(s.lambda_end) + " " + fmt(s.slope) +
             " " + fmt(s.intercept));
  if (events)
    for (const PruneEvent& e : sol.events)
      emit(json{{"lambda", e.lambda},
                {"node", e.node},
                {"event", e.kind == EventKind::kPrune ? "prune" : "unprune"}},
           "event " + fmt(e.lambda) + " " + std::to_string(e.node) + " " +
               (e.kind == EventKind::kPrune ? "prune" : "unprune"));
  return kExitOk;
}

int run_bicriterion(const std::string& path, const std::string& objective,
                    const std::string& direction, bool hull) {
  RootedTree t = parse_tree(read_input(path));
  if (hull) {
    for (const HullPoint& p : hull_points(t))
      emit(json{{"x", p.x},
                {"y", p.y},
                {"orientation",
                 p.orientation == HullSide::kUpper ? "upper" : "lower"}},
           "hull " + fmt(p.x) + " " + fmt(p.y) + " " +
               (p.orientation == HullSide::kUpper ? "upper" : "lower"));
    return kExitOk;
  }
  Objective obj;
  if (objective == "ratio")
    obj = Objective::ratio();
  else if (objective == "reliability")
    obj = Objective::reliability();
  else if (objective == "stochastic")
    obj = Objective::stochastic();
  else if (objective == "variance")
    obj = Objective::variance();
  else
    throw CLI::ValidationError("unknown objective: " + objective);
  if (direction == "max")
    obj.direction = Direction::kMaximize;
  else if (direction == "min")
    obj.direction = Direction::kMinimize;
  else if (!direction.empty())
    throw CLI::ValidationError("unknown direction: " + direction);
  BicriterionResult r = optimize(t, obj);
  auto nodes = kept_nodes(t, r.prune);
  emit(json{{"value", r.value}, {"x", r.x}, {"y", r.y}, {"nodes", nodes}},
       "value=" + fmt(r.value));
  if (!g_json) {
    std::cout << "x=" << fmt(r.x) << " y=" << fmt(r.y) << "\n";
    std::cout << "nodes " << id_list(nodes) << "\n";
  }
  return kExitOk;
}

int run_validate(const std::string& path) {
  RootedTree t = parse_tree(read_input(path));
  emit(json{{"nodes", t.node_count()}, {"valid", true}},
       "nodes=" + std::to_string(t.node_count()));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal root-containing subtree selection on rooted trees"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output encoding")
      ->check(CLI::IsMember({"text", "json-lines"}));

  // decide
  auto* decide = app.add_subcommand(
      "decide", "Does some root subtree have mean >= (or >) a cutoff?");
  double cutoff = 0;
  bool strict = false;
  std::string decide_file;
  decide->add_option("--cutoff", cutoff, "Mean cutoff")->required();
  decide->add_flag("--strict", strict, "Test strict inequality instead");
  decide->add_option("treefile", decide_file, "Input tree ('-' for stdin)")
      ->required();

  // maxmean
  auto* maxmean = app.add_subcommand(
      "maxmean", "Maximum-mean root subtree (positive costs)");
  bool stats = false;
  MaxMeanOptions mm_opts;
  std::string maxmean_file;
  maxmean->add_flag("--stats", stats, "Print per-iteration statistics");
  maxmean->add_option("--seed", mm_opts.seed, "Median-selection seed");
  maxmean->add_flag("--deterministic-median", mm_opts.deterministic_median,
                    "Use worst-case-linear median selection");
  maxmean->add_option("treefile", maxmean_file, "Input tree ('-' for stdin)")
      ->required();

  // parametric
  auto* parametric = app.add_subcommand(
      "parametric", "Envelope of max subtree weight over lambda >= 0");
  bool events = false, clamp_root = false;
  double at = 0;
  std::string parametric_file;
  parametric->add_flag("--events", events, "Also print prune/unprune events");
  auto* at_opt = parametric->add_option(
      "--at", at, "Print the optimal subtree for this lambda only");
  parametric->add_flag("--clamp-root", clamp_root,
                       "Clamp the root function at zero as well");
  parametric
      ->add_option("treefile", parametric_file, "Input tree ('-' for stdin)")
      ->required();

  // bicriterion
  auto* bicriterion = app.add_subcommand(
      "bicriterion", "Optimize f(X, Y) over the subtree hull points");
  std::string objective, direction;
  bool hull = false;
  bicriterion
      ->add_option("--objective", objective,
                   "ratio | reliability | stochastic | variance")
      ->check(CLI::IsMember({"ratio", "reliability", "stochastic", "variance"}));
  bicriterion->add_option("--direction", direction, "max | min")
      ->check(CLI::IsMember({"max", "min"}));
  bicriterion->add_flag("--hull", hull, "Print all hull points instead");
  std::string bicriterion_file;
  bicriterion
      ->add_option("treefile", bicriterion_file, "Input tree ('-' for stdin)")
      ->required();

  // oracle
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "Brute-force references and instance generators");
  oracle_cmd->require_subcommand(1);
  auto* oracle_maxmean =
      oracle_cmd->add_subcommand("maxmean", "Exhaustive maximum mean");
  std::string oracle_file;
  oracle_maxmean
      ->add_option("treefile", oracle_file, "Input tree ('-' for stdin)")
      ->required();
  auto* oracle_gadget = oracle_cmd->add_subcommand(
      "gadget", "Emit the subset-sum star gadget as a tree file");
  std::string gadget_values;
  std::int64_t gadget_target = 0;
  double gadget_offset = 0;
  oracle_gadget->add_option("--values", gadget_values, "Comma-separated values")
      ->required();
  oracle_gadget->add_option("--target", gadget_target, "Desired total")
      ->required();
  oracle_gadget->add_option("--offset", gadget_offset,
                            "Root cost offset (avoids division by zero)");
  auto* oracle_sortgen = oracle_cmd->add_subcommand(
      "sortgen", "Emit the sorting-reduction star as a tree file");
  std::string sort_values;
  oracle_sortgen->add_option("--values", sort_values, "Comma-separated values")
      ->required();

  // validate
  auto* validate = app.add_subcommand("validate", "Parse and check a tree file");
  std::string validate_file;
  validate->add_option("treefile", validate_file, "Input tree ('-' for stdin)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g_json = format == "json-lines";

  try {
    if (*decide) return run_decide(decide_file, cutoff, strict);
    if (*maxmean) return run_maxmean(maxmean_file, stats, mm_opts);
    if (*parametric)
      return run_parametric(parametric_file, events, at, at_opt->count() > 0,
                            clamp_root);
    if (*bicriterion)
      return run_bicriterion(bicriterion_file, objective, direction, hull);
    if (*oracle_cmd) {
      if (*oracle_maxmean) {
        RootedTree t = parse_tree(read_input(oracle_file));
        auto r = subtreeopt::oracle::brute_max_mean(t);
        emit(json{{"optavg", r.optavg}, {"prune", r.prune.roots}},
             "optavg=" + fmt(r.optavg));
        if (!g_json) std::cout << "prune " << id_list(r.prune.roots) << "\n";
        return kExitOk;
      }
      if (*oracle_gadget) {
        subtreeopt::oracle::SubsetSumInstance inst;
        for (double v : parse_value_list(gadget_values))
          inst.values.push_back(static_cast<std::int64_t>(v));
        inst.target = gadget_target;
        std::cout << serialize_tree(
            subtreeopt::oracle::gadget_from_subset_sum(inst, gadget_offset));
        return kExitOk;
      }
      if (*oracle_sortgen) {
        std::cout << serialize_tree(
            subtreeopt::oracle::sorting_instance(parse_value_list(sort_values)));
        return kExitOk;
      }
    }
    if (*validate) return run_validate(validate_file);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
