#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subtreeopt {

using NodeId = std::int32_t;
inline constexpr NodeId kNoParent = -1;

enum class ParseErrorKind {
  kMalformed,
  kCycle,
  kMultipleRoots,
  kDanglingParent,
  kNonFinite,
  kDuplicateNode,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ParseErrorKind kind() const { return kind_; }

 private:
  ParseErrorKind kind_;
};

// Violated operation contract: bad cutoff, non-positive cost, invalid prune
// set, enumeration guard, absent key and the like.
class PreconditionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Set of pruned subtree roots. Valid sets are sorted, duplicate-free, never
// contain the tree root, and no member is a descendant of another.
struct PruneSet {
  std::vector<NodeId> roots;

  void normalize() {
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  }
  bool operator==(const PruneSet& other) const { return roots == other.roots; }
};

// Immutable rooted tree with two real values per node. Node ids are dense
// 0..n-1 with the root at id 0; children are stored in declaration order in
// a flat CSR layout.
class RootedTree {
 public:
  // Builds a tree from per-node parent links (exactly one kNoParent entry).
  // Nodes are relabeled so the root gets id 0 and the remaining nodes keep
  // their relative declaration order.
  static RootedTree from_parents(std::span<const NodeId> parents,
                                 std::span<const double> value_a,
                                 std::span<const double> value_b);

  NodeId node_count() const { return n_; }
  NodeId parent(NodeId v) const { return parent_[v]; }
  std::span<const NodeId> children(NodeId v) const {
    return {child_data_.data() + child_offset_[v],
            static_cast<std::size_t>(child_offset_[v + 1] - child_offset_[v])};
  }
  double value_a(NodeId v) const { return a_[v]; }
  double value_b(NodeId v) const { return b_[v]; }
  std::span<const double> values_a() const { return a_; }
  std::span<const double> values_b() const { return b_; }

  bool all_costs_positive() const {
    return std::all_of(b_.begin(), b_.end(), [](double c) { return c > 0; });
  }

  // Same structure with different node values (used for sign-flipped solves).
  RootedTree with_values(std::vector<double> value_a,
                         std::vector<double> value_b) const {
    RootedTree t(*this);
    if (static_cast<NodeId>(value_a.size()) != n_ ||
        static_cast<NodeId>(value_b.size()) != n_)
      throw PreconditionError("with_values: size mismatch");
    t.a_ = std::move(value_a);
    t.b_ = std::move(value_b);
    return t;
  }

  // Children-before-parents order; iterative, safe for deep trees.
  std::vector<NodeId> postorder() const {
    std::vector<NodeId> order;
    order.reserve(n_);
    std::vector<NodeId> stack{0};
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      order.push_back(u);
      for (NodeId c : children(u)) stack.push_back(c);
    }
    std::reverse(order.begin(), order.end());
    return order;
  }

 private:
  RootedTree() = default;

  NodeId n_ = 0;
  std::vector<NodeId> parent_;
  std::vector<std::int64_t> child_offset_;  // n_+1 entries
  std::vector<NodeId> child_data_;
  std::vector<double> a_;
  std::vector<double> b_;
};

inline RootedTree RootedTree::from_parents(std::span<const NodeId> parents,
                                           std::span<const double> value_a,
                                           std::span<const double> value_b) {
  const auto n = static_cast<NodeId>(parents.size());
  if (n == 0) throw ParseError(ParseErrorKind::kMalformed, "empty tree");
  if (value_a.size() != parents.size() || value_b.size() != parents.size())
    throw PreconditionError("from_parents: size mismatch");

  NodeId root = kNoParent;
  for (NodeId v = 0; v < n; ++v) {
    if (parents[v] == kNoParent) {
      if (root != kNoParent)
        throw ParseError(ParseErrorKind::kMultipleRoots,
                         "more than one root node");
      root = v;
    } else if (parents[v] < 0 || parents[v] >= n) {
      throw ParseError(ParseErrorKind::kDanglingParent,
                       "parent reference out of range");
    }
    if (!std::isfinite(value_a[v]) || !std::isfinite(value_b[v]))
      throw ParseError(ParseErrorKind::kNonFinite,
                       "non-finite node value at node " + std::to_string(v));
  }
  if (root == kNoParent)
    throw ParseError(ParseErrorKind::kCycle, "no root node (cycle)");

  // Relabel: root -> 0, everything else keeps declaration order.
  std::vector<NodeId> relabel(n);
  NodeId next = 1;
  for (NodeId v = 0; v < n; ++v) relabel[v] = (v == root) ? 0 : next++;

  RootedTree t;
  t.n_ = n;
  t.parent_.assign(n, kNoParent);
  t.a_.resize(n);
  t.b_.resize(n);
  std::vector<NodeId> child_count(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    NodeId nv = relabel[v];
    t.a_[nv] = value_a[v];
    t.b_[nv] = value_b[v];
    if (v != root) {
      t.parent_[nv] = relabel[parents[v]];
      ++child_count[t.parent_[nv]];
    }
  }
  t.child_offset_.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v)
    t.child_offset_[v + 1] = t.child_offset_[v] + child_count[v];
  t.child_data_.resize(t.child_offset_[n]);
  std::vector<std::int64_t> fill(t.child_offset_.begin(),
                                 t.child_offset_.end() - 1);
  for (NodeId v = 0; v < n; ++v) {  // declaration order keeps child order
    if (v == root) continue;
    NodeId nv = relabel[v];
    t.child_data_[fill[t.parent_[nv]]++] = nv;
  }

  // Everything must be reachable from the root, otherwise a cycle hides in
  // the unreachable part.
  std::vector<NodeId> stack{0};
  NodeId seen = 0;
  std::vector<char> visited(n, 0);
  visited[0] = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    ++seen;
    for (NodeId c : t.children(u)) {
      if (!visited[c]) {
        visited[c] = 1;
        stack.push_back(c);
      }
    }
  }
  if (seen != n)
    throw ParseError(ParseErrorKind::kCycle, "cycle detected among parents");
  return t;
}

namespace detail {

// Shortest-round-trip-safe, locale-independent double formatting.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

inline bool parse_int(std::string_view s, std::int64_t& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

}  // namespace detail

enum class TreeFormat { kEdgeList, kNested };

// Edge-list format: one node per line, `<id> <parent-id|-> <valueA> <valueB>`,
// `#` starts a comment. Node ids may be arbitrary non-negative integers.
inline RootedTree parse_edge_list(std::string_view text) {
  std::vector<std::int64_t> ids;
  std::vector<std::int64_t> parent_ids;  // -1 for root
  std::vector<double> va, vb;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);

    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }
    if (fields.empty()) continue;
    if (fields.size() != 4)
      throw ParseError(ParseErrorKind::kMalformed,
                       "line " + std::to_string(line_no) +
                           ": expected `id parent valueA valueB`");
    std::int64_t id;
    if (!detail::parse_int(fields[0], id) || id < 0)
      throw ParseError(ParseErrorKind::kMalformed,
                       "line " + std::to_string(line_no) + ": bad node id");
    std::int64_t par = -1;
    if (fields[1] != "-") {
      if (!detail::parse_int(fields[1], par) || par < 0)
        throw ParseError(ParseErrorKind::kMalformed,
                         "line " + std::to_string(line_no) + ": bad parent id");
    }
    double a, b;
    if (!detail::parse_double(fields[2], a) || !detail::parse_double(fields[3], b))
      throw ParseError(ParseErrorKind::kMalformed,
                       "line " + std::to_string(line_no) + ": bad numeric value");
    if (!std::isfinite(a) || !std::isfinite(b))
      throw ParseError(ParseErrorKind::kNonFinite,
                       "line " + std::to_string(line_no) + ": non-finite value");
    ids.push_back(id);
    parent_ids.push_back(par);
    va.push_back(a);
    vb.push_back(b);
  }
  if (ids.empty())
    throw ParseError(ParseErrorKind::kMalformed, "no nodes in input");

  // Map declared ids to declaration positions.
  std::vector<std::pair<std::int64_t, NodeId>> index;
  index.reserve(ids.size());
  for (std::size_t v = 0; v < ids.size(); ++v)
    index.emplace_back(ids[v], static_cast<NodeId>(v));
  std::sort(index.begin(), index.end());
  for (std::size_t v = 1; v < index.size(); ++v)
    if (index[v].first == index[v - 1].first)
      throw ParseError(ParseErrorKind::kDuplicateNode,
                       "node id " + std::to_string(index[v].first) +
                           " declared twice");
  auto lookup = [&](std::int64_t id) -> NodeId {
    auto it = std::lower_bound(index.begin(), index.end(),
                               std::make_pair(id, NodeId{0}));
    if (it == index.end() || it->first != id)
      throw ParseError(ParseErrorKind::kDanglingParent,
                       "parent id " + std::to_string(id) + " never declared");
    return it->second;
  };

  std::vector<NodeId> parents(ids.size());
  for (std::size_t v = 0; v < ids.size(); ++v)
    parents[v] = parent_ids[v] < 0 ? kNoParent : lookup(parent_ids[v]);
  return RootedTree::from_parents(parents, va, vb);
}

// Nested format: `(valueA valueB child child ...)`. Ids are assigned in
// preorder. Iterative so deeply nested inputs cannot overflow the stack.
inline RootedTree parse_nested(std::string_view text) {
  std::vector<NodeId> parents;
  std::vector<double> va, vb;
  std::vector<NodeId> stack;
  bool root_done = false;

  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto next_number = [&](double& out) {
    skip_ws();
    std::size_t j = i;
    while (j < text.size() && text[j] != '(' && text[j] != ')' &&
           !std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    if (j == i || !detail::parse_double(text.substr(i, j - i), out))
      throw ParseError(ParseErrorKind::kMalformed,
                       "expected numeric value in nested record");
    i = j;
  };

  while (true) {
    skip_ws();
    if (i >= text.size()) break;
    char c = text[i];
    if (c == '(') {
      if (stack.empty() && root_done)
        throw ParseError(ParseErrorKind::kMultipleRoots,
                         "more than one top-level record");
      ++i;
      double a, b;
      next_number(a);
      next_number(b);
      if (!std::isfinite(a) || !std::isfinite(b))
        throw ParseError(ParseErrorKind::kNonFinite,
                         "non-finite value in nested record");
      auto id = static_cast<NodeId>(parents.size());
      parents.push_back(stack.empty() ? kNoParent : stack.back());
      va.push_back(a);
      vb.push_back(b);
      stack.push_back(id);
    } else if (c == ')') {
      if (stack.empty())
        throw ParseError(ParseErrorKind::kMalformed, "unbalanced ')'");
      stack.pop_back();
      if (stack.empty()) root_done = true;
      ++i;
    } else {
      throw ParseError(ParseErrorKind::kMalformed,
                       std::string("unexpected character '") + c + "'");
    }
  }
  if (!stack.empty())
    throw ParseError(ParseErrorKind::kMalformed, "unbalanced '('");
  if (parents.empty())
    throw ParseError(ParseErrorKind::kMalformed, "no nodes in input");
  return RootedTree::from_parents(parents, va, vb);
}

inline RootedTree parse_tree(std::string_view text, TreeFormat format) {
  return format == TreeFormat::kEdgeList ? parse_edge_list(text)
                                         : parse_nested(text);
}

// Sniffs the format: a leading '(' (ignoring whitespace and comment lines)
// selects the nested format.
inline RootedTree parse_tree(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      std::size_t eol = text.find('\n', i);
      i = (eol == std::string_view::npos) ? text.size() : eol + 1;
    } else {
      break;
    }
  }
  bool nested = i < text.size() && text[i] == '(';
  return parse_tree(text, nested ? TreeFormat::kNested : TreeFormat::kEdgeList);
}

// Emits the canonical edge-list form, 17 significant digits.
inline std::string serialize_tree(const RootedTree& t) {
  std::string out;
  out.reserve(static_cast<std::size_t>(t.node_count()) * 24);
  for (NodeId v = 0; v < t.node_count(); ++v) {
    out += std::to_string(v);
    out += ' ';
    if (t.parent(v) == kNoParent)
      out += '-';
    else
      out += std::to_string(t.parent(v));
    out += ' ';
    out += detail::format_double(t.value_a(v));
    out += ' ';
    out += detail::format_double(t.value_b(v));
    out += '\n';
  }
  return out;
}

// Throws PreconditionError unless `p` is a valid prune set for `t`.
inline void validate_prune_set(const RootedTree& t, const PruneSet& p) {
  for (std::size_t i = 0; i < p.roots.size(); ++i) {
    NodeId v = p.roots[i];
    if (v <= 0 || v >= t.node_count())
      throw PreconditionError(
          v == 0 ? "prune set contains the tree root"
                 : "prune set contains an unknown node id");
    if (i > 0 && p.roots[i - 1] >= v)
      throw PreconditionError("prune set not sorted or has duplicates");
  }
  if (p.roots.empty()) return;
  // Antichain: walking down from the root, a pruned node must never appear
  // inside another pruned subtree.
  std::vector<char> pruned(t.node_count(), 0);
  for (NodeId v : p.roots) pruned[v] = 1;
  std::vector<std::pair<NodeId, char>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [u, under] = stack.back();
    stack.pop_back();
    if (pruned[u] && under)
      throw PreconditionError(
          "prune set violates the antichain property at node " +
          std::to_string(u));
    char now = under | pruned[u];
    for (NodeId c : t.children(u)) stack.emplace_back(c, now);
  }
}

// Sums of (valueA, valueB) over the unpruned nodes; the root is always kept.
inline std::pair<double, double> subtree_sums(const RootedTree& t,
                                              const PruneSet& p) {
  validate_prune_set(t, p);
  std::vector<char> pruned(t.node_count(), 0);
  for (NodeId v : p.roots) pruned[v] = 1;
  double sa = 0, sb = 0;
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    sa += t.value_a(u);
    sb += t.value_b(u);
    for (NodeId c : t.children(u))
      if (!pruned[c]) stack.push_back(c);
  }
  return {sa, sb};
}

}  // namespace subtreeopt
