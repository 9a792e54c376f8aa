#include "subtreeopt/tree.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace subtreeopt;

TEST(TreeModel, ParsesEdgeList) {
  RootedTree t = parse_tree("0 - 1 1\n1 0 3 1", TreeFormat::kEdgeList);
  ASSERT_EQ(t.node_count(), 2);
  EXPECT_EQ(t.parent(0), kNoParent);
  EXPECT_EQ(t.parent(1), 0);
  EXPECT_EQ(t.value_a(0), 1);
  EXPECT_EQ(t.value_b(0), 1);
  EXPECT_EQ(t.value_a(1), 3);
  EXPECT_EQ(t.value_b(1), 1);
}

TEST(TreeModel, ParsesSingleNode) {
  RootedTree t = parse_tree("0 - 5 2", TreeFormat::kEdgeList);
  ASSERT_EQ(t.node_count(), 1);
  EXPECT_EQ(t.value_a(0), 5);
  EXPECT_EQ(t.value_b(0), 2);
}

TEST(TreeModel, ParsesCommentsAndBlankLines) {
  RootedTree t = parse_tree("# header\n\n0 - 1 2  # trailing\n1 0 3 4\n");
  EXPECT_EQ(t.node_count(), 2);
}

TEST(TreeModel, RelabelsRootToZero) {
  // Root declared second under id 7; child references it.
  RootedTree t = parse_tree("3 7 1 1\n7 - 2 2\n", TreeFormat::kEdgeList);
  ASSERT_EQ(t.node_count(), 2);
  EXPECT_EQ(t.parent(0), kNoParent);
  EXPECT_EQ(t.value_a(0), 2);
  EXPECT_EQ(t.value_a(1), 1);
}

TEST(TreeModel, DanglingParentIsError) {
  try {
    parse_tree("0 - 1 1\n2 9 1 1", TreeFormat::kEdgeList);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kDanglingParent);
  }
}

TEST(TreeModel, MultipleRootsIsError) {
  try {
    parse_tree("0 - 1 1\n1 - 1 1", TreeFormat::kEdgeList);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kMultipleRoots);
  }
}

TEST(TreeModel, CycleIsError) {
  try {
    parse_tree("0 - 1 1\n1 2 1 1\n2 1 1 1", TreeFormat::kEdgeList);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kCycle);
  }
}

TEST(TreeModel, NonFiniteValueIsError) {
  try {
    parse_tree("0 - inf 1", TreeFormat::kEdgeList);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kNonFinite);
  }
}

TEST(TreeModel, DuplicateIdIsError) {
  try {
    parse_tree("0 - 1 1\n0 0 1 1", TreeFormat::kEdgeList);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kDuplicateNode);
  }
}

TEST(TreeModel, ParsesNestedFormat) {
  RootedTree t = parse_tree("(1 1 (3 1) (4 2 (5 5)))", TreeFormat::kNested);
  ASSERT_EQ(t.node_count(), 4);
  EXPECT_EQ(t.parent(1), 0);
  EXPECT_EQ(t.parent(2), 0);
  EXPECT_EQ(t.parent(3), 2);
  EXPECT_EQ(t.value_a(3), 5);
}

TEST(TreeModel, NestedFormatSniffed) {
  RootedTree t = parse_tree("  (1 2 (3 4))");
  EXPECT_EQ(t.node_count(), 2);
}

TEST(TreeModel, NestedSecondTopLevelIsMultipleRoots) {
  try {
    parse_tree("(1 1)(2 2)", TreeFormat::kNested);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kMultipleRoots);
  }
}

TEST(TreeModel, SerializeRoundTripsExactly) {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    RootedTree t = testutil::random_tree(rng, 1 + int(rng() % 40), -10, 10, 1, 9);
    std::string text = serialize_tree(t);
    RootedTree u = parse_tree(text, TreeFormat::kEdgeList);
    EXPECT_EQ(serialize_tree(u), text);
  }
  // Non-integer values keep all 17 digits.
  RootedTree t = RootedTree::from_parents(
      std::vector<NodeId>{kNoParent, 0}, std::vector<double>{0.1, 1.0 / 3.0},
      std::vector<double>{2.0 / 7.0, 1e-300});
  RootedTree u = parse_tree(serialize_tree(t));
  EXPECT_EQ(u.value_a(0), 0.1);
  EXPECT_EQ(u.value_a(1), 1.0 / 3.0);
  EXPECT_EQ(u.value_b(0), 2.0 / 7.0);
  EXPECT_EQ(u.value_b(1), 1e-300);
}

TEST(TreeModel, SubtreeSumsWholeTree) {
  RootedTree t = parse_tree("0 - 1 1\n1 0 3 1");
  auto [sa, sb] = subtree_sums(t, PruneSet{});
  EXPECT_EQ(sa, 4);
  EXPECT_EQ(sb, 2);
}

TEST(TreeModel, SubtreeSumsRootOnly) {
  RootedTree t = parse_tree("0 - 1 1\n1 0 3 1");
  auto [sa, sb] = subtree_sums(t, PruneSet{{1}});
  EXPECT_EQ(sa, 1);
  EXPECT_EQ(sb, 1);
}

TEST(TreeModel, SubtreeSumsPathPruneGrandchild) {
  RootedTree t = testutil::path_tree({{0, 1}, {2, 1}, {4, 1}});
  auto [sa, sb] = subtree_sums(t, PruneSet{{2}});
  EXPECT_EQ(sa, 2);
  EXPECT_EQ(sb, 2);
}

TEST(TreeModel, SubtreeSumsRejectsRootInPruneSet) {
  RootedTree t = parse_tree("0 - 1 1\n1 0 3 1");
  EXPECT_THROW(subtree_sums(t, PruneSet{{0}}), PreconditionError);
}

TEST(TreeModel, SubtreeSumsRejectsNestedPrunes) {
  RootedTree t = testutil::path_tree({{0, 1}, {2, 1}, {4, 1}});
  EXPECT_THROW(subtree_sums(t, PruneSet{{1, 2}}), PreconditionError);
}

// Oracle check: sums agree with an explicit traversal of the unpruned nodes
// for random valid prune sets.
TEST(TreeModel, SubtreeSumsMatchesExplicitTraversal) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    RootedTree t = testutil::random_tree(rng, 2 + int(rng() % 30), -10, 10, 1, 9);
    // sample a random antichain by walking down from the root
    PruneSet p;
    std::vector<char> pruned(t.node_count(), 0);
    std::vector<NodeId> stack{0};
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId c : t.children(u)) {
        if (rng() % 4 == 0) {
          p.roots.push_back(c);
          pruned[c] = 1;
        } else {
          stack.push_back(c);
        }
      }
    }
    p.normalize();
    auto [sa, sb] = subtree_sums(t, p);
    double ea = 0, eb = 0;
    std::vector<NodeId> s2{0};
    while (!s2.empty()) {
      NodeId u = s2.back();
      s2.pop_back();
      ea += t.value_a(u);
      eb += t.value_b(u);
      for (NodeId c : t.children(u))
        if (!pruned[c]) s2.push_back(c);
    }
    EXPECT_EQ(sa, ea);
    EXPECT_EQ(sb, eb);
  }
}

TEST(TreeModel, PostorderVisitsChildrenFirst) {
  std::mt19937_64 rng(3);
  RootedTree t = testutil::random_tree(rng, 60, 0, 5, 1, 5);
  auto order = t.postorder();
  std::vector<int> pos(t.node_count());
  for (int i = 0; i < int(order.size()); ++i) pos[order[i]] = i;
  for (NodeId v = 1; v < t.node_count(); ++v)
    EXPECT_LT(pos[v], pos[t.parent(v)]);
}

TEST(TreeModel, DeepTreeDoesNotOverflow) {
  const int n = 1'000'000;
  std::vector<NodeId> parents(n);
  std::vector<double> a(n, 1), b(n, 1);
  parents[0] = kNoParent;
  for (int i = 1; i < n; ++i) parents[i] = i - 1;
  RootedTree t = RootedTree::from_parents(parents, a, b);
  auto [sa, sb] = subtree_sums(t, PruneSet{});
  EXPECT_EQ(sa, n);
  EXPECT_EQ(sb, n);
  EXPECT_EQ(t.postorder().front(), n - 1);
}
