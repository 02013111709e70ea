#include <gtest/gtest.h>

#include <numeric>

#include "critmeasure/mesh.hpp"

using namespace critmeasure;

TEST(Mesh, UniformBasics) {
  const Mesh1D m = uniform(4);
  EXPECT_EQ(m.n_cells(), 4u);
  EXPECT_EQ(m.n_interior_nodes(), 3u);
  EXPECT_DOUBLE_EQ(m.h(), 0.25);
  EXPECT_DOUBLE_EQ(m.sigma(), 1.0);
  EXPECT_DOUBLE_EQ(m.cell_center(2), 0.625);
  EXPECT_THROW(uniform(0), std::invalid_argument);
}

TEST(Mesh, RejectsBadEdges) {
  EXPECT_THROW(Mesh1D({0.0}), std::invalid_argument);
  EXPECT_THROW(Mesh1D({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
  EXPECT_THROW(Mesh1D({0.1, 1.0}), std::invalid_argument);
  EXPECT_THROW(Mesh1D({0.0, 0.9}), std::invalid_argument);
}

TEST(Mesh, NonuniformQuasiUniformity) {
  const Mesh1D m({0.0, 0.1, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(m.h(), 0.5);
  EXPECT_DOUBLE_EQ(m.sigma(), 0.2);
}

TEST(Mesh, LocateAssignsInteriorEdgesToTheRight) {
  const Mesh1D m = uniform(4);
  EXPECT_EQ(m.locate(0.0), 0u);
  EXPECT_EQ(m.locate(0.25), 1u);
  EXPECT_EQ(m.locate(0.2499), 0u);
  EXPECT_EQ(m.locate(1.0), 3u);
}

TEST(Mesh, NestedRefinement) {
  const Mesh1D c = uniform(3);
  const Mesh1D f = refine_nested(c, 4);
  EXPECT_TRUE(f.same_as(uniform(12)));
  EXPECT_TRUE(is_nested_refinement(c, f));
  EXPECT_FALSE(is_nested_refinement(f, c));
  EXPECT_FALSE(is_nested_refinement(uniform(4), uniform(6)));
  EXPECT_THROW(refine_nested(c, 0), std::invalid_argument);
  EXPECT_TRUE(refine_nested(c, 1).shares_storage(c));

  const auto map = coarse_cell_map(c, f);
  ASSERT_TRUE(map.has_value());
  for (std::size_t j = 0; j < 12; ++j) EXPECT_EQ((*map)[j], j / 4);
}

TEST(Mesh, OverlayIsCommonRefinement) {
  const Mesh1D a = uniform(4), b = uniform(6);
  const auto segs = overlay(a, b);
  // edge union {0, 1/6, 1/4, 1/3, 1/2, 2/3, 3/4, 5/6, 1}
  ASSERT_EQ(segs.size(), 8u);
  double total = 0.0;
  for (const auto& s : segs) {
    total += s.right - s.left;
    const double mid = 0.5 * (s.left + s.right);
    EXPECT_EQ(s.cell_a, a.locate(mid));
    EXPECT_EQ(s.cell_b, b.locate(mid));
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_NEAR(segs[1].left, 1.0 / 6, 1e-15);
  EXPECT_NEAR(segs[1].right, 0.25, 1e-15);
}

TEST(Mesh, OverlayMergesRoundOffEdges) {
  const Mesh1D a({0.0, 1.0 / 3, 1.0});
  const Mesh1D b({0.0, 1.0 / 3 + 1e-17, 1.0});
  EXPECT_EQ(overlay(a, b).size(), 2u);
  EXPECT_TRUE(a.same_as(b));
}
