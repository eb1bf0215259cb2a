#pragma once

#include "mmfem/mesh.hpp"

#include <utility>
#include <vector>

namespace mmfem
{

struct AABB
{
  Point2 min;
  Point2 max;

  static AABB of(const Triangle& t);
  static AABB of(const Segment& s);

  AABB merged(const AABB& other) const;
  bool overlaps(const AABB& other) const;
  bool contains(const Point2& p) const;
  bool contains(const AABB& other) const;
};

/// Bounding volume hierarchy over the cells of one mesh. Built top-down by
/// splitting at the median cell centroid along the longer box axis.
class AABBTree
{
public:
  struct Node
  {
    AABB box;
    int left = -1;  // child node indices, -1 for leaves
    int right = -1;
    int cell = -1;  // cell index for leaves
    bool is_leaf() const { return cell >= 0; }
  };

  AABBTree() = default;

  /// Throws std::invalid_argument for an empty mesh.
  explicit AABBTree(const Mesh& mesh);

  const std::vector<Node>& nodes() const { return _nodes; }
  const AABB& root_box() const { return _nodes.front().box; }
  std::size_t num_leaves() const { return (_nodes.size() + 1) / 2; }

  /// Cells whose boxes overlap `box` (closed overlap test), sorted.
  std::vector<int> box_query(const AABB& box) const;

private:
  int build(const std::vector<AABB>& boxes, const std::vector<Point2>& centers,
            std::vector<int>& cells, int begin, int end);

  std::vector<Node> _nodes;
};

inline AABBTree build_aabb_tree(const Mesh& m) { return AABBTree(m); }

/// Candidate cell pairs (cell of a, cell of b) with overlapping boxes,
/// sorted lexicographically.
std::vector<std::pair<int, int>> tree_collide(const AABBTree& a, const AABBTree& b);

/// All cells whose closed triangle contains `p`, sorted.
std::vector<int> tree_point_query(const AABBTree& t, const Mesh& m, const Point2& p);

} // namespace mmfem
