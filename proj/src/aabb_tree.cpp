#include "mmfem/aabb_tree.hpp"
#include "mmfem/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mmfem
{
namespace
{

double half_perimeter(const AABB& box)
{
  return (box.max - box.min).sum();
}

} // namespace

AABB AABB::of(const Triangle& t)
{
  return {t[0].cwiseMin(t[1]).cwiseMin(t[2]), t[0].cwiseMax(t[1]).cwiseMax(t[2])};
}

AABB AABB::of(const Segment& s)
{
  return {s[0].cwiseMin(s[1]), s[0].cwiseMax(s[1])};
}

AABB AABB::merged(const AABB& other) const
{
  return {min.cwiseMin(other.min), max.cwiseMax(other.max)};
}

bool AABB::overlaps(const AABB& other) const
{
  return min.x() <= other.max.x() && other.min.x() <= max.x() && min.y() <= other.max.y()
         && other.min.y() <= max.y();
}

bool AABB::contains(const Point2& p) const
{
  return min.x() <= p.x() && p.x() <= max.x() && min.y() <= p.y() && p.y() <= max.y();
}

bool AABB::contains(const AABB& other) const
{
  return contains(other.min) && contains(other.max);
}

AABBTree::AABBTree(const Mesh& mesh)
{
  if (mesh.empty())
    throw std::invalid_argument("AABBTree: empty mesh");

  const std::size_t n = mesh.num_cells();
  std::vector<AABB> boxes(n);
  std::vector<Point2> centers(n);
  for (std::size_t c = 0; c < n; ++c)
  {
    const auto t = mesh.cell_triangle(c);
    boxes[c] = AABB::of(t);
    centers[c] = centroid(t);
  }
  std::vector<int> cells(n);
  std::iota(cells.begin(), cells.end(), 0);
  _nodes.reserve(2 * n - 1);
  build(boxes, centers, cells, 0, static_cast<int>(n));
}

int AABBTree::build(const std::vector<AABB>& boxes, const std::vector<Point2>& centers,
                    std::vector<int>& cells, int begin, int end)
{
  const int index = static_cast<int>(_nodes.size());
  _nodes.emplace_back();

  if (end - begin == 1)
  {
    _nodes[index].box = boxes[cells[begin]];
    _nodes[index].cell = cells[begin];
    return index;
  }

  AABB box = boxes[cells[begin]];
  for (int k = begin + 1; k < end; ++k)
    box = box.merged(boxes[cells[k]]);

  const Point2 extent = box.max - box.min;
  const int axis = extent.x() >= extent.y() ? 0 : 1;
  const int middle = begin + (end - begin) / 2;
  std::nth_element(cells.begin() + begin, cells.begin() + middle, cells.begin() + end,
                   [&](int a, int b) {
                     if (centers[a][axis] != centers[b][axis])
                       return centers[a][axis] < centers[b][axis];
                     return a < b;
                   });

  const int left = build(boxes, centers, cells, begin, middle);
  const int right = build(boxes, centers, cells, middle, end);
  _nodes[index].box = box;
  _nodes[index].left = left;
  _nodes[index].right = right;
  return index;
}

std::vector<int> AABBTree::box_query(const AABB& box) const
{
  std::vector<int> found;
  if (_nodes.empty())
    return found;
  std::vector<int> stack{0};
  while (!stack.empty())
  {
    const Node& node = _nodes[stack.back()];
    stack.pop_back();
    if (!node.box.overlaps(box))
      continue;
    if (node.is_leaf())
      found.push_back(node.cell);
    else
    {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::vector<std::pair<int, int>> tree_collide(const AABBTree& a, const AABBTree& b)
{
  // Descends into the larger of the two boxes at each step.
  std::vector<std::pair<int, int>> pairs;
  if (a.nodes().empty() || b.nodes().empty())
    return pairs;

  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty())
  {
    const auto [ia, ib] = stack.back();
    stack.pop_back();
    const auto& na = a.nodes()[ia];
    const auto& nb = b.nodes()[ib];
    if (!na.box.overlaps(nb.box))
      continue;

    if (na.is_leaf() && nb.is_leaf())
      pairs.emplace_back(na.cell, nb.cell);
    else if (nb.is_leaf() || (!na.is_leaf() && half_perimeter(na.box) >= half_perimeter(nb.box)))
    {
      stack.emplace_back(na.left, ib);
      stack.emplace_back(na.right, ib);
    }
    else
    {
      stack.emplace_back(ia, nb.left);
      stack.emplace_back(ia, nb.right);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<int> tree_point_query(const AABBTree& t, const Mesh& m, const Point2& p)
{
  std::vector<int> found;
  if (t.nodes().empty() || !t.root_box().contains(p))
    return found;
  for (int c : t.box_query(AABB{p, p}))
    if (point_in_triangle(p, m.cell_triangle(c)) != Containment::outside)
      found.push_back(c);
  return found;
}

} // namespace mmfem
