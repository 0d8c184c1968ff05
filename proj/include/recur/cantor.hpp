#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "recur/common.hpp"
#include "recur/point.hpp"

namespace recur {

struct Cell {
  int level = 0;
  std::string id;
};

/// A zero-dimensional compact space presented as a refining chain of
/// finite clopen partitions. Level 0 is the one-cell partition; the cells
/// of level k+1 refine those of level k. Addresses are queryable up to
/// `address_depth`, full partitions only up to `enumerable_depth` (cell
/// counts grow with the level).
class Space {
 public:
  virtual ~Space() = default;

  virtual int address_depth() const = 0;
  virtual int enumerable_depth() const = 0;

  /// All level-k cell ids, lexicographically sorted.
  virtual std::vector<std::string> cells(int k) const = 0;

  /// The id of the parent cell at level k-1.
  virtual std::string parent_id(int k, const std::string& id) const = 0;

  /// The unique level-k cell containing x.
  virtual std::string cell_of(const Point& x, int k) const = 0;

  void check_level(int k, bool need_enumeration = false) const {
    if (k < 0) throw std::invalid_argument("negative resolution level");
    if (k > address_depth())
      throw budget_error("resolution level " + std::to_string(k) +
                         " exceeds supported depth " + std::to_string(address_depth()));
    if (need_enumeration && k > enumerable_depth())
      throw budget_error("cell enumeration at level " + std::to_string(k) +
                         " exceeds enumerable depth " +
                         std::to_string(enumerable_depth()));
  }

  Cell cell(const Point& x, int k) const {
    check_level(k);
    return Cell{k, cell_of(x, k)};
  }
};

/// A clopen subset represented as a finite union of same-level cells.
/// The normal form is the coarsest level at which the set is a cell union.
struct ClopenSet {
  int level = 0;
  std::vector<std::string> ids;  // sorted, unique

  static ClopenSet of_cells(int level, std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ClopenSet{level, std::move(ids)};
  }

  bool empty() const { return ids.empty(); }
  bool operator==(const ClopenSet& o) const = default;
};

inline ClopenSet full_space(const Space& space, int level) {
  space.check_level(level, true);
  return ClopenSet{level, space.cells(level)};
}

inline bool member(const Space& space, const ClopenSet& u, const Point& x) {
  std::string c = space.cell_of(x, u.level);
  return std::binary_search(u.ids.begin(), u.ids.end(), c);
}

/// Re-represents U at a finer level. Coarsening is rejected: it would
/// lose which child cells are present.
inline ClopenSet refine(const Space& space, const ClopenSet& u, int finer_level) {
  if (finer_level < u.level)
    throw std::invalid_argument("refine: target level is coarser than the set's level");
  space.check_level(finer_level, true);
  if (finer_level == u.level) return u;
  std::vector<std::string> ids;
  for (const auto& c : space.cells(finer_level)) {
    std::string up = c;
    for (int k = finer_level; k > u.level; --k) up = space.parent_id(k, up);
    if (std::binary_search(u.ids.begin(), u.ids.end(), up)) ids.push_back(c);
  }
  return ClopenSet::of_cells(finer_level, std::move(ids));
}

/// Greedily merges complete sibling families until the set is no longer a
/// union of full families, giving the coarsest representation.
inline ClopenSet normal_form(const Space& space, ClopenSet u) {
  std::sort(u.ids.begin(), u.ids.end());
  while (u.level > 0) {
    auto finer = space.cells(u.level);
    // group the whole level by parent
    std::set<std::string> present(u.ids.begin(), u.ids.end());
    std::set<std::string> parents;
    for (const auto& c : u.ids) parents.insert(space.parent_id(u.level, c));
    bool merges = true;
    for (const auto& c : finer) {
      std::string p = space.parent_id(u.level, c);
      if (parents.count(p) && !present.count(c)) {
        merges = false;
        break;
      }
    }
    if (!merges) break;
    u.level -= 1;
    u.ids.assign(parents.begin(), parents.end());
  }
  return u;
}

inline std::pair<ClopenSet, ClopenSet> align(const Space& space, const ClopenSet& a,
                                             const ClopenSet& b) {
  int level = std::max(a.level, b.level);
  return {refine(space, a, level), refine(space, b, level)};
}

inline ClopenSet clopen_union(const Space& space, const ClopenSet& a,
                              const ClopenSet& b) {
  auto [x, y] = align(space, a, b);
  std::vector<std::string> ids;
  std::set_union(x.ids.begin(), x.ids.end(), y.ids.begin(), y.ids.end(),
                 std::back_inserter(ids));
  return normal_form(space, ClopenSet{x.level, std::move(ids)});
}

inline ClopenSet clopen_intersect(const Space& space, const ClopenSet& a,
                                  const ClopenSet& b) {
  auto [x, y] = align(space, a, b);
  std::vector<std::string> ids;
  std::set_intersection(x.ids.begin(), x.ids.end(), y.ids.begin(), y.ids.end(),
                        std::back_inserter(ids));
  return normal_form(space, ClopenSet{x.level, std::move(ids)});
}

inline ClopenSet clopen_complement(const Space& space, const ClopenSet& a) {
  auto all = space.cells(a.level);
  std::vector<std::string> ids;
  std::set_difference(all.begin(), all.end(), a.ids.begin(), a.ids.end(),
                      std::back_inserter(ids));
  return normal_form(space, ClopenSet{a.level, std::move(ids)});
}

inline bool is_subset(const Space& space, const ClopenSet& a, const ClopenSet& b) {
  auto [x, y] = align(space, a, b);
  return std::includes(y.ids.begin(), y.ids.end(), x.ids.begin(), x.ids.end());
}

/// Least level at which x and y sit in different cells, or nullopt if they
/// agree through `depth`. Level 0 never separates (one cell).
inline std::optional<int> separation_level(const Space& space, const Point& x,
                                           const Point& y, int depth) {
  space.check_level(depth);
  for (int k = 1; k <= depth; ++k)
    if (space.cell_of(x, k) != space.cell_of(y, k)) return k;
  return std::nullopt;
}

/// separation_level clamped to depth+1 for arithmetic comparisons.
inline int separation_or(const Space& space, const Point& x, const Point& y,
                         int depth) {
  auto s = separation_level(space, x, y, depth);
  return s ? *s : depth + 1;
}

}  // namespace recur
