#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "recur/cantor.hpp"
#include "recur/cone.hpp"
#include "recur/group.hpp"
#include "recur/point.hpp"

namespace recur {

struct Capabilities {
  bool exact_language = false;     // level partitions enumerate the space exactly
  bool exact_return_sets = false;  // closed-form return-time descriptions
  bool level_equivariant = false;  // the action permutes the cells of every level
  bool finite = false;             // finitely many points; everything exhaustible
};

/// Closed-form description of a return-time set inside the integers:
/// a finite set, a union of residue classes, or a cofinite set given by
/// its finite complement. Supplied by systems whose return sets are known
/// exactly for every group element, not just within a window.
struct ReturnSetDesc {
  enum class Form { finite, residues, cofinite_except };

  Form form = Form::finite;
  std::vector<Int> elems;      // finite set, or the excluded set for cofinite
  Int modulus = 0;             // residues form
  std::vector<Int> residues;   // sorted, in [0, modulus)

  static ReturnSetDesc finite_set(std::vector<Int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return ReturnSetDesc{Form::finite, std::move(v), 0, {}};
  }
  static ReturnSetDesc residue_classes(Int m, std::vector<Int> rs) {
    for (auto& r : rs) r = ((r % m) + m) % m;
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    return ReturnSetDesc{Form::residues, {}, m, std::move(rs)};
  }
  static ReturnSetDesc cofinite(std::vector<Int> excluded) {
    std::sort(excluded.begin(), excluded.end());
    excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
    return ReturnSetDesc{Form::cofinite_except, std::move(excluded), 0, {}};
  }
  static ReturnSetDesc all() { return cofinite({}); }

  bool contains(Int n) const {
    switch (form) {
      case Form::finite:
        return std::binary_search(elems.begin(), elems.end(), n);
      case Form::residues:
        return std::binary_search(residues.begin(), residues.end(),
                                  ((n % modulus) + modulus) % modulus);
      case Form::cofinite_except:
        return !std::binary_search(elems.begin(), elems.end(), n);
    }
    return false;
  }

  bool empty_set() const {
    switch (form) {
      case Form::finite:
        return elems.empty();
      case Form::residues:
        return residues.empty();
      case Form::cofinite_except:
        return false;
    }
    return true;
  }

  bool syndetic() const {
    switch (form) {
      case Form::finite:
        return false;  // bounded set in an infinite group
      case Form::residues:
        return !residues.empty();
      case Form::cofinite_except:
        return true;
    }
    return false;
  }

  bool thick() const {
    switch (form) {
      case Form::finite:
        return false;
      case Form::residues:
        return Int(residues.size()) == modulus;  // only the full group has long runs
      case Form::cofinite_except:
        return true;
    }
    return false;
  }

  /// A modulus m with the whole subgroup m*Z contained in the set, if one
  /// exists. The description is exact, so nullopt means no such subgroup.
  std::optional<Int> contained_subgroup() const {
    switch (form) {
      case Form::finite:
        return std::nullopt;
      case Form::residues:
        if (std::binary_search(residues.begin(), residues.end(), Int{0}))
          return modulus;
        return std::nullopt;
      case Form::cofinite_except: {
        if (elems.empty()) return Int{1};
        if (std::binary_search(elems.begin(), elems.end(), Int{0}))
          return std::nullopt;  // every subgroup contains 0
        Int m = 0;
        for (Int e : elems) m = std::max(m, std::llabs(e));
        return m + 1;
      }
    }
    return std::nullopt;
  }

  bool has_element_ge(Int bound) const {
    switch (form) {
      case Form::finite:
        return !elems.empty() && elems.back() >= bound;
      case Form::residues:
        return !residues.empty();  // residue classes are unbounded both ways
      case Form::cofinite_except:
        return true;
    }
    return false;
  }

  bool has_element_le(Int bound) const {
    switch (form) {
      case Form::finite:
        return !elems.empty() && elems.front() <= bound;
      case Form::residues:
        return !residues.empty();
      case Form::cofinite_except:
        return true;
    }
    return false;
  }

  std::vector<Int> elements_in(Int lo, Int hi) const {
    std::vector<Int> out;
    for (Int n = lo; n <= hi; ++n)
      if (contains(n)) out.push_back(n);
    return out;
  }

  std::string describe() const {
    switch (form) {
      case Form::finite: {
        std::string s = "{";
        for (size_t i = 0; i < elems.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(elems[i]);
        }
        return s + "}";
      }
      case Form::residues: {
        std::string s = "{";
        for (size_t i = 0; i < residues.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(residues[i]);
        }
        return s + "} mod " + std::to_string(modulus);
      }
      case Form::cofinite_except: {
        if (elems.empty()) return "Z";
        std::string s = "Z minus {";
        for (size_t i = 0; i < elems.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(elems[i]);
        }
        return s + "}";
      }
    }
    return "?";
  }
};

struct ReturnSet {
  std::string point;  // formatted
  ClopenSet target;
  Int radius = 0;
  std::vector<GroupElement> elements;  // within the closed ball(radius)
  bool exact = false;                  // a closed-form description backs it
};

struct OrbitClosureApprox {
  std::string point;
  int level = 0;
  Int radius = 0;
  std::vector<std::string> cells;  // sorted
  bool exact = false;
};

/// A concrete flow: a finitely generated group acting on a catalog space
/// through an action oracle, with capability flags for the exact
/// sub-oracles the system can honestly provide. Immutable; actions are
/// pure functions of their inputs.
class FlowSystem {
 public:
  virtual ~FlowSystem() = default;

  virtual std::string name() const = 0;
  const Group& group() const { return group_; }
  const Space& space() const { return *space_; }
  std::shared_ptr<const Space> space_ptr() const { return space_; }
  Capabilities capabilities() const { return caps_; }

  virtual Point act(const GroupElement& g, const Point& x) const = 0;

  virtual std::vector<Point> designated_points() const = 0;

  /// Deterministic sample pool: designated points, a few orbit translates,
  /// and system-specific randoms drawn from the given generator.
  virtual std::vector<Point> sample_points(int count, std::mt19937_64& rng) const;

  /// Points lying in the level-`depth` cell of x (x itself included).
  virtual std::vector<Point> points_in_cell(const Point& x, int depth, int count,
                                            std::mt19937_64& rng) const;

  // ---- optional exact oracles ----

  virtual std::optional<ReturnSetDesc> exact_return_set(const Point&,
                                                        const ClopenSet&) const {
    return std::nullopt;
  }

  virtual std::optional<std::vector<std::string>> exact_closure_cells(const Point&,
                                                                      int) const {
    return std::nullopt;
  }

  /// Whether the whole space is minimal, when the system can certify it.
  virtual std::optional<bool> minimal_system() const { return std::nullopt; }

  /// Non-null when the exact return-set rule is uniform over points (the
  /// same description shape at every point and level), so pointwise exact
  /// verdicts extend to the whole space.
  virtual std::optional<std::string> uniform_return_rule() const {
    return std::nullopt;
  }

  /// Whether points_in_cell enumerates representatives of every kind of
  /// point in the cell (closed-form neighbor structure).
  virtual bool neighbors_closed_form() const { return false; }

  /// System-designated clopen sets that are known to discriminate between
  /// the dynamical conditions (added to the analyzer batteries).
  virtual std::vector<ClopenSet> discriminating_clopen_sets(int max_level) const {
    (void)max_level;
    return {};
  }

  struct AsymptoticCandidate {
    Point a, b;
    GroupElement direction;  // iterate this to push the pair together
    bool certified = false;  // a closed-form rule confirms the convergence
    std::string rule;
  };
  virtual std::vector<AsymptoticCandidate> asymptotic_candidates() const {
    return {};
  }

  /// The limit of act(g_n, base) along the tail sequence, when the system
  /// can identify it exactly.
  virtual std::optional<Point> limit_point(const Point&,
                                           const std::vector<GroupElement>&) const {
    return std::nullopt;
  }

  virtual std::string format_point(const Point& x) const = 0;
  virtual Point parse_point(std::string_view s) const = 0;

 protected:
  Group group_ = Group::integers();
  std::shared_ptr<const Space> space_;
  Capabilities caps_;
};

inline std::vector<Point> FlowSystem::sample_points(int count,
                                                    std::mt19937_64& rng) const {
  std::vector<Point> pool = designated_points();
  auto gam = group_.gamma();
  std::vector<Point> out = pool;
  size_t i = 0;
  while (int(out.size()) < count && !pool.empty()) {
    const auto& g = gam[rng() % gam.size()];
    Point p = act(g, pool[i % pool.size()]);
    out.push_back(p);
    pool.push_back(p);
    ++i;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<Point> FlowSystem::points_in_cell(const Point& x, int depth,
                                                     int count,
                                                     std::mt19937_64& rng) const {
  std::vector<Point> out{x};
  auto samples = sample_points(count * 4, rng);
  std::string cx = space().cell_of(x, depth);
  for (const auto& y : samples) {
    if (int(out.size()) >= count) break;
    if (space().cell_of(y, depth) == cx) out.push_back(y);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Exactly the elements t of the closed ball(radius) with t*x in U.
inline ReturnSet return_times(const FlowSystem& sys, const Point& x,
                              const ClopenSet& target, Int radius,
                              size_t cap = default_ball_cap) {
  sys.space().check_level(target.level);
  ReturnSet out;
  out.point = sys.format_point(x);
  out.target = target;
  out.radius = radius;
  for (const auto& t : sys.group().ball(radius, SetVariant::closed, cap)) {
    if (member(sys.space(), target, sys.act(t, x))) out.elements.push_back(t);
  }
  out.exact = sys.exact_return_set(x, target).has_value();
  return out;
}

/// Cells met by the ball-`radius` orbit of x at the given level; when the
/// system has an exact language oracle the result is the full cell set of
/// the orbit closure.
inline OrbitClosureApprox orbit_closure_cells(const FlowSystem& sys, const Point& x,
                                              int level, Int radius,
                                              size_t cap = default_ball_cap) {
  sys.space().check_level(level);
  OrbitClosureApprox out;
  out.point = sys.format_point(x);
  out.level = level;
  out.radius = radius;
  if (auto exact = sys.exact_closure_cells(x, level)) {
    out.cells = *exact;
    std::sort(out.cells.begin(), out.cells.end());
    out.exact = true;
    return out;
  }
  std::set<std::string> cells;
  for (const auto& g : sys.group().ball(radius, SetVariant::closed, cap))
    cells.insert(sys.space().cell_of(sys.act(g, x), level));
  out.cells.assign(cells.begin(), cells.end());
  return out;
}

/// Breadth-first orbit of x under the symmetric generating set, with the
/// reaching group element for each point. Only safe on finite systems.
struct OrbitMap {
  std::vector<Point> points;                  // insertion order, x first
  std::vector<GroupElement> reached_by;       // word mapping x to points[i]
};

inline OrbitMap finite_orbit(const FlowSystem& sys, const Point& x,
                             size_t cap = 1u << 20) {
  OrbitMap out;
  std::map<Point, size_t> seen;
  out.points.push_back(x);
  out.reached_by.push_back(sys.group().identity());
  seen[x] = 0;
  auto gam = sys.group().gamma();
  for (size_t i = 0; i < out.points.size(); ++i) {
    for (const auto& g : gam) {
      Point y = sys.act(g, out.points[i]);
      if (seen.count(y)) continue;
      seen[y] = out.points.size();
      out.points.push_back(y);
      out.reached_by.push_back(sys.group().compose(g, out.reached_by[i]));
      if (out.points.size() > cap)
        throw cap_exceeded("orbit enumeration exceeded cap");
    }
  }
  return out;
}

}  // namespace recur
