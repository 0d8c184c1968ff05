#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recur/common.hpp"

namespace recur {

/// Eventually periodic digit stream (least significant digit first).
/// Canonical form: minimal period, shortest preperiod.
struct AdicDigits {
  std::vector<int> pre;
  std::vector<int> period;  // nonempty

  void canonicalize() {
    if (period.empty()) period = {0};
    // minimal period: smallest divisor block that tiles the period
    for (size_t len = 1; len < period.size(); ++len) {
      if (period.size() % len != 0) continue;
      bool tiles = true;
      for (size_t i = len; i < period.size() && tiles; ++i)
        if (period[i] != period[i % len]) tiles = false;
      if (tiles) {
        period.resize(len);
        break;
      }
    }
    // shorten the preperiod while its last digit matches the period tail
    while (!pre.empty() && pre.back() == period.back()) {
      pre.pop_back();
      period.insert(period.begin(), period.back());
      period.pop_back();
    }
  }

  int digit(size_t i) const {
    if (i < pre.size()) return pre[i];
    return period[(i - pre.size()) % period.size()];
  }

  bool operator==(const AdicDigits& o) const {
    return pre == o.pre && period == o.period;
  }
  bool operator<(const AdicDigits& o) const {
    if (pre != o.pre) return pre < o.pre;
    return period < o.period;
  }
};

/// Shifted copy of a two-sided substitutive fixed point; `seed` indexes
/// the system's seed-pair catalog.
struct SubstPoint {
  int seed = 0;
  Int offset = 0;
  bool operator==(const SubstPoint& o) const {
    return seed == o.seed && offset == o.offset;
  }
  bool operator<(const SubstPoint& o) const {
    if (seed != o.seed) return seed < o.seed;
    return offset < o.offset;
  }
};

/// A point of the one-dot space: the indicator of a single integer
/// position, or the all-zero point.
struct OneDotPoint {
  std::optional<Int> mark;  // nullopt = all-zero point
  bool operator==(const OneDotPoint& o) const { return mark == o.mark; }
  bool operator<(const OneDotPoint& o) const {
    if (mark.has_value() != o.mark.has_value()) return !mark.has_value();
    if (!mark) return false;
    return *mark < *o.mark;
  }
};

struct FinitePoint {
  int index = 0;
  bool operator==(const FinitePoint& o) const { return index == o.index; }
  bool operator<(const FinitePoint& o) const { return index < o.index; }
};

struct PairPoint;

/// Addressable point of a catalog space. A small immutable value; pairs
/// are boxed so points of product spaces nest.
class Point {
 public:
  using Payload = std::variant<AdicDigits, SubstPoint, OneDotPoint, FinitePoint,
                               std::shared_ptr<const PairPoint>>;

  Point() : payload_(FinitePoint{0}) {}
  explicit Point(Payload p) : payload_(std::move(p)) {}

  static Point pair(Point a, Point b);

  const Payload& payload() const { return payload_; }
  const PairPoint& as_pair() const;
  bool is_pair() const { return payload_.index() == 4; }

  friend int compare(const Point& a, const Point& b);
  bool operator==(const Point& o) const { return compare(*this, o) == 0; }
  bool operator!=(const Point& o) const { return compare(*this, o) != 0; }
  bool operator<(const Point& o) const { return compare(*this, o) < 0; }

 private:
  Payload payload_;
};

struct PairPoint {
  Point first;
  Point second;
};

inline Point Point::pair(Point a, Point b) {
  return Point(std::make_shared<const PairPoint>(PairPoint{std::move(a), std::move(b)}));
}

inline const PairPoint& Point::as_pair() const {
  return *std::get<std::shared_ptr<const PairPoint>>(payload_);
}

inline int compare(const Point& a, const Point& b) {
  const auto& pa = a.payload();
  const auto& pb = b.payload();
  if (pa.index() != pb.index()) return pa.index() < pb.index() ? -1 : 1;
  switch (pa.index()) {
    case 0: {
      const auto& x = std::get<0>(pa);
      const auto& y = std::get<0>(pb);
      if (x == y) return 0;
      return x < y ? -1 : 1;
    }
    case 1: {
      const auto& x = std::get<1>(pa);
      const auto& y = std::get<1>(pb);
      if (x == y) return 0;
      return x < y ? -1 : 1;
    }
    case 2: {
      const auto& x = std::get<2>(pa);
      const auto& y = std::get<2>(pb);
      if (x == y) return 0;
      return x < y ? -1 : 1;
    }
    case 3: {
      const auto& x = std::get<3>(pa);
      const auto& y = std::get<3>(pb);
      if (x == y) return 0;
      return x < y ? -1 : 1;
    }
    default: {
      const auto& x = a.as_pair();
      const auto& y = b.as_pair();
      int c = compare(x.first, y.first);
      if (c != 0) return c;
      return compare(x.second, y.second);
    }
  }
}

}  // namespace recur
