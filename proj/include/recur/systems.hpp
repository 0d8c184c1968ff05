#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "recur/flows.hpp"

namespace recur {

// ---------------------------------------------------------------------------
// Odometer: the +1 map on base-b digit streams.
// ---------------------------------------------------------------------------

namespace detail {

/// Adds an integer to an eventually periodic digit stream (little-endian),
/// carrying/borrowing as needed. A carry that survives past several full
/// periods means the tail is uniform and flips wholesale.
inline AdicDigits adic_add(const AdicDigits& x, Int n, int base) {
  size_t nd = 2;
  for (Int a = std::llabs(n); a > 0; a /= base) ++nd;
  size_t want = std::max(x.pre.size(), nd) + 2 * x.period.size() + 4;
  std::vector<int> buf(want);
  for (size_t i = 0; i < want; ++i) buf[i] = x.digit(i);
  size_t guard = want + 4 * std::max<size_t>(x.period.size(), 1) + 8;

  Int carry = n;
  size_t i = 0;
  bool uniform_tail = false;
  while (carry != 0) {
    if (i >= buf.size()) {
      if (buf.size() >= guard) {
        uniform_tail = true;
        break;
      }
      buf.push_back(x.digit(buf.size()));
    }
    Int v = buf[i] + carry;
    Int d = ((v % base) + base) % base;
    carry = (v - d) / base;
    buf[i] = int(d);
    ++i;
  }

  AdicDigits out;
  if (!uniform_tail) {
    size_t pos = buf.size();
    out.pre = std::move(buf);
    size_t phase = (pos - x.pre.size()) % x.period.size();
    out.period.assign(x.period.begin() + phase, x.period.end());
    out.period.insert(out.period.end(), x.period.begin(), x.period.begin() + phase);
  } else {
    buf.resize(i);
    out.pre = std::move(buf);
    out.period = {carry > 0 ? 0 : base - 1};
  }
  out.canonicalize();
  return out;
}

inline AdicDigits adic_of_integer(Int n, int base) {
  return adic_add(AdicDigits{{}, {0}}, n, base);
}

}  // namespace detail

class OdometerSpace final : public Space {
 public:
  explicit OdometerSpace(int base) : base_(base) {
    enumerable_ = 0;
    Int cells = 1;
    while (cells * base_ <= 65536) {
      cells *= base_;
      ++enumerable_;
    }
    address_ = 0;
    Int v = 1;
    while (address_ < 48 && v < (Int{1} << 56) / base_) {
      v *= base_;
      ++address_;
    }
  }

  int base() const { return base_; }
  int address_depth() const override { return address_; }
  int enumerable_depth() const override { return enumerable_; }

  std::vector<std::string> cells(int k) const override {
    check_level(k, true);
    Int count = 1;
    for (int i = 0; i < k; ++i) count *= base_;
    std::vector<std::string> out;
    out.reserve(size_t(count));
    for (Int v = 0; v < count; ++v) out.push_back(id_of_value(v, k));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string parent_id(int k, const std::string& id) const override {
    if (k <= 0) throw std::invalid_argument("root cell has no parent");
    return id.substr(0, size_t(k) - 1);
  }

  std::string cell_of(const Point& x, int k) const override {
    check_level(k);
    const auto& d = std::get<AdicDigits>(x.payload());
    std::string s;
    s.reserve(size_t(k));
    for (int i = 0; i < k; ++i) s += char('0' + d.digit(size_t(i)));
    return s;
  }

  std::string id_of_value(Int v, int k) const {
    std::string s;
    for (int i = 0; i < k; ++i) {
      s += char('0' + int(v % base_));
      v /= base_;
    }
    return s;
  }

  Int value_of_prefix(const Point& x, int k) const {
    const auto& d = std::get<AdicDigits>(x.payload());
    Int v = 0, p = 1;
    for (int i = 0; i < k; ++i) {
      v += p * d.digit(size_t(i));
      p *= base_;
    }
    return v;
  }

  Int value_of_id(const std::string& id) const {
    Int v = 0, p = 1;
    for (char c : id) {
      v += p * (c - '0');
      p *= base_;
    }
    return v;
  }

 private:
  int base_;
  int enumerable_;
  int address_;
};

class OdometerSystem final : public FlowSystem {
 public:
  explicit OdometerSystem(int base) {
    if (base < 2 || base > 10)
      throw std::invalid_argument("odometer: base must be in [2,10]");
    base_ = base;
    group_ = Group::integers();
    space_ = std::make_shared<OdometerSpace>(base);
    caps_ = Capabilities{true, true, true, false};
  }

  std::string name() const override { return "odometer(" + std::to_string(base_) + ")"; }

  Point act(const GroupElement& g, const Point& x) const override {
    Int n = std::get<Int>(g.payload());
    return Point(detail::adic_add(std::get<AdicDigits>(x.payload()), n, base_));
  }

  std::vector<Point> designated_points() const override {
    return {Point(AdicDigits{{}, {0}})};
  }

  std::vector<Point> sample_points(int count, std::mt19937_64& rng) const override {
    std::vector<Point> out = designated_points();
    for (Int v = 1; v <= 3; ++v) {
      out.push_back(Point(detail::adic_of_integer(v, base_)));
      out.push_back(Point(detail::adic_of_integer(-v, base_)));
    }
    while (int(out.size()) < count) {
      AdicDigits d;
      size_t np = rng() % 4, nq = 1 + rng() % 3;
      for (size_t i = 0; i < np; ++i) d.pre.push_back(int(rng() % base_));
      for (size_t i = 0; i < nq; ++i) d.period.push_back(int(rng() % base_));
      d.canonicalize();
      out.push_back(Point(d));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<Point> points_in_cell(const Point& x, int depth, int count,
                                    std::mt19937_64& rng) const override {
    std::vector<Point> out{x};
    Int step = 1;
    for (int i = 0; i < depth; ++i) step *= base_;
    for (Int j = 1; int(out.size()) < count && j <= count; ++j) {
      out.push_back(act(GroupElement(Int{j * step}), x));
      if (int(out.size()) < count)
        out.push_back(act(GroupElement(Int{-j * step}), x));
    }
    // same prefix, random tail
    const auto& d = std::get<AdicDigits>(x.payload());
    while (int(out.size()) < count + 1) {
      AdicDigits e;
      for (int i = 0; i < depth; ++i) e.pre.push_back(d.digit(size_t(i)));
      size_t nq = 1 + rng() % 3;
      for (size_t i = 0; i < nq; ++i) e.period.push_back(int(rng() % base_));
      e.canonicalize();
      out.push_back(Point(e));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::optional<ReturnSetDesc> exact_return_set(const Point& x,
                                                const ClopenSet& u) const override {
    const auto& sp = static_cast<const OdometerSpace&>(*space_);
    int k = u.level;
    if (k > sp.address_depth()) return std::nullopt;
    if (k == 0)
      return u.ids.empty() ? ReturnSetDesc::finite_set({}) : ReturnSetDesc::all();
    Int m = 1;
    for (int i = 0; i < k; ++i) m *= base_;
    Int xv = sp.value_of_prefix(x, k);
    std::vector<Int> rs;
    for (const auto& id : u.ids) rs.push_back(sp.value_of_id(id) - xv);
    return ReturnSetDesc::residue_classes(m, std::move(rs));
  }

  std::optional<std::vector<std::string>> exact_closure_cells(const Point&,
                                                              int k) const override {
    if (k > space_->enumerable_depth()) return std::nullopt;
    return space_->cells(k);  // dense orbits: every cell is met
  }

  std::optional<bool> minimal_system() const override { return true; }

  std::optional<std::string> uniform_return_rule() const override {
    return "returns to any level-k cylinder form a residue class modulo base^k, "
           "independently of the point";
  }

  bool neighbors_closed_form() const override { return true; }

  std::optional<Point> limit_point(const Point& base,
                                   const std::vector<GroupElement>& tail) const override {
    if (tail.empty()) return std::nullopt;
    for (size_t i = 1; i < tail.size(); ++i)
      if (!(tail[i] == tail.back())) return std::nullopt;
    return act(tail.back(), base);  // eventually constant sequences only
  }

  std::string format_point(const Point& x) const override {
    const auto& d = std::get<AdicDigits>(x.payload());
    std::string s = "adic:";
    for (int v : d.pre) s += char('0' + v);
    s += ".";
    for (int v : d.period) s += char('0' + v);
    return s;
  }

  Point parse_point(std::string_view s) const override {
    if (s.substr(0, 5) != "adic:")
      throw std::invalid_argument("parse_point: expected adic:<pre>.<period>");
    std::string body(s.substr(5));
    auto dot = body.find('.');
    if (dot == std::string::npos)
      throw std::invalid_argument("parse_point: missing period separator");
    AdicDigits d;
    for (char c : body.substr(0, dot)) d.pre.push_back(c - '0');
    for (char c : body.substr(dot + 1)) d.period.push_back(c - '0');
    if (d.period.empty()) throw std::invalid_argument("parse_point: empty period");
    d.canonicalize();
    return Point(d);
  }

 private:
  int base_ = 2;
};

// ---------------------------------------------------------------------------
// Substitution subshift: the shift on the orbit closure of a two-sided
// fixed point of a primitive substitution.
// ---------------------------------------------------------------------------

namespace detail {

struct SubstCore {
  std::map<char, std::string> rules;
  std::vector<char> alphabet;
  int power = 1;  // the substitution power fixing the seed letters
  int primitivity_power = 0;
  struct Seed {
    char left, right;
  };
  std::vector<Seed> seeds;
  std::set<std::string> two_factors;

  mutable std::mutex mu;
  mutable std::vector<std::string> left_words, right_words;
  mutable std::map<int, std::vector<std::string>> factor_cache;

  static constexpr size_t word_cap = size_t{1} << 22;

  std::string apply(const std::string& w) const {
    std::string out;
    out.reserve(w.size() * 2);
    for (char c : w) {
      out += rules.at(c);
      if (out.size() > word_cap)
        throw budget_error("substitution expansion exceeds word cap");
    }
    return out;
  }

  std::string apply_times(std::string w, int t) const {
    for (int i = 0; i < t; ++i) w = apply(w);
    return w;
  }

  void ensure(int seed, size_t left_len, size_t right_len) const {
    std::lock_guard<std::mutex> lock(mu);
    auto& lw = left_words[size_t(seed)];
    auto& rw = right_words[size_t(seed)];
    while (lw.size() < left_len) lw = apply_times(lw, power);
    while (rw.size() < right_len) rw = apply_times(rw, power);
  }

  char char_at(int seed, Int i) const {
    if (i >= 0) {
      ensure(seed, 1, size_t(i) + 1);
      std::lock_guard<std::mutex> lock(mu);
      return right_words[size_t(seed)][size_t(i)];
    }
    ensure(seed, size_t(-i), 1);
    std::lock_guard<std::mutex> lock(mu);
    const auto& lw = left_words[size_t(seed)];
    return lw[lw.size() - size_t(-i)];
  }

  /// Characters at positions [lo, hi], one lock for the whole window.
  std::string window(int seed, Int lo, Int hi) const {
    ensure(seed, lo < 0 ? size_t(-lo) : 1, hi >= 0 ? size_t(hi) + 1 : 1);
    std::lock_guard<std::mutex> lock(mu);
    const auto& lw = left_words[size_t(seed)];
    const auto& rw = right_words[size_t(seed)];
    std::string s;
    s.reserve(size_t(hi - lo + 1));
    for (Int i = lo; i <= hi; ++i)
      s += i >= 0 ? rw[size_t(i)] : lw[lw.size() - size_t(-i)];
    return s;
  }

  /// Exact factor set of the subshift's language: every length-L factor
  /// spans at most two adjacent substitution blocks once blocks are longer
  /// than L, so it suffices to scan images of the two-letter factors.
  std::vector<std::string> factors(int length) const {
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = factor_cache.find(length);
      if (it != factor_cache.end()) return it->second;
    }
    int t = 0;
    std::map<char, std::string> img;
    for (char a : alphabet) img[a] = std::string(1, a);
    auto min_len = [&]() {
      size_t m = img.begin()->second.size();
      for (auto& [a, w] : img) m = std::min(m, w.size());
      return m;
    };
    while (min_len() < size_t(length)) {
      for (auto& [a, w] : img) {
        w = apply(w);
      }
      if (++t > 64) throw budget_error("substitution does not expand");
    }
    std::set<std::string> out;
    for (const auto& cd : two_factors) {
      std::string w = img.at(cd[0]) + img.at(cd[1]);
      for (size_t i = 0; i + size_t(length) <= w.size(); ++i)
        out.insert(w.substr(i, size_t(length)));
    }
    std::vector<std::string> v(out.begin(), out.end());
    std::lock_guard<std::mutex> lock(mu);
    factor_cache[length] = v;
    return v;
  }
};

}  // namespace detail

class SubstSpace final : public Space {
 public:
  explicit SubstSpace(std::shared_ptr<const detail::SubstCore> core)
      : core_(std::move(core)) {}

  int address_depth() const override { return 64; }
  int enumerable_depth() const override { return 12; }

  std::vector<std::string> cells(int k) const override {
    check_level(k, true);
    if (k == 0) return {""};
    return core_->factors(2 * k + 1);
  }

  std::string parent_id(int k, const std::string& id) const override {
    if (k <= 0) throw std::invalid_argument("root cell has no parent");
    if (k == 1) return "";
    return id.substr(1, id.size() - 2);
  }

  std::string cell_of(const Point& x, int k) const override {
    check_level(k);
    if (k == 0) return "";
    const auto& p = std::get<SubstPoint>(x.payload());
    return core_->window(p.seed, p.offset - k, p.offset + k);
  }

  const detail::SubstCore& core() const { return *core_; }

 private:
  std::shared_ptr<const detail::SubstCore> core_;
};

class SubstitutionSystem final : public FlowSystem {
 public:
  SubstitutionSystem(std::map<char, std::string> rules, std::string display_name) {
    auto core = std::make_shared<detail::SubstCore>();
    core->rules = std::move(rules);
    validate(*core);
    core_ = core;
    display_name_ = std::move(display_name);
    group_ = Group::integers();
    space_ = std::make_shared<SubstSpace>(core_);
    caps_ = Capabilities{true, false, false, false};
  }

  std::string name() const override { return display_name_; }

  Point act(const GroupElement& g, const Point& x) const override {
    Int n = std::get<Int>(g.payload());
    auto p = std::get<SubstPoint>(x.payload());
    p.offset += n;
    return Point(p);
  }

  std::vector<Point> designated_points() const override {
    std::vector<Point> out;
    for (size_t i = 0; i < core_->seeds.size(); ++i)
      out.push_back(Point(SubstPoint{int(i), 0}));
    return out;
  }

  std::vector<Point> sample_points(int count, std::mt19937_64& rng) const override {
    std::vector<Point> out = designated_points();
    for (Int j = 1; j <= 2; ++j) {
      out.push_back(Point(SubstPoint{0, j}));
      out.push_back(Point(SubstPoint{0, -j}));
    }
    while (int(out.size()) < count) {
      int seed = int(rng() % core_->seeds.size());
      Int off = Int(rng() % 129) - 64;
      out.push_back(Point(SubstPoint{seed, off}));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<Point> points_in_cell(const Point& x, int depth, int count,
                                    std::mt19937_64& rng) const override {
    (void)rng;
    std::vector<Point> out{x};
    std::string cx = space().cell_of(x, depth);
    Int scan = Int(depth) * 40 + 400;
    const auto& p = std::get<SubstPoint>(x.payload());
    for (Int j = 1; j <= scan && int(out.size()) < count; ++j) {
      for (Int s : {j, -j}) {
        Point y(SubstPoint{p.seed, p.offset + s});
        if (space().cell_of(y, depth) == cx) out.push_back(y);
      }
    }
    for (size_t seed = 0; seed < core_->seeds.size() && int(out.size()) < count + 2;
         ++seed) {
      if (int(seed) == p.seed) continue;
      for (Int o = -Int(depth) - 2; o <= Int(depth) + 2; ++o) {
        Point y(SubstPoint{int(seed), o});
        if (space().cell_of(y, depth) == cx) {
          out.push_back(y);
          break;
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::optional<std::vector<std::string>> exact_closure_cells(const Point&,
                                                              int k) const override {
    if (k > space_->enumerable_depth()) return std::nullopt;
    return space_->cells(k);  // minimality: every orbit closure is the whole space
  }

  std::optional<bool> minimal_system() const override { return true; }

  std::vector<AsymptoticCandidate> asymptotic_candidates() const override {
    std::vector<AsymptoticCandidate> out;
    for (size_t i = 0; i < core_->seeds.size(); ++i)
      for (size_t j = i + 1; j < core_->seeds.size(); ++j) {
        if (core_->seeds[i].right == core_->seeds[j].right)
          out.push_back({Point(SubstPoint{int(i), 0}), Point(SubstPoint{int(j), 0}),
                         GroupElement(Int{1}), true,
                         "points share the right half-sequence"});
        if (core_->seeds[i].left == core_->seeds[j].left)
          out.push_back({Point(SubstPoint{int(i), 0}), Point(SubstPoint{int(j), 0}),
                         GroupElement(Int{-1}), true,
                         "points share the left half-sequence"});
      }
    return out;
  }

  std::string format_point(const Point& x) const override {
    const auto& p = std::get<SubstPoint>(x.payload());
    return "fix:" + std::to_string(p.seed) + "@" + std::to_string(p.offset);
  }

  Point parse_point(std::string_view s) const override {
    if (s.substr(0, 4) != "fix:")
      throw std::invalid_argument("parse_point: expected fix:<seed>@<offset>");
    auto at = s.find('@');
    if (at == std::string_view::npos)
      throw std::invalid_argument("parse_point: missing offset");
    int seed = std::stoi(std::string(s.substr(4, at - 4)));
    Int off = std::stoll(std::string(s.substr(at + 1)));
    if (seed < 0 || size_t(seed) >= core_->seeds.size())
      throw std::invalid_argument("parse_point: seed out of range");
    return Point(SubstPoint{seed, off});
  }

  const detail::SubstCore& core() const { return *core_; }

 private:
  static void validate(detail::SubstCore& core) {
    if (core.rules.empty())
      throw std::invalid_argument("substitution: empty rule set");
    for (auto& [a, w] : core.rules) {
      core.alphabet.push_back(a);
      if (w.empty()) throw std::invalid_argument("substitution: empty image");
      for (char c : w)
        if (!core.rules.count(c))
          throw std::invalid_argument("substitution: image uses unknown letter");
    }
    int n = int(core.alphabet.size());

    // primitivity: some power of the incidence matrix is strictly positive
    std::vector<std::vector<bool>> m(size_t(n), std::vector<bool>(size_t(n), false));
    auto idx = [&](char c) {
      return size_t(std::lower_bound(core.alphabet.begin(), core.alphabet.end(), c) -
                    core.alphabet.begin());
    };
    for (char a : core.alphabet)
      for (char c : core.rules.at(a)) m[idx(a)][idx(c)] = true;
    int bound = (n - 1) * (n - 1) + 1;
    auto mult = [&](const std::vector<std::vector<bool>>& x,
                    const std::vector<std::vector<bool>>& y) {
      std::vector<std::vector<bool>> z(size_t(n), std::vector<bool>(size_t(n), false));
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
          if (x[size_t(i)][size_t(l)])
            for (int j = 0; j < n; ++j)
              if (y[size_t(l)][size_t(j)]) z[size_t(i)][size_t(j)] = true;
      return z;
    };
    auto positive = [&](const std::vector<std::vector<bool>>& x) {
      for (auto& row : x)
        for (bool b : row)
          if (!b) return false;
      return true;
    };
    auto p = m;
    int power = 1;
    while (!positive(p) && power <= bound) {
      p = mult(p, m);
      ++power;
    }
    if (!positive(p)) {
      std::string zero;
      for (int i = 0; i < n && zero.empty(); ++i)
        for (int j = 0; j < n; ++j)
          if (!p[size_t(i)][size_t(j)]) {
            zero = std::string(1, core.alphabet[size_t(i)]) + "," +
                   core.alphabet[size_t(j)];
            break;
          }
      throw std::invalid_argument(
          "substitution is not primitive: incidence matrix power " +
          std::to_string(bound) + " still has a zero entry at (" + zero + ")");
    }
    core.primitivity_power = power;

    // expansion: images must eventually grow
    {
      std::map<char, size_t> len;
      for (char a : core.alphabet) len[a] = core.rules.at(a).size();
      int rounds = 0;
      auto min_len = [&]() {
        size_t v = len.begin()->second;
        for (auto& [a, l] : len) v = std::min(v, l);
        return v;
      };
      while (min_len() < 2 && rounds < 2 * n + 4) {
        std::map<char, size_t> next;
        for (char a : core.alphabet) {
          size_t s = 0;
          for (char c : core.rules.at(a)) s += len[c];
          next[a] = s;
        }
        len = std::move(next);
        ++rounds;
      }
      if (min_len() < 2)
        throw std::invalid_argument("substitution does not expand any letter");
    }

    // exact two-letter factors: seed with deep images, then close under
    // the block map (a length-2 factor of the image spans two blocks)
    {
      std::set<std::string> f2;
      for (char a : core.alphabet) {
        std::string w(1, a);
        for (int t = 0; t < 2 * n + 4; ++t) w = core.apply(w);
        for (size_t i = 0; i + 2 <= w.size(); ++i) f2.insert(w.substr(i, 2));
      }
      bool changed = true;
      while (changed) {
        changed = false;
        std::set<std::string> next = f2;
        for (const auto& cd : f2) {
          std::string w = core.rules.at(cd[0]) + core.rules.at(cd[1]);
          for (size_t i = 0; i + 2 <= w.size(); ++i)
            if (next.insert(w.substr(i, 2)).second) changed = true;
        }
        f2 = std::move(next);
      }
      core.two_factors = std::move(f2);
    }

    // seed letters: a power m fixing some last-letter and first-letter
    // choices whose juxtaposition is a factor of the language
    auto last_of = [&](char a) { return core.rules.at(a).back(); };
    auto first_of = [&](char a) { return core.rules.at(a).front(); };
    for (int m_cand = 1; m_cand <= 4 * n * n + 8; ++m_cand) {
      std::vector<char> lefts, rights;
      for (char a : core.alphabet) {
        char x = a, y = a;
        for (int t = 0; t < m_cand; ++t) {
          x = last_of(x);
          y = first_of(y);
        }
        if (x == a) lefts.push_back(a);
        if (y == a) rights.push_back(a);
      }
      std::vector<detail::SubstCore::Seed> seeds;
      for (char a : lefts)
        for (char b : rights) {
          std::string ab{a, b};
          if (core.two_factors.count(ab)) seeds.push_back({a, b});
        }
      if (!seeds.empty()) {
        core.power = m_cand;
        core.seeds = std::move(seeds);
        break;
      }
    }
    if (core.seeds.empty())
      throw std::invalid_argument("substitution: no two-sided fixed point found");
    core.left_words.resize(core.seeds.size());
    core.right_words.resize(core.seeds.size());
    for (size_t i = 0; i < core.seeds.size(); ++i) {
      core.left_words[i] = std::string(1, core.seeds[i].left);
      core.right_words[i] = std::string(1, core.seeds[i].right);
    }
  }

  std::shared_ptr<const detail::SubstCore> core_;
  std::string display_name_;
};

// ---------------------------------------------------------------------------
// One-dot subshift: the shift on the closure of the indicator of {0} —
// all single-mark sequences together with the all-zero point.
// ---------------------------------------------------------------------------

class OneDotSpace final : public Space {
 public:
  int address_depth() const override { return 1 << 14; }
  int enumerable_depth() const override { return 512; }

  std::vector<std::string> cells(int k) const override {
    check_level(k, true);
    if (k == 0) return {""};
    size_t len = size_t(2 * k + 1);
    std::vector<std::string> out;
    out.push_back(std::string(len, '0'));
    for (size_t i = 0; i < len; ++i) {
      std::string s(len, '0');
      s[i] = '1';
      out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string parent_id(int k, const std::string& id) const override {
    if (k <= 0) throw std::invalid_argument("root cell has no parent");
    if (k == 1) return "";
    return id.substr(1, id.size() - 2);
  }

  std::string cell_of(const Point& x, int k) const override {
    check_level(k);
    if (k == 0) return "";
    const auto& p = std::get<OneDotPoint>(x.payload());
    std::string s(size_t(2 * k + 1), '0');
    if (p.mark && std::llabs(*p.mark) <= k) s[size_t(*p.mark + k)] = '1';
    return s;
  }
};

class OneDotSystem final : public FlowSystem {
 public:
  OneDotSystem() {
    group_ = Group::integers();
    space_ = std::make_shared<OneDotSpace>();
    caps_ = Capabilities{true, true, false, false};
  }

  std::string name() const override { return "one-dot"; }

  Point act(const GroupElement& g, const Point& x) const override {
    Int n = std::get<Int>(g.payload());
    const auto& p = std::get<OneDotPoint>(x.payload());
    if (!p.mark) return x;
    return Point(OneDotPoint{*p.mark - n});
  }

  std::vector<Point> designated_points() const override {
    return {Point(OneDotPoint{Int{0}}), Point(OneDotPoint{std::nullopt})};
  }

  std::vector<Point> sample_points(int count, std::mt19937_64& rng) const override {
    std::vector<Point> out = designated_points();
    for (Int j = 1; int(out.size()) < count && j <= count; ++j) {
      out.push_back(Point(OneDotPoint{j}));
      out.push_back(Point(OneDotPoint{-j}));
      if (j == 3) out.push_back(Point(OneDotPoint{Int(3 + rng() % 61)}));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<Point> points_in_cell(const Point& x, int depth, int count,
                                    std::mt19937_64&) const override {
    const auto& p = std::get<OneDotPoint>(x.payload());
    std::vector<Point> out;
    if (p.mark && std::llabs(*p.mark) <= depth) {
      out.push_back(x);  // a visible mark pins the point: the cell is a singleton
      return out;
    }
    out.push_back(Point(OneDotPoint{std::nullopt}));
    for (Int j = 1; int(out.size()) < count; ++j) {
      out.push_back(Point(OneDotPoint{Int(depth) + j}));
      if (int(out.size()) < count) out.push_back(Point(OneDotPoint{-Int(depth) - j}));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::optional<ReturnSetDesc> exact_return_set(const Point& x,
                                                const ClopenSet& u) const override {
    int k = u.level;
    if (k == 0)
      return u.ids.empty() ? ReturnSetDesc::finite_set({}) : ReturnSetDesc::all();
    std::string zeros(size_t(2 * k + 1), '0');
    bool zero_in = std::binary_search(u.ids.begin(), u.ids.end(), zeros);
    std::vector<Int> marks_in;
    for (const auto& id : u.ids) {
      auto pos = id.find('1');
      if (pos != std::string::npos) marks_in.push_back(Int(pos) - k);
    }
    std::sort(marks_in.begin(), marks_in.end());
    const auto& p = std::get<OneDotPoint>(x.payload());
    if (!p.mark)
      return zero_in ? ReturnSetDesc::all() : ReturnSetDesc::finite_set({});
    if (zero_in) {
      std::vector<Int> excluded;
      for (Int w = -k; w <= k; ++w)
        if (!std::binary_search(marks_in.begin(), marks_in.end(), w))
          excluded.push_back(*p.mark - w);
      return ReturnSetDesc::cofinite(std::move(excluded));
    }
    std::vector<Int> elems;
    for (Int w : marks_in) elems.push_back(*p.mark - w);
    return ReturnSetDesc::finite_set(std::move(elems));
  }

  std::optional<std::vector<std::string>> exact_closure_cells(const Point& x,
                                                              int k) const override {
    const auto& p = std::get<OneDotPoint>(x.payload());
    if (!p.mark) {
      if (k == 0) return std::vector<std::string>{""};
      return std::vector<std::string>{std::string(size_t(2 * k + 1), '0')};
    }
    return space_->cells(k);  // a marked point has dense orbit in the space
  }

  std::optional<bool> minimal_system() const override { return false; }

  bool neighbors_closed_form() const override { return true; }

  std::vector<ClopenSet> discriminating_clopen_sets(int max_level) const override {
    std::vector<ClopenSet> out;
    for (int k = 1; k <= max_level; ++k)
      out.push_back(ClopenSet::of_cells(k, {std::string(size_t(2 * k + 1), '0')}));
    return out;  // cylinders of the all-zero point
  }

  std::vector<AsymptoticCandidate> asymptotic_candidates() const override {
    return {{Point(OneDotPoint{std::nullopt}), Point(OneDotPoint{Int{0}}),
             GroupElement(Int{1}), true, "the mark leaves every fixed window"},
            {Point(OneDotPoint{Int{0}}), Point(OneDotPoint{Int{1}}),
             GroupElement(Int{1}), true, "both marks leave every fixed window"}};
  }

  std::optional<Point> limit_point(const Point& base,
                                   const std::vector<GroupElement>& tail) const override {
    const auto& p = std::get<OneDotPoint>(base.payload());
    if (!p.mark) return base;
    if (tail.empty()) return std::nullopt;
    Int last = std::llabs(std::get<Int>(tail.back().payload()));
    if (last <= 2 * (std::llabs(*p.mark) + 1)) return std::nullopt;
    return Point(OneDotPoint{std::nullopt});  // the mark escapes every window
  }

  std::string format_point(const Point& x) const override {
    const auto& p = std::get<OneDotPoint>(x.payload());
    if (!p.mark) return "zero";
    return "mark@" + std::to_string(*p.mark);
  }

  Point parse_point(std::string_view s) const override {
    if (s == "zero") return Point(OneDotPoint{std::nullopt});
    if (s.substr(0, 5) != "mark@")
      throw std::invalid_argument("parse_point: expected zero or mark@<pos>");
    return Point(OneDotPoint{std::stoll(std::string(s.substr(5)))});
  }
};

// ---------------------------------------------------------------------------
// Finite actions: a finitely generated group acting on m points through
// permutations assigned to the user generators.
// ---------------------------------------------------------------------------

class FiniteSpace final : public Space {
 public:
  explicit FiniteSpace(int points) : points_(points) {}

  int address_depth() const override { return 16; }
  int enumerable_depth() const override { return 16; }

  std::vector<std::string> cells(int k) const override {
    check_level(k, true);
    if (k == 0) return {"*"};
    std::vector<std::string> out;
    for (int i = 0; i < points_; ++i) out.push_back(std::to_string(i));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string parent_id(int k, const std::string& id) const override {
    if (k <= 0) throw std::invalid_argument("root cell has no parent");
    if (k == 1) return "*";
    return id;
  }

  std::string cell_of(const Point& x, int k) const override {
    check_level(k);
    if (k == 0) return "*";
    return std::to_string(std::get<FinitePoint>(x.payload()).index);
  }

 private:
  int points_;
};

class FiniteActionSystem final : public FlowSystem {
 public:
  FiniteActionSystem(Group g, int points, std::vector<std::vector<int>> perms,
                     std::string display_name)
      : display_name_(std::move(display_name)) {
    group_ = std::move(g);
    points_ = points;
    if (points_ < 1) throw std::invalid_argument("finite action: needs >= 1 point");
    if (group_.kind() == GroupKind::product)
      throw std::invalid_argument(
          "finite action: use free_abelian for commuting tuples, not product groups");
    size_t ngens = group_.user_generators().size();
    if (perms.size() != ngens)
      throw std::invalid_argument("finite action: expected " + std::to_string(ngens) +
                                  " permutations, got " + std::to_string(perms.size()));
    for (const auto& p : perms) validate_perm(p, points_);
    perms_ = std::move(perms);
    check_relations();
    build_cycles();
    if (group_.kind() == GroupKind::table) build_table_map();
    space_ = std::make_shared<FiniteSpace>(points_);
    caps_ = Capabilities{true, group_.kind() == GroupKind::integers, true, true};
    // orbit partition, for minimality and decomposition oracles
    std::vector<int> seen(size_t(points_), -1);
    for (int i = 0; i < points_; ++i) {
      if (seen[size_t(i)] >= 0) continue;
      std::vector<int> orbit{i};
      seen[size_t(i)] = int(orbits_.size());
      for (size_t q = 0; q < orbit.size(); ++q)
        for (size_t gi = 0; gi < perms_.size(); ++gi)
          for (int y : {perms_[gi][size_t(orbit[q])], inv_perms_[gi][size_t(orbit[q])]})
            if (seen[size_t(y)] < 0) {
              seen[size_t(y)] = int(orbits_.size());
              orbit.push_back(y);
            }
      std::sort(orbit.begin(), orbit.end());
      orbits_.push_back(std::move(orbit));
    }
    orbit_of_.assign(size_t(points_), 0);
    for (size_t oi = 0; oi < orbits_.size(); ++oi)
      for (int x : orbits_[oi]) orbit_of_[size_t(x)] = int(oi);
  }

  std::string name() const override { return display_name_; }
  int point_count() const { return points_; }
  const std::vector<std::vector<int>>& orbits() const { return orbits_; }

  Point act(const GroupElement& g, const Point& x) const override {
    int i = std::get<FinitePoint>(x.payload()).index;
    return Point(FinitePoint{apply_element(g, i)});
  }

  std::vector<Point> designated_points() const override {
    std::vector<Point> out;
    for (int i = 0; i < points_; ++i) out.push_back(Point(FinitePoint{i}));
    return out;
  }

  std::vector<Point> sample_points(int, std::mt19937_64&) const override {
    return designated_points();  // exhaustive
  }

  std::vector<Point> points_in_cell(const Point& x, int depth, int,
                                    std::mt19937_64&) const override {
    if (depth >= 1) return {x};
    return designated_points();
  }

  std::optional<ReturnSetDesc> exact_return_set(const Point& x,
                                                const ClopenSet& u) const override {
    if (group_.kind() != GroupKind::integers) return std::nullopt;
    if (u.level == 0)
      return u.ids.empty() ? ReturnSetDesc::finite_set({}) : ReturnSetDesc::all();
    int i = std::get<FinitePoint>(x.payload()).index;
    Int period = point_period(0, i);
    std::vector<Int> rs;
    int y = i;
    for (Int j = 0; j < period; ++j) {
      if (std::binary_search(u.ids.begin(), u.ids.end(), std::to_string(y)))
        rs.push_back(j);
      y = perms_[0][size_t(y)];
    }
    return ReturnSetDesc::residue_classes(period, std::move(rs));
  }

  std::optional<std::vector<std::string>> exact_closure_cells(const Point& x,
                                                              int k) const override {
    if (k == 0) return std::vector<std::string>{"*"};
    int i = std::get<FinitePoint>(x.payload()).index;
    std::vector<std::string> out;
    for (int y : orbits_[size_t(orbit_of_[size_t(i)])]) out.push_back(std::to_string(y));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<bool> minimal_system() const override { return orbits_.size() == 1; }

  std::optional<std::string> uniform_return_rule() const override {
    if (group_.kind() != GroupKind::integers) return std::nullopt;
    return "returns are unions of residue classes modulo the point's orbit period";
  }

  bool neighbors_closed_form() const override { return true; }

  std::string format_point(const Point& x) const override {
    return "pt:" + std::to_string(std::get<FinitePoint>(x.payload()).index);
  }

  Point parse_point(std::string_view s) const override {
    if (s.substr(0, 3) != "pt:")
      throw std::invalid_argument("parse_point: expected pt:<index>");
    int i = std::stoi(std::string(s.substr(3)));
    if (i < 0 || i >= points_)
      throw std::invalid_argument("parse_point: index out of range");
    return Point(FinitePoint{i});
  }

 private:
  static void validate_perm(const std::vector<int>& p, int n) {
    if (int(p.size()) != n)
      throw std::invalid_argument("finite action: permutation size mismatch");
    std::vector<bool> seen(size_t(n), false);
    for (int v : p) {
      if (v < 0 || v >= n || seen[size_t(v)])
        throw std::invalid_argument("finite action: not a permutation");
      seen[size_t(v)] = true;
    }
  }

  void check_relations() {
    inv_perms_.resize(perms_.size());
    for (size_t i = 0; i < perms_.size(); ++i) {
      inv_perms_[i].assign(size_t(points_), 0);
      for (int x = 0; x < points_; ++x) inv_perms_[i][size_t(perms_[i][size_t(x)])] = x;
    }
    if (group_.kind() == GroupKind::free_abelian) {
      for (size_t i = 0; i < perms_.size(); ++i)
        for (size_t j = i + 1; j < perms_.size(); ++j)
          for (int x = 0; x < points_; ++x)
            if (perms_[i][size_t(perms_[j][size_t(x)])] !=
                perms_[j][size_t(perms_[i][size_t(x)])])
              throw std::invalid_argument(
                  "finite action: generators must commute; relator [s" +
                  std::to_string(i) + ",s" + std::to_string(j) + "] is violated");
    }
    // Z needs one generator and no relations; free groups are unconstrained;
    // table groups are checked in build_table_map.
  }

  void build_cycles() {
    cycles_.resize(perms_.size());
    for (size_t gi = 0; gi < perms_.size(); ++gi) {
      auto& c = cycles_[gi];
      c.cycle_idx.assign(size_t(points_), -1);
      c.pos.assign(size_t(points_), 0);
      for (int s = 0; s < points_; ++s) {
        if (c.cycle_idx[size_t(s)] >= 0) continue;
        std::vector<int> cyc;
        int x = s;
        do {
          c.cycle_idx[size_t(x)] = int(c.cycles.size());
          c.pos[size_t(x)] = int(cyc.size());
          cyc.push_back(x);
          x = perms_[gi][size_t(x)];
        } while (x != s);
        c.cycles.push_back(std::move(cyc));
      }
    }
  }

  Int point_period(size_t gi, int x) const {
    return Int(cycles_[gi].cycles[size_t(cycles_[gi].cycle_idx[size_t(x)])].size());
  }

  int power_apply(size_t gi, Int n, int x) const {
    const auto& c = cycles_[gi];
    const auto& cyc = c.cycles[size_t(c.cycle_idx[size_t(x)])];
    Int len = Int(cyc.size());
    Int p = (Int(c.pos[size_t(x)]) + (n % len) + len) % len;
    return cyc[size_t(p)];
  }

  int apply_element(const GroupElement& g, int x) const {
    switch (group_.kind()) {
      case GroupKind::integers:
        return power_apply(0, std::get<Int>(g.payload()), x);
      case GroupKind::free_abelian: {
        const auto& v = std::get<std::vector<Int>>(g.payload());
        int y = x;
        for (size_t i = 0; i < v.size(); ++i) y = power_apply(i, v[i], y);
        return y;
      }
      case GroupKind::free_group: {
        const auto& w = std::get<GroupElement::FreeWord>(g.payload());
        int y = x;
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
          int l = *it;
          y = l > 0 ? perms_[size_t(l - 1)][size_t(y)]
                    : inv_perms_[size_t(-l - 1)][size_t(y)];
        }
        return y;
      }
      case GroupKind::table:
        return elem_perm_[size_t(std::get<int>(g.payload()))][size_t(x)];
      default:
        throw std::invalid_argument("finite action: unsupported group kind");
    }
  }

  void build_table_map() {
    size_t n = group_.table_size();
    elem_perm_.assign(n, {});
    std::vector<int> id(size_t(points_), 0);
    for (int i = 0; i < points_; ++i) id[size_t(i)] = i;
    elem_perm_[0] = id;
    std::vector<bool> known(n, false);
    known[0] = true;
    auto gens = group_.user_generators();
    std::vector<std::pair<int, std::vector<int>>> gen_pairs;
    for (size_t gi = 0; gi < gens.size(); ++gi) {
      int gidx = std::get<int>(gens[gi].payload());
      gen_pairs.push_back({gidx, perms_[gi]});
      int ginv = std::get<int>(group_.invert(gens[gi]).payload());
      gen_pairs.push_back({ginv, inv_perms_[gi]});
    }
    std::vector<int> frontier{0};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int x : frontier)
        for (const auto& [gidx, gperm] : gen_pairs) {
          GroupElement prod = group_.compose(GroupElement(int(gidx)), GroupElement(int(x)));
          int y = std::get<int>(prod.payload());
          std::vector<int> cand(size_t(points_), 0);
          for (int p = 0; p < points_; ++p)
            cand[size_t(p)] = gperm[size_t(elem_perm_[size_t(x)][size_t(p)])];
          if (!known[size_t(y)]) {
            elem_perm_[size_t(y)] = cand;
            known[size_t(y)] = true;
            next.push_back(y);
          } else if (elem_perm_[size_t(y)] != cand) {
            throw std::invalid_argument(
                "finite action: assignment violates a relation at element " +
                group_.format(GroupElement(int(y))));
          }
        }
      frontier = std::move(next);
    }
    for (size_t i = 0; i < n; ++i)
      if (!known[i])
        throw std::invalid_argument("finite action: generators do not cover the group");
  }

  struct CycleData {
    std::vector<std::vector<int>> cycles;
    std::vector<int> cycle_idx;  // per point
    std::vector<int> pos;        // per point
  };

  std::string display_name_;
  int points_ = 0;
  std::vector<std::vector<int>> perms_, inv_perms_;
  std::vector<CycleData> cycles_;
  std::vector<std::vector<int>> elem_perm_;
  std::vector<std::vector<int>> orbits_;
  std::vector<int> orbit_of_;
};

// ---------------------------------------------------------------------------
// Product: the diagonal action on X x X.
// ---------------------------------------------------------------------------

class ProductSpace final : public Space {
 public:
  explicit ProductSpace(std::shared_ptr<const Space> base) : base_(std::move(base)) {}

  int address_depth() const override { return base_->address_depth(); }
  int enumerable_depth() const override { return base_->enumerable_depth(); }

  std::vector<std::string> cells(int k) const override {
    check_level(k, true);
    auto b = base_->cells(k);
    if (b.size() * b.size() > 250000)
      throw budget_error("product cell enumeration too large at level " +
                         std::to_string(k));
    std::vector<std::string> out;
    out.reserve(b.size() * b.size());
    for (const auto& x : b)
      for (const auto& y : b) out.push_back("(" + x + "|" + y + ")");
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string parent_id(int k, const std::string& id) const override {
    auto [a, b] = split(id);
    return "(" + base_->parent_id(k, a) + "|" + base_->parent_id(k, b) + ")";
  }

  std::string cell_of(const Point& x, int k) const override {
    check_level(k);
    const auto& p = x.as_pair();
    return "(" + base_->cell_of(p.first, k) + "|" + base_->cell_of(p.second, k) + ")";
  }

  static std::pair<std::string, std::string> split(const std::string& id) {
    if (id.size() < 3 || id.front() != '(' || id.back() != ')')
      throw std::invalid_argument("product cell id must look like (a|b)");
    int depth = 0;
    for (size_t i = 1; i + 1 < id.size(); ++i) {
      if (id[i] == '(') depth++;
      if (id[i] == ')') depth--;
      if (id[i] == '|' && depth == 0)
        return {id.substr(1, i - 1), id.substr(i + 1, id.size() - i - 2)};
    }
    throw std::invalid_argument("product cell id must look like (a|b)");
  }

 private:
  std::shared_ptr<const Space> base_;
};

class ProductSystem final : public FlowSystem {
 public:
  explicit ProductSystem(std::shared_ptr<const FlowSystem> base) : base_(std::move(base)) {
    group_ = base_->group();
    space_ = std::make_shared<ProductSpace>(base_->space_ptr());
    auto bc = base_->capabilities();
    caps_ = Capabilities{bc.exact_language, false, bc.level_equivariant, bc.finite};
  }

  std::string name() const override { return "product(" + base_->name() + ")"; }

  Point act(const GroupElement& g, const Point& x) const override {
    const auto& p = x.as_pair();
    return Point::pair(base_->act(g, p.first), base_->act(g, p.second));
  }

  std::vector<Point> designated_points() const override {
    auto d = base_->designated_points();
    std::vector<Point> out;
    for (const auto& a : d) out.push_back(Point::pair(a, a));
    for (size_t i = 0; i < d.size(); ++i)
      for (size_t j = 0; j < d.size(); ++j)
        if (i != j) out.push_back(Point::pair(d[i], d[j]));
    return out;
  }

  std::vector<Point> sample_points(int count, std::mt19937_64& rng) const override {
    auto b = base_->sample_points(std::max(3, count / 2), rng);
    std::vector<Point> out;
    for (size_t i = 0; i < b.size() && int(out.size()) < count; ++i)
      for (size_t j = 0; j < b.size() && int(out.size()) < count; ++j)
        out.push_back(Point::pair(b[i], b[j]));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<Point> points_in_cell(const Point& x, int depth, int count,
                                    std::mt19937_64& rng) const override {
    const auto& p = x.as_pair();
    auto as = base_->points_in_cell(p.first, depth, std::max(2, count / 2), rng);
    auto bs = base_->points_in_cell(p.second, depth, std::max(2, count / 2), rng);
    std::vector<Point> out;
    for (const auto& a : as)
      for (const auto& b : bs)
        if (int(out.size()) < count) out.push_back(Point::pair(a, b));
    return out;
  }

  std::optional<std::vector<std::string>> exact_closure_cells(const Point& x,
                                                              int k) const override {
    if (caps_.finite) {
      auto orbit = finite_orbit(*this, x);
      std::set<std::string> cells;
      for (const auto& y : orbit.points) cells.insert(space_->cell_of(y, k));
      return std::vector<std::string>(cells.begin(), cells.end());
    }
    const auto& p = x.as_pair();
    if (p.first == p.second && base_->minimal_system() == std::optional<bool>(true)) {
      if (k > base_->space().enumerable_depth()) return std::nullopt;
      std::vector<std::string> out;  // diagonal closure of a minimal flow
      for (const auto& c : base_->space().cells(k)) out.push_back("(" + c + "|" + c + ")");
      std::sort(out.begin(), out.end());
      return out;
    }
    return std::nullopt;
  }

  std::optional<Point> limit_point(const Point& base,
                                   const std::vector<GroupElement>& tail) const override {
    const auto& p = base.as_pair();
    auto a = base_->limit_point(p.first, tail);
    auto b = base_->limit_point(p.second, tail);
    if (a && b) return Point::pair(*a, *b);
    return std::nullopt;
  }

  std::string format_point(const Point& x) const override {
    const auto& p = x.as_pair();
    return "(" + base_->format_point(p.first) + "|" + base_->format_point(p.second) + ")";
  }

  Point parse_point(std::string_view s) const override {
    auto [a, b] = ProductSpace::split(std::string(s));
    return Point::pair(base_->parse_point(a), base_->parse_point(b));
  }

  const FlowSystem& base() const { return *base_; }

 private:
  std::shared_ptr<const FlowSystem> base_;
};

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

inline std::shared_ptr<const FlowSystem> make_odometer(int base) {
  return std::make_shared<OdometerSystem>(base);
}

inline std::shared_ptr<const FlowSystem> make_substitution(
    std::map<char, std::string> rules, std::string name = "substitution") {
  return std::make_shared<SubstitutionSystem>(std::move(rules), std::move(name));
}

inline std::shared_ptr<const FlowSystem> make_thue_morse() {
  return make_substitution({{'0', "01"}, {'1', "10"}}, "thue-morse");
}

inline std::shared_ptr<const FlowSystem> make_fibonacci() {
  return make_substitution({{'0', "01"}, {'1', "0"}}, "fibonacci");
}

inline std::shared_ptr<const FlowSystem> make_one_dot() {
  return std::make_shared<OneDotSystem>();
}

inline std::shared_ptr<const FlowSystem> make_finite_action(
    Group g, int points, std::vector<std::vector<int>> perms,
    std::string name = "finite-action") {
  return std::make_shared<FiniteActionSystem>(std::move(g), points, std::move(perms),
                                              std::move(name));
}

inline std::shared_ptr<const FlowSystem> make_product(
    std::shared_ptr<const FlowSystem> base) {
  return std::make_shared<ProductSystem>(std::move(base));
}

}  // namespace recur
