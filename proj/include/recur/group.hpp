#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "recur/common.hpp"

namespace recur {

enum class GroupKind { integers, free_abelian, free_group, table, product };

/// Whether a ball or K-set includes the identity-translate boundary:
/// `punctured` excludes the identity (for balls) or the base element
/// (for K-sets); `closed` includes it.
enum class SetVariant { punctured, closed };

class GroupElement;

namespace detail {
int compare_elements(const GroupElement& a, const GroupElement& b);
}

/// A group element in canonical form. The payload shape is fixed by the
/// owning group's kind: an integer, an integer vector, a freely reduced
/// word (letters +i / -i, 1-based), a multiplication-table index, or a
/// tuple of factor elements.
class GroupElement {
 public:
  using FreeWord = std::vector<int>;
  using Payload =
      std::variant<Int, std::vector<Int>, FreeWord, int, std::vector<GroupElement>>;

  GroupElement() : payload_(Int{0}) {}
  explicit GroupElement(Payload p) : payload_(std::move(p)) {}

  const Payload& payload() const { return payload_; }

  bool operator==(const GroupElement& o) const {
    return detail::compare_elements(*this, o) == 0;
  }
  bool operator!=(const GroupElement& o) const { return !(*this == o); }
  bool operator<(const GroupElement& o) const {
    return detail::compare_elements(*this, o) < 0;
  }

 private:
  Payload payload_;
};

namespace detail {

inline int compare_elements(const GroupElement& a, const GroupElement& b) {
  const auto& pa = a.payload();
  const auto& pb = b.payload();
  if (pa.index() != pb.index()) return pa.index() < pb.index() ? -1 : 1;
  switch (pa.index()) {
    case 0: {
      Int x = std::get<0>(pa), y = std::get<0>(pb);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    case 1: {
      const auto& x = std::get<1>(pa);
      const auto& y = std::get<1>(pb);
      if (x != y) return x < y ? -1 : 1;
      return 0;
    }
    case 2: {
      const auto& x = std::get<2>(pa);
      const auto& y = std::get<2>(pb);
      if (x != y) return x < y ? -1 : 1;
      return 0;
    }
    case 3: {
      int x = std::get<3>(pa), y = std::get<3>(pb);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    default: {
      const auto& x = std::get<4>(pa);
      const auto& y = std::get<4>(pb);
      for (size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        int c = compare_elements(x[i], y[i]);
        if (c != 0) return c;
      }
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      return 0;
    }
  }
}

inline void reduce_free_word(GroupElement::FreeWord& w) {
  GroupElement::FreeWord out;
  out.reserve(w.size());
  for (int l : w) {
    if (l == 0) throw std::invalid_argument("zero letter in free word");
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  w = std::move(out);
}

}  // namespace detail

struct Ball {
  Int radius = 0;
  SetVariant variant = SetVariant::closed;
  std::vector<GroupElement> elements;  // canonical order: (length, payload)
};

struct KSet {
  GroupElement base;
  SetVariant variant = SetVariant::punctured;
  std::vector<GroupElement> elements;
};

/// A finitely generated group with a fixed symmetric generating set.
/// The user supplies generators S; the working generating set is always
/// S together with its inverses and the identity, so word length is well
/// defined and balls are nested. Cheap to copy (shared immutable rep).
class Group {
 public:
  static Group integers() {
    Rep r;
    r.kind = GroupKind::integers;
    return Group(std::move(r));
  }

  static Group free_abelian(int dim) {
    if (dim < 1) throw std::invalid_argument("free_abelian: dim must be >= 1");
    Rep r;
    r.kind = GroupKind::free_abelian;
    r.dim = dim;
    return Group(std::move(r));
  }

  static Group free_group(int rank) {
    if (rank < 1 || rank > 26)
      throw std::invalid_argument("free_group: rank must be in [1,26]");
    Rep r;
    r.kind = GroupKind::free_group;
    r.rank = rank;
    return Group(std::move(r));
  }

  /// Finite group given by its full multiplication table. Index 0 must be
  /// the identity; the table is checked for the group axioms and the
  /// generators must reach every element.
  static Group table_group(std::vector<std::vector<int>> table,
                           std::vector<int> generators,
                           std::vector<std::string> names = {}) {
    Rep r;
    r.kind = GroupKind::table;
    r.table = std::move(table);
    r.gen_indices = std::move(generators);
    r.names = std::move(names);
    validate_table(r);
    return Group(std::move(r));
  }

  static Group direct_product(std::vector<Group> factors) {
    if (factors.empty())
      throw std::invalid_argument("direct_product: needs at least one factor");
    Rep r;
    r.kind = GroupKind::product;
    r.factors = std::move(factors);
    return Group(std::move(r));
  }

  GroupKind kind() const { return rep_->kind; }
  int dim() const { return rep_->dim; }
  int rank() const { return rep_->rank; }
  size_t table_size() const { return rep_->table.size(); }
  const std::vector<Group>& factors() const { return rep_->factors; }

  bool is_finite() const {
    switch (rep_->kind) {
      case GroupKind::table:
        return true;
      case GroupKind::product:
        return std::all_of(rep_->factors.begin(), rep_->factors.end(),
                           [](const Group& g) { return g.is_finite(); });
      default:
        return false;
    }
  }

  std::string name() const {
    switch (rep_->kind) {
      case GroupKind::integers:
        return "Z";
      case GroupKind::free_abelian:
        return "Z^" + std::to_string(rep_->dim);
      case GroupKind::free_group:
        return "F_" + std::to_string(rep_->rank);
      case GroupKind::table:
        return "table<" + std::to_string(rep_->table.size()) + ">";
      case GroupKind::product: {
        std::string s = "(";
        for (size_t i = 0; i < rep_->factors.size(); ++i) {
          if (i) s += " x ";
          s += rep_->factors[i].name();
        }
        return s + ")";
      }
    }
    return "?";
  }

  GroupElement identity() const {
    switch (rep_->kind) {
      case GroupKind::integers:
        return GroupElement(Int{0});
      case GroupKind::free_abelian:
        return GroupElement(std::vector<Int>(rep_->dim, 0));
      case GroupKind::free_group:
        return GroupElement(GroupElement::FreeWord{});
      case GroupKind::table:
        return GroupElement(int{0});
      case GroupKind::product: {
        std::vector<GroupElement> comps;
        comps.reserve(rep_->factors.size());
        for (const auto& f : rep_->factors) comps.push_back(f.identity());
        return GroupElement(std::move(comps));
      }
    }
    return GroupElement();
  }

  /// Checks that the payload shape matches this group.
  bool contains(const GroupElement& g) const {
    const auto& p = g.payload();
    switch (rep_->kind) {
      case GroupKind::integers:
        return std::holds_alternative<Int>(p);
      case GroupKind::free_abelian:
        return std::holds_alternative<std::vector<Int>>(p) &&
               std::get<std::vector<Int>>(p).size() == size_t(rep_->dim);
      case GroupKind::free_group: {
        if (!std::holds_alternative<GroupElement::FreeWord>(p)) return false;
        const auto& w = std::get<GroupElement::FreeWord>(p);
        for (int l : w)
          if (l == 0 || std::abs(l) > rep_->rank) return false;
        for (size_t i = 1; i < w.size(); ++i)
          if (w[i] == -w[i - 1]) return false;
        return true;
      }
      case GroupKind::table:
        return std::holds_alternative<int>(p) && std::get<int>(p) >= 0 &&
               size_t(std::get<int>(p)) < rep_->table.size();
      case GroupKind::product: {
        if (!std::holds_alternative<std::vector<GroupElement>>(p)) return false;
        const auto& comps = std::get<std::vector<GroupElement>>(p);
        if (comps.size() != rep_->factors.size()) return false;
        for (size_t i = 0; i < comps.size(); ++i)
          if (!rep_->factors[i].contains(comps[i])) return false;
        return true;
      }
    }
    return false;
  }

  GroupElement compose(const GroupElement& a, const GroupElement& b) const {
    require(a);
    require(b);
    switch (rep_->kind) {
      case GroupKind::integers:
        return GroupElement(std::get<Int>(a.payload()) + std::get<Int>(b.payload()));
      case GroupKind::free_abelian: {
        auto v = std::get<std::vector<Int>>(a.payload());
        const auto& w = std::get<std::vector<Int>>(b.payload());
        for (size_t i = 0; i < v.size(); ++i) v[i] += w[i];
        return GroupElement(std::move(v));
      }
      case GroupKind::free_group: {
        auto w = std::get<GroupElement::FreeWord>(a.payload());
        const auto& u = std::get<GroupElement::FreeWord>(b.payload());
        w.insert(w.end(), u.begin(), u.end());
        detail::reduce_free_word(w);
        return GroupElement(std::move(w));
      }
      case GroupKind::table:
        return GroupElement(
            rep_->table[std::get<int>(a.payload())][std::get<int>(b.payload())]);
      case GroupKind::product: {
        const auto& ca = std::get<std::vector<GroupElement>>(a.payload());
        const auto& cb = std::get<std::vector<GroupElement>>(b.payload());
        std::vector<GroupElement> out;
        out.reserve(ca.size());
        for (size_t i = 0; i < ca.size(); ++i)
          out.push_back(rep_->factors[i].compose(ca[i], cb[i]));
        return GroupElement(std::move(out));
      }
    }
    return GroupElement();
  }

  GroupElement invert(const GroupElement& a) const {
    require(a);
    switch (rep_->kind) {
      case GroupKind::integers:
        return GroupElement(-std::get<Int>(a.payload()));
      case GroupKind::free_abelian: {
        auto v = std::get<std::vector<Int>>(a.payload());
        for (auto& x : v) x = -x;
        return GroupElement(std::move(v));
      }
      case GroupKind::free_group: {
        const auto& w = std::get<GroupElement::FreeWord>(a.payload());
        GroupElement::FreeWord out(w.rbegin(), w.rend());
        for (auto& l : out) l = -l;
        return GroupElement(std::move(out));
      }
      case GroupKind::table:
        return GroupElement(rep_->inverse[std::get<int>(a.payload())]);
      case GroupKind::product: {
        const auto& ca = std::get<std::vector<GroupElement>>(a.payload());
        std::vector<GroupElement> out;
        out.reserve(ca.size());
        for (size_t i = 0; i < ca.size(); ++i)
          out.push_back(rep_->factors[i].invert(ca[i]));
        return GroupElement(std::move(out));
      }
    }
    return GroupElement();
  }

  /// Word length over the symmetric generating set; 0 exactly at the
  /// identity. Closed form except for table groups, which use precomputed
  /// breadth-first distances.
  Int word_length(const GroupElement& g) const {
    require(g);
    switch (rep_->kind) {
      case GroupKind::integers:
        return std::llabs(std::get<Int>(g.payload()));
      case GroupKind::free_abelian: {
        Int s = 0;
        for (Int x : std::get<std::vector<Int>>(g.payload())) s += std::llabs(x);
        return s;
      }
      case GroupKind::free_group:
        return Int(std::get<GroupElement::FreeWord>(g.payload()).size());
      case GroupKind::table:
        return rep_->dist[std::get<int>(g.payload())];
      case GroupKind::product: {
        Int s = 0;
        const auto& comps = std::get<std::vector<GroupElement>>(g.payload());
        for (size_t i = 0; i < comps.size(); ++i)
          s += rep_->factors[i].word_length(comps[i]);
        return s;
      }
    }
    return 0;
  }

  std::vector<GroupElement> user_generators() const {
    switch (rep_->kind) {
      case GroupKind::integers:
        return {GroupElement(Int{1})};
      case GroupKind::free_abelian: {
        std::vector<GroupElement> out;
        for (int i = 0; i < rep_->dim; ++i) {
          std::vector<Int> v(rep_->dim, 0);
          v[i] = 1;
          out.push_back(GroupElement(std::move(v)));
        }
        return out;
      }
      case GroupKind::free_group: {
        std::vector<GroupElement> out;
        for (int i = 1; i <= rep_->rank; ++i)
          out.push_back(GroupElement(GroupElement::FreeWord{i}));
        return out;
      }
      case GroupKind::table: {
        std::vector<GroupElement> out;
        for (int i : rep_->gen_indices) out.push_back(GroupElement(int{i}));
        return out;
      }
      case GroupKind::product: {
        // Generators of each factor, embedded with identities elsewhere.
        std::vector<GroupElement> out;
        for (size_t i = 0; i < rep_->factors.size(); ++i) {
          for (const auto& s : rep_->factors[i].user_generators()) {
            std::vector<GroupElement> comps;
            for (size_t j = 0; j < rep_->factors.size(); ++j)
              comps.push_back(i == j ? s : rep_->factors[j].identity());
            out.push_back(GroupElement(std::move(comps)));
          }
        }
        return out;
      }
    }
    return {};
  }

  /// The symmetric generating set S + S^-1 + {e}, canonically ordered.
  std::vector<GroupElement> gamma() const {
    std::vector<GroupElement> out = user_generators();
    size_t n = out.size();
    for (size_t i = 0; i < n; ++i) out.push_back(invert(out[i]));
    out.push_back(identity());
    canonical_sort(out);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// All elements of word length <= r (punctured: excluding the identity),
  /// in canonical order. Throws cap_exceeded past `cap` elements.
  std::vector<GroupElement> ball(Int r, SetVariant variant,
                                 size_t cap = default_ball_cap) const {
    if (r < 0) throw std::invalid_argument("ball: negative radius");
    std::vector<GroupElement> out = enumerate_ball(r, cap);
    if (variant == SetVariant::punctured) {
      GroupElement e = identity();
      out.erase(std::remove(out.begin(), out.end(), e), out.end());
    }
    canonical_sort(out);
    return out;
  }

  Ball ball_set(Int r, SetVariant variant, size_t cap = default_ball_cap) const {
    return Ball{r, variant, ball(r, variant, cap)};
  }

  /// Elements of word length exactly r.
  std::vector<GroupElement> sphere(Int r, size_t cap = default_ball_cap) const {
    auto b = ball(r, SetVariant::closed, cap);
    std::vector<GroupElement> out;
    for (auto& g : b)
      if (word_length(g) == r) out.push_back(std::move(g));
    return out;
  }

  /// K-set of g: left translates of g by all words shorter than |g|.
  /// The punctured variant excludes g itself, the closed variant keeps it.
  /// Undefined (rejected) at the identity.
  KSet k_set(const GroupElement& base, SetVariant variant,
             size_t cap = default_ball_cap) const {
    require(base);
    Int len = word_length(base);
    if (len == 0)
      throw std::invalid_argument("k_set: undefined at the identity");
    auto b = ball(len - 1, variant, cap);
    KSet out;
    out.base = base;
    out.variant = variant;
    out.elements.reserve(b.size());
    for (const auto& t : b) out.elements.push_back(compose(t, base));
    canonical_sort(out.elements);
    return out;
  }

  /// A length-m tail of some geodesic word for g: an element t with
  /// |t| = m and |g t^-1| = |g| - m. Needs 0 <= m <= |g|.
  GroupElement geodesic_suffix(const GroupElement& g, Int m) const {
    require(g);
    Int len = word_length(g);
    if (m < 0 || m > len)
      throw std::invalid_argument("geodesic_suffix: length out of range");
    switch (rep_->kind) {
      case GroupKind::integers: {
        Int v = std::get<Int>(g.payload());
        return GroupElement(Int{v >= 0 ? m : -m});
      }
      case GroupKind::free_abelian: {
        auto v = std::get<std::vector<Int>>(g.payload());
        std::vector<Int> w(v.size(), 0);
        Int left = m;
        for (size_t i = 0; i < v.size() && left > 0; ++i) {
          Int take = std::min(left, std::llabs(v[i]));
          w[i] = v[i] >= 0 ? take : -take;
          left -= take;
        }
        return GroupElement(std::move(w));
      }
      case GroupKind::free_group: {
        const auto& w = std::get<GroupElement::FreeWord>(g.payload());
        return GroupElement(
            GroupElement::FreeWord(w.end() - size_t(m), w.end()));
      }
      case GroupKind::product: {
        const auto& comps = std::get<std::vector<GroupElement>>(g.payload());
        std::vector<GroupElement> out;
        Int left = m;
        for (size_t i = comps.size(); i-- > 0;) {
          Int cl = rep_->factors[i].word_length(comps[i]);
          Int take = std::min(left, cl);
          out.push_back(rep_->factors[i].geodesic_suffix(comps[i], take));
          left -= take;
        }
        std::reverse(out.begin(), out.end());
        return GroupElement(std::move(out));
      }
      case GroupKind::table: {
        // walk one BFS step down at a time
        GroupElement cur = g;
        while (word_length(cur) > m) {
          bool stepped = false;
          for (const auto& s : gamma()) {
            GroupElement next = compose(invert(s), cur);
            if (word_length(next) == word_length(cur) - 1) {
              cur = next;  // peel a leading generator; the suffix survives
              stepped = true;
              break;
            }
          }
          if (!stepped)
            throw std::logic_error("geodesic_suffix: BFS distances inconsistent");
        }
        return cur;
      }
    }
    return identity();
  }

  /// Membership in K(base) without materializing the set.
  bool in_k_set(const GroupElement& candidate, const GroupElement& base,
                SetVariant variant) const {
    require(candidate);
    require(base);
    Int len = word_length(base);
    if (len == 0)
      throw std::invalid_argument("in_k_set: undefined at the identity");
    GroupElement t = compose(candidate, invert(base));
    Int tl = word_length(t);
    if (tl > len - 1) return false;
    if (variant == SetVariant::punctured && tl == 0) return false;
    return true;
  }

  /// Sort by (word length, payload order); the canonical enumeration order
  /// used everywhere for deterministic output.
  void canonical_sort(std::vector<GroupElement>& v) const {
    std::sort(v.begin(), v.end(), [this](const GroupElement& a, const GroupElement& b) {
      Int la = word_length(a), lb = word_length(b);
      if (la != lb) return la < lb;
      return a < b;
    });
  }

  std::string format(const GroupElement& g) const {
    require(g);
    switch (rep_->kind) {
      case GroupKind::integers:
        return std::to_string(std::get<Int>(g.payload()));
      case GroupKind::free_abelian: {
        std::string s = "(";
        const auto& v = std::get<std::vector<Int>>(g.payload());
        for (size_t i = 0; i < v.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(v[i]);
        }
        return s + ")";
      }
      case GroupKind::free_group: {
        const auto& w = std::get<GroupElement::FreeWord>(g.payload());
        if (w.empty()) return "e";
        std::string s;
        for (int l : w) {
          char c = char('a' + std::abs(l) - 1);
          s += l > 0 ? c : char(std::toupper(c));
        }
        return s;
      }
      case GroupKind::table: {
        int i = std::get<int>(g.payload());
        if (!rep_->names.empty()) return rep_->names[i];
        return std::to_string(i);
      }
      case GroupKind::product: {
        const auto& comps = std::get<std::vector<GroupElement>>(g.payload());
        std::string s = "(";
        for (size_t i = 0; i < comps.size(); ++i) {
          if (i) s += ";";
          s += rep_->factors[i].format(comps[i]);
        }
        return s + ")";
      }
    }
    return "?";
  }

  GroupElement parse(std::string_view text) const {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            s.end());
    switch (rep_->kind) {
      case GroupKind::integers:
        return GroupElement(Int{std::stoll(s)});
      case GroupKind::free_abelian: {
        if (s.size() < 2 || s.front() != '(' || s.back() != ')')
          throw std::invalid_argument("parse: expected (a,b,...)");
        std::vector<Int> v;
        std::stringstream ss(s.substr(1, s.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) v.push_back(std::stoll(item));
        if (v.size() != size_t(rep_->dim))
          throw std::invalid_argument("parse: wrong dimension");
        return GroupElement(std::move(v));
      }
      case GroupKind::free_group: {
        if (s == "e") return identity();
        GroupElement::FreeWord w;
        for (char c : s) {
          if (std::islower(static_cast<unsigned char>(c)))
            w.push_back(c - 'a' + 1);
          else if (std::isupper(static_cast<unsigned char>(c)))
            w.push_back(-(c - 'A' + 1));
          else
            throw std::invalid_argument("parse: bad letter in free word");
        }
        detail::reduce_free_word(w);
        GroupElement g(std::move(w));
        if (!contains(g)) throw std::invalid_argument("parse: letter out of rank");
        return g;
      }
      case GroupKind::table: {
        if (!rep_->names.empty()) {
          for (size_t i = 0; i < rep_->names.size(); ++i)
            if (rep_->names[i] == s) return GroupElement(int(i));
        }
        int i = std::stoi(s);
        GroupElement g{int(i)};
        if (!contains(g)) throw std::invalid_argument("parse: table index out of range");
        return g;
      }
      case GroupKind::product: {
        if (s.size() < 2 || s.front() != '(' || s.back() != ')')
          throw std::invalid_argument("parse: expected (g1;g2;...)");
        std::string inner = s.substr(1, s.size() - 2);
        std::vector<std::string> parts;
        int depth = 0;
        std::string cur;
        for (char c : inner) {
          if (c == '(') depth++;
          if (c == ')') depth--;
          if (c == ';' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
          } else {
            cur += c;
          }
        }
        parts.push_back(cur);
        if (parts.size() != rep_->factors.size())
          throw std::invalid_argument("parse: wrong number of components");
        std::vector<GroupElement> comps;
        for (size_t i = 0; i < parts.size(); ++i)
          comps.push_back(rep_->factors[i].parse(parts[i]));
        return GroupElement(std::move(comps));
      }
    }
    throw std::invalid_argument("parse: unsupported group kind");
  }

 private:
  struct Rep {
    GroupKind kind = GroupKind::integers;
    int dim = 1;
    int rank = 1;
    std::vector<std::vector<int>> table;
    std::vector<int> inverse;
    std::vector<Int> dist;
    std::vector<int> gen_indices;
    std::vector<std::string> names;
    std::vector<Group> factors;
  };

  explicit Group(Rep r) : rep_(std::make_shared<const Rep>(std::move(r))) {}

  void require(const GroupElement& g) const {
    if (!contains(g))
      throw std::invalid_argument("element does not belong to group " + name());
  }

  static void validate_table(Rep& r) {
    size_t n = r.table.size();
    if (n == 0) throw std::invalid_argument("table_group: empty table");
    for (const auto& row : r.table) {
      if (row.size() != n) throw std::invalid_argument("table_group: not square");
      for (int v : row)
        if (v < 0 || size_t(v) >= n)
          throw std::invalid_argument("table_group: entry out of range");
    }
    for (size_t i = 0; i < n; ++i)
      if (r.table[0][i] != int(i) || r.table[i][0] != int(i))
        throw std::invalid_argument("table_group: index 0 is not the identity");
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b)
        for (size_t c = 0; c < n; ++c)
          if (r.table[r.table[a][b]][c] != r.table[a][r.table[b][c]])
            throw std::invalid_argument("table_group: not associative");
    r.inverse.assign(n, -1);
    for (size_t a = 0; a < n; ++a) {
      for (size_t b = 0; b < n; ++b)
        if (r.table[a][b] == 0 && r.table[b][a] == 0) r.inverse[a] = int(b);
      if (r.inverse[a] < 0)
        throw std::invalid_argument("table_group: missing inverse");
    }
    if (r.gen_indices.empty())
      throw std::invalid_argument("table_group: no generators");
    for (int g : r.gen_indices)
      if (g < 0 || size_t(g) >= n)
        throw std::invalid_argument("table_group: generator index out of range");
    // BFS word lengths over the symmetric generating set.
    std::vector<int> gens = r.gen_indices;
    for (int g : r.gen_indices) gens.push_back(r.inverse[g]);
    r.dist.assign(n, -1);
    r.dist[0] = 0;
    std::vector<int> frontier{0};
    Int d = 0;
    while (!frontier.empty()) {
      ++d;
      std::vector<int> next;
      for (int x : frontier)
        for (int g : gens) {
          int y = r.table[g][x];
          if (r.dist[y] < 0) {
            r.dist[y] = d;
            next.push_back(y);
          }
        }
      frontier = std::move(next);
    }
    for (size_t i = 0; i < n; ++i)
      if (r.dist[i] < 0)
        throw std::invalid_argument("table_group: generators do not generate");
  }

  std::vector<GroupElement> enumerate_ball(Int r, size_t cap) const {
    std::vector<GroupElement> out;
    auto guard = [&]() {
      if (out.size() > cap)
        throw cap_exceeded("ball enumeration exceeds cap of " + std::to_string(cap) +
                           " elements in " + name());
    };
    switch (rep_->kind) {
      case GroupKind::integers: {
        if (size_t(2 * r + 1) > cap)
          throw cap_exceeded("ball enumeration exceeds cap in Z");
        for (Int x = -r; x <= r; ++x) out.push_back(GroupElement(Int{x}));
        break;
      }
      case GroupKind::free_abelian: {
        std::vector<Int> v(rep_->dim, 0);
        std::function<void(int, Int)> rec = [&](int i, Int budget) {
          if (i == rep_->dim) {
            out.push_back(GroupElement(v));
            guard();
            return;
          }
          for (Int x = -budget; x <= budget; ++x) {
            v[i] = x;
            rec(i + 1, budget - std::llabs(x));
          }
          v[i] = 0;
        };
        rec(0, r);
        break;
      }
      case GroupKind::free_group: {
        out.push_back(identity());
        std::vector<GroupElement::FreeWord> frontier{{}};
        for (Int len = 1; len <= r; ++len) {
          std::vector<GroupElement::FreeWord> next;
          for (const auto& w : frontier)
            for (int l = -rep_->rank; l <= rep_->rank; ++l) {
              if (l == 0) continue;
              if (!w.empty() && w.back() == -l) continue;
              auto u = w;
              u.push_back(l);
              out.push_back(GroupElement(u));
              guard();
              next.push_back(std::move(u));
            }
          frontier = std::move(next);
        }
        break;
      }
      case GroupKind::table: {
        for (size_t i = 0; i < rep_->table.size(); ++i)
          if (rep_->dist[i] <= r) out.push_back(GroupElement(int(i)));
        break;
      }
      case GroupKind::product: {
        // Per-factor balls grouped by exact length, combined over all
        // splits of the radius.
        size_t nf = rep_->factors.size();
        std::vector<std::vector<std::vector<GroupElement>>> by_len(nf);
        for (size_t i = 0; i < nf; ++i) {
          auto b = rep_->factors[i].ball(r, SetVariant::closed, cap);
          by_len[i].assign(size_t(r) + 1, {});
          for (auto& g : b) {
            Int l = rep_->factors[i].word_length(g);
            by_len[i][size_t(l)].push_back(std::move(g));
          }
        }
        std::vector<GroupElement> comps(nf);
        std::function<void(size_t, Int)> rec = [&](size_t i, Int budget) {
          if (i == nf) {
            out.push_back(GroupElement(comps));
            guard();
            return;
          }
          for (Int l = 0; l <= budget; ++l)
            for (const auto& g : by_len[i][size_t(l)]) {
              comps[i] = g;
              rec(i + 1, budget - l);
            }
        };
        rec(0, r);
        break;
      }
    }
    return out;
  }

  std::shared_ptr<const Rep> rep_;
};

/// Subadditivity + norm symmetry helper used by the property tests.
inline bool word_length_subadditive(const Group& g, const GroupElement& a,
                                    const GroupElement& b) {
  return g.word_length(g.compose(a, b)) <= g.word_length(a) + g.word_length(b) &&
         g.word_length(g.invert(a)) == g.word_length(a);
}

}  // namespace recur
