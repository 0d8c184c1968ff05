#include "oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using I64 = long long;

// ---- tiny free-group words: lowercase letters, uppercase inverses ----

std::string reduce_word(const std::string& w) {
  std::string out;
  for (char c : w) {
    if (!out.empty() &&
        ((std::isupper(c) && std::tolower(c) == out.back()) ||
         (std::islower(c) && std::toupper(c) == out.back())))
      out.pop_back();
    else
      out += c;
  }
  return out;
}

std::string invert_word(const std::string& w) {
  std::string out;
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out += std::isupper(*it) ? char(std::tolower(*it)) : char(std::toupper(*it));
  return out;
}

std::vector<std::string> free_ball(int rank, I64 r) {
  // all freely reduced words of length <= r
  std::vector<std::string> out{""};
  std::vector<std::string> frontier{""};
  for (I64 l = 1; l <= r; ++l) {
    std::vector<std::string> next;
    for (const auto& w : frontier)
      for (int i = 0; i < 2 * rank; ++i) {
        char c = i < rank ? char('a' + i) : char('A' + i - rank);
        std::string u = w + c;
        if (reduce_word(u).size() != u.size()) continue;
        out.push_back(u);
        next.push_back(u);
      }
    frontier = std::move(next);
  }
  return out;
}

bool word_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  // letter order matches signed-index order: inverses sort before positives
  auto key = [](char c) {
    return std::isupper(c) ? -(c - 'A' + 1) : (c - 'a' + 1);
  };
  for (size_t i = 0; i < a.size(); ++i)
    if (key(a[i]) != key(b[i])) return key(a[i]) < key(b[i]);
  return false;
}

std::string format_word(const std::string& w) { return w.empty() ? "e" : w; }

// ---- lattice points ----

struct Vec2 {
  I64 a = 0, b = 0;
  bool operator<(const Vec2& o) const {
    I64 la = std::llabs(a) + std::llabs(b), lo = std::llabs(o.a) + std::llabs(o.b);
    if (la != lo) return la < lo;
    if (a != o.a) return a < o.a;
    return b < o.b;
  }
  bool operator==(const Vec2& o) const { return a == o.a && b == o.b; }
};

std::string format_vec(const Vec2& v) {
  return "(" + std::to_string(v.a) + "," + std::to_string(v.b) + ")";
}

// ---- helpers ----

std::string join_ints(std::vector<I64> v) {
  std::sort(v.begin(), v.end());
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

I64 to_int(const std::string& s) { return std::stoll(s); }

// ---- subcommands ----

int ball_count(const std::vector<std::string>& args, std::string& out,
               std::string& err) {
  if (args.size() < 2) {
    err = "usage: oracle ball-count <Z|Z2|Z3|F2|F3> <r> [punctured|closed]";
    return 2;
  }
  const std::string& grp = args[0];
  I64 r = to_int(args[1]);
  bool punctured = args.size() < 3 || args[2] == "punctured";
  I64 count = 0;
  if (grp == "Z") {
    for (I64 x = -r; x <= r; ++x)
      if (!punctured || x != 0) ++count;
  } else if (grp == "Z2" || grp == "Z3") {
    int d = grp == "Z2" ? 2 : 3;
    std::function<void(int, I64)> rec = [&](int i, I64 left) {
      if (i == d) {
        ++count;
        return;
      }
      for (I64 x = -left; x <= left; ++x) rec(i + 1, left - std::llabs(x));
    };
    rec(0, r);
    if (punctured) --count;
  } else if (grp == "F2" || grp == "F3") {
    int rank = grp == "F2" ? 2 : 3;
    count = I64(free_ball(rank, r).size());
    if (punctured) --count;
  } else {
    err = "unknown group " + grp;
    return 2;
  }
  out = std::to_string(count) + "\n";
  return 0;
}

int kset(const std::vector<std::string>& args, std::string& out, std::string& err) {
  if (args.size() < 2) {
    err = "usage: oracle kset <Z|Z2|F2> <element> [punctured|closed]";
    return 2;
  }
  const std::string& grp = args[0];
  bool punctured = args.size() < 3 || args[2] == "punctured";
  if (grp == "Z") {
    I64 g = to_int(args[1]);
    I64 len = std::llabs(g);
    if (len == 0) {
      err = "kset undefined at the identity";
      return 2;
    }
    std::vector<I64> res;
    for (I64 b = -(len - 1); b <= len - 1; ++b) {
      if (punctured && b == 0) continue;
      res.push_back(b + g);
    }
    std::sort(res.begin(), res.end());
    res.erase(std::unique(res.begin(), res.end()), res.end());
    out = join_ints(res) + "\n";
    return 0;
  }
  if (grp == "Z2") {
    std::string s = args[1];
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(c); }),
            s.end());
    if (s.front() != '(' || s.back() != ')') {
      err = "Z2 element must look like (a,b)";
      return 2;
    }
    auto comma = s.find(',');
    Vec2 g{to_int(s.substr(1, comma - 1)),
           to_int(s.substr(comma + 1, s.size() - comma - 2))};
    I64 len = std::llabs(g.a) + std::llabs(g.b);
    if (len == 0) {
      err = "kset undefined at the identity";
      return 2;
    }
    std::set<Vec2> res;
    for (I64 a = -(len - 1); a <= len - 1; ++a)
      for (I64 b = -(len - 1); b <= len - 1; ++b) {
        if (std::llabs(a) + std::llabs(b) > len - 1) continue;
        if (punctured && a == 0 && b == 0) continue;
        res.insert(Vec2{a + g.a, b + g.b});
      }
    std::vector<Vec2> v(res.begin(), res.end());
    std::sort(v.begin(), v.end());
    std::string str;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) str += ",";
      str += format_vec(v[i]);
    }
    out = str + "\n";
    return 0;
  }
  if (grp == "F2") {
    std::string g = args[1] == "e" ? "" : reduce_word(args[1]);
    if (g.empty()) {
      err = "kset undefined at the identity";
      return 2;
    }
    I64 len = I64(g.size());
    std::set<std::string> res;
    for (const auto& b : free_ball(2, len - 1)) {
      if (punctured && b.empty()) continue;
      res.insert(reduce_word(b + g));
    }
    std::vector<std::string> v(res.begin(), res.end());
    std::sort(v.begin(), v.end(), word_less);
    std::string str;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) str += ",";
      str += format_word(v[i]);
    }
    out = str + "\n";
    return 0;
  }
  err = "unknown group " + grp;
  return 2;
}

int cone(const std::vector<std::string>& args, std::string& out, std::string& err) {
  if (args.size() < 4) {
    err = "usage: oracle cone <Z|Z2> <positive|negative|alternating|axis> <count> "
          "<R> [punctured|closed]";
    return 2;
  }
  const std::string& grp = args[0];
  const std::string& family = args[1];
  I64 count = to_int(args[2]);
  I64 radius = to_int(args[3]);
  bool punctured = args.size() < 5 || args[4] == "punctured";

  if (grp == "Z") {
    std::vector<I64> seq;
    for (I64 n = 1; n <= count; ++n) {
      if (family == "positive")
        seq.push_back(n);
      else if (family == "negative")
        seq.push_back(-n);
      else if (family == "alternating")
        seq.push_back(n % 2 == 0 ? n : -n);
      else {
        err = "unknown Z family " + family;
        return 2;
      }
    }
    // fully materialize the tail K-sets, then intersect/union over them
    std::vector<std::set<I64>> ksets;
    for (I64 g : seq) {
      if (std::llabs(g) <= 2 * radius) continue;
      std::set<I64> k;
      I64 len = std::llabs(g);
      for (I64 b = -(len - 1); b <= len - 1; ++b) {
        if (punctured && b == 0) continue;
        k.insert(b + g);
      }
      ksets.push_back(std::move(k));
    }
    if (ksets.empty()) {
      err = "sequence too short for the window";
      return 2;
    }
    std::vector<I64> lower, upper;
    for (I64 x = -radius; x <= radius; ++x) {
      bool in_all = true, in_some = false;
      for (const auto& k : ksets) {
        if (k.count(x))
          in_some = true;
        else
          in_all = false;
      }
      if (in_all) lower.push_back(x);
      if (in_some) upper.push_back(x);
    }
    bool stab = lower == upper;
    out = "lower=[" + join_ints(lower) + "];upper=[" + join_ints(upper) +
          "];stabilized=" + (stab ? "true" : "false") + "\n";
    return 0;
  }
  if (grp == "Z2") {
    if (family != "axis") {
      err = "Z2 cone supports the axis family";
      return 2;
    }
    std::vector<Vec2> seq;
    for (I64 n = 1; n <= count; ++n) seq.push_back(Vec2{n, 0});
    std::vector<std::set<std::pair<I64, I64>>> ksets;
    for (const auto& g : seq) {
      I64 len = std::llabs(g.a) + std::llabs(g.b);
      if (len <= 2 * radius) continue;
      std::set<std::pair<I64, I64>> k;
      for (I64 a = -(len - 1); a <= len - 1; ++a)
        for (I64 b = -(len - 1); b <= len - 1; ++b) {
          if (std::llabs(a) + std::llabs(b) > len - 1) continue;
          if (punctured && a == 0 && b == 0) continue;
          k.insert({a + g.a, b + g.b});
        }
      ksets.push_back(std::move(k));
    }
    if (ksets.empty()) {
      err = "sequence too short for the window";
      return 2;
    }
    std::vector<Vec2> lower, upper;
    for (I64 a = -radius; a <= radius; ++a)
      for (I64 b = -radius; b <= radius; ++b) {
        if (std::llabs(a) + std::llabs(b) > radius) continue;
        bool in_all = true, in_some = false;
        for (const auto& k : ksets) {
          if (k.count({a, b}))
            in_some = true;
          else
            in_all = false;
        }
        if (in_all) lower.push_back(Vec2{a, b});
        if (in_some) upper.push_back(Vec2{a, b});
      }
    auto fmt = [](std::vector<Vec2> v) {
      std::sort(v.begin(), v.end());
      std::string s;
      for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += format_vec(v[i]);
      }
      return s;
    };
    bool stab = lower == upper;
    out = "lower=[" + fmt(lower) + "];upper=[" + fmt(upper) +
          "];stabilized=" + (stab ? "true" : "false") + "\n";
    return 0;
  }
  err = "unknown group " + grp;
  return 2;
}

std::map<char, std::string> rules_of(const std::string& system, std::string& err) {
  if (system == "thue-morse") return {{'0', "01"}, {'1', "10"}};
  if (system == "fibonacci") return {{'0', "01"}, {'1', "0"}};
  err = "unknown substitution system " + system;
  return {};
}

int factor_scan(const std::vector<std::string>& args, std::string& out,
                std::string& err) {
  if (args.size() < 2) {
    err = "usage: oracle factor-scan <thue-morse|fibonacci|one-dot> <L>";
    return 2;
  }
  const std::string& system = args[0];
  I64 length = to_int(args[1]);
  std::string word;
  if (system == "one-dot") {
    word = std::string(size_t(3 * length), '0') + "1" +
           std::string(size_t(3 * length), '0');
  } else {
    auto rules = rules_of(system, err);
    if (rules.empty()) return 2;
    word = "0";
    while (I64(word.size()) < 20000) {
      std::string next;
      for (char c : word) next += rules.at(c);
      word = std::move(next);
    }
  }
  std::set<std::string> factors;
  for (size_t i = 0; i + size_t(length) <= word.size(); ++i)
    factors.insert(word.substr(i, size_t(length)));
  out = std::to_string(factors.size()) + "\n";
  return 0;
}

int return_scan(const std::vector<std::string>& args, std::string& out,
                std::string& err) {
  if (args.size() < 3) {
    err = "usage: oracle return-scan <odometer2|odometer3|one-dot|thue-morse> <k> <R>";
    return 2;
  }
  const std::string& system = args[0];
  I64 k = to_int(args[1]);
  I64 radius = to_int(args[2]);
  std::vector<I64> returns;
  if (system == "odometer2" || system == "odometer3") {
    I64 base = system == "odometer2" ? 2 : 3;
    I64 modulus = 1;
    for (I64 i = 0; i < k; ++i) modulus *= base;
    for (I64 n = -radius; n <= radius; ++n)
      if (((n % modulus) + modulus) % modulus == 0) returns.push_back(n);
  } else if (system == "one-dot") {
    // marked point: the shifted window matches only when the mark sits at 0
    for (I64 n = -radius; n <= radius; ++n)
      if (-n == 0) returns.push_back(n);
    (void)k;
  } else if (system == "thue-morse") {
    // two-sided fixed point with seed letters 0.0 under the squared rules
    std::string left = "0", right = "0";
    auto apply2 = [](const std::string& w) {
      std::string x;
      for (char c : w) x += (c == '0') ? "01" : "10";
      std::string y;
      for (char c : x) y += (c == '0') ? "01" : "10";
      return y;
    };
    size_t need = size_t(radius + k + 2);
    while (left.size() < need) left = apply2(left);
    while (right.size() < need) right = apply2(right);
    auto at = [&](I64 i) {
      return i >= 0 ? right[size_t(i)] : left[left.size() - size_t(-i)];
    };
    std::string center;
    for (I64 i = -k; i <= k; ++i) center += at(i);
    for (I64 n = -radius; n <= radius; ++n) {
      std::string w;
      for (I64 i = n - k; i <= n + k; ++i) w += at(i);
      if (w == center) returns.push_back(n);
    }
  } else {
    err = "unknown system " + system;
    return 2;
  }
  out = join_ints(returns) + "\n";
  return 0;
}

}  // namespace

int run_oracle(const std::vector<std::string>& args, std::string& out,
               std::string& err) {
  if (args.empty()) {
    err = "usage: oracle <ball-count|kset|cone|factor-scan|return-scan> <args...>";
    return 2;
  }
  std::vector<std::string> rest(args.begin() + 1, args.end());
  try {
    if (args[0] == "ball-count") return ball_count(rest, out, err);
    if (args[0] == "kset") return kset(rest, out, err);
    if (args[0] == "cone") return cone(rest, out, err);
    if (args[0] == "factor-scan") return factor_scan(rest, out, err);
    if (args[0] == "return-scan") return return_scan(rest, out, err);
  } catch (const std::exception& e) {
    err = std::string("oracle error: ") + e.what();
    return 2;
  }
  err = "unknown oracle subcommand " + args[0];
  return 2;
}
