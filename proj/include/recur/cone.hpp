#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "recur/group.hpp"
#include "recur/verdict.hpp"

namespace recur {

/// Finite-radius two-sided approximation of a cone: the limit of K-sets
/// along a sequence whose word lengths diverge. `lower` collects the
/// window elements lying in K(g_i) for every tail index, `upper` those in
/// at least one. Any cone reachable by refining the sequence meets the
/// window between the two; when they coincide the window has stabilized.
struct ConeApprox {
  Int window_radius = 0;
  SetVariant variant = SetVariant::punctured;
  std::vector<GroupElement> lower;
  std::vector<GroupElement> upper;
  bool stabilized = false;
  size_t tail_begin = 0;  // first sequence index with |g_i| > 2R
  size_t tail_size = 0;
};

/// Builds the window approximation. The sequence must have nondecreasing
/// word lengths and reach past 2*window_radius, so that membership of
/// window elements in K(g_i) no longer depends on boundary effects.
inline ConeApprox cone_approx(const Group& group,
                              const std::vector<GroupElement>& seq,
                              Int window_radius,
                              SetVariant variant = SetVariant::punctured,
                              size_t cap = default_ball_cap) {
  if (seq.empty()) throw std::invalid_argument("cone_approx: empty sequence");
  Int prev = -1;
  for (const auto& g : seq) {
    Int l = group.word_length(g);
    if (l < prev)
      throw std::invalid_argument("cone_approx: sequence lengths must be nondecreasing");
    prev = l;
  }
  size_t tail_begin = seq.size();
  for (size_t i = 0; i < seq.size(); ++i) {
    if (group.word_length(seq[i]) > 2 * window_radius) {
      tail_begin = i;
      break;
    }
  }
  if (tail_begin == seq.size())
    throw budget_error(
        "cone_approx: no tail indices with word length > 2R; extend the sequence "
        "or shrink the window");

  ConeApprox out;
  out.window_radius = window_radius;
  out.variant = variant;
  out.tail_begin = tail_begin;
  out.tail_size = seq.size() - tail_begin;

  std::vector<GroupElement> tail_inverses;
  std::vector<Int> tail_lengths;
  for (size_t i = tail_begin; i < seq.size(); ++i) {
    tail_inverses.push_back(group.invert(seq[i]));
    tail_lengths.push_back(group.word_length(seq[i]));
  }
  auto window = group.ball(window_radius, SetVariant::closed, cap);
  for (const auto& x : window) {
    bool in_all = true, in_some = false;
    for (size_t i = 0; i < tail_inverses.size(); ++i) {
      Int tl = group.word_length(group.compose(x, tail_inverses[i]));
      bool in = tl <= tail_lengths[i] - 1 &&
                (variant == SetVariant::closed || tl > 0);
      if (in)
        in_some = true;
      else
        in_all = false;
    }
    if (in_some) out.upper.push_back(x);
    if (in_all) out.lower.push_back(x);
  }
  out.stabilized = (out.lower == out.upper);
  return out;
}

/// Window test for thickness of A: looks for a translate t within the
/// search radius such that the whole closed ball(n) translated by t lands
/// in A. Thickness is a tail property, so the window can certify True but
/// never False; absence of a witness yields Unknown.
inline Verdict is_thick_window(const Group& group,
                               const std::function<bool(const GroupElement&)>& member,
                               Int n, Int search_radius,
                               size_t cap = default_ball_cap) {
  if (n > search_radius)
    throw std::invalid_argument("is_thick_window: n must be <= search radius");
  auto k = group.ball(n, SetVariant::closed, cap);
  auto candidates = group.ball(search_radius, SetVariant::closed, cap);
  for (const auto& t : candidates) {
    bool ok = true;
    for (const auto& f : k) {
      if (!member(group.compose(f, t))) {
        ok = false;
        break;
      }
    }
    if (ok) {
      Witness w;
      w.kind = "thick-translate";
      w.elements = {group.format(t)};
      w.detail = "closed ball(" + std::to_string(n) + ") translated by witness lies in A";
      return Verdict::yes(std::move(w), Budget{0, search_radius, 0}, false);
    }
  }
  return Verdict::unknown(Budget{0, search_radius, 0},
                          "no translate of ball(" + std::to_string(n) +
                              ") inside A within the window");
}

/// Window test for syndeticity of A: greedily assembles a finite F inside
/// the closed ball(n) such that every element of ball(R) is f * a with
/// a in A. Certifies True with the cover F; otherwise Unknown (a window
/// cannot rule syndeticity out; certified False needs an exact description
/// of A, which the analyzers handle separately).
inline Verdict is_syndetic_window(const Group& group,
                                  const std::function<bool(const GroupElement&)>& member,
                                  Int n, Int radius,
                                  size_t cap = default_ball_cap) {
  if (n > radius)
    throw std::invalid_argument("is_syndetic_window: n must be <= radius");
  auto candidates = group.ball(n, SetVariant::closed, cap);
  auto targets = group.ball(radius, SetVariant::closed, cap);
  std::vector<bool> covered(targets.size(), false);
  size_t remaining = targets.size();
  std::vector<GroupElement> cover;
  for (const auto& f : candidates) {
    if (remaining == 0) break;
    GroupElement finv = group.invert(f);
    bool used = false;
    for (size_t i = 0; i < targets.size(); ++i) {
      if (covered[i]) continue;
      if (member(group.compose(finv, targets[i]))) {
        covered[i] = true;
        used = true;
        --remaining;
      }
    }
    if (used) cover.push_back(f);
  }
  if (remaining == 0) {
    Witness w;
    w.kind = "syndetic-cover";
    for (const auto& f : cover) w.elements.push_back(group.format(f));
    w.detail = "ball(" + std::to_string(radius) + ") covered by F * A";
    return Verdict::yes(std::move(w), Budget{0, radius, 0}, false);
  }
  return Verdict::unknown(Budget{0, radius, 0},
                          "no cover within ball(" + std::to_string(n) + ")");
}

struct Lemma1dReport {
  bool found = false;
  Int n = 0;
  // per sampled g: the translate t with |t| = n and F*t inside K(g)
  std::vector<std::pair<GroupElement, GroupElement>> witnesses;
  std::string note;
};

/// Finds the least n in [n_lo, n_hi] such that every sampled g with
/// |g| >= n admits a translate t of exact length n with F*t inside K(g).
/// Uses the closed K-set (the variant for which the uniform bound holds
/// even at |g| = n).
inline Lemma1dReport lemma1d_witness(const Group& group,
                                     const std::vector<GroupElement>& f_set,
                                     Int n_lo, Int n_hi,
                                     const std::vector<GroupElement>& samples,
                                     SetVariant variant = SetVariant::closed,
                                     size_t cap = default_ball_cap) {
  if (samples.empty())
    throw std::invalid_argument("lemma1d_witness: empty sample set");
  if (n_lo < 1 || n_hi < n_lo)
    throw std::invalid_argument("lemma1d_witness: bad length range");
  for (Int n = n_lo; n <= n_hi; ++n) {
    auto sphere = group.sphere(n, cap);
    Lemma1dReport report;
    report.n = n;
    bool all_ok = true;
    for (const auto& g : samples) {
      if (group.word_length(g) < n) continue;
      bool found_t = false;
      for (const auto& t : sphere) {
        bool ok = true;
        for (const auto& f : f_set) {
          if (!group.in_k_set(group.compose(f, t), g, variant)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          report.witnesses.emplace_back(g, t);
          found_t = true;
          break;
        }
      }
      if (!found_t) {
        all_ok = false;
        break;
      }
    }
    if (all_ok) {
      report.found = true;
      return report;
    }
  }
  Lemma1dReport fail;
  fail.note = "no uniform translate length in [" + std::to_string(n_lo) + "," +
              std::to_string(n_hi) + "]";
  return fail;
}

}  // namespace recur
