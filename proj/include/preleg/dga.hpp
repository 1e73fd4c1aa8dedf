// Chekanov-Eliashberg DGA over Z/2 of a resolved plat diagram: immersed disk
// enumeration by a left-to-right sweep, augmentations, linearized homology.
#pragma once

#include "preleg/common.hpp"
#include "preleg/front.hpp"
#include "preleg/lagrangian_diagram.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace preleg::dga {

using Word = std::vector<int>;  // generator indices, left to right

struct DGA {
  std::vector<std::string> names;
  std::vector<int> degrees;
  std::vector<std::vector<Word>> differential;  // odd-multiplicity words, sorted
  bool graded = true;

  int size() const { return static_cast<int>(names.size()); }
  int word_degree(const Word& w) const {
    int d = 0;
    for (int g : w) d += degrees[g];
    return d;
  }
  std::string format_word(const Word& w) const {
    if (w.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + names[w[i]];
    return s;
  }
  std::string format_differential(int g) const {
    if (differential[g].empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < differential[g].size(); ++i)
      s += (i ? " + " : "") + format_word(differential[g][i]);
    return s;
  }
};

struct DiskLimits {
  std::size_t max_word = 64;
  std::size_t max_sheets = 8;
};

/// One admissible disk: its positive corner and the negative corners read
/// counterclockwise after it.
struct Disk {
  int positive;
  Word negatives;
};

namespace detail {

// Corner codes inside the sweep: g >= 0 is a negative corner at generator g,
// ~g a positive one.
struct Sheet {
  int top, bot;  // 0-based strand positions, top < bot
  int comp;
  int arc_top;   // boundary arc that starts at the top endpoint
  int arc_bot;   // boundary arc that ends at the bottom endpoint
};

struct SweepState {
  std::vector<Sheet> sheets;
  std::vector<std::vector<int>> arcs;
  int positives = 0;
  int next_comp = 0;
  bool started = false;
};

class DiskSweep {
 public:
  DiskSweep(const LagrangianDiagram& d, DiskLimits lim) : d_(d), lim_(lim) {}

  std::vector<Disk> run() {
    SweepState s;
    step(0, s);
    return std::move(out_);
  }

 private:
  const LagrangianDiagram& d_;
  DiskLimits lim_;
  std::vector<Disk> out_;

  int new_arc(SweepState& s, std::vector<int> w) const {
    s.arcs.push_back(std::move(w));
    return static_cast<int>(s.arcs.size()) - 1;
  }

  void check_len(const std::vector<int>& w) const {
    if (w.size() > lim_.max_word)
      throw DomainError("disk word length cap " + std::to_string(lim_.max_word) + " exceeded");
  }

  void replace_refs(SweepState& s, int from, int to) const {
    for (auto& sh : s.sheets) {
      if (sh.arc_top == from) sh.arc_top = to;
      if (sh.arc_bot == from) sh.arc_bot = to;
    }
  }

  // Joins the arc ending at a bottom endpoint with the arc starting at a top
  // endpoint. Returns true when this closes the boundary into a cycle.
  bool join(SweepState& s, int ending, int starting, std::vector<int> middle) const {
    if (ending == starting) {
      auto& w = s.arcs[ending];
      w.insert(w.end(), middle.begin(), middle.end());
      check_len(w);
      return true;
    }
    auto& w = s.arcs[ending];
    w.insert(w.end(), middle.begin(), middle.end());
    w.insert(w.end(), s.arcs[starting].begin(), s.arcs[starting].end());
    check_len(w);
    s.arcs[starting].clear();
    replace_refs(s, starting, ending);
    return false;
  }

  void finish(const SweepState& s, const std::vector<int>& cycle) {
    if (s.positives != 1 || !s.sheets.empty()) return;
    auto it = std::find_if(cycle.begin(), cycle.end(), [](int c) { return c < 0; });
    Disk disk{~*it, {}};
    for (std::size_t i = 1; i < cycle.size(); ++i) {
      const int c = cycle[(static_cast<std::size_t>(it - cycle.begin()) + i) % cycle.size()];
      disk.negatives.push_back(c);
    }
    out_.push_back(std::move(disk));
  }

  void step(std::size_t ev, SweepState& s) {
    if (s.started && s.sheets.empty()) return;  // closed earlier or died without closing
    if (ev == d_.events.size()) return;
    const DiagramEvent& e = d_.events[ev];
    switch (e.kind) {
      case DiagramEvent::Kind::LeftCap: left_cap(ev, s); break;
      case DiagramEvent::Kind::RightCap: right_cap(ev, s); break;
      case DiagramEvent::Kind::Crossing: crossing(ev, s); break;
    }
  }

  void left_cap(std::size_t ev, const SweepState& s0) {
    const int k = d_.events[ev].level;
    // Spanning sheets may pass over the new cap or be split by it.
    std::vector<int> spanning;
    SweepState base = s0;
    for (int i = 0; i < static_cast<int>(base.sheets.size()); ++i) {
      Sheet& sh = base.sheets[i];
      if (sh.top >= k - 1) {
        sh.top += 2;
        sh.bot += 2;
      } else if (sh.bot >= k - 1) {
        sh.bot += 2;
        spanning.push_back(i);
      }
    }
    const std::size_t n = spanning.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      SweepState s = base;
      for (std::size_t j = 0; j < n; ++j) {
        if (!(mask >> j & 1)) continue;
        Sheet& sh = s.sheets[spanning[j]];
        const int gamma = new_arc(s, {});
        Sheet lower{k, sh.bot, sh.comp, gamma, sh.arc_bot};
        sh.bot = k - 1;
        sh.arc_bot = gamma;
        s.sheets.push_back(lower);
      }
      if (s.sheets.size() > lim_.max_sheets) continue;
      step(ev + 1, s);
      if (s.sheets.size() + 1 <= lim_.max_sheets) {
        SweepState b = s;
        const int a = new_arc(b, {});
        b.sheets.push_back({k - 1, k, b.next_comp++, a, a});
        b.started = true;
        step(ev + 1, b);
      }
    }
  }

  void right_cap(std::size_t ev, const SweepState& s0) {
    const int k = d_.events[ev].level;
    SweepState s = s0;
    std::vector<int> upper, lower;  // sheets ending at k-1 from above, starting at k
    int dying = -1;
    for (int i = 0; i < static_cast<int>(s.sheets.size()); ++i) {
      const Sheet& sh = s.sheets[i];
      if (sh.top == k - 1 && sh.bot == k) dying = i;
      else if (sh.top == k - 1 || sh.bot == k) return;  // boundary would run off the cap
      else if (sh.bot == k - 1) upper.push_back(i);
      else if (sh.top == k) lower.push_back(i);
    }
    if (upper.size() != lower.size()) return;
    if (dying >= 0) {
      const Sheet sh = s.sheets[dying];
      s.sheets.erase(s.sheets.begin() + dying);
      auto fix = [&](std::vector<int>& v) { for (int& i : v) if (i > dying) --i; };
      fix(upper);
      fix(lower);
      if (join(s, sh.arc_bot, sh.arc_top, {})) {
        if (!upper.empty()) return;
        finish(s, s.arcs[sh.arc_bot]);
        return;
      }
    }
    std::vector<int> perm(lower.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    do {
      SweepState t = s;
      bool ok = true;
      std::vector<int> erase;
      for (std::size_t i = 0; i < upper.size() && ok; ++i) {
        Sheet& a = t.sheets[upper[i]];
        Sheet& b = t.sheets[lower[perm[i]]];
        if (a.comp == b.comp) { ok = false; break; }
        const int old = b.comp;
        for (auto& sh : t.sheets) if (sh.comp == old) sh.comp = a.comp;
        join(t, a.arc_bot, b.arc_top, {});
        a.bot = b.bot;
        a.arc_bot = b.arc_bot;
        erase.push_back(lower[perm[i]]);
      }
      if (!ok) continue;
      std::sort(erase.rbegin(), erase.rend());
      for (int i : erase) t.sheets.erase(t.sheets.begin() + i);
      for (auto& sh : t.sheets) {
        if (sh.top > k) sh.top -= 2;
        if (sh.bot > k) sh.bot -= 2;
      }
      step(ev + 1, t);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  void crossing(std::size_t ev, const SweepState& s0) {
    const int k = d_.events[ev].level;
    const int g = d_.events[ev].generator;
    SweepState s = s0;
    // Sheet [k-1, k] must close at the left quadrant.
    for (int i = 0; i < static_cast<int>(s.sheets.size()); ++i) {
      const Sheet sh = s.sheets[i];
      if (sh.top == k - 1 && sh.bot == k) {
        if (s.positives > 0) return;
        s.positives++;
        s.sheets.erase(s.sheets.begin() + i);
        if (join(s, sh.arc_bot, sh.arc_top, {~g})) {
          if (!s.sheets.empty()) return;
          finish(s, s.arcs[sh.arc_bot]);
          return;
        }
        break;
      }
    }
    std::vector<int> turnable;
    for (int i = 0; i < static_cast<int>(s.sheets.size()); ++i) {
      Sheet& sh = s.sheets[i];
      if (sh.top == k || sh.bot == k - 1) turnable.push_back(i);
    }
    const std::size_t n = turnable.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      SweepState t = s;
      std::vector<bool> turned(t.sheets.size(), false);
      for (std::size_t j = 0; j < n; ++j) {
        if (!(mask >> j & 1)) continue;
        Sheet& sh = t.sheets[turnable[j]];
        turned[turnable[j]] = true;
        if (sh.top == k) {  // bottom quadrant corner, prepended on the starting arc
          auto& w = t.arcs[sh.arc_top];
          w.insert(w.begin(), g);
          check_len(w);
        } else {            // top quadrant corner, appended on the ending arc
          auto& w = t.arcs[sh.arc_bot];
          w.push_back(g);
          check_len(w);
        }
      }
      for (std::size_t i = 0; i < t.sheets.size(); ++i) {
        if (turned[i]) continue;
        Sheet& sh = t.sheets[i];
        if (sh.top == k) sh.top = k - 1;
        else if (sh.top == k - 1) sh.top = k;
        if (sh.bot == k) sh.bot = k - 1;
        else if (sh.bot == k - 1) sh.bot = k;
      }
      step(ev + 1, t);
      if (t.positives == 0 && t.sheets.size() < lim_.max_sheets) {
        SweepState b = t;
        const int a = new_arc(b, {~g});
        b.sheets.push_back({k - 1, k, b.next_comp++, a, a});
        b.positives = 1;
        b.started = true;
        step(ev + 1, b);
      }
    }
  }
};

inline void toggle(std::map<Word, int>& acc, const Word& w) {
  auto it = acc.find(w);
  if (it == acc.end()) acc.emplace(w, 1);
  else acc.erase(it);
}

}  // namespace detail

/// All admissible immersed disks of the diagram, in sweep order.
inline std::vector<Disk> enumerate_disks(const LagrangianDiagram& d, DiskLimits lim = {}) {
  return detail::DiskSweep(d, lim).run();
}

/// ∂ applied to a word as a derivation, reduced mod 2.
inline std::vector<Word> differential_of_word(const DGA& a, const Word& w) {
  std::map<Word, int> acc;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (const Word& dw : a.differential[w[i]]) {
      Word t(w.begin(), w.begin() + static_cast<long>(i));
      t.insert(t.end(), dw.begin(), dw.end());
      t.insert(t.end(), w.begin() + static_cast<long>(i) + 1, w.end());
      detail::toggle(acc, t);
    }
  }
  std::vector<Word> out;
  for (auto& [k, v] : acc) out.push_back(k);
  return out;
}

inline std::vector<Word> d_squared(const DGA& a, int g) {
  std::map<Word, int> acc;
  for (const Word& w : a.differential[g])
    for (const Word& t : differential_of_word(a, w)) detail::toggle(acc, t);
  std::vector<Word> out;
  for (auto& [k, v] : acc) out.push_back(k);
  return out;
}

/// Throws ConsistencyError on a degree mismatch or a nonzero ∂².
inline void verify_dga(const DGA& a) {
  for (int g = 0; g < a.size(); ++g) {
    if (a.graded) {
      for (const Word& w : a.differential[g])
        if (a.word_degree(w) != a.degrees[g] - 1)
          throw ConsistencyError("degree drop fails: d" + a.names[g] + " contains " + a.format_word(w));
    }
    auto dd = d_squared(a, g);
    if (!dd.empty())
      throw ConsistencyError("d^2 " + a.names[g] + " = " + a.format_word(dd.front()) + " + ...");
  }
}

inline DGA compute_dga(const LagrangianDiagram& d, DiskLimits lim = {}) {
  DGA a;
  a.graded = d.graded;
  for (const auto& g : d.generators) {
    a.names.push_back(g.name);
    a.degrees.push_back(g.degree);
  }
  std::vector<std::map<Word, int>> acc(d.generators.size());
  for (const Disk& disk : enumerate_disks(d, lim)) detail::toggle(acc[disk.positive], disk.negatives);
  a.differential.resize(d.generators.size());
  for (std::size_t g = 0; g < acc.size(); ++g)
    for (auto& [w, v] : acc[g]) a.differential[g].push_back(w);
  verify_dga(a);
  return a;
}

inline DGA compute_dga(const front::PlatFront& f, DiskLimits lim = {}) {
  return compute_dga(front::lagrangian_resolution(f), lim);
}

/// Values on every generator; nonzero only in degree 0.
struct Augmentation {
  std::vector<int> value;
};

inline int evaluate(const Augmentation& e, const Word& w) {
  for (int g : w)
    if (!e.value[g]) return 0;
  return 1;
}

inline bool is_augmentation(const DGA& a, const Augmentation& e) {
  for (int g = 0; g < a.size(); ++g) {
    if (e.value[g] && a.degrees[g] != 0) return false;
    int s = 0;
    for (const Word& w : a.differential[g]) s ^= evaluate(e, w);
    if (s) return false;
  }
  return true;
}

inline constexpr int kMaxAugmentationGenerators = 24;

/// Exhaustive search over the degree-0 generators, in increasing mask order.
inline std::vector<Augmentation> augmentations(const DGA& a, int max_generators = kMaxAugmentationGenerators) {
  if (!a.graded) throw DomainError("augmentations need a Z-graded DGA");
  std::vector<int> zero;
  std::vector<int> slot(a.size(), -1);
  for (int g = 0; g < a.size(); ++g)
    if (a.degrees[g] == 0) {
      slot[g] = static_cast<int>(zero.size());
      zero.push_back(g);
    }
  const int n = static_cast<int>(zero.size());
  if (n > max_generators)
    throw DomainError("refusing augmentation search: " + std::to_string(n) +
                      " degree-0 generators exceed the cap of " + std::to_string(max_generators));
  // Each constraint: XOR over words made only of degree-0 letters, as masks.
  std::vector<std::vector<std::uint32_t>> constraints;
  for (int g = 0; g < a.size(); ++g) {
    std::vector<std::uint32_t> masks;
    for (const Word& w : a.differential[g]) {
      std::uint32_t m = 0;
      bool pure = true;
      for (int x : w) {
        if (slot[x] < 0) { pure = false; break; }
        m |= std::uint32_t{1} << slot[x];
      }
      if (pure) masks.push_back(m);
    }
    if (!masks.empty()) constraints.push_back(std::move(masks));
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  const std::uint64_t block = 1 << 12;
  const std::size_t blocks = static_cast<std::size_t>((total + block - 1) / block);
  std::vector<std::vector<std::uint32_t>> found(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    const std::uint64_t lo = b * block, hi = std::min(total, lo + block);
    for (std::uint64_t m = lo; m < hi; ++m) {
      bool ok = true;
      for (const auto& c : constraints) {
        int s = 0;
        for (std::uint32_t w : c) s ^= (static_cast<std::uint32_t>(m) & w) == w;
        if (s) { ok = false; break; }
      }
      if (ok) found[b].push_back(static_cast<std::uint32_t>(m));
    }
  });
  std::vector<Augmentation> out;
  for (const auto& f : found)
    for (std::uint32_t m : f) {
      Augmentation e{std::vector<int>(a.size(), 0)};
      for (int i = 0; i < n; ++i) e.value[zero[i]] = (m >> i) & 1;
      out.push_back(std::move(e));
    }
  return out;
}

using BitMatrix = std::vector<std::vector<std::uint8_t>>;

/// Word-length-one part of the ε-conjugated differential: entry (b, a) is the
/// coefficient of b in ∂a.
inline BitMatrix linearized_differential(const DGA& a, const Augmentation& e) {
  const int n = a.size();
  BitMatrix m(n, std::vector<std::uint8_t>(n, 0));
  for (int g = 0; g < n; ++g)
    for (const Word& w : a.differential[g])
      for (std::size_t i = 0; i < w.size(); ++i) {
        bool rest = true;
        for (std::size_t j = 0; j < w.size() && rest; ++j)
          if (j != i && !e.value[w[j]]) rest = false;
        if (rest) m[w[i]][g] ^= 1;
      }
  return m;
}

inline int rank_mod2(BitMatrix m) {
  int r = 0;
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && !m[p][c]) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    for (int i = 0; i < rows; ++i)
      if (i != r && m[i][c])
        for (int j = c; j < cols; ++j) m[i][j] ^= m[r][j];
    ++r;
  }
  return r;
}

/// Degree -> dimension, zero entries omitted.
using Poincare = std::map<int, int>;

inline std::string format_poincare(const Poincare& p) {
  if (p.empty()) return "0";
  std::string s;
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (it != p.begin()) s += " + ";
    if (it->second != 1) s += std::to_string(it->second);
    s += it->first == 0 ? (it->second == 1 ? "1" : "") : "t^" + std::to_string(it->first);
  }
  return s;
}

inline Poincare linearized_poincare(const DGA& a, const Augmentation& e) {
  if (!a.graded) throw DomainError("linearized homology needs a Z-graded DGA");
  const BitMatrix d1 = linearized_differential(a, e);
  std::map<int, std::vector<int>> by_degree;
  for (int g = 0; g < a.size(); ++g) by_degree[a.degrees[g]].push_back(g);
  // rank of ∂₁ restricted to degree-k chains, landing in degree k-1
  auto rank_from = [&](int k) {
    auto src = by_degree.find(k), dst = by_degree.find(k - 1);
    if (src == by_degree.end() || dst == by_degree.end()) return 0;
    BitMatrix sub(dst->second.size(), std::vector<std::uint8_t>(src->second.size()));
    for (std::size_t i = 0; i < dst->second.size(); ++i)
      for (std::size_t j = 0; j < src->second.size(); ++j) sub[i][j] = d1[dst->second[i]][src->second[j]];
    return rank_mod2(sub);
  };
  Poincare p;
  for (auto& [k, gens] : by_degree) {
    const int h = static_cast<int>(gens.size()) - rank_from(k) - rank_from(k + 1);
    if (h) p[k] = h;
  }
  return p;
}

/// Linearized homology classes with multiplicities, and the augmentation
/// count, both scaled by 2^-e so that adding a cancelling generator pair in
/// degrees (0, -1) leaves them unchanged.
struct Signature {
  std::vector<std::pair<Poincare, double>> classes;  // sorted by polynomial
  long raw_augmentations = 0;
  int scale_exponent = 0;
  double normalized_augmentations = 0.0;

  bool operator==(const Signature& o) const {
    return classes == o.classes && normalized_augmentations == o.normalized_augmentations;
  }
  bool operator!=(const Signature& o) const { return !(*this == o); }

  std::string to_string() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < classes.size(); ++i)
      os << (i ? ", " : "") << format_poincare(classes[i].first) << " x" << classes[i].second;
    os << "} augmentations " << normalized_augmentations << " (raw " << raw_augmentations << ")";
    return os.str();
  }
};

/// e = Σ_{k<0} (-1)^{k+1} r_k with r_k the number of degree-k generators.
/// Cancelling pairs in degrees (k, k-1) change e only for k = 0, by one.
inline int augmentation_scale_exponent(const DGA& a) {
  int e = 0;
  for (int d : a.degrees)
    if (d < 0) e += (d % 2 == 0) ? -1 : 1;
  return e;
}

inline Signature signature_of(const DGA& a) {
  Signature sig;
  const auto augs = augmentations(a);
  std::map<Poincare, long> count;
  for (const auto& e : augs) count[linearized_poincare(a, e)]++;
  sig.raw_augmentations = static_cast<long>(augs.size());
  sig.scale_exponent = augmentation_scale_exponent(a);
  const double scale = std::ldexp(1.0, -sig.scale_exponent);
  for (auto& [p, c] : count) sig.classes.emplace_back(p, c * scale);
  sig.normalized_augmentations = sig.raw_augmentations * scale;
  return sig;
}

inline Signature invariant_signature(const front::PlatFront& f, DiskLimits lim = {}) {
  if (front::rotation_number(f) != 0)
    throw DomainError("invariant_signature needs rotation number 0");
  return signature_of(compute_dga(f, lim));
}

}  // namespace preleg::dga
