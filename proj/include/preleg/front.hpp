// Plat fronts: words of left cusps, right cusps and crossings on numbered
// strand positions. Traversal invariants, Legendrian Reidemeister moves,
// Maslov potentials and the resolved Lagrangian diagram.
#pragma once

#include "preleg/common.hpp"
#include "preleg/lagrangian_diagram.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace preleg::front {

enum class EventKind { LeftCusp, RightCusp, Crossing };

struct Event {
  EventKind kind;
  int level;  // 1-based; touches 0-based positions level-1 and level
  bool operator==(const Event&) const = default;
};

inline Event L(int k) { return {EventKind::LeftCusp, k}; }
inline Event R(int k) { return {EventKind::RightCusp, k}; }
inline Event X(int k) { return {EventKind::Crossing, k}; }

inline char event_letter(EventKind k) {
  switch (k) {
    case EventKind::LeftCusp: return 'L';
    case EventKind::RightCusp: return 'R';
    case EventKind::Crossing: return 'X';
  }
  return '?';
}

class PlatFront {
 public:
  PlatFront() = default;
  explicit PlatFront(std::vector<Event> word) : word_(std::move(word)) { validate(); }

  const std::vector<Event>& word() const { return word_; }
  std::size_t size() const { return word_.size(); }
  bool empty() const { return word_.empty(); }

  /// Strand count in slice s (s = 0 before the first event, s = size() after the last).
  int strands(std::size_t s) const { return counts_.at(s); }
  int max_strands() const { return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end()); }

  int count(EventKind k) const {
    return static_cast<int>(std::count_if(word_.begin(), word_.end(), [k](const Event& e) { return e.kind == k; }));
  }

  std::string to_string() const {
    std::string s;
    for (const auto& e : word_) {
      if (!s.empty()) s += ' ';
      s += event_letter(e.kind) + std::to_string(e.level);
    }
    return s;
  }

  bool operator==(const PlatFront& o) const { return word_ == o.word_; }

 private:
  void validate() {
    counts_.assign(word_.size() + 1, 0);
    int c = 0;
    for (std::size_t i = 0; i < word_.size(); ++i) {
      const Event& e = word_[i];
      const int k = e.level;
      const std::string where = "event " + std::to_string(i + 1) + " (" + event_letter(e.kind) + std::to_string(k) + ")";
      switch (e.kind) {
        case EventKind::LeftCusp:
          if (k < 1 || k > c + 1) throw DomainError(where + ": level out of range for " + std::to_string(c) + " strands");
          c += 2;
          break;
        case EventKind::RightCusp:
          if (k < 1 || k > c - 1) throw DomainError(where + ": level out of range for " + std::to_string(c) + " strands");
          c -= 2;
          break;
        case EventKind::Crossing:
          if (k < 1 || k > c - 1) throw DomainError(where + ": level out of range for " + std::to_string(c) + " strands");
          break;
      }
      counts_[i + 1] = c;
    }
    if (c != 0) throw DomainError("front does not close: " + std::to_string(c) + " strands remain at the right end");
  }

  std::vector<Event> word_;
  std::vector<int> counts_{0};
};

// ---------------------------------------------------------------------------
// Position bookkeeping across one event.

/// Position after event e of the strand at position p before it, or -1 when
/// the strand ends in a right cusp. Crossings swap level-1 and level.
inline int forward_position(const Event& e, int p) {
  const int a = e.level - 1, b = e.level;
  switch (e.kind) {
    case EventKind::LeftCusp: return p >= a ? p + 2 : p;
    case EventKind::RightCusp:
      if (p == a || p == b) return -1;
      return p > b ? p - 2 : p;
    case EventKind::Crossing:
      if (p == a) return b;
      if (p == b) return a;
      return p;
  }
  return p;
}

/// Inverse of forward_position; -1 when the strand starts at a left cusp.
inline int backward_position(const Event& e, int p) {
  const int a = e.level - 1, b = e.level;
  switch (e.kind) {
    case EventKind::LeftCusp:
      if (p == a || p == b) return -1;
      return p > b ? p - 2 : p;
    case EventKind::RightCusp: return p >= a ? p + 2 : p;
    case EventKind::Crossing:
      if (p == a) return b;
      if (p == b) return a;
      return p;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Traversal.

/// A strand piece: slice s (between events s-1 and s), position p.
struct Segment {
  int slice;
  int pos;
  bool operator<(const Segment& o) const { return slice != o.slice ? slice < o.slice : pos < o.pos; }
  bool operator==(const Segment&) const = default;
};

struct CuspVisit {
  int event;
  bool down;  // traversed from the upper branch to the lower one
};

struct Component {
  std::vector<Segment> segments;  // in traversal order
  std::vector<int> directions;    // +1 moving right, -1 moving left
  std::vector<CuspVisit> cusps;
  int rotation() const {
    int d = 0, u = 0;
    for (const auto& c : cusps) (c.down ? d : u)++;
    return (d - u) / 2;
  }
};

struct Traversal {
  std::vector<Component> components;
  std::map<Segment, std::pair<int, int>> where;  // segment -> (component, index in traversal)
  /// For each crossing event: traversal direction of the strand entering at level-1 and at level.
  std::map<int, std::pair<int, int>> crossing_dirs;
};

/// Traces every component. Each starts at the upper branch of its first left
/// cusp, moving right.
inline Traversal traverse(const PlatFront& f) {
  Traversal t;
  const auto& w = f.word();
  const int E = static_cast<int>(w.size());
  for (int start = 0; start < E; ++start) {
    if (w[start].kind != EventKind::LeftCusp) continue;
    Segment first{start + 1, w[start].level - 1};
    if (t.where.count(first)) continue;
    Component comp;
    const int cid = static_cast<int>(t.components.size());
    Segment cur = first;
    int dir = +1;
    for (std::size_t guard = 0;; ++guard) {
      if (guard > 4 * (w.size() + 1) * static_cast<std::size_t>(f.max_strands() + 1))
        throw ConsistencyError("front traversal did not close");
      t.where[cur] = {cid, static_cast<int>(comp.segments.size())};
      comp.segments.push_back(cur);
      comp.directions.push_back(dir);
      Segment next{};
      if (dir > 0) {
        const int ev = cur.slice;  // event to the right of slice s
        const Event& e = w[ev];
        if (e.kind == EventKind::Crossing && (cur.pos == e.level - 1 || cur.pos == e.level)) {
          auto& cd = t.crossing_dirs[ev];
          (cur.pos == e.level - 1 ? cd.first : cd.second) = dir;
        }
        int np = forward_position(e, cur.pos);
        if (np < 0) {
          comp.cusps.push_back({ev, cur.pos == e.level - 1});
          next = {cur.slice, cur.pos == e.level - 1 ? e.level : e.level - 1};
          dir = -1;
        } else {
          next = {cur.slice + 1, np};
        }
      } else {
        const int ev = cur.slice - 1;  // event to the left of slice s
        const Event& e = w[ev];
        int np = backward_position(e, cur.pos);
        if (e.kind == EventKind::Crossing && np >= 0 && (np == e.level - 1 || np == e.level)) {
          auto& cd = t.crossing_dirs[ev];
          (np == e.level - 1 ? cd.first : cd.second) = dir;
        }
        if (np < 0) {
          comp.cusps.push_back({ev, cur.pos == e.level - 1});
          next = {cur.slice, cur.pos == e.level - 1 ? e.level : e.level - 1};
          dir = +1;
        } else {
          next = {cur.slice - 1, np};
        }
      }
      if (next == first && dir == +1) break;
      cur = next;
    }
    t.components.push_back(std::move(comp));
  }
  return t;
}

inline int component_count(const PlatFront& f) { return static_cast<int>(traverse(f).components.size()); }

inline void require_single_component(const Traversal& t) {
  if (t.components.size() != 1)
    throw DomainError("invariant defined for knots only; front has " + std::to_string(t.components.size()) +
                      " components");
}

inline int rotation_number(const PlatFront& f) {
  auto t = traverse(f);
  require_single_component(t);
  return t.components[0].rotation();
}

inline std::vector<int> rotation_numbers(const PlatFront& f) {
  std::vector<int> out;
  for (const auto& c : traverse(f).components) out.push_back(c.rotation());
  return out;
}

/// +1 when both strands run in the same x-direction.
inline int writhe(const PlatFront& f) {
  auto t = traverse(f);
  int w = 0;
  for (const auto& [ev, d] : t.crossing_dirs) w += d.first == d.second ? 1 : -1;
  return w;
}

inline int thurston_bennequin(const PlatFront& f) {
  auto t = traverse(f);
  require_single_component(t);
  return writhe(f) - f.count(EventKind::RightCusp);
}

// ---------------------------------------------------------------------------
// Maslov potential: upper branch of every cusp is one above the lower branch.

struct MaslovPotential {
  std::map<Segment, int> value;
  int modulus = 0;  // 0 for an integer potential, 2 when only the parity is defined
  int at(int slice, int pos) const { return value.at({slice, pos}); }
};

inline MaslovPotential maslov_potential(const PlatFront& f, bool require_integer = true) {
  auto t = traverse(f);
  MaslovPotential mp;
  bool all_zero = true;
  for (const auto& c : t.components) all_zero = all_zero && c.rotation() == 0;
  if (!all_zero && require_integer)
    throw DomainError("no integer Maslov potential: rotation number is nonzero");
  mp.modulus = all_zero ? 0 : 2;
  const auto& w = f.word();
  for (const auto& c : t.components) {
    int mu = 0;
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
      const Segment& s = c.segments[i];
      int v = mp.modulus ? ((mu % 2) + 2) % 2 : mu;
      mp.value[s] = v;
      const std::size_t j = (i + 1) % c.segments.size();
      const Segment& nx = c.segments[j];
      if (nx.slice == s.slice) {  // turned at a cusp
        const int ev = c.directions[i] > 0 ? s.slice : s.slice - 1;
        const bool from_upper = s.pos == w[ev].level - 1;
        mu += from_upper ? -1 : +1;
      }
    }
    if (mp.modulus == 0 && mu != 0) throw ConsistencyError("Maslov potential failed to close");
  }
  return mp;
}

/// Ng resolution: right cusps become a crossing followed by a right cap.
/// Generators are named c1, c2, ... in x-order.
inline LagrangianDiagram lagrangian_resolution(const PlatFront& f, bool require_grading = true) {
  MaslovPotential mp = maslov_potential(f, require_grading);
  LagrangianDiagram d;
  d.graded = mp.modulus == 0;
  const auto& w = f.word();
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    const Event& e = w[i];
    switch (e.kind) {
      case EventKind::LeftCusp:
        d.events.push_back({DiagramEvent::Kind::LeftCap, e.level});
        break;
      case EventKind::Crossing:
      case EventKind::RightCusp: {
        DiagramGenerator g;
        g.front_event = i;
        g.from_right_cusp = e.kind == EventKind::RightCusp;
        int deg = mp.at(i, e.level - 1) - mp.at(i, e.level);
        if (mp.modulus) deg = ((deg % 2) + 2) % 2;
        g.degree = deg;
        g.name = "c" + std::to_string(d.generators.size() + 1);
        d.events.push_back({DiagramEvent::Kind::Crossing, e.level, static_cast<int>(d.generators.size())});
        d.generators.push_back(g);
        if (g.from_right_cusp) d.events.push_back({DiagramEvent::Kind::RightCap, e.level});
        break;
      }
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Standard fronts.

inline PlatFront unknot() { return PlatFront({L(1), R(1)}); }

/// Twist-knot front: a four-crossing clasp followed by s crossings in the
/// right part. Knot determinant 2s - 1, tb = -s, rotation number 0.
inline PlatFront whitehead_double_W(int s) {
  if (s < 3 || s % 2 == 0) throw DomainError("W_s needs an odd s >= 3, got " + std::to_string(s));
  // Clasp on the left (X2 X1 X1 X1), s twist crossings on the right.
  std::vector<Event> w{L(1), L(3), X(2), X(1), X(1), X(1)};
  for (int i = 0; i < s; ++i) w.push_back(X(2));
  w.push_back(R(1));
  w.push_back(R(1));
  return PlatFront(w);
}

// ---------------------------------------------------------------------------
// Moves. Every move returns a new front and throws DomainError naming the
// expected local word when the pattern does not match.

namespace detail {

inline PlatFront splice(const PlatFront& f, std::size_t at, std::size_t remove, const std::vector<Event>& insert) {
  std::vector<Event> w = f.word();
  w.erase(w.begin() + static_cast<long>(at), w.begin() + static_cast<long>(at + remove));
  w.insert(w.begin() + static_cast<long>(at), insert.begin(), insert.end());
  return PlatFront(w);
}

inline void require_slice(const PlatFront& f, int slice, int pos) {
  if (slice < 1 || slice >= static_cast<int>(f.size())) throw DomainError("slice must lie strictly inside the word");
  if (pos < 0 || pos >= f.strands(static_cast<std::size_t>(slice)))
    throw DomainError("no strand at position " + std::to_string(pos) + " in slice " + std::to_string(slice));
}

inline bool matches(const PlatFront& f, std::size_t at, const std::vector<Event>& pattern) {
  if (at + pattern.size() > f.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (!(f.word()[at + i] == pattern[i])) return false;
  return true;
}

}  // namespace detail

enum class FishSide { Below, Above };

/// Legendrian RI: a fish (two cusps and one crossing) on the strand at
/// position `pos` of slice `slice`, opening below or above it.
inline PlatFront apply_RI(const PlatFront& f, int slice, int pos, FishSide side = FishSide::Below) {
  detail::require_slice(f, slice, pos);
  const int i = pos;
  std::vector<Event> fish = side == FishSide::Below ? std::vector<Event>{L(i + 2), X(i + 1), R(i + 2)}
                                                     : std::vector<Event>{L(i + 1), X(i + 2), R(i + 1)};
  return detail::splice(f, static_cast<std::size_t>(slice), 0, fish);
}

/// Removes a fish starting at event `at`.
inline PlatFront remove_RI(const PlatFront& f, std::size_t at) {
  if (at >= f.size()) throw DomainError("RI removal position out of range");
  const Event& e = f.word()[at];
  const int k = e.level;
  if (e.kind == EventKind::LeftCusp && detail::matches(f, at, {L(k), X(k - 1), R(k)}) && k >= 2)
    return detail::splice(f, at, 3, {});
  if (e.kind == EventKind::LeftCusp && detail::matches(f, at, {L(k), X(k + 1), R(k)}))
    return detail::splice(f, at, 3, {});
  throw DomainError("RI removal expects 'L k X k-1 R k' or 'L k X k+1 R k' at event " + std::to_string(at + 1));
}

enum class RIIDirection { PushAbove, PushBelow, Pull };

/// Legendrian RII: a cusp passes a neighbouring strand, creating two
/// crossings (push), or the inverse (pull) on a matching three-event window.
inline PlatFront apply_RII(const PlatFront& f, std::size_t at, RIIDirection dir) {
  if (at >= f.size()) throw DomainError("RII position out of range");
  const Event e = f.word()[at];
  const int k = e.level;
  const int before = f.strands(at);
  if (dir == RIIDirection::Pull) {
    if (e.kind == EventKind::LeftCusp) {
      if (detail::matches(f, at, {L(k), X(k + 1), X(k)})) return detail::splice(f, at, 3, {L(k + 1)});
      if (k >= 2 && detail::matches(f, at, {L(k), X(k - 1), X(k)})) return detail::splice(f, at, 3, {L(k - 1)});
    }
    if (e.kind == EventKind::Crossing && at + 2 < f.size()) {
      const Event r = f.word()[at + 2];
      const int c = r.level;
      if (detail::matches(f, at, {X(c), X(c + 1), R(c)})) return detail::splice(f, at, 3, {R(c + 1)});
      if (c >= 2 && detail::matches(f, at, {X(c), X(c - 1), R(c)})) return detail::splice(f, at, 3, {R(c - 1)});
    }
    throw DomainError("RII pull expects 'L j X j+1 X j', 'L j X j-1 X j', 'X c X c+1 R c' or 'X c X c-1 R c' at event " +
                      std::to_string(at + 1));
  }
  const bool above = dir == RIIDirection::PushAbove;
  if (e.kind == EventKind::LeftCusp) {
    if (above) {
      if (k < 2) throw DomainError("RII push above needs a strand above the cusp 'L k' (k >= 2)");
      return detail::splice(f, at, 1, {L(k - 1), X(k), X(k - 1)});
    }
    if (k > before) throw DomainError("RII push below needs a strand below the cusp 'L k'");
    return detail::splice(f, at, 1, {L(k + 1), X(k), X(k + 1)});
  }
  if (e.kind == EventKind::RightCusp) {
    if (above) {
      if (k < 2) throw DomainError("RII push above needs a strand above the cusp 'R k' (k >= 2)");
      return detail::splice(f, at, 1, {X(k - 1), X(k), R(k - 1)});
    }
    if (k + 2 > before) throw DomainError("RII push below needs a strand below the cusp 'R k'");
    return detail::splice(f, at, 1, {X(k + 1), X(k), R(k + 1)});
  }
  throw DomainError("RII push expects a cusp 'L k' or 'R k' at event " + std::to_string(at + 1));
}

/// Legendrian RIII: X k X k+1 X k <-> X k+1 X k X k+1.
inline PlatFront apply_RIII(const PlatFront& f, std::size_t at) {
  if (at + 2 >= f.size()) throw DomainError("RIII needs three crossings starting at the given event");
  const Event a = f.word()[at];
  const int k = a.level;
  if (detail::matches(f, at, {X(k), X(k + 1), X(k)})) return detail::splice(f, at, 3, {X(k + 1), X(k), X(k + 1)});
  if (k >= 2 && detail::matches(f, at, {X(k), X(k - 1), X(k)}))
    return detail::splice(f, at, 3, {X(k - 1), X(k), X(k - 1)});
  throw DomainError("RIII expects 'X k X k+1 X k' or 'X k X k-1 X k' at event " + std::to_string(at + 1));
}

/// Planar isotopy: two crossings on disjoint levels commute.
inline PlatFront commute_crossings(const PlatFront& f, std::size_t at) {
  if (at + 1 >= f.size()) throw DomainError("commutation needs two events");
  const Event a = f.word()[at], b = f.word()[at + 1];
  if (a.kind != EventKind::Crossing || b.kind != EventKind::Crossing || std::abs(a.level - b.level) < 2)
    throw DomainError("commutation expects 'X a X b' with |a - b| >= 2 at event " + std::to_string(at + 1));
  return detail::splice(f, at, 2, {b, a});
}

enum class ZigzagSign { Up, Down };

/// Adds a pair of cusps on the first strand (traversed rightward): Up adds two
/// down-cusps (rot + 1), Down adds two up-cusps (rot - 1). tb drops by one.
inline PlatFront zigzag_stabilize(const PlatFront& f, ZigzagSign sign) {
  if (f.empty()) throw DomainError("cannot stabilize the empty front");
  // slice 1, position 0 is the upper branch of the first left cusp
  std::vector<Event> z = sign == ZigzagSign::Up ? std::vector<Event>{L(2), R(1)} : std::vector<Event>{L(1), R(2)};
  return detail::splice(f, 1, 0, z);
}

/// Every move applicable to f, as closures over the position.
struct MoveSite {
  enum class Kind { RIIPushAbove, RIIPushBelow, RIIPull, RIII, Commute } kind;
  std::size_t at;
};

inline std::vector<MoveSite> legendrian_move_sites(const PlatFront& f, bool include_pushes = true) {
  std::vector<MoveSite> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Event e = f.word()[i];
    if (include_pushes && (e.kind == EventKind::LeftCusp || e.kind == EventKind::RightCusp)) {
      if (e.level >= 2) out.push_back({MoveSite::Kind::RIIPushAbove, i});
      const int before = f.strands(i);
      if ((e.kind == EventKind::LeftCusp && e.level <= before) || (e.kind == EventKind::RightCusp && e.level + 2 <= before))
        out.push_back({MoveSite::Kind::RIIPushBelow, i});
    }
    try {
      (void)apply_RII(f, i, RIIDirection::Pull);
      out.push_back({MoveSite::Kind::RIIPull, i});
    } catch (const DomainError&) {
    }
    try {
      (void)apply_RIII(f, i);
      out.push_back({MoveSite::Kind::RIII, i});
    } catch (const DomainError&) {
    }
    if (i + 1 < f.size() && e.kind == EventKind::Crossing && f.word()[i + 1].kind == EventKind::Crossing &&
        std::abs(e.level - f.word()[i + 1].level) >= 2)
      out.push_back({MoveSite::Kind::Commute, i});
  }
  return out;
}

inline PlatFront apply_move(const PlatFront& f, const MoveSite& m) {
  switch (m.kind) {
    case MoveSite::Kind::RIIPushAbove: return apply_RII(f, m.at, RIIDirection::PushAbove);
    case MoveSite::Kind::RIIPushBelow: return apply_RII(f, m.at, RIIDirection::PushBelow);
    case MoveSite::Kind::RIIPull: return apply_RII(f, m.at, RIIDirection::Pull);
    case MoveSite::Kind::RIII: return apply_RIII(f, m.at);
    case MoveSite::Kind::Commute: return commute_crossings(f, m.at);
  }
  return f;
}

/// A random sequence of RII/RIII moves (plus commutations). Pushes are capped
/// so the word stays below `max_events`.
inline PlatFront random_legendrian_moves(PlatFront f, int steps, std::mt19937_64& rng, std::size_t max_events = 40) {
  for (int s = 0; s < steps; ++s) {
    auto sites = legendrian_move_sites(f, f.size() + 2 <= max_events);
    if (sites.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, sites.size() - 1);
    f = apply_move(f, sites[pick(rng)]);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Front file format: one event per line, `L k` / `R k` / `X k`, '#' comments.

inline PlatFront parse_front(std::istream& in) {
  std::vector<Event> w;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::istringstream is(s);
    std::string tok;
    if (!(is >> tok)) continue;
    if (tok.size() != 1 || std::string("LRX").find(tok[0]) == std::string::npos)
      throw ParseError("expected 'L', 'R' or 'X', found '" + tok + "'", line);
    std::string num;
    if (!(is >> num)) throw ParseError("missing level after '" + tok + "'", line);
    int k = 0;
    std::size_t used = 0;
    try {
      k = std::stoi(num, &used);
    } catch (const std::exception&) {
      throw ParseError("level is not an integer: '" + num + "'", line);
    }
    if (used != num.size()) throw ParseError("level is not an integer: '" + num + "'", line);
    std::string extra;
    if (is >> extra) throw ParseError("unexpected text after the level: '" + extra + "'", line);
    if (k < 1) throw ParseError("level must be positive", line);
    EventKind kind = tok[0] == 'L' ? EventKind::LeftCusp : tok[0] == 'R' ? EventKind::RightCusp : EventKind::Crossing;
    w.push_back({kind, k});
    try {
      // prefix validity is checked as we go so the error carries the line number
      int c = 0;
      for (const auto& e : w) {
        int lim = e.kind == EventKind::LeftCusp ? c + 1 : c - 1;
        if (e.level > lim) throw DomainError("level " + std::to_string(e.level) + " out of range for " +
                                             std::to_string(c) + " strands");
        c += e.kind == EventKind::LeftCusp ? 2 : e.kind == EventKind::RightCusp ? -2 : 0;
      }
    } catch (const DomainError& err) {
      throw ParseError(err.what(), line);
    }
  }
  if (w.empty()) throw ParseError("empty front", line);
  try {
    return PlatFront(w);
  } catch (const DomainError& err) {
    throw ParseError(err.what(), line);
  }
}

inline PlatFront parse_front(const std::string& text) {
  std::istringstream in(text);
  return parse_front(in);
}

inline std::string format_front(const PlatFront& f) {
  std::string out;
  for (const auto& e : f.word()) out += std::string(1, event_letter(e.kind)) + " " + std::to_string(e.level) + "\n";
  return out;
}

}  // namespace preleg::front
