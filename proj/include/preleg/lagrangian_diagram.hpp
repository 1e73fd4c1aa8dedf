// Resolved (Lagrangian-projection) diagram of a plat front, read as an
// x-ordered sequence of caps and crossings on numbered strand positions.
#pragma once

#include <string>
#include <vector>

namespace preleg {

struct DiagramEvent {
  enum class Kind { LeftCap, RightCap, Crossing };
  Kind kind;
  int level;          // 1-based pair (level-1, level) of 0-based positions
  int generator = -1; // crossings only
};

struct DiagramGenerator {
  std::string name;
  int degree = 0;
  bool from_right_cusp = false;
  int front_event = -1;
};

/// At a crossing the left and right quadrants are positive, top and bottom negative.
struct LagrangianDiagram {
  std::vector<DiagramEvent> events;
  std::vector<DiagramGenerator> generators;
  bool graded = true;  // false when degrees are only defined mod 2 (rot != 0)
};

}  // namespace preleg
