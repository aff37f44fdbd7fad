#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "pff/cli.hpp"

namespace pff {

std::string report(const std::vector<IncrementRecord>& records) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%9s %14s %14s %6s %10s %10s %9s\n", "increment", "displacement", "force", "iter",
                "cumulative", "wall[s]", "status");
  out += line;
  long cumulative = 0;
  double wall = 0.0;
  const IncrementRecord* peak = nullptr;
  int failed = 0;
  for (const auto& r : records) {
    cumulative += r.iterations;
    wall += r.wall_seconds;
    if (!peak || std::abs(r.force) > std::abs(peak->force)) peak = &r;
    if (!r.converged) ++failed;
    std::snprintf(line, sizeof line, "%9d %14.6e %14.6e %6d %10ld %10.3f %9s\n", r.increment, r.displacement, r.force,
                  r.iterations, cumulative, r.wall_seconds, r.converged ? "ok" : "FAILED");
    out += line;
  }
  if (peak) {
    std::snprintf(line, sizeof line, "peak force %.6e at increment %d (displacement %.6e)\n", peak->force,
                  peak->increment, peak->displacement);
    out += line;
  }
  std::snprintf(line, sizeof line, "increments %zu, failed %d, cumulative iterations %ld, wall time %.3f s\n",
                records.size(), failed, cumulative, wall);
  out += line;
  return out;
}

}  // namespace pff
