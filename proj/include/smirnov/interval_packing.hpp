#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace smirnov::tree {

// Open interval (lo, hi) of the extended line; lo may be -inf, hi may be +inf.
struct IntervalExt {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return lo < x && x < hi; }
  bool valid() const noexcept {
    return !std::isnan(lo) && !std::isnan(hi) && lo < hi && lo != INFINITY && hi != -INFINITY;
  }
  friend bool operator==(const IntervalExt&, const IntervalExt&) = default;
};

struct CoverageSweep {
  int max_coverage = 0;
  double max_witness = 0.0;
  int min_coverage = 0;      // over nonempty open pieces of the line
  double min_witness = 0.0;
};

// Coverage of the line by open intervals, evaluated on the open pieces
// between consecutive distinct endpoints. A point is never covered more than
// its neighbouring pieces, so maxima and minima live on pieces.
inline CoverageSweep sweep_coverage(std::span<const IntervalExt> intervals) {
  std::vector<double> ends;
  for (const IntervalExt& iv : intervals) {
    if (std::isfinite(iv.lo)) ends.push_back(iv.lo);
    if (std::isfinite(iv.hi)) ends.push_back(iv.hi);
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

  struct Piece {
    double a, b, witness;
  };
  std::vector<Piece> pieces;
  if (ends.empty()) {
    pieces.push_back({-INFINITY, INFINITY, 0.0});
  } else {
    pieces.push_back({-INFINITY, ends.front(), ends.front() - 1.0});
    for (std::size_t k = 0; k + 1 < ends.size(); ++k)
      pieces.push_back({ends[k], ends[k + 1], 0.5 * (ends[k] + ends[k + 1])});
    pieces.push_back({ends.back(), INFINITY, ends.back() + 1.0});
  }
  CoverageSweep out;
  out.max_coverage = -1;
  out.min_coverage = std::numeric_limits<int>::max();
  for (const Piece& p : pieces) {
    int c = 0;
    for (const IntervalExt& iv : intervals)
      if (iv.lo <= p.a && p.b <= iv.hi) ++c;
    if (c > out.max_coverage) {
      out.max_coverage = c;
      out.max_witness = p.witness;
    }
    if (c < out.min_coverage) {
      out.min_coverage = c;
      out.min_witness = p.witness;
    }
  }
  return out;
}

// Interval-partitioning greedy: sorted by left end, each interval reuses the
// color that finished earliest if it finished at or before the left end.
// The number of colors equals the largest clique of the interval graph.
inline int greedy_color_count(std::span<const IntervalExt> intervals) {
  std::vector<IntervalExt> sorted(intervals.begin(), intervals.end());
  std::sort(sorted.begin(), sorted.end(), [](const IntervalExt& a, const IntervalExt& b) { return a.lo < b.lo; });
  std::priority_queue<double, std::vector<double>, std::greater<>> finish;
  int colors = 0;
  for (const IntervalExt& iv : sorted) {
    if (!finish.empty() && finish.top() <= iv.lo) {
      finish.pop();
    } else {
      ++colors;
    }
    finish.push(iv.hi);
  }
  return colors;
}

// True when the intervals split into m classes of pairwise disjoint members.
inline bool packs_into(std::span<const IntervalExt> intervals, int m) {
  return sweep_coverage(intervals).max_coverage <= m;
}

}  // namespace smirnov::tree
