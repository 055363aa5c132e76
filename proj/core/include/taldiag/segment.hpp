#pragma once

namespace taldiag {

/// A closed time interval [start, end] in seconds.
struct TemporalSegment {
  double start = 0.0;
  double end = 0.0;

  double length() const noexcept { return end - start; }
  bool valid() const noexcept { return start >= 0.0 && start < end; }
  bool operator==(const TemporalSegment&) const = default;
};

/// Temporal intersection-over-union of two segments. Returns 0 when the
/// segments are disjoint; 1 when they are identical.
double tiou(const TemporalSegment& a, const TemporalSegment& b) noexcept;

}  // namespace taldiag
