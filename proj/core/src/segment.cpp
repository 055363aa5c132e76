#include "taldiag/segment.hpp"

#include <algorithm>

namespace taldiag {

double tiou(const TemporalSegment& a, const TemporalSegment& b) noexcept {
  const double inter = std::min(a.end, b.end) - std::max(a.start, b.start);
  if (inter <= 0.0) return 0.0;
  const double uni = a.length() + b.length() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace taldiag
