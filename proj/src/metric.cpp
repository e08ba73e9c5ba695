#include "gapcert/metric.hpp"

#include <cmath>

namespace gapcert {

Metric Metric::trivial(int n) {
  if (n < 1) throw InvalidInput("Metric: point set must be nonempty");
  Metric m;
  m.kind_ = Kind::Trivial;
  m.n_ = n;
  return m;
}

Metric Metric::from_table(Mat d, std::optional<Vec> embedding) {
  const Index n = d.rows();
  if (n < 1 || d.cols() != n) throw InvalidInput("Metric: table must be square and nonempty");
  if (n > 1024) throw SizeLimit("Metric: table too large for construction checks");
  if (embedding && embedding->size() != n)
    throw InvalidInput("Metric: embedding size must match table");
  const Real scale = 1.0 + d.cwiseAbs().maxCoeff();
  for (Index a = 0; a < n; ++a) {
    if (std::abs(d(a, a)) > kMassTol * scale)
      throw InvalidInput("Metric: nonzero diagonal entry");
    d(a, a) = 0.0;
    for (Index b = 0; b < n; ++b) {
      if (!(d(a, b) >= 0.0) || !std::isfinite(d(a, b)))
        throw InvalidInput("Metric: entries must be finite and nonnegative");
      if (std::abs(d(a, b) - d(b, a)) > kMassTol * scale)
        throw InvalidInput("Metric: table not symmetric");
    }
  }
  for (Index a = 0; a < n; ++a)
    for (Index c = 0; c < n; ++c) {
      const Real dac = d(a, c);
      for (Index b = 0; b < n; ++b)
        if (d(a, b) > dac + d(c, b) + kMassTol * scale)
          throw InvalidInput("Metric: triangle inequality violated");
    }
  Metric m;
  m.kind_ = Kind::Table;
  m.n_ = static_cast<int>(n);
  m.table_ = std::move(d);
  m.embedding_ = std::move(embedding);
  return m;
}

Metric Metric::from_line_embedding(Vec points) {
  const Index n = points.size();
  if (n < 1) throw InvalidInput("Metric: point set must be nonempty");
  Metric m;
  m.kind_ = Kind::Table;
  m.n_ = static_cast<int>(n);
  m.table_ = (points.replicate(1, n) - points.transpose().replicate(n, 1)).cwiseAbs();
  m.embedding_ = std::move(points);
  return m;
}

Real Metric::diameter() const {
  if (kind_ == Kind::Trivial) return n_ > 1 ? 1.0 : 0.0;
  return table_.maxCoeff();
}

}  // namespace gapcert
