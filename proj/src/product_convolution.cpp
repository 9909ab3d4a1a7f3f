#include "mconv/product_convolution.hpp"

namespace mconv {

RectangleUnion::RectangleUnion(const std::vector<std::pair<ArcUnion, ArcUnion>>& rectangles) {
  std::vector<double> cuts = {0.0, 1.0};
  for (const auto& [left, right] : rectangles) {
    if (right.empty()) continue;
    for (const auto& arc : left.arcs()) {
      cuts.push_back(arc.begin);
      cuts.push_back(arc.end);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    std::vector<ArcUnion::Arc> covering;
    for (const auto& [left, right] : rectangles)
      if (left.contains(mid)) covering.insert(covering.end(), right.arcs().begin(), right.arcs().end());
    ArcUnion right(covering);
    if (right.empty()) continue;
    if (!pieces_.empty() && pieces_.back().left.end == cuts[i] && pieces_.back().right == right) {
      pieces_.back().left.end = cuts[i + 1];
    } else {
      pieces_.push_back(Piece{{cuts[i], cuts[i + 1]}, std::move(right)});
    }
  }
}

bool RectangleUnion::contains(double l, double r) const {
  const double x = wrap_turns(l);
  for (const auto& p : pieces_)
    if (p.left.begin <= x && x < p.left.end) return p.right.contains(r);
  return false;
}

ArcUnion RectangleUnion::left_section(double l) const {
  const double x = wrap_turns(l);
  for (const auto& p : pieces_)
    if (p.left.begin <= x && x < p.left.end) return p.right;
  return ArcUnion();
}

ArcUnion RectangleUnion::right_section(double r) const {
  std::vector<ArcUnion::Arc> arcs;
  for (const auto& p : pieces_)
    if (p.right.contains(r)) arcs.push_back(p.left);
  return ArcUnion(arcs);
}

double RectangleUnion::area() const {
  double total = 0.0;
  for (const auto& p : pieces_) total += (p.left.end - p.left.begin) * p.right.length();
  return total;
}

Estimate product_mass(const SampledProduct<double, double>& lambda, const RectangleUnion& w, std::uint64_t budget,
                      StreamKey key, double delta) {
  if (lambda.left().has_evaluator() && lambda.right().has_evaluator()) {
    double total = 0.0;
    for (const auto& p : w.pieces())
      total += lambda.left().evaluator()(ArcUnion({p.left})) * lambda.right().evaluator()(p.right);
    return Estimate{total, 0.0, 0, delta};
  }
  if (budget == 0) throw std::invalid_argument("product mass needs evaluators or a positive sample budget");
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < budget; ++i) {
    const auto [l, r] = lambda.sample(key, i);
    if (w.contains(l, r)) ++hits;
  }
  return Estimate{static_cast<double>(hits) / static_cast<double>(budget), hoeffding_half_width(1.0, budget, delta),
                  budget, delta};
}

Estimate slice_integral(const SampledProduct<double, double>& lambda, const RectangleUnion& w, Axis axis,
                        std::uint64_t budget, StreamKey key, double delta) {
  if (budget == 0) throw std::invalid_argument("slice integral needs a positive sample budget");
  const auto& inner = axis == Axis::left ? lambda.right() : lambda.left();
  const auto& outer = axis == Axis::left ? lambda.left() : lambda.right();
  if (!inner.has_evaluator()) throw std::invalid_argument("slice integral needs an exact evaluator on the inner axis");
  double sum = 0.0;
  for (std::uint64_t i = 0; i < budget; ++i) {
    const double t = outer.sample(key, i);
    sum += inner.evaluator()(axis == Axis::left ? w.left_section(t) : w.right_section(t));
  }
  return Estimate{sum / static_cast<double>(budget), hoeffding_half_width(1.0, budget, delta), budget, delta};
}

}  // namespace mconv
