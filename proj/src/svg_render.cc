#include "semclique/svg_render.h"

#include <algorithm>
#include <array>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "semclique/metrics.h"

namespace semclique {
namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

class Canvas {
 public:
  Canvas(const Bounds& b, double scale) : bounds_(b), scale_(scale) {}

  double width() const { return (bounds_.max_x - bounds_.min_x) * scale_; }
  double height() const { return (bounds_.max_y - bounds_.min_y) * scale_; }

  // SVG y grows downward.
  std::string Point(const Vec2& p) const {
    return absl::StrFormat("%.2f,%.2f", (p.x - bounds_.min_x) * scale_,
                           (bounds_.max_y - p.y) * scale_);
  }

  void Polyline(const std::vector<Vec2>& pts, std::string_view style) {
    if (pts.size() < 2) return;
    std::string coords;
    for (const Vec2& p : pts) absl::StrAppend(&coords, Point(p), " ");
    coords.pop_back();
    absl::StrAppend(&body_, "<polyline fill=\"none\" points=\"", coords,
                    "\" ", std::string(style), "/>\n");
  }

  void Circle(const Vec2& c, double radius, std::string_view fill,
              std::string_view title) {
    const std::string at = Point(c);
    const size_t comma = at.find(',');
    absl::StrAppend(&body_, "<circle cx=\"", at.substr(0, comma), "\" cy=\"",
                    at.substr(comma + 1), "\" r=\"",
                    absl::StrFormat("%.2f", std::max(radius * scale_, 2.0)),
                    "\" fill=\"", std::string(fill), "\"><title>",
                    std::string(title), "</title></circle>\n");
  }

  std::string Finish() const {
    return absl::StrFormat(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
        "height=\"%.0f\" viewBox=\"0 0 %.2f %.2f\">\n"
        "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n%s</svg>\n",
        width(), height(), width(), height(), body_);
  }

 private:
  Bounds bounds_;
  double scale_;
  std::string body_;
};

Bounds SceneExtent(const Scene& scene) {
  Bounds b = scene.map.bounds;
  bool empty = !(b.max_x > b.min_x && b.max_y > b.min_y);
  auto grow = [&](const Vec2& p) {
    if (empty) {
      b = {p.x, p.y, p.x, p.y};
      empty = false;
      return;
    }
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  };
  for (const SceneAgent& a : scene.agents) {
    for (const TimedState& ts : a.history.states) grow(ts.state.position());
  }
  for (const auto& [id, traj] : scene.ground_truth) {
    for (const TimedState& ts : traj.states) grow(ts.state.position());
  }
  if (empty) return {-10.0, -10.0, 10.0, 10.0};
  constexpr double kPad = 5.0;
  return {b.min_x - kPad, b.min_y - kPad, b.max_x + kPad, b.max_y + kPad};
}

}  // namespace

std::string RenderSvg(const Scene& scene, const std::vector<Clique>& cliques,
                      const PredictionSet* predictions) {
  const Bounds extent = SceneExtent(scene);
  const double span =
      std::max(extent.max_x - extent.min_x, extent.max_y - extent.min_y);
  Canvas canvas(extent, std::clamp(1000.0 / span, 0.5, 20.0));

  for (const TokenPolyline& p : scene.map.polylines) {
    canvas.Polyline(p.points, p.kind == PolylineKind::kBarrier
                                  ? "stroke=\"#222\" stroke-width=\"3\""
                                  : "stroke=\"#bbb\" stroke-width=\"1.5\" "
                                    "stroke-dasharray=\"6 4\"");
  }

  std::map<std::string, std::string> color;
  for (size_t c = 0; c < cliques.size(); ++c) {
    for (const std::string& id : cliques[c].member_ids) {
      color[id] = kPalette[c % kPalette.size()];
    }
  }

  for (const SceneAgent& agent : scene.agents) {
    auto it = color.find(agent.id);
    const std::string fill = it == color.end() ? "#999" : it->second;
    std::vector<Vec2> past;
    for (const TimedState& ts : agent.history.states) {
      past.push_back(ts.state.position());
    }
    canvas.Polyline(past, absl::StrCat("stroke=\"", fill,
                                       "\" stroke-opacity=\"0.5\""));
    auto gt = scene.ground_truth.find(agent.id);
    if (gt != scene.ground_truth.end()) {
      std::vector<Vec2> future{past.back()};
      for (const TimedState& ts : gt->second.states) {
        future.push_back(ts.state.position());
      }
      canvas.Polyline(future, absl::StrCat("stroke=\"", fill, "\""));
    }
    if (predictions != nullptr) {
      auto pit = predictions->modes.find(agent.id);
      if (pit != predictions->modes.end() && !pit->second.empty()) {
        std::vector<Vec2> pred{past.back()};
        const size_t top = TopModes(pit->second, 1).front();
        for (const AgentState& s : pit->second[top].states) {
          pred.push_back(s.position());
        }
        canvas.Polyline(pred, absl::StrCat("stroke=\"", fill,
                                           "\" stroke-dasharray=\"4 3\""));
      }
    }
    canvas.Circle(past.back(), agent.type.footprint_radius, fill, agent.id);
  }
  return canvas.Finish();
}

}  // namespace semclique
