#ifndef SEMCLIQUE_SVG_RENDER_H_
#define SEMCLIQUE_SVG_RENDER_H_

#include <string>
#include <vector>

#include "semclique/predictor.h"
#include "semclique/scene.h"

namespace semclique {

// Top-down plot: map polylines, agent histories, current positions colored by
// clique, ground truth (solid) and top-mode predictions (dashed) when given.
// The output is a standalone SVG document.
std::string RenderSvg(const Scene& scene, const std::vector<Clique>& cliques,
                      const PredictionSet* predictions = nullptr);

}  // namespace semclique

#endif  // SEMCLIQUE_SVG_RENDER_H_
