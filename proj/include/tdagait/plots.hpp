#pragma once
// Standalone SVG figures for a finished run.

#include <string>
#include <vector>

#include "tdagait/classify.hpp"

namespace tdagait {

/// 2x2 heat grid, rows = true class, columns = predicted class. Each cell
/// carries a data-count attribute.
std::string confusion_svg(const EvaluationReport& report);

struct LabelledDiagram {
  Group group;
  PersistenceDiagram diagram;
};

/// Birth/death scatter, one panel per degree. The task's positive class is
/// drawn with circles, the negative class with squares.
std::string diagram_scatter_svg(const std::vector<LabelledDiagram>& diagrams, Group positive,
                                Group negative);

/// Mean Betti curve per class on shared grids, one panel per degree.
std::string betti_overlay_svg(const std::vector<LabelledDiagram>& diagrams, Group positive,
                              Group negative, std::size_t nbins);

}  // namespace tdagait
