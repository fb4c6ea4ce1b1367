#pragma once

#include <string>
#include <vector>

#include "idrl/experiment.hpp"

namespace idrl {

enum class PlotMetric { regret, mse, cosine };

/// Learning curves (mean ± one standard error band) per acquisition, one
/// panel per env, as a standalone SVG document.
std::string learning_curves_svg(const std::vector<SummaryRow>& rows, PlotMetric metric = PlotMetric::regret);

}  // namespace idrl
