#pragma once

#include <string>

#include "homogeig/harness.hpp"

namespace homogeig::cli {

/// A static two-panel SVG for one condition of a rate report: error against
/// eps per k on log-log axes with the fitted lines, and lambda_k against k
/// with its fit and a line of the reference slope. Output bytes depend only
/// on the input.
std::string rate_plot_svg(const RateReport& report, const BcRates& rates);

}  // namespace homogeig::cli
