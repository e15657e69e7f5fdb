#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "linf/experiment.hpp"

namespace linf {

struct PlotSpec {
  std::string title = "mean l-infinity error";
  std::string x_label = "N";
  std::string y_label = "mean linf error";
  bool log_x = true;
};

// Self-contained SVG: one series per estimator (mean linf vs N), +-1
// standard-error bars, markers always, connecting lines only for series with
// at least two points. Throws ParseError when there are no records.
void write_linf_plot(const std::vector<TrialRecord>& records, const PlotSpec& spec,
                     const std::filesystem::path& out_path);

}  // namespace linf
