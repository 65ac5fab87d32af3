#pragma once

#include "ddweaver/experiments.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ddweaver {

/// experiment,strategy,k,p0,stderr
[[nodiscard]] std::string sweep_csv(const std::vector<SweepResult>& results);

/// Full results with metadata. sweep_from_json(sweep_json(r)) == r.
[[nodiscard]] std::string sweep_json(const std::vector<SweepResult>& results);
[[nodiscard]] std::vector<SweepResult> sweep_from_json(std::string_view text);

/// Fixed-width table: one row per strategy with p0 at the last k and the mean over k.
[[nodiscard]] std::string summary_table(const std::vector<SweepResult>& results);

/// Line chart of p0 against k, one polyline per strategy.
[[nodiscard]] std::string svg_plot(std::string_view title, const std::vector<SweepResult>& results);

[[nodiscard]] std::string ramsey_summary(const RamseyReport& report);
[[nodiscard]] std::string ramsey_json(const RamseyReport& report);

} // namespace ddweaver
