#ifndef EDT_REPORT_HPP
#define EDT_REPORT_HPP

#include "edt/analysis.hpp"
#include "edt/engine.hpp"
#include "edt/strategies.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace edt {

// Six significant digits, the precision of every CSV export.
auto format_number(double value) -> std::string;

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(std::filesystem::path const& path, std::string const& contents);

auto matrix_csv(Matrix const& m, Labels const& labels) -> std::string;
auto trajectory_csv(Trajectory const& trajectory, Labels const& genes) -> std::string;
auto ranking_csv(Ranking const& ranking) -> std::string;
auto distribution_csv(DistributionPlan const& plan) -> std::string;
auto persistence_csv(PersistenceReport const& report, Labels const& genes) -> std::string;

// Full double precision.
auto to_json(RestPoint const& rest, Labels const& genes) -> nlohmann::json;
auto to_json(Ranking const& ranking) -> nlohmann::json;
auto to_json(DistributionPlan const& plan) -> nlohmann::json;
auto to_json(PersistenceReport const& report, Labels const& genes) -> nlohmann::json;

} // namespace edt

#endif
