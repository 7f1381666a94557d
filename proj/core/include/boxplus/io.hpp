#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "boxplus/measure.hpp"
#include "boxplus/spectral_stats.hpp"
#include "boxplus/subordination.hpp"

namespace boxplus {

// shortest decimal that round-trips the double
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Measure file: `kind,<atoms|grid>` then `K,<value>` then the CSV body of
// `location,weight` or `point,density` rows.
void save_measure(const Measure& m, const std::filesystem::path& path);
Measure load_measure(const std::filesystem::path& path);

// CSV rows: E, eta, Re m, Im m, Re w1, Im w1, Re w2, Im w2, residual, iterations
void write_solutions_csv(const std::filesystem::path& path,
                         const std::vector<SubordinationSolution>& sols);

std::string report_to_json(const StatisticsReport& rep);

// manifest: resolved configuration + library version, no timestamps, sorted
// keys so identical configs give identical bytes
std::string manifest_json(const std::string& command,
                          const std::map<std::string, std::string>& resolved);

}  // namespace boxplus
