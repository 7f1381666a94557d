#include "boxplus/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "boxplus/version.hpp"

namespace boxplus {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // prefer the shorter representation when it round-trips
  for (int prec = 1; prec <= 16; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(shorter, "%lf", &back);
    if (back == v) return shorter;
  }
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

void save_measure(const Measure& m, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "kind," << (m.kind() == MeasureKind::atoms ? "atoms" : "grid") << '\n';
  out << "K," << format_double(m.support_bound()) << '\n';
  const auto& xs = m.locations();
  const auto& ws = m.weights();
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << format_double(xs[i]) << ',' << format_double(ws[i]) << '\n';
  write_text_file(path, out.str());
}

Measure load_measure(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("kind,", 0) != 0)
    throw std::runtime_error("measure file: missing kind line");
  const std::string kind = line.substr(5);
  if (!std::getline(in, line) || line.rfind("K,", 0) != 0)
    throw std::runtime_error("measure file: missing K line");
  const double k = std::stod(line.substr(2));
  std::vector<double> xs, ws;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("measure file: bad row: " + line);
    xs.push_back(std::stod(line.substr(0, comma)));
    ws.push_back(std::stod(line.substr(comma + 1)));
  }
  Measure m = kind == "atoms" ? Measure::from_atoms(std::move(xs), std::move(ws))
                              : Measure::from_grid(std::move(xs), std::move(ws));
  if (k > m.support_bound()) m.set_support_bound(k);
  return m;
}

void write_solutions_csv(const std::filesystem::path& path,
                         const std::vector<SubordinationSolution>& sols) {
  std::vector<std::vector<double>> rows;
  rows.reserve(sols.size());
  for (const auto& s : sols)
    rows.push_back({s.z.real(), s.z.imag(), s.m.real(), s.m.imag(), s.w1.real(), s.w1.imag(),
                    s.w2.real(), s.w2.imag(), s.residual, static_cast<double>(s.iterations)});
  write_csv(path, {"E", "eta", "re_m", "im_m", "re_w1", "im_w1", "re_w2", "im_w2", "residual",
                   "iterations"},
            rows);
}

std::string report_to_json(const StatisticsReport& rep) {
  nlohmann::json j;
  j["metadata"] = {{"n", rep.n},
                   {"beta", rep.beta},
                   {"trials", rep.trials},
                   {"seeds", rep.seeds},
                   {"version", version_string}};
  if (rep.gap_ks) j["gaps"] = {{"ks", *rep.gap_ks}, {"count", rep.gap_count}};
  if (!rep.correlation_bins.empty()) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : rep.correlation_bins) bins.push_back({{"center", b.center}, {"value", b.value}});
    j["correlation"] = bins;
  }
  if (!rep.local_law.empty()) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : rep.local_law)
      pts.push_back({{"E", p.e},
                     {"eta", p.eta},
                     {"sup_error", p.sup_error},
                     {"normalized", p.normalized},
                     {"valid", p.valid}});
    j["local_law"] = pts;
  }
  if (rep.rigidity_max) j["rigidity_max"] = *rep.rigidity_max;
  if (rep.gamma_max_bulk) j["gamma_max_bulk"] = *rep.gamma_max_bulk;
  if (rep.min_gap_exponent)
    j["min_gap_exponent"] = {{"slope", rep.min_gap_exponent->slope},
                             {"stderr", rep.min_gap_exponent->stderr_slope},
                             {"points", rep.min_gap_exponent->points}};
  return j.dump(2) + "\n";
}

std::string manifest_json(const std::string& command,
                          const std::map<std::string, std::string>& resolved) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version_string;
  nlohmann::json cfg;
  for (const auto& [k, v] : resolved) cfg[k] = v;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

}  // namespace boxplus
