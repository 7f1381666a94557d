#include "config.hpp"

#include <fstream>
#include <sstream>

#include "boxplus/io.hpp"

namespace boxplus::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  Config cfg;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.count(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key " + key);
    cfg.values_[key] = value;
    cfg.lines_[key] = line_no;
  }
  return cfg;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  consumed_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) {
  consumed_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config key " + key + " (line " + std::to_string(lines_.at(key)) +
                      "): not a number: " + it->second);
  }
}

int Config::get_int(const std::string& key, int fallback) {
  const double v = get_double(key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config key " + key + ": expected an integer");
  return i;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
  consumed_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config key " + key + ": not an unsigned integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) {
  consumed_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key " + key + ": expected true/false");
}

void Config::assert_fully_consumed() const {
  for (const auto& [key, value] : values_) {
    if (!consumed_.count(key))
      throw ConfigError("config key " + key + " (line " + std::to_string(lines_.at(key)) +
                        "): unknown key");
  }
}

Measure parse_measure(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty measure spec");
  const std::string& kind = parts[0];
  auto arg = [&](std::size_t i, double fallback) {
    return parts.size() > i ? std::stod(parts[i]) : fallback;
  };
  if (kind == "semicircle") return Measure::semicircle(arg(1, 1.0));
  if (kind == "uniform") return Measure::uniform(arg(1, -1.0), arg(2, 1.0));
  if (kind == "dirac") return Measure::dirac(arg(1, 0.0));
  if (kind == "two_point" || kind == "bernoulli") return Measure::two_point(arg(1, 1.0));
  if (kind == "arcsine") return Measure::arcsine(arg(1, 2.0));
  if (kind == "file") {
    if (parts.size() < 2) throw ConfigError("measure spec file: needs a path");
    return load_measure(parts[1]);
  }
  throw ConfigError("unknown measure spec: " + spec);
}

}  // namespace boxplus::cli
