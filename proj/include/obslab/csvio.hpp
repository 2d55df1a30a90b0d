#pragma once
// Tiny CSV helpers shared by the sweep drivers and the sample-ingestion path.

#include <obslab/errors.hpp>
#include <obslab/scalar.hpp>

#include <fstream>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace obslab {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

// Two-column (parameter, value) sample reader. Blank lines and '#' comments
// are skipped; a non-numeric first row is treated as a header.
inline std::vector<std::pair<Real, Real>> read_samples_csv(std::istream& in) {
  std::vector<std::pair<Real, Real>> out;
  std::string line;
  int lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t, ',');
    if (fields.size() < 2)
      throw InvalidInput("asymptotics_lab",
                         "sample CSV line " + std::to_string(lineno) + " needs two columns");
    try {
      Real p(trim(fields[0]));
      Real v(trim(fields[1]));
      out.emplace_back(std::move(p), std::move(v));
      seen_data = true;
    } catch (const std::exception&) {
      if (!seen_data && out.empty()) continue;  // header row
      throw InvalidInput("asymptotics_lab", "sample CSV line " + std::to_string(lineno) +
                                                " is not numeric: " + t);
    }
  }
  return out;
}

inline std::vector<std::pair<Real, Real>> read_samples_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("asymptotics_lab", "cannot open sample CSV: " + path);
  return read_samples_csv(in);
}

}  // namespace obslab
