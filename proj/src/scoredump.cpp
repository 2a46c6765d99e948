#include "mlzsr/scoredump.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mlzsr/errors.hpp"

namespace mlzsr {

void write_score_dump(std::ostream& os, const ScoreDump& dump) {
  os << "MLZSR-SCORES v1\n";
  os << "scenario " << dump.scenario << " k " << dump.k << '\n';
  os << "labels";
  for (int c : dump.label_ids) os << ' ' << c;
  os << '\n';
  char buf[40];
  for (std::size_t i = 0; i < dump.scores.rows; ++i) {
    os << dump.instance_ids[i];
    for (std::size_t j = 0; j < dump.scores.cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", dump.scores(i, j));
      os << ' ' << buf;
    }
    os << '\n';
  }
}

ScoreDump read_score_dump(std::istream& is, const std::string& context) {
  std::string line;
  if (!std::getline(is, line) || line != "MLZSR-SCORES v1") {
    throw ParseError(context + ": bad score dump magic");
  }
  ScoreDump dump;
  if (!std::getline(is, line)) throw ParseError(context + ": missing scenario line");
  {
    std::istringstream ss(line);
    std::string key1, key2;
    if (!(ss >> key1 >> dump.scenario >> key2 >> dump.k) || key1 != "scenario" || key2 != "k") {
      throw ParseError(context + ": bad scenario line '" + line + "'");
    }
  }
  if (!std::getline(is, line)) throw ParseError(context + ": missing labels line");
  {
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word != "labels") throw ParseError(context + ": bad labels line");
    int c;
    while (ss >> c) dump.label_ids.push_back(c);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int id;
    if (!(ss >> id)) throw ParseError(context + ": bad instance row '" + line + "'");
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (row.size() != dump.label_ids.size()) {
      throw ParseError(context + ": row width mismatch for instance " + std::to_string(id));
    }
    dump.instance_ids.push_back(id);
    rows.push_back(std::move(row));
  }
  dump.scores = Matrix(rows.size(), dump.label_ids.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(),
              dump.scores.data.begin() + static_cast<std::ptrdiff_t>(i * dump.scores.cols));
  }
  return dump;
}

void save_score_dump(const ScoreDump& dump, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  write_score_dump(os, dump);
  os.flush();
  if (!os) throw DataError("write to '" + path + "' failed");
}

ScoreDump load_score_dump(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open score dump '" + path + "'");
  return read_score_dump(is, path);
}

}  // namespace mlzsr
