#ifndef MLZSR_SCOREDUMP_HPP_
#define MLZSR_SCOREDUMP_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "mlzsr/matrix.hpp"

namespace mlzsr {

// Textual matrix of normalized relatedness scores with an instance-id header
// column; the interchange format for cross-run fusion.
struct ScoreDump {
  std::string scenario;
  std::size_t k = 5;
  std::vector<int> label_ids;
  std::vector<int> instance_ids;
  Matrix scores;
};

void write_score_dump(std::ostream& os, const ScoreDump& dump);
ScoreDump read_score_dump(std::istream& is, const std::string& context);

void save_score_dump(const ScoreDump& dump, const std::string& path);
ScoreDump load_score_dump(const std::string& path);

}  // namespace mlzsr

#endif  // MLZSR_SCOREDUMP_HPP_
