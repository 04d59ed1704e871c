#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "emob/lp.hpp"
#include "emob/milp.hpp"

namespace emob {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failures carry "<source>:<line>: <reason>".
class LpParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One name per model column: rides x_<from>_<to>_<mode>, switches
// y_<node>_<from mode>_<to mode>, charges e_<node>_<mode>. Distinct keys give
// distinct names by construction.
std::vector<std::string> variable_names(const MilpModel& mm);

// LP-format text with Minimize / Subject To / Bounds / Binaries / End
// sections. Coefficients print with enough digits to round-trip exactly;
// empty Bounds and Binaries sections are omitted.
std::string lp_to_string(const MilpModel& mm);
void export_lp(const MilpModel& mm, const std::string& path);

struct LpFile {
  lp::LinearModel model;
  std::vector<std::string> names;      // column order = first appearance
  std::map<std::string, int> columns;  // inverse of names
};

// Strict reader for the writer's dialect: named rows, explicit senses,
// two-sided bounds lines, one binary name per line. Unknown names appearing
// in any section create columns with defaults (cost 0, range [0, +inf),
// continuous); Binaries entries become integer with range [0, 1].
LpFile lp_from_string(const std::string& text, const std::string& source);
LpFile read_lp(const std::string& path);

}  // namespace emob
