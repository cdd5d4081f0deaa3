#pragma once

// Flat-file formats. Matrices are CSV with an optional "dim=n" or
// "rows=r,cols=c" header line; lines starting with '#' are comments. Labelled
// tables (Markov kernels, joint measures) have a header row ",y1,y2,..." and
// each data row starts with its x label.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geoml/markov.hpp"
#include "geoml/matfun.hpp"

namespace geoml::io {

Matrix parse_matrix(std::istream& in, const std::string& source = "<stream>");
Matrix read_matrix(const std::string& path);
SpdMatrix read_spd(const std::string& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Header comments, then "rows=r,cols=c" (or "dim=n" when square and `square_header`).
void write_matrix(std::ostream& out, const Matrix& m, bool square_header = true);

/// "# key: value" lines; every output carries the generator name and seed.
void write_header(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& fields);
void write_run_header(std::ostream& out, const std::string& command, std::uint64_t seed);

struct LabelledTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Matrix values;
};

LabelledTable parse_labelled(std::istream& in, const std::string& source = "<stream>");
LabelledTable read_labelled(const std::string& path);
void write_labelled(std::ostream& out, const LabelledTable& t);

markov::MarkovKernel read_kernel(const std::string& path);
markov::JointMeasure read_joint(const std::string& path);
/// One-row table with an empty row label.
markov::ProbVector read_measure(const std::string& path);

LabelledTable to_table(const markov::MarkovKernel& k);
LabelledTable to_table(const markov::JointMeasure& mu);
LabelledTable to_table(const markov::ProbVector& mu);

}  // namespace geoml::io
