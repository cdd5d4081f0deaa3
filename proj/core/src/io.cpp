#include "geoml/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "geoml/random.hpp"

namespace geoml::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw ValidationError(where + ": not a number: '" + s + "'");
  }
  return v;
}

long parse_count(const std::string& s, const std::string& where) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v <= 0) {
    throw ValidationError(where + ": bad size '" + s + "'");
  }
  return v;
}

// Non-comment, non-blank lines with their 1-based line numbers.
std::vector<std::pair<int, std::string>> content_lines(std::istream& in) {
  std::vector<std::pair<int, std::string>> out;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(no, t);
  }
  return out;
}

std::ifstream open(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open '" + path + "'");
  return f;
}

}  // namespace

Matrix parse_matrix(std::istream& in, const std::string& source) {
  auto lines = content_lines(in);
  long want_rows = -1;
  long want_cols = -1;
  std::size_t first = 0;
  if (!lines.empty() && lines[0].second.find('=') != std::string::npos) {
    const std::string where = source + ":" + std::to_string(lines[0].first);
    for (const auto& kv : split(lines[0].second)) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError(where + ": malformed header");
      const std::string key = trim(kv.substr(0, eq));
      const std::string val = trim(kv.substr(eq + 1));
      if (key == "dim") {
        want_rows = want_cols = parse_count(val, where);
      } else if (key == "rows") {
        want_rows = parse_count(val, where);
      } else if (key == "cols") {
        want_cols = parse_count(val, where);
      } else {
        throw ValidationError(where + ": unknown header key '" + key + "'");
      }
    }
    first = 1;
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::string where = source + ":" + std::to_string(lines[i].first);
    std::vector<double> r;
    for (const auto& cell : split(lines[i].second)) r.push_back(parse_double(cell, where));
    if (!rows.empty() && r.size() != rows.front().size()) throw ValidationError(where + ": ragged row");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ValidationError(source + ": no matrix data");
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(rows.front().size());
  if ((want_rows > 0 && want_rows != nr) || (want_cols > 0 && want_cols != nc)) {
    throw ValidationError(source + ": header size does not match data");
  }
  Matrix m(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index j = 0; j < nc; ++j) m(i, j) = rows[i][j];
  if (!m.allFinite()) throw ValidationError(source + ": non-finite entry");
  return m;
}

Matrix read_matrix(const std::string& path) {
  auto f = open(path);
  return parse_matrix(f, path);
}

SpdMatrix read_spd(const std::string& path) {
  const Matrix m = read_matrix(path);
  if (m.rows() != m.cols()) throw ValidationError(path + ": matrix is not square");
  return SpdMatrix(SymMatrix(m));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_matrix(std::ostream& out, const Matrix& m, bool square_header) {
  if (square_header && m.rows() == m.cols()) {
    out << "dim=" << m.rows() << '\n';
  } else {
    out << "rows=" << m.rows() << ",cols=" << m.cols() << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

void write_header(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& fields) {
  for (const auto& [k, v] : fields) out << "# " << k << ": " << v << '\n';
}

void write_run_header(std::ostream& out, const std::string& command, std::uint64_t seed) {
  write_header(out, {{"command", command}, {"rng", std::string(Rng::kAlgorithm)}, {"seed", std::to_string(seed)}});
}

LabelledTable parse_labelled(std::istream& in, const std::string& source) {
  auto lines = content_lines(in);
  if (lines.size() < 2) throw ValidationError(source + ": need a header row and at least one data row");
  auto header = split(lines[0].second);
  if (header.size() < 2 || !header[0].empty()) {
    throw ValidationError(source + ": header must be ',label1,label2,...'");
  }
  LabelledTable t;
  t.col_labels.assign(header.begin() + 1, header.end());
  const auto nc = static_cast<Eigen::Index>(t.col_labels.size());
  t.values.resize(static_cast<Eigen::Index>(lines.size() - 1), nc);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = source + ":" + std::to_string(lines[i].first);
    auto cells = split(lines[i].second);
    if (static_cast<Eigen::Index>(cells.size()) != nc + 1) throw ValidationError(where + ": wrong number of cells");
    t.row_labels.push_back(cells[0]);
    for (Eigen::Index j = 0; j < nc; ++j) {
      t.values(static_cast<Eigen::Index>(i - 1), j) = parse_double(cells[static_cast<std::size_t>(j) + 1], where);
    }
  }
  return t;
}

LabelledTable read_labelled(const std::string& path) {
  auto f = open(path);
  return parse_labelled(f, path);
}

void write_labelled(std::ostream& out, const LabelledTable& t) {
  for (const auto& c : t.col_labels) out << ',' << c;
  out << '\n';
  for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
    out << t.row_labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < t.values.cols(); ++j) out << ',' << format_double(t.values(i, j));
    out << '\n';
  }
}

markov::MarkovKernel read_kernel(const std::string& path) {
  auto t = read_labelled(path);
  return markov::MarkovKernel(markov::FiniteSpace(t.row_labels), markov::FiniteSpace(t.col_labels), t.values);
}

markov::JointMeasure read_joint(const std::string& path) {
  auto t = read_labelled(path);
  return markov::JointMeasure(markov::FiniteSpace(t.row_labels), markov::FiniteSpace(t.col_labels), t.values);
}

markov::ProbVector read_measure(const std::string& path) {
  auto t = read_labelled(path);
  if (t.values.rows() != 1) throw ValidationError(path + ": a measure has exactly one data row");
  return markov::ProbVector(markov::FiniteSpace(t.col_labels), t.values.row(0).transpose());
}

LabelledTable to_table(const markov::MarkovKernel& k) {
  return {k.source().labels(), k.target().labels(), k.rows()};
}

LabelledTable to_table(const markov::JointMeasure& mu) {
  return {mu.xspace().labels(), mu.yspace().labels(), mu.table()};
}

LabelledTable to_table(const markov::ProbVector& mu) {
  return {{""}, mu.space().labels(), mu.weights().transpose()};
}

}  // namespace geoml::io
