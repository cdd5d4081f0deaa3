#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "geoml/io.hpp"
#include "geoml/random.hpp"

namespace {

using geoml::Matrix;
namespace io = geoml::io;
namespace mk = geoml::markov;

Matrix parse(const std::string& text) {
  std::istringstream in(text);
  return io::parse_matrix(in);
}

TEST(ParseMatrix, HeadersCommentsAndSigns) {
  EXPECT_EQ(parse("dim=2\n1,2\n2,5\n"), (Matrix{{1, 2}, {2, 5}}));
  EXPECT_EQ(parse("# note\nrows=1,cols=3\n\n+1, -2.5 ,3e-1\n"), (Matrix{{1, -2.5, 0.3}}));
  EXPECT_EQ(parse("4\n"), (Matrix{{4}}));
}

TEST(ParseMatrix, RejectsMalformed) {
  EXPECT_THROW(parse(""), geoml::ValidationError);
  EXPECT_THROW(parse("1,2\n3\n"), geoml::ValidationError);
  EXPECT_THROW(parse("1,x\n"), geoml::ValidationError);
  EXPECT_THROW(parse("1,\n"), geoml::ValidationError);
  EXPECT_THROW(parse("dim=3\n1,2\n3,4\n"), geoml::ValidationError);
  EXPECT_THROW(parse("size=2\n1,2\n3,4\n"), geoml::ValidationError);
  EXPECT_THROW(parse("nan\n"), geoml::ValidationError);
}

TEST(WriteMatrix, RoundTripsBitExactly) {
  geoml::Rng rng(111);
  for (int i = 0; i < 20; ++i) {
    const Matrix m = rng.normal_matrix(rng.integer(1, 5), rng.integer(1, 5)) * std::exp(rng.uniform(-30, 30));
    std::ostringstream out;
    io::write_header(out, {{"note", "x"}});
    io::write_matrix(out, m);
    EXPECT_EQ(parse(out.str()), m);
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(std::numeric_limits<double>::denorm_min()), "5e-324");
}

TEST(RunHeader, CarriesGeneratorAndSeed) {
  std::ostringstream out;
  io::write_run_header(out, "spd geodesic", 42);
  EXPECT_EQ(out.str(), "# command: spd geodesic\n# rng: mt19937_64/v1\n# seed: 42\n");
}

TEST(Labelled, RoundTripKernel) {
  const mk::FiniteSpace x({"a", "b"});
  const mk::FiniteSpace y({"u", "v", "w"});
  const mk::MarkovKernel k(x, y, Matrix{{0.2, 0.3, 0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  std::ostringstream out;
  io::write_labelled(out, io::to_table(k));
  std::istringstream in(out.str());
  const auto t = io::parse_labelled(in);
  EXPECT_EQ(t.row_labels, x.labels());
  EXPECT_EQ(t.col_labels, y.labels());
  EXPECT_EQ(t.values, k.rows());
}

TEST(Labelled, Measure) {
  const mk::ProbVector mu(mk::FiniteSpace({"p", "q"}), geoml::Vector{{0.25, 0.75}});
  std::ostringstream out;
  io::write_labelled(out, io::to_table(mu));
  EXPECT_EQ(out.str(), ",p,q\n,0.25,0.75\n");
}

TEST(Labelled, RejectsMalformed) {
  const auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return io::parse_labelled(in);
  };
  EXPECT_THROW(bad("a,b\nx,1,2\n"), geoml::ValidationError);
  EXPECT_THROW(bad(",a,b\n"), geoml::ValidationError);
  EXPECT_THROW(bad(",a,b\nx,1\n"), geoml::ValidationError);
  EXPECT_THROW(io::read_kernel("/nonexistent/k.csv"), geoml::ValidationError);
}

}  // namespace
