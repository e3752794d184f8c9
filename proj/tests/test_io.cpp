#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include <ohara/io.hpp>
#include <ohara/synthetic.hpp>

using namespace ohara;
namespace fs = std::filesystem;

namespace {
std::string temp_file(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / ("ohara_io_" + name);
  std::ofstream(p) << text;
  return p.string();
}
}  // namespace

TEST(Io, JsonCurveRoundTrip) {
  const auto c = ClosedCurve::from_samples(synthetic::random_curve(1, 128), true, 128);
  const auto path = temp_file("rt.json", io::curve_json(c).dump());
  const auto f = io::read_curve(path);
  EXPECT_TRUE(f.closed);
  ASSERT_EQ(f.points.rows(), 128);
  EXPECT_EQ((f.points - c.positions().samples()).norm(), 0.0);
  const auto d = ClosedCurve::from_samples(f.points, f.closed);
  EXPECT_NEAR(d.length(), c.length(), 1e-12 * c.length());
}

TEST(Io, CsvWithHeaderAndComments) {
  const auto path = temp_file("c.csv", "# unit square-ish\nx,y\n1,0\n0,1\n-1,0\n0,-1\n0.7,0.7\n-0.7,0.7\n-0.7,-0.7\n0.7,-0.7\n");
  const auto f = io::read_curve(path);
  EXPECT_EQ(f.points.rows(), 8);
  EXPECT_EQ(f.points.cols(), 2);
  EXPECT_EQ(f.points(4, 1), 0.7);
}

TEST(Io, MalformedFilesAreValidationErrors) {
  EXPECT_THROW(io::read_curve(temp_file("bad1.json", "{\"points\": [[1,2],[3]]}")), ValidationError);
  EXPECT_THROW(io::read_curve(temp_file("bad2.json", "{\"points\": [[1,2],[3,4]], \"dimension\": 3}")),
               ValidationError);
  EXPECT_THROW(io::read_curve(temp_file("bad3.json", "{not json")), ValidationError);
  EXPECT_THROW(io::read_curve(temp_file("bad4.json", "{\"dimension\": 2}")), ValidationError);
  EXPECT_THROW(io::read_curve(temp_file("bad5.csv", "1,2\n3,x\n")), ValidationError);
  EXPECT_THROW(io::read_curve(temp_file("bad6.csv", "1,2\n3,4,5\n")), ValidationError);
  EXPECT_THROW(io::read_curve("/nonexistent/curve.json"), ValidationError);
}

TEST(Io, FieldFileResampledToCurve) {
  const auto c = ClosedCurve::from_samples(synthetic::circle(64), true);
  const Field u = synthetic::random_field(3, 32, c.length(), 2, 3);
  nlohmann::json j = {{"dimension", 2}, {"values", io::samples_to_json(u.samples())}};
  const Field v = io::read_field(temp_file("f.json", j.dump()), c);
  ASSERT_EQ(v.size(), 64u);
  const Field w = synthetic::random_field(3, 64, c.length(), 2, 3);
  EXPECT_LE((v.samples() - w.samples()).cwiseAbs().maxCoeff(), 1e-13);
  nlohmann::json bad = {{"values", {{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}}}};
  EXPECT_THROW(io::read_field(temp_file("fbad.json", bad.dump()), c), ValidationError);
}

TEST(Io, GridCsvShape) {
  const auto c = ClosedCurve::from_samples(synthetic::circle(16), true);
  const auto g = density_grid(c, EnergyParams::make(2.0, 1.0), GridKind::density);
  const std::string csv = io::grid_csv(g);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# grid=M M=16", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 15);
  }
  EXPECT_EQ(rows, 16);
  const auto s = io::grid_summary(g);
  EXPECT_EQ(s["M"], 16);
  EXPECT_TRUE(s["flagged_pairs"].empty());
}

TEST(Io, FlowTraceCsv) {
  FlowState s{ClosedCurve::from_samples(synthetic::circle(16), true)};
  s.energy = {4.0, 3.5};
  s.grad_norm = {0.1};
  s.dts = {0.01};
  s.step = 1;
  EXPECT_EQ(io::flow_trace_csv(s), "step,energy,grad_norm,dt\n0,4,,\n1,3.5,0.10000000000000001,0.01\n");
}

TEST(Io, NumberFormatting) {
  EXPECT_EQ(io::number(0.5), "0.5");
  EXPECT_EQ(io::number(std::nan("")), "nan");
}
