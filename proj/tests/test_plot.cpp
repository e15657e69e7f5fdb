#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "linf/errors.hpp"
#include "linf/svg_plot.hpp"

using namespace linf;

namespace {

std::filesystem::path plot_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "linf_tests" / "plots";
  std::filesystem::create_directories(dir);
  return dir;
}

TrialRecord make_record(Eigen::Index n, int trial, const std::string& estimator,
                        std::optional<double> p, double linf) {
  TrialRecord rec;
  rec.experiment = "scalar-sparse";
  rec.n = n;
  rec.m = n;
  rec.trial = trial;
  rec.seed = 1;
  rec.estimator = estimator;
  rec.p = p;
  rec.linf = linf;
  rec.l2 = linf * 2.0;
  rec.seconds = 0.001;
  return rec;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("empty record sets are rejected and no file appears") {
  const auto path = plot_dir() / "empty.svg";
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_linf_plot({}, PlotSpec{}, path), ParseError);
  CHECK(!std::filesystem::exists(path));
}

TEST_CASE("single-point series draw markers but no polyline") {
  const auto path = plot_dir() / "single.svg";
  std::vector<TrialRecord> records;
  records.push_back(make_record(100, 0, "pm", std::nullopt, 0.5));
  records.push_back(make_record(100, 1, "pm", std::nullopt, 0.6));
  write_linf_plot(records, PlotSpec{}, path);
  const std::string svg = slurp(path);
  CHECK(svg.find("<polyline") == std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(svg.find("posterior mean") != std::string::npos);
}

TEST_CASE("four-estimator sweep renders one labeled series each") {
  const auto path = plot_dir() / "sweep.svg";
  std::vector<TrialRecord> records;
  for (Eigen::Index n : {100, 1000, 10000}) {
    for (int trial = 0; trial < 3; ++trial) {
      const double base = 0.1 / std::sqrt(double(trial + 1));
      records.push_back(make_record(n, trial, "wiener", std::nullopt, base * 1.4));
      records.push_back(make_record(n, trial, "lp", 5.0, base * 1.1));
      records.push_back(make_record(n, trial, "lp", 10.0, base * 1.05));
      records.push_back(make_record(n, trial, "lp", 15.0, base));
    }
  }
  write_linf_plot(records, PlotSpec{}, path);
  const std::string svg = slurp(path);
  CHECK(svg.find(">Wiener<") != std::string::npos);
  CHECK(svg.find(">p=5<") != std::string::npos);
  CHECK(svg.find(">p=10<") != std::string::npos);
  CHECK(svg.find(">p=15<") != std::string::npos);
  // 4 series x 3 points each: connected polylines present
  int polylines = 0;
  for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
       pos = svg.find("<polyline", pos + 1))
    ++polylines;
  CHECK(polylines == 4);
}
