#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "helmscat/commands.hpp"
#include "helmscat/config.hpp"
#include "helmscat/io.hpp"
#include "support/random.hpp"

using namespace helmscat;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "helmscat_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<unsigned char> bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("shortest round-trip number text") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    double v;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const double back = parse_double(format_double(v));
    CHECK(std::memcmp(&back, &v, sizeof v) == 0);
  }
  CHECK_THROWS(parse_double(""));
  CHECK_THROWS(parse_double("1.5x"));
  CHECK_THROWS(parse_double(" 2"));
  CHECK(std::isinf(parse_double("inf")));
}

TEST_CASE("field binary layout and round trip") {
  const Grid2D g = Grid2D::centered(5, 0.3);
  const RealField2D real(g, testing_support::random_real(g.count(), 1));
  const fs::path rp = scratch("real.hsf");
  write_field_file(rp, real);
  const auto raw = bytes_of(rp);
  REQUIRE(raw.size() == 4 + 4 + 4 + 1 + 8 * 25);
  CHECK(std::memcmp(raw.data(), "HSF1", 4) == 0);
  CHECK(raw[4] == 5);
  CHECK(raw[5] == 0);
  CHECK(raw[8] == 5);
  CHECK(raw[12] == 0);
  double first;
  std::memcpy(&first, raw.data() + 13, 8);
  CHECK(first == real[0]);

  const RealField2D back = real_field_from(read_field_file(rp), g);
  CHECK(back.data() == real.data());

  const ComplexField2D cf(g, testing_support::random_complex(g.count(), 2));
  const fs::path cp = scratch("complex.hsf");
  write_field_file(cp, cf);
  CHECK(bytes_of(cp).size() == 13 + 16 * 25);
  CHECK(bytes_of(cp)[12] == 1);
  const ComplexField2D cback = complex_field_from(read_field_file(cp), g);
  CHECK(cback.data() == cf.data());

  CHECK_THROWS(real_field_from(read_field_file(cp), g));
  CHECK_THROWS(real_field_from(read_field_file(rp), Grid2D::centered(6, 0.3)));

  auto bad = raw;
  bad[0] = 'X';
  std::ofstream(scratch("bad.hsf"), std::ios::binary)
      .write(reinterpret_cast<const char*>(bad.data()), static_cast<std::streamsize>(bad.size()));
  CHECK_THROWS(read_field_file(scratch("bad.hsf")));
  std::ofstream(scratch("short.hsf"), std::ios::binary)
      .write(reinterpret_cast<const char*>(raw.data()), 40);
  CHECK_THROWS(read_field_file(scratch("short.hsf")));
  CHECK_THROWS(read_field_file(scratch("missing.hsf")));
}

TEST_CASE("measurement CSV round trip") {
  const auto geo = AcquisitionGeometry::circular(3, 0.2, 10, 20.0, {0.0, 0.0}, 4);
  MeasurementSet data;
  for (std::size_t q = 0; q < 3; ++q) data.views.push_back(testing_support::random_complex(4, q));
  const fs::path p = scratch("m.csv");
  write_measurements_csv(p, data, geo);
  std::ifstream in(p);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "view,sensor,re,im");
  CHECK(first.rfind("0," + std::to_string(geo.active[0][0]) + ",", 0) == 0);
  const MeasurementSet back = read_measurements_csv(p, geo);
  for (std::size_t q = 0; q < 3; ++q) CHECK(back.views[q] == data.views[q]);

  const auto other = AcquisitionGeometry::circular(3, 0.2, 10, 20.0, {0.0, 0.0}, 3);
  CHECK_THROWS(read_measurements_csv(p, other));
  const auto fewer = AcquisitionGeometry::circular(2, 0.2, 10, 20.0, {0.0, 0.0}, 4);
  CHECK_THROWS(read_measurements_csv(p, fewer));
}

TEST_CASE("report, history and bench tables") {
  SolveReport r;
  r.iterations = 7;
  r.converged = true;
  r.status = SolveStatus::converged;
  r.rhs_norm = 2.0;
  r.residual_history = {2.0, 1e-6};
  r.work_units = 35.0;
  write_reports_csv(scratch("r.csv"), {r}, {0.0});
  auto t = read_csv(scratch("r.csv"));
  CHECK(t.header == std::vector<std::string>{"view", "status", "converged", "iterations",
                                             "relative_residual", "work_units", "seconds"});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0] == std::vector<std::string>{"0", "converged", "true", "7", "5e-07", "35", "0"});

  std::vector<HistoryEntry> h(2);
  h[0] = {1, 3.5, std::nullopt, 10.0, 0.0};
  h[1] = {2, 2.25, 19.5, 20.0, 0.0};
  write_history_csv(scratch("h.csv"), h);
  t = read_csv(scratch("h.csv"));
  CHECK(t.header ==
        std::vector<std::string>{"iteration", "objective", "snr", "work_units", "seconds"});
  CHECK(t.rows[0] == std::vector<std::string>{"1", "3.5", "", "10", "0"});
  CHECK(t.rows[1] == std::vector<std::string>{"2", "2.25", "19.5", "20", "0"});

  write_bench_csv(scratch("b.csv"), {{2.0, 1.25, "MGH", 9, 0.0, 0.003}});
  t = read_csv(scratch("b.csv"));
  CHECK(t.header == std::vector<std::string>{"contrast", "radius", "model", "iterations",
                                             "wall_seconds", "relative_error_vs_analytic"});
  CHECK(t.rows[0] == std::vector<std::string>{"2", "1.25", "MGH", "9", "0", "0.003"});
}

TEST_CASE("config parsing") {
  const auto cfg = RunConfig::parse(
      "# comment\n"
      "grid_points = 33   # trailing\n"
      "\n"
      "domain_size=8\n"
      "wavelength = 3\n"
      "bench_contrasts = 1, 2,3\n"
      "bench_models = mgh\n"
      "record_timing = true\n");
  CHECK(cfg.integer("grid_points") == 33);
  CHECK(cfg.number("domain_size") == 8.0);
  CHECK(cfg.numbers_or("bench_contrasts", {}) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(cfg.words_or("bench_models", {}) == std::vector<std::string>{"mgh"});
  CHECK(cfg.flag_or("record_timing", false));
  CHECK(cfg.number_or("eta_b", 1.0) == 1.0);
  CHECK_THROWS_AS(cfg.number("mesh_size"), ConfigError);

  CHECK_THROWS_AS(RunConfig::parse("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("wavelength = 3\nwavelength = 4\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("wavelength 3\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("wavelength =\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("grid_points = 3.5\n").integer("grid_points"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("wavelength = ten\n").number("wavelength"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("record_timing = yes\n").flag_or("record_timing", false),
                  ConfigError);
}

TEST_CASE("scene from config") {
  auto cfg = RunConfig::parse(
      "grid_points = 65\nmesh_size = 0.25\nwavelength = 10\nabl_points = 8\n"
      "abl_beta = 0.15\nviews = 4\nsensors = 20\nsensor_radius = 30\nactive_sensors = 10\n"
      "solver_tolerance = 1e-8\nmg_cycle = W\n");
  const auto sc = scene_from_config(cfg);
  CHECK(sc.roi.size() == 65);
  CHECK(sc.roi.h() == 0.25);
  CHECK(sc.roi.origin_x() == -8.0);
  CHECK(sc.abl_points == 8);
  CHECK(sc.beta == 0.15);
  CHECK(sc.mg.cycle_type == 2);
  CHECK(sc.krylov.tolerance == 1e-8);
  CHECK(sc.geometry.view_count() == 4);
  CHECK(sc.geometry.active[0].size() == 10);

  cfg = RunConfig::parse("grid_points = 64\ndomain_size = 9\nwavelength = 3\n");
  const auto sd = scene_from_config(cfg);
  CHECK(sd.roi.side_length() == doctest::Approx(9.0));
  CHECK(sd.abl_points == 4);

  CHECK_THROWS_AS(scene_from_config(RunConfig::parse("grid_points = 64\nwavelength = 3\n")),
                  ConfigError);
  CHECK_THROWS_AS(scene_from_config(RunConfig::parse(
                      "grid_points = 64\ndomain_size = 9\nmesh_size = 0.1\nwavelength = 3\n")),
                  ConfigError);
  CHECK_THROWS_AS(scene_from_config(RunConfig::parse("grid_points = 64\ndomain_size = 9\n")),
                  ConfigError);
  CHECK_THROWS_AS(scene_from_config(RunConfig::parse(
                      "grid_points = 64\ndomain_size = 9\nwavelength = -3\n")),
                  ConfigError);
}

TEST_CASE("objects and reconstruction settings from config") {
  auto cfg = RunConfig::parse(
      "grid_points = 33\ndomain_size = 8\nwavelength = 4\nobject = disk\n"
      "disk_radius = 2\ndisk_eta = 1.5\ndisk_center_x = 1\n");
  const auto sc = scene_from_config(cfg);
  const auto f = object_potential(cfg, sc);
  const double inside = sc.k0() * sc.k0() * (1.5 * 1.5 - 1.0);
  CHECK(f(16 + 4, 16) == doctest::Approx(inside));
  CHECK(f(16 - 4, 16) == 0.0);

  const auto eta = phantom_eta(sc.roi, 1.0, 0.4);
  double lo = 10.0, hi = 0.0;
  for (double v : eta.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo == 1.0);
  CHECK(hi == doctest::Approx(1.4));
  CHECK(eta(16, 16) == doctest::Approx(1.2));
  CHECK(eta(0, 0) == 1.0);

  auto none = RunConfig::parse("grid_points = 9\ndomain_size = 8\nwavelength = 4\nobject = none\n");
  const auto zero = object_potential(none, scene_from_config(none));
  for (double v : zero.data()) CHECK(v == 0.0);
  auto wrong = RunConfig::parse("grid_points = 9\ndomain_size = 8\nwavelength = 4\nobject = cube\n");
  CHECK_THROWS_AS(object_potential(wrong, scene_from_config(wrong)), ConfigError);

  const auto rc = reconstruction_from(RunConfig::parse(
      "gamma = auto\ntau = 0.01\niterations = 12\nsubset_size = 3\nseed = 99\n"));
  CHECK(rc.auto_gamma);
  CHECK(rc.tau == 0.01);
  CHECK(rc.iterations == 12);
  CHECK(rc.subset_size == 3);
  CHECK(rc.seed == 99);
  const auto fixed = reconstruction_from(RunConfig::parse("gamma = 0.5\n"));
  CHECK(!fixed.auto_gamma);
  CHECK(fixed.gamma == 0.5);
  CHECK(fixed.tau == 4.5e-3);
  CHECK(fixed.iterations == 250);
  CHECK(fixed.subset_size == 6);
  CHECK(fixed.prox_iterations == 50);
}
