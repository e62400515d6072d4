#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "helmscat/io.hpp"

using namespace helmscat;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "helmscat_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(HELMSCAT_CLI_PATH) + " " + args + " > " +
                          (kRoot / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& body) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = kRoot / name;
  fs::remove_all(d);
  return d;
}

const char* kFig4 =
    "grid_points = 256\nmesh_size = 0.125\nwavelength = 10\nabl_points = 32\nabl_beta = 0.15\n"
    "views = 1\nsensors = 16\nsensor_radius = 30\nobject = disk\ndisk_radius = 12.5\n"
    "disk_eta = 2.2\n";

const char* kSmallScene =
    "domain_size = 8\nwavelength = 4\nviews = 8\nsensors = 32\nsensor_radius = 15\n"
    "active_sensors = 16\nobject = disk\ndisk_radius = 2\ndisk_eta = 1.15\n"
    "disk_center_x = 0.5\n";

}  // namespace

TEST_CASE("simulate the Fig. 4 disk") {
  const auto cfg = write_config("fig4.cfg", kFig4);
  const auto out = fresh_dir("fig4");
  REQUIRE(run("simulate --config " + cfg.string() + " --out-dir " + out.string()) == 0);
  const auto reports = read_csv(out / "reports.csv");
  REQUIRE(reports.rows.size() == 1);
  CHECK(reports.rows[0][1] == "converged");
  CHECK(reports.rows[0][2] == "true");
  CHECK(parse_double(reports.rows[0][4]) <= 1e-6);
  const auto meas = read_csv(out / "measurements.csv");
  CHECK(meas.header == std::vector<std::string>{"view", "sensor", "re", "im"});
  CHECK(meas.rows.size() == 16);
  for (const auto& row : meas.rows) CHECK(row[0] == "0");
}

TEST_CASE("an empty scene gives zero measurements") {
  const auto cfg = write_config(
      "empty.cfg", "grid_points = 33\n" + std::string(kSmallScene) + "");
  // replace the disk with nothing
  std::string body = slurp(cfg);
  body.replace(body.find("object = disk"), 13, "object = none");
  std::ofstream(cfg) << body;
  const auto out = fresh_dir("empty");
  REQUIRE(run("simulate --config " + cfg.string() + " --out-dir " + out.string()) == 0);
  const auto meas = read_csv(out / "measurements.csv");
  CHECK(meas.rows.size() == 8 * 16);
  for (const auto& row : meas.rows) {
    CHECK(parse_double(row[2]) == 0.0);
    CHECK(parse_double(row[3]) == 0.0);
  }
}

TEST_CASE("configuration errors exit with 2 and write nothing") {
  const auto out = fresh_dir("bad");
  auto cfg = write_config("no_wavelength.cfg",
                          "grid_points = 33\ndomain_size = 8\nsensor_radius = 15\nobject = none\n");
  CHECK(run("simulate --config " + cfg.string() + " --out-dir " + out.string()) == 2);
  CHECK(!fs::exists(out / "measurements.csv"));
  CHECK(!fs::exists(out / "reports.csv"));

  cfg = write_config("unknown.cfg", "grid_points = 33\ncolour = red\n");
  CHECK(run("simulate --config " + cfg.string() + " --out-dir " + out.string()) == 2);
  CHECK(run("reconstruct --config " + cfg.string() + " --out-dir " + out.string()) == 2);
  CHECK(run("bench --config " + cfg.string() + " --out-dir " + out.string()) == 2);
  CHECK(run("simulate --config " + (kRoot / "absent.cfg").string()) == 2);
  CHECK(run("simulate") == 2);
  CHECK(run("transmogrify --config x") == 2);
  CHECK(!fs::exists(out));
}

TEST_CASE("solver failure exits with 3 and writes nothing") {
  const auto cfg = write_config(
      "stall.cfg", "grid_points = 33\nsolver_max_iterations = 1\n" + std::string(kSmallScene));
  const auto out = fresh_dir("stall");
  CHECK(run("simulate --config " + cfg.string() + " --out-dir " + out.string()) == 3);
  CHECK(!fs::exists(out / "measurements.csv"));
  CHECK(!fs::exists(out / "reports.csv"));
}

TEST_CASE("reconstruct from simulated data") {
  const auto sim_cfg = write_config("data.cfg", "grid_points = 65\n" + std::string(kSmallScene));
  const auto data_dir = fresh_dir("data");
  REQUIRE(run("simulate --config " + sim_cfg.string() + " --out-dir " + data_dir.string()) == 0);

  const std::string recon = "grid_points = 33\n" + std::string(kSmallScene) +
                            "measurements = data/measurements.csv\ntruth = object\n"
                            "gamma = auto\ntau = 1e-3\nsubset_size = 4\n";
  SUBCASE("zero iterations returns the initial guess") {
    const auto cfg = write_config("zero.cfg", recon + "iterations = 0\n");
    const auto out = fresh_dir("zero");
    REQUIRE(run("reconstruct --config " + cfg.string() + " --out-dir " + out.string()) == 0);
    const Grid2D g = Grid2D::from_side_length(33, 8.0);
    const auto eta = real_field_from(read_field_file(out / "eta.hsf"), g);
    const auto f = real_field_from(read_field_file(out / "potential.hsf"), g);
    for (double v : eta.data()) CHECK(v == 1.0);
    for (double v : f.data()) CHECK(v == 0.0);
    const auto h = read_csv(out / "history.csv");
    CHECK(h.rows.empty());
  }
  SUBCASE("fixed seed runs are byte-identical and improve") {
    const auto cfg = write_config("recon.cfg", recon + "iterations = 25\nseed = 5\n");
    const auto a = fresh_dir("recon_a"), b = fresh_dir("recon_b");
    REQUIRE(run("reconstruct --config " + cfg.string() + " --out-dir " + a.string()) == 0);
    REQUIRE(run("reconstruct --config " + cfg.string() + " --out-dir " + b.string() +
                " --threads 2") == 0);
    for (const char* name : {"history.csv", "eta.hsf", "potential.hsf"})
      CHECK(slurp(a / name) == slurp(b / name));
    const auto h = read_csv(a / "history.csv");
    REQUIRE(h.rows.size() == 25);
    const double first = parse_double(h.rows.front()[2]);
    const double last = parse_double(h.rows.back()[2]);
    MESSAGE("SNR " << first << " -> " << last);
    CHECK(last > first);

    const auto c = fresh_dir("recon_c");
    REQUIRE(run("reconstruct --config " + cfg.string() + " --out-dir " + c.string() +
                " --seed 6") == 0);
    CHECK(slurp(a / "history.csv") != slurp(c / "history.csv"));
  }
}

TEST_CASE("bench sweeps") {
  const auto cfg = write_config(
      "bench.cfg",
      "grid_points = 64\nmesh_size = 0.5\nwavelength = 10\nabl_points = 8\nabl_beta = 0.15\n"
      "bench_contrasts = 0.5\nbench_radii = 0.5\nbench_models = mgh\n");
  const auto a = fresh_dir("bench_a"), b = fresh_dir("bench_b");
  REQUIRE(run("bench --config " + cfg.string() + " --out-dir " + a.string()) == 0);
  const auto t = read_csv(a / "bench.csv");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "0.5");
  CHECK(t.rows[0][2] == "MGH");
  CHECK(parse_double(t.rows[0][5]) < 0.05);

  const auto two = write_config(
      "bench2.cfg",
      "grid_points = 64\nmesh_size = 0.5\nwavelength = 10\nabl_points = 8\nabl_beta = 0.15\n"
      "bench_contrasts = 0.5, 1\nbench_radii = 0.5\nbench_models = lis, mgh\n");
  REQUIRE(run("bench --config " + two.string() + " --out-dir " + a.string()) == 0);
  REQUIRE(run("bench --config " + two.string() + " --out-dir " + b.string() + " --threads 3") ==
          0);
  CHECK(slurp(a / "bench.csv") == slurp(b / "bench.csv"));
  const auto t2 = read_csv(a / "bench.csv");
  REQUIRE(t2.rows.size() == 4);
  CHECK(t2.rows[0][2] == "LiS");
  CHECK(t2.rows[1][2] == "MGH");
  CHECK(t2.rows[2][0] == "1");
}
