#include "helmscat/commands.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "helmscat/io.hpp"
#include "helmscat/oracle.hpp"
#include "helmscat/parallel.hpp"

namespace helmscat {

ScatteringScene scene_from_config(const RunConfig& cfg) {
  ScatteringScene sc;
  const int s = cfg.integer("grid_points");
  if (s < 3) throw ConfigError("grid_points must be >= 3");
  if (cfg.has("domain_size") == cfg.has("mesh_size")) {
    throw ConfigError("give exactly one of domain_size and mesh_size");
  }
  if (cfg.has("domain_size")) {
    const double side = cfg.number("domain_size");
    if (!(side > 0.0)) throw ConfigError("domain_size must be > 0");
    sc.roi = Grid2D::from_side_length(s, side);
  } else {
    const double h = cfg.number("mesh_size");
    if (!(h > 0.0)) throw ConfigError("mesh_size must be > 0");
    sc.roi = Grid2D::centered(s, h);
  }
  sc.wavelength = cfg.number("wavelength");
  if (!(sc.wavelength > 0.0)) throw ConfigError("wavelength must be > 0");
  sc.eta_b = cfg.number_or("eta_b", 1.0);
  if (!(sc.eta_b > 0.0)) throw ConfigError("eta_b must be > 0");
  sc.u0 = cfg.number_or("amplitude", 1.0);
  sc.abl_points = cfg.integer_or("abl_points", s / 16);
  sc.beta = cfg.number_or("abl_beta", 0.0);
  if (sc.abl_points < 0) throw ConfigError("abl_points must be >= 0");
  if (!(sc.beta >= 0.0)) throw ConfigError("abl_beta must be >= 0");

  sc.mg.levels = cfg.integer_or("mg_levels", 3);
  sc.mg.pre_smooth = cfg.integer_or("mg_pre_smooth", 1);
  sc.mg.post_smooth = cfg.integer_or("mg_post_smooth", 1);
  sc.mg.omega = cfg.number_or("mg_omega", 0.8);
  const std::string cycle = cfg.text_or("mg_cycle", "V");
  if (cycle == "V") {
    sc.mg.cycle_type = 1;
  } else if (cycle == "W") {
    sc.mg.cycle_type = 2;
  } else {
    throw ConfigError("mg_cycle must be V or W");
  }
  sc.krylov.tolerance = cfg.number_or("solver_tolerance", 1e-6);
  sc.krylov.max_iterations = cfg.integer_or("solver_max_iterations", 1000);
  if (!(sc.krylov.tolerance > 0.0) || sc.krylov.max_iterations < 1) {
    throw ConfigError("solver_tolerance must be > 0 and solver_max_iterations >= 1");
  }

  const int views = cfg.integer_or("views", 1);
  const int sensors = cfg.integer_or("sensors", 360);
  const double radius = cfg.has("sensor_radius") ? cfg.number("sensor_radius") : 0.0;
  const int active = cfg.integer_or("active_sensors", 0);
  if (cfg.has("sensor_radius")) {
    sc.geometry = AcquisitionGeometry::circular(views, cfg.number_or("view_angle", 0.0), sensors,
                                                radius, {0.0, 0.0}, active);
  } else {
    // directions only; commands that need sensors ask for sensor_radius
    sc.geometry = AcquisitionGeometry::circular(views, cfg.number_or("view_angle", 0.0), 1, 1.0,
                                                {0.0, 0.0}, 0);
    sc.geometry.sensors.clear();
    for (auto& a : sc.geometry.active) a.clear();
  }
  // fail here rather than deep inside a solve
  (void)sc.extended();
  return sc;
}

RealField2D phantom_eta(const Grid2D& grid, double eta_b, double contrast) {
  struct Disk {
    double cx, cy, r, level;
  };
  static constexpr Disk kDisks[] = {{0.0, 0.0, 0.6, 0.5},
                                    {-0.25, 0.2, 0.2, 1.0},
                                    {0.25, -0.15, 0.15, 1.0},
                                    {0.2, 0.3, 0.1, 0.25}};
  const double R = 0.5 * grid.side_length();
  const double cx0 = grid.origin_x() + R, cy0 = grid.origin_y() + R;
  RealField2D eta(grid, eta_b);
  for (const Disk& d : kDisks) {
    for (int n = 0; n < grid.size(); ++n) {
      for (int m = 0; m < grid.size(); ++m) {
        if (std::hypot(grid.x(m) - cx0 - d.cx * R, grid.y(n) - cy0 - d.cy * R) < d.r * R) {
          eta(m, n) = eta_b * (1.0 + d.level * contrast);
        }
      }
    }
  }
  return eta;
}

RealField2D object_potential(const RunConfig& cfg, const ScatteringScene& scene) {
  const std::string kind = cfg.text("object");
  const Grid2D& g = scene.roi;
  RealField2D eta(g, scene.eta_b);
  if (kind == "none") {
    return RealField2D(g);
  } else if (kind == "disk") {
    const double r = cfg.number("disk_radius");
    const double value = cfg.number("disk_eta");
    const double cx = cfg.number_or("disk_center_x", 0.0);
    const double cy = cfg.number_or("disk_center_y", 0.0);
    if (!(r > 0.0) || !(value > 0.0)) throw ConfigError("disk_radius and disk_eta must be > 0");
    for (int n = 0; n < g.size(); ++n) {
      for (int m = 0; m < g.size(); ++m) {
        if (std::hypot(g.x(m) - cx, g.y(n) - cy) < r) eta(m, n) = value;
      }
    }
  } else if (kind == "phantom") {
    const double c = cfg.number("phantom_contrast");
    if (!(c > -1.0)) throw ConfigError("phantom_contrast must be > -1");
    eta = phantom_eta(g, scene.eta_b, c);
  } else if (kind == "file") {
    try {
      eta = real_field_from(read_field_file(cfg.path("object_file")), g);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("object_file: ") + e.what());
    }
    for (double v : eta.data()) {
      if (!(v > 0.0)) throw ConfigError("object_file holds a non-positive refractive index");
    }
  } else {
    throw ConfigError("object must be none, disk, phantom or file");
  }
  return potential_from_eta(eta, scene.k0(), scene.eta_b);
}

ReconstructionConfig reconstruction_from(const RunConfig& cfg) {
  ReconstructionConfig rc;
  const std::string gamma = cfg.text_or("gamma", "9e-4");
  if (gamma == "auto") {
    rc.auto_gamma = true;
  } else {
    rc.gamma = cfg.number("gamma");
  }
  rc.tau = cfg.number_or("tau", rc.tau);
  rc.iterations = cfg.integer_or("iterations", rc.iterations);
  rc.subset_size = cfg.integer_or("subset_size", rc.subset_size);
  rc.seed = cfg.unsigned_or("seed", rc.seed);
  rc.prox_iterations = cfg.integer_or("prox_iterations", rc.prox_iterations);
  rc.solver.tolerance = cfg.number_or("solver_tolerance", 1e-6);
  rc.solver.max_iterations = cfg.integer_or("solver_max_iterations", 1000);
  rc.record_timing = cfg.flag_or("record_timing", false);
  return rc;
}

namespace {

// Files written so far; removed unless commit() is called.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }
  std::filesystem::path add(const std::string& name) {
    written_.push_back(dir_ / name);
    return written_.back();
  }
  void commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

RunConfig load_with_overrides(const CommandOptions& options) {
  RunConfig cfg = RunConfig::load(options.config);
  if (options.seed) cfg.set("seed", std::to_string(*options.seed));
  return cfg;
}

void require_sensors(const ScatteringScene& sc) {
  if (sc.geometry.sensors.empty()) throw ConfigError("missing required key 'sensor_radius'");
  try {
    sc.geometry.validate(sc.roi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs `body`, mapping failures to exit codes.
template <class Setup, class Body>
int guarded(std::ostream& log, const char* name, Setup&& setup, Body&& body) {
  try {
    setup();
  } catch (const std::exception& e) {
    log << name << ": configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    return body();
  } catch (const SolverFailure& e) {
    log << name << ": solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::domain_error& e) {
    log << name << ": solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    log << name << ": error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int run_simulate(const CommandOptions& options, std::ostream& log) {
  std::optional<RunConfig> cfg;
  std::optional<ScatteringScene> scene;
  std::optional<RealField2D> f;
  ForwardModel model = ForwardModel::mgh;
  return guarded(
      log, "simulate",
      [&] {
        cfg = load_with_overrides(options);
        scene = scene_from_config(*cfg);
        require_sensors(*scene);
        f = object_potential(*cfg, *scene);
        const std::string m = cfg->text_or("model", "mgh");
        if (m == "mgh") {
          model = ForwardModel::mgh;
        } else if (m == "lis") {
          model = ForwardModel::lis;
        } else {
          throw ConfigError("model must be mgh or lis");
        }
      },
      [&] {
        const SensorOperator G(scene->roi, scene->geometry.sensors, scene->k0(), scene->eta_b);
        SimulationResult sim = simulate_all(*scene, G, *f, model, options.threads);
        for (std::size_t q = 0; q < sim.reports.size(); ++q) {
          if (!sim.reports[q].converged) {
            throw SolverFailure("view " + std::to_string(q) + " stopped: " +
                                std::string(to_string(sim.reports[q].status)));
          }
        }
        if (!cfg->flag_or("record_timing", false)) sim.seconds.assign(sim.seconds.size(), 0.0);
        prepare_out_dir(options.out_dir);
        OutputSet out(options.out_dir);
        write_measurements_csv(out.add("measurements.csv"), sim.data, scene->geometry);
        write_reports_csv(out.add("reports.csv"), sim.reports, sim.seconds);
        out.commit();
        int iters = 0;
        for (const auto& r : sim.reports) iters += r.iterations;
        log << "simulate: " << sim.reports.size() << " view(s), " << iters
            << " solver iterations, wrote measurements.csv and reports.csv\n";
        return kExitOk;
      });
}

int run_reconstruct(const CommandOptions& options, std::ostream& log) {
  std::optional<RunConfig> cfg;
  std::optional<ScatteringScene> scene;
  std::optional<ReconstructionConfig> rc;
  std::optional<MeasurementSet> data;
  std::optional<RealField2D> eta_true;
  return guarded(
      log, "reconstruct",
      [&] {
        cfg = load_with_overrides(options);
        scene = scene_from_config(*cfg);
        require_sensors(*scene);
        rc = reconstruction_from(*cfg);
        rc->threads = options.threads;
        rc->validate(scene->geometry.view_count());
        data = read_measurements_csv(cfg->path("measurements"), scene->geometry);
        const std::string truth = cfg->text_or("truth", "none");
        if (truth == "object") {
          eta_true = eta_from_potential(object_potential(*cfg, *scene), scene->k0(),
                                        scene->eta_b);
        } else if (truth != "none") {
          throw ConfigError("truth must be none or object");
        }
      },
      [&] {
        const ReconstructionResult r =
            reconstruct_fbs(*data, *scene, *rc, eta_true ? &*eta_true : nullptr);
        if (r.failure) throw SolverFailure(*r.failure);
        const RealField2D eta = eta_from_potential(r.potential, scene->k0(), scene->eta_b);
        prepare_out_dir(options.out_dir);
        OutputSet out(options.out_dir);
        write_field_file(out.add("eta.hsf"), eta);
        write_field_file(out.add("potential.hsf"), r.potential);
        write_history_csv(out.add("history.csv"), r.history);
        out.commit();
        log << "reconstruct: " << r.history.size() << " iteration(s), gamma "
            << format_double(r.gamma);
        if (!r.history.empty() && r.history.back().snr) {
          log << ", final SNR " << format_double(*r.history.back().snr) << " dB";
        }
        log << ", wrote eta.hsf, potential.hsf and history.csv\n";
        return kExitOk;
      });
}

int run_bench(const CommandOptions& options, std::ostream& log) {
  std::optional<RunConfig> cfg;
  std::optional<ScatteringScene> scene;
  std::vector<double> contrasts, radii;
  std::vector<std::string> models;
  bool timing = false;
  return guarded(
      log, "bench",
      [&] {
        cfg = load_with_overrides(options);
        scene = scene_from_config(*cfg);
        contrasts = cfg->numbers_or("bench_contrasts", {1.0, 2.0, 3.0, 4.0});
        radii = cfg->numbers_or("bench_radii", {1.25});
        models = cfg->words_or("bench_models", {"lis", "mgh"});
        timing = cfg->flag_or("record_timing", false);
        if (contrasts.empty() || radii.empty() || models.empty()) {
          throw ConfigError("bench sweep is empty");
        }
        for (double c : contrasts) {
          if (!(c > -1.0)) throw ConfigError("bench contrasts must be > -1");
        }
        const double half = 0.5 * scene->roi.side_length();
        for (double r : radii) {
          if (!(r > 0.0) || r * scene->wavelength >= half) {
            throw ConfigError("bench radius must be > 0 and keep the disk inside the grid");
          }
        }
        for (const auto& m : models) {
          if (m != "lis" && m != "mgh") throw ConfigError("bench_models takes lis and mgh");
        }
      },
      [&] {
        struct Point {
          double contrast, radius;
          std::string model;
        };
        std::vector<Point> points;
        for (double c : contrasts)
          for (double r : radii)
            for (const auto& m : models) points.push_back({c, r, m});

        std::vector<BenchRow> rows(points.size());
        const Point2D d = scene->geometry.directions.at(0);
        parallel_for(points.size(), options.threads, [&](std::size_t i) {
          const Point& p = points[i];
          DiskScene disk;
          disk.radius = p.radius * scene->wavelength;
          disk.eta_disk = scene->eta_b * std::sqrt(1.0 + p.contrast);
          disk.eta_b = scene->eta_b;
          disk.wavelength = scene->wavelength;
          disk.amplitude = scene->u0.real();
          const Grid2D& g = scene->roi;
          RealField2D f(g);
          const double value = scene->k0() * scene->k0() * scene->eta_b * scene->eta_b * p.contrast;
          for (int n = 0; n < g.size(); ++n)
            for (int m = 0; m < g.size(); ++m)
              if (std::hypot(g.x(m), g.y(n)) < disk.radius) f(m, n) = value;

          const auto start = std::chrono::steady_clock::now();
          ComplexField2D total(g);
          SolveReport report;
          if (p.model == "mgh") {
            const MghSystem sys(*scene, f);
            const ComplexField2D u_in = scene->incident(0, sys.extended().extended);
            ComplexField2D b(sys.extended().extended), u_sc(sys.extended().extended);
            for (std::size_t k = 0; k < b.size(); ++k)
              b[k] = sys.potential_extended()[k] * u_in[k];
            report = sys.solve(b.values(), u_sc.values());
            total = restrict_to_roi(u_sc, sys.extended());
            const ComplexField2D u_roi = scene->incident(0, g);
            for (std::size_t k = 0; k < total.size(); ++k) total[k] += u_roi[k];
          } else {
            const GreenKernel K(g, scene->k0(), scene->eta_b);
            LisSolution sol = solve_lis(K, f, scene->incident(0, g), scene->krylov);
            total = std::move(sol.total);
            report = sol.report;
          }
          const double wall = seconds_since(start);
          if (!report.converged) {
            throw SolverFailure("bench point contrast " + format_double(p.contrast) +
                                ", radius " + format_double(p.radius) + ", " + p.model +
                                " stopped: " + std::string(to_string(report.status)));
          }
          const ComplexField2D ref = analytic_disk_field(disk, g, d.x, d.y);
          rows[i] = {p.contrast, p.radius, p.model == "mgh" ? "MGH" : "LiS", report.iterations,
                     timing ? wall : 0.0, relative_error(total.values(), ref.values())};
        });
        prepare_out_dir(options.out_dir);
        OutputSet out(options.out_dir);
        write_bench_csv(out.add("bench.csv"), rows);
        out.commit();
        log << "bench: " << rows.size() << " row(s), wrote bench.csv\n";
        return kExitOk;
      });
}

}  // namespace helmscat
