#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "helmscat/config.hpp"
#include "helmscat/forward.hpp"
#include "helmscat/inverse.hpp"

namespace helmscat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O and anything unexpected
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

/// Grid, medium, solver and acquisition keys. The grid is centered on the
/// origin; give exactly one of domain_size (outermost points apart, cm) and
/// mesh_size (cm).
ScatteringScene scene_from_config(const RunConfig& cfg);

/// Refractive index of the built-in phantom: overlapping disks scaled to the
/// grid's half side R, peak eta_b (1 + contrast).
RealField2D phantom_eta(const Grid2D& grid, double eta_b, double contrast);

/// Scattering potential of the configured object on the scene's grid.
RealField2D object_potential(const RunConfig& cfg, const ScatteringScene& scene);

ReconstructionConfig reconstruction_from(const RunConfig& cfg);

int run_simulate(const CommandOptions& options, std::ostream& log);
int run_reconstruct(const CommandOptions& options, std::ostream& log);
int run_bench(const CommandOptions& options, std::ostream& log);

}  // namespace helmscat
