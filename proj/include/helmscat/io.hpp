#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "helmscat/forward.hpp"
#include "helmscat/inverse.hpp"

namespace helmscat {

/// Shortest text that parses back to the same double; "inf", "-inf", "nan"
/// for the non-finite values.
std::string format_double(double v);
/// Whole-string parse; throws std::invalid_argument on trailing junk.
double parse_double(std::string_view text);

/// Field binary: "HSF1", u32 rows, u32 cols, u8 kind (0 real, 1 complex),
/// then row-major float64 payload (complex interleaved re, im), little endian.
enum class FieldKind : std::uint8_t { real = 0, complex = 1 };

struct FieldData {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  FieldKind kind = FieldKind::real;
  std::vector<double> payload;  // rows * cols, or 2 * rows * cols for complex
};

void write_field_file(const std::filesystem::path& path, const RealField2D& field);
void write_field_file(const std::filesystem::path& path, const ComplexField2D& field);
FieldData read_field_file(const std::filesystem::path& path);
/// Rows follow y and columns follow x on the grid.
RealField2D real_field_from(const FieldData& data, const Grid2D& grid);
ComplexField2D complex_field_from(const FieldData& data, const Grid2D& grid);

/// "view,sensor,re,im"; sensor is the global sensor index.
void write_measurements_csv(const std::filesystem::path& path, const MeasurementSet& data,
                            const AcquisitionGeometry& geometry);
MeasurementSet read_measurements_csv(const std::filesystem::path& path,
                                     const AcquisitionGeometry& geometry);

/// "view,status,converged,iterations,relative_residual,work_units,seconds".
void write_reports_csv(const std::filesystem::path& path, const std::vector<SolveReport>& reports,
                       const std::vector<double>& seconds);

/// "iteration,objective,snr,work_units,seconds"; snr is empty without a ground truth.
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<HistoryEntry>& history);

struct BenchRow {
  double contrast = 0.0;
  double radius = 0.0;  // wavelengths
  std::string model;    // "LiS" or "MGH"
  int iterations = 0;
  double wall_seconds = 0.0;
  double relative_error = 0.0;
};

/// "contrast,radius,model,iterations,wall_seconds,relative_error_vs_analytic".
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

/// Split a CSV file into header and rows of fields; no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace helmscat
