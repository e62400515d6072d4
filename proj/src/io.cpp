#include "helmscat/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace helmscat {

static_assert(std::endian::native == std::endian::little,
              "field files are written with the native byte order");

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  if (text == "nan") return NAN;
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated field file " + path.string());
  return v;
}

void write_header(std::ostream& out, const Grid2D& g, FieldKind kind) {
  out.write("HSF1", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.size()));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(kind));
}

void check_shape(const FieldData& data, const Grid2D& grid, FieldKind kind) {
  if (data.kind != kind) throw std::invalid_argument("field file has the wrong kind");
  if (data.rows != static_cast<std::uint32_t>(grid.size()) ||
      data.cols != static_cast<std::uint32_t>(grid.size())) {
    throw std::invalid_argument("field file is " + std::to_string(data.rows) + "x" +
                                std::to_string(data.cols) + ", grid is " +
                                std::to_string(grid.size()) + "x" + std::to_string(grid.size()));
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_field_file(const std::filesystem::path& path, const RealField2D& field) {
  auto out = open_out(path, true);
  write_header(out, field.grid(), FieldKind::real);
  out.write(reinterpret_cast<const char*>(field.data().data()),
            static_cast<std::streamsize>(field.size() * sizeof(double)));
  finish(out, path);
}

void write_field_file(const std::filesystem::path& path, const ComplexField2D& field) {
  auto out = open_out(path, true);
  write_header(out, field.grid(), FieldKind::complex);
  for (const cplx& z : field.data()) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  finish(out, path);
}

FieldData read_field_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::memcmp(magic.data(), "HSF1", 4) != 0) {
    throw std::runtime_error("not a field file: " + path.string());
  }
  FieldData d;
  d.rows = get<std::uint32_t>(in, path);
  d.cols = get<std::uint32_t>(in, path);
  const auto kind = get<std::uint8_t>(in, path);
  if (kind > 1) throw std::runtime_error("unknown field kind in " + path.string());
  d.kind = static_cast<FieldKind>(kind);
  const std::size_t count = static_cast<std::size_t>(d.rows) * d.cols * (kind == 1 ? 2 : 1);
  d.payload.resize(count);
  in.read(reinterpret_cast<char*>(d.payload.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated field file " + path.string());
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("trailing bytes in field file " + path.string());
  }
  return d;
}

RealField2D real_field_from(const FieldData& data, const Grid2D& grid) {
  check_shape(data, grid, FieldKind::real);
  return RealField2D(grid, data.payload);
}

ComplexField2D complex_field_from(const FieldData& data, const Grid2D& grid) {
  check_shape(data, grid, FieldKind::complex);
  std::vector<cplx> v(grid.count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {data.payload[2 * i], data.payload[2 * i + 1]};
  return ComplexField2D(grid, std::move(v));
}

void write_measurements_csv(const std::filesystem::path& path, const MeasurementSet& data,
                            const AcquisitionGeometry& geometry) {
  if (data.views.size() != geometry.view_count()) {
    throw std::invalid_argument("measurements do not match the geometry");
  }
  auto out = open_out(path);
  out << "view,sensor,re,im\n";
  for (std::size_t q = 0; q < data.views.size(); ++q) {
    const auto& rows = geometry.active[q];
    if (rows.size() != data.views[q].size()) {
      throw std::invalid_argument("view " + std::to_string(q) + " has the wrong length");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out << q << ',' << rows[i] << ',' << format_double(data.views[q][i].real()) << ','
          << format_double(data.views[q][i].imag()) << '\n';
    }
  }
  finish(out, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV file " + path.string());
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw std::runtime_error("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                               std::to_string(t.header.size()) + ": " + path.string());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

MeasurementSet read_measurements_csv(const std::filesystem::path& path,
                                     const AcquisitionGeometry& geometry) {
  const CsvTable t = read_csv(path);
  if (t.header != std::vector<std::string>{"view", "sensor", "re", "im"}) {
    throw std::runtime_error("measurement CSV must have header view,sensor,re,im");
  }
  MeasurementSet data;
  data.views.resize(geometry.view_count());
  std::vector<std::size_t> filled(geometry.view_count(), 0);
  for (const auto& row : t.rows) {
    const double qd = parse_double(row[0]), sd = parse_double(row[1]);
    const auto q = static_cast<std::size_t>(qd);
    if (qd < 0 || qd != static_cast<double>(q) || q >= geometry.view_count()) {
      throw std::runtime_error("bad view index " + row[0]);
    }
    const auto& active = geometry.active[q];
    const std::size_t i = filled[q]++;
    if (i >= active.size() || sd != active[i]) {
      throw std::runtime_error("view " + row[0] + ": sensor " + row[1] +
                               " does not match the active sensors of the geometry");
    }
    data.views[q].emplace_back(parse_double(row[2]), parse_double(row[3]));
  }
  for (std::size_t q = 0; q < filled.size(); ++q) {
    if (filled[q] != geometry.active[q].size()) {
      throw std::runtime_error("view " + std::to_string(q) + " is incomplete");
    }
  }
  return data;
}

void write_reports_csv(const std::filesystem::path& path, const std::vector<SolveReport>& reports,
                       const std::vector<double>& seconds) {
  auto out = open_out(path);
  out << "view,status,converged,iterations,relative_residual,work_units,seconds\n";
  for (std::size_t q = 0; q < reports.size(); ++q) {
    const SolveReport& r = reports[q];
    out << q << ',' << to_string(r.status) << ',' << (r.converged ? "true" : "false") << ','
        << r.iterations << ',' << format_double(r.relative_residual()) << ','
        << format_double(r.work_units) << ','
        << format_double(q < seconds.size() ? seconds[q] : 0.0) << '\n';
  }
  finish(out, path);
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<HistoryEntry>& history) {
  auto out = open_out(path);
  out << "iteration,objective,snr,work_units,seconds\n";
  for (const HistoryEntry& h : history) {
    out << h.iteration << ',' << format_double(h.objective) << ','
        << (h.snr ? format_double(*h.snr) : "") << ',' << format_double(h.work_units) << ','
        << format_double(h.seconds) << '\n';
  }
  finish(out, path);
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  auto out = open_out(path);
  out << "contrast,radius,model,iterations,wall_seconds,relative_error_vs_analytic\n";
  for (const BenchRow& r : rows) {
    out << format_double(r.contrast) << ',' << format_double(r.radius) << ',' << r.model << ','
        << r.iterations << ',' << format_double(r.wall_seconds) << ','
        << format_double(r.relative_error) << '\n';
  }
  finish(out, path);
}

}  // namespace helmscat
