#include "rydcav/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rydcav/error.hpp"
#include "rydcav/units.hpp"

namespace rydcav {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

char detect_delimiter(const std::string& header) {
  for (char c : {',', '\t', ';'}) {
    if (header.find(c) != std::string::npos) return c;
  }
  return ' ';
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream in(line);
    std::string field;
    while (in >> field) out.push_back(field);
    return out;
  }
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    fail(ErrorCode::kData, where + ": cannot parse '" + text + "' as a number");
  }
  return value;
}

bool matches(const std::vector<std::string>& cols, const char* const (&names)[3]) {
  if (cols.size() < 2 || cols.size() > 3) return false;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] != names[i]) return false;
  }
  return true;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

ReadReport read_dataset(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  while (std::getline(in, line)) {
    ++line_no;
    header = trim(line);
    if (!header.empty() && header[0] != '#') break;
  }
  if (header.empty() || header[0] == '#') {
    fail(ErrorCode::kData, source + ": no header row");
  }
  const char delim = detect_delimiter(header);
  const auto columns = split(header, delim);
  const bool rabi = matches(columns, kRabiHeader);
  const bool ramsey = matches(columns, kRamseyHeader);
  if (!rabi && !ramsey) {
    fail(ErrorCode::kData, source + ":" + std::to_string(line_no) + ": unrecognised header '" +
                               header + "' (expected duration_s|frequency_hz,population[,sigma])");
  }
  const bool with_sigma = columns.size() == 3;

  std::vector<double> x, pop, sigma;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty() || row[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = split(row, delim);
    if (fields.size() != columns.size()) {
      fail(ErrorCode::kData, where + ": expected " + std::to_string(columns.size()) +
                                 " columns, found " + std::to_string(fields.size()));
    }
    const double xv = parse_number(fields[0], where);
    const double pv = parse_number(fields[1], where);
    if (pv < 0.0 || pv > 1.0) {
      fail(ErrorCode::kData, where + ": population " + fields[1] + " outside [0, 1]");
    }
    if (!x.empty() && !(xv > x.back())) {
      fail(ErrorCode::kData, where + ": abscissa " + fields[0] + " is not increasing");
    }
    if (with_sigma) {
      const double sv = parse_number(fields[2], where);
      if (!(sv > 0.0)) fail(ErrorCode::kData, where + ": sigma must be > 0");
      sigma.push_back(sv);
    }
    x.push_back(xv);
    pop.push_back(pv);
  }
  if (x.empty()) fail(ErrorCode::kData, source + ": no data rows");

  ReadReport report;
  if (!with_sigma) {
    sigma.assign(x.size(), kDefaultSigma);
    report.warnings.push_back(source + ": no sigma column, assuming uniform sigma = " +
                              format_number(kDefaultSigma));
  }
  if (rabi) {
    report.dataset = RabiTrace{std::move(x), std::move(pop), std::move(sigma)};
  } else {
    for (auto& f : x) f = units::angular(f);
    report.dataset = Spectrum{std::move(x), std::move(pop), std::move(sigma)};
  }
  return report;
}

ReadReport read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kData, "cannot open dataset " + path.string());
  return read_dataset(in, path.string());
}

namespace {

void write_rows(std::ostream& out, const char* const (&header)[3],
                const std::vector<double>& x, const std::vector<double>& pop,
                const std::vector<double>& sigma, double x_scale) {
  const bool with_sigma = !sigma.empty();
  out << header[0] << ',' << header[1];
  if (with_sigma) out << ',' << header[2];
  out << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_number(x[i] * x_scale) << ',' << format_number(pop[i]);
    if (with_sigma) out << ',' << format_number(sigma[i]);
    out << '\n';
  }
}

}  // namespace

void write_dataset(std::ostream& out, const RabiTrace& trace) {
  trace.validate();
  write_rows(out, kRabiHeader, trace.durations, trace.population, trace.sigma, 1.0);
}

void write_dataset(std::ostream& out, const Spectrum& spectrum) {
  spectrum.validate();
  // Divide rather than multiply so Hz -> rad/s -> Hz is exact for typical values.
  std::vector<double> hz(spectrum.omega.size());
  for (std::size_t i = 0; i < hz.size(); ++i) hz[i] = units::hertz(spectrum.omega[i]);
  write_rows(out, kRamseyHeader, hz, spectrum.population, spectrum.sigma, 1.0);
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kData, "cannot write dataset " + path.string());
  std::visit([&](const auto& d) { write_dataset(out, d); }, dataset);
}

}  // namespace rydcav
