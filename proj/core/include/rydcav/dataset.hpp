#pragma once

// Delimiter-separated dataset files with a single header row.
//
//   Rabi:   duration_s,population,sigma
//   Ramsey: frequency_hz,population,sigma
//
// The sigma column is optional on input. Numbers are written in shortest
// round-trip form.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "rydcav/experiment.hpp"

namespace rydcav {

inline constexpr const char* kRabiHeader[] = {"duration_s", "population", "sigma"};
inline constexpr const char* kRamseyHeader[] = {"frequency_hz", "population", "sigma"};

/// Uniform per-point uncertainty assumed when the sigma column is absent.
inline constexpr double kDefaultSigma = 0.03;

using Dataset = std::variant<RabiTrace, Spectrum>;

struct ReadReport {
  Dataset dataset;
  std::vector<std::string> warnings;
};

/// Parses a dataset; the header row decides whether it is a Rabi trace or a
/// spectrum. Throws kData with the 1-based line number on malformed rows,
/// populations outside [0, 1], non-positive sigma or a non-increasing
/// abscissa.
ReadReport read_dataset(std::istream& in, const std::string& source = "<stream>");
ReadReport read_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const RabiTrace& trace);
void write_dataset(std::ostream& out, const Spectrum& spectrum);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);

/// Shortest string that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace rydcav
