#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gapspec/types.hpp"

namespace gapspec {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// CSV layout `index,value,weight`, one sample per line, preceded by a
/// header line. Values are written with round-trip precision.
std::string serialize_series(const GappySeries& series);

/// Parses the CSV layout above. A single header line is optional; the index
/// column must count 0,1,2,... Parse errors name the offending line.
GappySeries deserialize_series(std::string_view text, double dt = 1.0);

/// Reads a weight sequence either from the series layout (third column) or
/// from a file holding one weight per line.
std::vector<double> deserialize_weights(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

GappySeries read_series_csv(const std::filesystem::path& path, double dt = 1.0);
void write_series_csv(const std::filesystem::path& path, const GappySeries& series);

}  // namespace gapspec
