#include "gapspec/series_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gapspec/error.hpp"

namespace gapspec {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) fail(Errc::invalid_argument, "cannot format number");
    return std::string(buf.data(), ptr);
}

std::string serialize_series(const GappySeries& series) {
    std::string out = "index,value,weight\n";
    out.reserve(out.size() + series.size() * 32);
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(series.values()[i]);
        out += ',';
        out += format_double(series.weights()[i]);
        out += '\n';
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_number(std::string_view token, double& out) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return false;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": " + what);
}

/// Calls fn(line_no, fields) for each non-empty line, skipping a leading
/// header line whose first field is not numeric.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool first_content = true;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = trim(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (first_content) {
            first_content = false;
            double probe = 0.0;
            if (!parse_number(fields.front(), probe)) continue;  // header
        }
        fn(line_no, fields);
    }
}

}  // namespace

GappySeries deserialize_series(std::string_view text, double dt) {
    std::vector<double> values;
    std::vector<double> weights;
    for_each_record(text, [&](std::size_t line_no, const std::vector<std::string_view>& fields) {
        if (fields.size() != 3) {
            parse_fail(line_no, "expected 3 fields (index,value,weight), found " + std::to_string(fields.size()));
        }
        double index = 0.0;
        double value = 0.0;
        double weight = 0.0;
        if (!parse_number(fields[0], index)) parse_fail(line_no, "non-numeric index '" + std::string(fields[0]) + "'");
        if (!parse_number(fields[1], value)) parse_fail(line_no, "non-numeric value '" + std::string(fields[1]) + "'");
        if (!parse_number(fields[2], weight)) parse_fail(line_no, "non-numeric weight '" + std::string(fields[2]) + "'");
        if (index != static_cast<double>(values.size())) {
            parse_fail(line_no, "index " + std::string(trim(fields[0])) + " out of sequence (expected " +
                                    std::to_string(values.size()) + ")");
        }
        values.push_back(value);
        weights.push_back(weight);
    });
    if (values.empty()) fail(Errc::parse_error, "no samples found");
    return GappySeries(std::move(values), std::move(weights), dt);
}

std::vector<double> deserialize_weights(std::string_view text) {
    std::vector<double> weights;
    for_each_record(text, [&](std::size_t line_no, const std::vector<std::string_view>& fields) {
        if (fields.size() != 1 && fields.size() != 3) {
            parse_fail(line_no, "expected 1 field (weight) or 3 fields (index,value,weight)");
        }
        double w = 0.0;
        const auto token = fields.back();
        if (!parse_number(token, w)) parse_fail(line_no, "non-numeric weight '" + std::string(token) + "'");
        weights.push_back(w);
    });
    if (weights.empty()) fail(Errc::parse_error, "no weights found");
    return weights;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(Errc::io_error, "write to '" + path.string() + "' failed");
}

GappySeries read_series_csv(const std::filesystem::path& path, double dt) {
    return deserialize_series(read_text_file(path), dt);
}

void write_series_csv(const std::filesystem::path& path, const GappySeries& series) {
    write_text_file(path, serialize_series(series));
}

}  // namespace gapspec
