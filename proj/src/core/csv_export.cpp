#include "gapspec/csv_export.hpp"

#include <complex>

#include "gapspec/series_io.hpp"

namespace gapspec {

namespace {

void begin_row(std::string& out, std::string_view method) {
    if (!method.empty()) {
        out += method;
        out += ',';
    }
}

void header(std::string& out, std::string_view method, std::string_view columns) {
    if (!method.empty()) out += "method,";
    out += columns;
    out += '\n';
}

void spectrum_row(std::string& out, std::string_view method, double f, std::complex<double> s) {
    begin_row(out, method);
    out += format_double(f) + ',' + format_double(s.real()) + ',' + format_double(s.imag()) + ',' +
           format_double(std::abs(s)) + '\n';
}

}  // namespace

std::string covariance_csv(const CovarianceEstimate& cov, std::string_view method) {
    std::string out;
    header(out, method, "lag_index,lag_time,value,pair_weight");
    for (std::size_t i = 0; i < cov.size(); ++i) {
        const int k = cov.window().lag(i);
        begin_row(out, method);
        out += std::to_string(k) + ',' + format_double(k * cov.dt()) + ',' + format_double(cov.values()[i]) + ',' +
               format_double(cov.pair_weights()[i]) + '\n';
    }
    return out;
}

std::string spectrum_csv(const SpectrumEstimate& spec, std::string_view method) {
    std::string out;
    header(out, method, "freq,real,imag,magnitude");
    for (std::size_t i = 0; i < spec.size(); ++i) spectrum_row(out, method, spec.frequencies[i], spec.values[i]);
    return out;
}

std::string lomb_scargle_csv(const LombScargleSpectrum& spec, std::string_view method) {
    std::string out;
    header(out, method, "freq,real,imag,magnitude");
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        spectrum_row(out, method, spec.frequencies[i], {spec.values[i], 0.0});
    }
    return out;
}

std::string matrix_csv(const MappingMatrix& matrix) {
    const auto& w = matrix.window;
    std::string out = "k";
    for (std::size_t j = 0; j < w.size(); ++j) out += ',' + std::to_string(w.lag(j));
    out += '\n';
    for (std::size_t k = 0; k < w.size(); ++k) {
        out += std::to_string(w.lag(k));
        for (std::size_t j = 0; j < w.size(); ++j) {
            out += ',' + format_double(matrix.entries(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
        }
        out += '\n';
    }
    return out;
}

void write_covariance_csv(const std::filesystem::path& path, const CovarianceEstimate& cov, std::string_view method) {
    write_text_file(path, covariance_csv(cov, method));
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumEstimate& spec, std::string_view method) {
    write_text_file(path, spectrum_csv(spec, method));
}

void write_lomb_scargle_csv(const std::filesystem::path& path, const LombScargleSpectrum& spec,
                            std::string_view method) {
    write_text_file(path, lomb_scargle_csv(spec, method));
}

void write_matrix_csv(const std::filesystem::path& path, const MappingMatrix& matrix) {
    write_text_file(path, matrix_csv(matrix));
}

}  // namespace gapspec
