#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gapspec/gapspec.h"

namespace {

/// Carries a failed status out of a subcommand.
struct Failure {
    std::string code;
    std::string message;
    int exit_code;
};

void check(gs_status status) {
    if (status != GS_OK) throw Failure{gs_status_name(status), gs_last_error_message(), static_cast<int>(status)};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};

using Series = std::unique_ptr<gs_series, Deleter<gs_series, gs_series_destroy>>;
using Covariance = std::unique_ptr<gs_covariance, Deleter<gs_covariance, gs_covariance_destroy>>;
using Matrix = std::unique_ptr<gs_matrix, Deleter<gs_matrix, gs_matrix_destroy>>;
using Spectrum = std::unique_ptr<gs_spectrum, Deleter<gs_spectrum, gs_spectrum_destroy>>;
using LsSpectrum = std::unique_ptr<gs_ls_spectrum, Deleter<gs_ls_spectrum, gs_ls_spectrum_destroy>>;

struct Window {
    int k1 = 0;
    int k2 = 0;
};

Window parse_window(const std::string& text) {
    const auto colon = text.find(':', text.empty() ? 0 : 1);
    if (colon == std::string::npos) throw Failure{"INVALID_ARGUMENT", "window must look like k1:k2, got '" + text + "'", 1};
    try {
        std::size_t used = 0;
        Window w;
        w.k1 = std::stoi(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(text);
        const auto rest = text.substr(colon + 1);
        w.k2 = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(text);
        return w;
    } catch (const std::logic_error&) {
        throw Failure{"INVALID_ARGUMENT", "window must look like k1:k2, got '" + text + "'", 1};
    }
}

Series read_series(const std::string& path, double dt) {
    gs_series* s = nullptr;
    check(gs_series_read_csv(path.c_str(), dt, &s));
    return Series(s);
}

std::vector<double> read_weights(const std::string& path) {
    double* data = nullptr;
    std::size_t n = 0;
    check(gs_weights_read(path.c_str(), &data, &n));
    std::vector<double> out(data, data + n);
    gs_free(data);
    return out;
}

void make_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Failure{"IO_ERROR", "cannot create '" + dir + "': " + ec.message(), GS_ERR_IO};
}

std::string join(const std::string& dir, const char* name) { return (std::filesystem::path(dir) / name).string(); }

void write_pair(const gs_covariance* cov, const std::string& dir, const char* method) {
    gs_spectrum* spec = nullptr;
    check(gs_spectrum_from_covariance(cov, &spec));
    Spectrum owned(spec);
    check(gs_covariance_write_csv(cov, join(dir, "covariance.csv").c_str(), method));
    check(gs_spectrum_write_csv(spec, join(dir, "spectrum.csv").c_str(), method));
    std::cout << "wrote " << join(dir, "covariance.csv") << "\n"
              << "wrote " << join(dir, "spectrum.csv") << "\n";
}

struct EstimateArgs {
    std::string input;
    std::string input_y;
    std::string window;
    bool correct = false;
    double dt = 1.0;
    std::string out = ".";
    double threshold = 1e12;
};

void run_estimate(const EstimateArgs& a) {
    const Window w = parse_window(a.window);
    const Series x = read_series(a.input, a.dt);
    Series y;
    if (!a.input_y.empty()) y = read_series(a.input_y, a.dt);

    gs_covariance* raw = nullptr;
    if (y) {
        check(gs_crosscovariance(x.get(), y.get(), w.k1, w.k2, GS_ROUTE_AUTO, &raw));
    } else {
        check(gs_autocovariance(x.get(), w.k1, w.k2, GS_ROUTE_AUTO, &raw));
    }
    Covariance cov(raw);
    if (a.correct) {
        std::vector<double> wx(gs_series_length(x.get()));
        check(gs_series_weights(x.get(), wx.data(), wx.size()));
        gs_matrix* m = nullptr;
        if (y) {
            std::vector<double> wy(gs_series_length(y.get()));
            check(gs_series_weights(y.get(), wy.data(), wy.size()));
            check(gs_cross_matrix(wx.data(), wx.size(), wy.data(), wy.size(), w.k1, w.k2, &m));
        } else {
            check(gs_auto_matrix(wx.data(), wx.size(), w.k1, w.k2, &m));
        }
        Matrix matrix(m);
        gs_covariance* corrected = nullptr;
        double condition = 0.0;
        check(gs_correct_covariance(cov.get(), matrix.get(), a.threshold, &corrected, &condition));
        cov.reset(corrected);
        std::cout << "condition_estimate " << condition << "\n";
    }
    make_directory(a.out);
    write_pair(cov.get(), a.out, nullptr);
}

struct MatrixArgs {
    std::string weights;
    std::string weights_y;
    std::string window;
    std::string out = "matrix.csv";
};

void run_matrix(const MatrixArgs& a) {
    const Window w = parse_window(a.window);
    const auto wx = read_weights(a.weights);
    gs_matrix* m = nullptr;
    if (a.weights_y.empty()) {
        check(gs_auto_matrix(wx.data(), wx.size(), w.k1, w.k2, &m));
    } else {
        const auto wy = read_weights(a.weights_y);
        check(gs_cross_matrix(wx.data(), wx.size(), wy.data(), wy.size(), w.k1, w.k2, &m));
    }
    Matrix matrix(m);
    const auto parent = std::filesystem::path(a.out).parent_path();
    if (!parent.empty()) make_directory(parent.string());
    check(gs_matrix_write_csv(matrix.get(), a.out.c_str()));
    std::cout << "wrote " << a.out << " (" << gs_matrix_size(matrix.get()) << "x" << gs_matrix_size(matrix.get())
              << ")\n";
}

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 0;
};

void run_simulate(const SimulateArgs& a) {
    const std::uint64_t seed = a.seed.value_or(0);
    check(gs_run_experiment_file(a.config.c_str(), a.out.empty() ? nullptr : a.out.c_str(),
                                 a.seed ? &seed : nullptr, a.threads));
    std::cout << "experiment complete\n";
}

struct BaselineArgs {
    std::string input;
    std::string method;
    std::string window;
    double dt = 1.0;
    bool offset_correct = false;
    double alpha = 0.0;
    std::string out = ".";
};

void run_baseline(const BaselineArgs& a) {
    const Window w = parse_window(a.window);
    const Series x = read_series(a.input, a.dt);
    make_directory(a.out);
    if (a.method == "sample_and_hold") {
        gs_series* h = nullptr;
        check(gs_sample_and_hold(x.get(), &h));
        Series held(h);
        gs_covariance* c = nullptr;
        check(gs_autocovariance(held.get(), w.k1, w.k2, GS_ROUTE_FFT, &c));
        Covariance cov(c);
        write_pair(cov.get(), a.out, "sample_and_hold");
        return;
    }
    std::vector<double> freqs(static_cast<std::size_t>(std::max(0, w.k2 - w.k1 + 1)));
    std::size_t count = 0;
    check(gs_lomb_scargle_grid(w.k1, w.k2, a.dt, freqs.data(), freqs.size(), &count));
    gs_ls_spectrum* s = nullptr;
    check(gs_lomb_scargle(x.get(), freqs.data(), count, &s));
    LsSpectrum spec(s);
    const char* name = "lomb_scargle_raw";
    if (a.offset_correct) {
        gs_ls_spectrum* corrected = nullptr;
        check(gs_lomb_scargle_offset_correct(spec.get(), x.get(), a.alpha, &corrected));
        spec.reset(corrected);
        name = "lomb_scargle_corrected";
    }
    const auto path = join(a.out, "lomb_scargle.csv");
    check(gs_ls_spectrum_write_csv(spec.get(), path.c_str(), name));
    std::cout << "wrote " << path << "\n";
}

std::string quoted(const std::string& text) {
    std::string out;
    for (char ch : text) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch == '\n' ? ' ' : ch;
    }
    return out;
}

int report(const std::string& code, const std::string& message, int exit_code) {
    std::cerr << "error: code=" << code << " message=\"" << quoted(message) << "\"\n";
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariance and spectral estimation for series with invalid samples"};
    app.set_version_flag("--version", std::string(gs_version()));
    app.require_subcommand(1);

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Covariance and spectrum of one series or a pair");
    estimate->add_option("--input", est.input, "Series CSV (index,value,weight)")->required();
    estimate->add_option("--input-y", est.input_y, "Second series for a cross estimate");
    estimate->add_option("--window", est.window, "Lag window k1:k2")->required();
    estimate->add_flag("--correct", est.correct, "Apply the mapping-matrix correction");
    estimate->add_option("--dt", est.dt, "Sampling interval")->capture_default_str();
    estimate->add_option("--threshold", est.threshold, "Condition number limit")->capture_default_str();
    estimate->add_option("--out", est.out, "Output directory")->capture_default_str();

    MatrixArgs mat;
    auto* matrix = app.add_subcommand("matrix", "Dump the mapping matrix for a weight sequence");
    matrix->add_option("--weights", mat.weights, "Weight file")->required();
    matrix->add_option("--weights-y", mat.weights_y, "Second weight file for the cross matrix");
    matrix->add_option("--window", mat.window, "Lag window k1:k2")->required();
    matrix->add_option("--out", mat.out, "Output CSV")->capture_default_str();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo experiment from a JSON configuration");
    simulate->add_option("--config", sim.config, "Experiment configuration")->required();
    simulate->add_option("--seed", sim.seed, "Override base_seed");
    simulate->add_option("--out", sim.out, "Override output_dir");
    simulate->add_option("--threads", sim.threads, "Worker threads (0: configuration or hardware)");

    BaselineArgs base;
    auto* baseline = app.add_subcommand("baseline", "Run a single baseline estimator");
    baseline->add_option("--input", base.input, "Series CSV")->required();
    baseline->add_option("--method", base.method, "sample_and_hold or lomb_scargle")
        ->required()
        ->check(CLI::IsMember({"sample_and_hold", "lomb_scargle"}));
    baseline->add_option("--window", base.window, "Lag window k1:k2")->required();
    baseline->add_option("--dt", base.dt, "Sampling interval")->capture_default_str();
    baseline->add_flag("--offset-correct", base.offset_correct, "Subtract the Lomb-Scargle offset");
    baseline->add_option("--alpha", base.alpha, "Validity probability for the offset (default D/N)");
    baseline->add_option("--out", base.out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report("USAGE", e.what(), 64);
    }

    try {
        if (*estimate) run_estimate(est);
        if (*matrix) run_matrix(mat);
        if (*simulate) run_simulate(sim);
        if (*baseline) run_baseline(base);
    } catch (const Failure& f) {
        return report(f.code, f.message, f.exit_code);
    } catch (const std::exception& e) {
        return report("INTERNAL", e.what(), GS_ERR_INTERNAL);
    }
    return 0;
}
