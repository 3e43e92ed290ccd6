#include "gapspec/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "gapspec/error.hpp"

namespace gapspec::fft {

namespace {

enum class PlanKind { c2c_forward, c2c_backward, r2c, c2r };

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(PlanKind kind, std::size_t n) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(kind, n);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const int len = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        // Planning with FFTW_ESTIMATE does not touch the arrays.
        std::vector<cplx> cbuf(n);
        std::vector<double> rbuf(n);
        auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());
        fftw_plan plan = nullptr;
        switch (kind) {
            case PlanKind::c2c_forward: plan = fftw_plan_dft_1d(len, c, c, FFTW_FORWARD, flags); break;
            case PlanKind::c2c_backward: plan = fftw_plan_dft_1d(len, c, c, FFTW_BACKWARD, flags); break;
            case PlanKind::r2c: plan = fftw_plan_dft_r2c_1d(len, rbuf.data(), c, flags); break;
            case PlanKind::c2r: plan = fftw_plan_dft_c2r_1d(len, c, rbuf.data(), flags); break;
        }
        if (plan == nullptr) fail(Errc::invalid_argument, "FFTW could not create a plan of length " + std::to_string(n));
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<PlanKind, std::size_t>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::vector<cplx> forward(std::span<const cplx> input) {
    std::vector<cplx> out(input.begin(), input.end());
    if (out.empty()) return out;
    fftw_execute_dft(cache().get(PlanKind::c2c_forward, out.size()), as_fftw(out.data()), as_fftw(out.data()));
    return out;
}

std::vector<cplx> inverse(std::span<const cplx> input) {
    std::vector<cplx> out(input.begin(), input.end());
    if (out.empty()) return out;
    fftw_execute_dft(cache().get(PlanKind::c2c_backward, out.size()), as_fftw(out.data()), as_fftw(out.data()));
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> forward_real(std::span<const double> input, std::size_t length) {
    if (input.size() > length) fail(Errc::invalid_argument, "FFT length shorter than input");
    std::vector<double> padded(length, 0.0);
    std::copy(input.begin(), input.end(), padded.begin());
    std::vector<cplx> out(length / 2 + 1);
    fftw_execute_dft_r2c(cache().get(PlanKind::r2c, length), padded.data(), as_fftw(out.data()));
    return out;
}

std::vector<double> inverse_real(std::span<const cplx> half_spectrum, std::size_t length) {
    if (half_spectrum.size() != length / 2 + 1) fail(Errc::dimension_mismatch, "half spectrum has wrong length");
    // c2r destroys its input.
    std::vector<cplx> scratch(half_spectrum.begin(), half_spectrum.end());
    std::vector<double> out(length);
    fftw_execute_dft_c2r(cache().get(PlanKind::c2r, length), as_fftw(scratch.data()), out.data());
    const double scale = 1.0 / static_cast<double>(length);
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<double> correlate_with(std::span<const cplx> a_spectrum, std::span<const double> b, std::size_t length) {
    auto spec = forward_real(b, length);
    if (spec.size() != a_spectrum.size()) fail(Errc::dimension_mismatch, "spectrum length mismatch");
    for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= std::conj(a_spectrum[m]);
    return inverse_real(spec, length);
}

std::vector<double> correlate(std::span<const double> a, std::span<const double> b, std::size_t length) {
    if (length < a.size() + b.size() - 1) fail(Errc::invalid_argument, "correlation length too short");
    const auto a_spec = forward_real(a, length);
    return correlate_with(a_spec, b, length);
}

}  // namespace gapspec::fft

namespace gapspec::fft {

std::vector<double> correlate_spectra(std::span<const cplx> a_spectrum, std::span<const cplx> b_spectrum,
                                      std::size_t length) {
    if (a_spectrum.size() != b_spectrum.size()) fail(Errc::dimension_mismatch, "spectrum length mismatch");
    std::vector<cplx> prod(a_spectrum.size());
    for (std::size_t m = 0; m < prod.size(); ++m) prod[m] = std::conj(a_spectrum[m]) * b_spectrum[m];
    return inverse_real(prod, length);
}

}  // namespace gapspec::fft
