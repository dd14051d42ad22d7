#include "nsc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "nsc/errors.hpp"

namespace nsc {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Fft3d::Plans {
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

Fft3d::Fft3d(int n) : n_(n), size_(static_cast<std::size_t>(n) * n * n), plans_(std::make_unique<Plans>()) {
    std::lock_guard lock(planner_mutex());
    plans_->buffer = fftw_alloc_complex(size_);
    if (plans_->buffer == nullptr) throw std::bad_alloc();
    const unsigned flags = n <= 32 ? FFTW_MEASURE : FFTW_ESTIMATE;
    plans_->forward = fftw_plan_dft_3d(n, n, n, plans_->buffer, plans_->buffer, FFTW_FORWARD, flags);
    plans_->backward = fftw_plan_dft_3d(n, n, n, plans_->buffer, plans_->buffer, FFTW_BACKWARD, flags);
}

Fft3d::~Fft3d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plans_->forward);
    fftw_destroy_plan(plans_->backward);
    fftw_free(plans_->buffer);
}

void Fft3d::to_physical(std::span<const cplx> first, std::span<const cplx> second, std::span<double> out_first,
                        std::span<double> out_second) {
    auto* buf = reinterpret_cast<cplx*>(plans_->buffer);
    const cplx I(0.0, 1.0);
    if (second.empty()) {
        std::copy(first.begin(), first.end(), buf);
    } else {
        for (std::size_t m = 0; m < size_; ++m) buf[m] = first[m] + I * second[m];
    }
    fftw_execute(plans_->backward);
    for (std::size_t m = 0; m < size_; ++m) out_first[m] = buf[m].real();
    if (!second.empty()) {
        for (std::size_t m = 0; m < size_; ++m) out_second[m] = buf[m].imag();
    }
}

void Fft3d::to_spectral(std::span<const double> first, std::span<const double> second, std::span<cplx> out_first,
                        std::span<cplx> out_second) {
    auto* buf = reinterpret_cast<cplx*>(plans_->buffer);
    for (std::size_t m = 0; m < size_; ++m) buf[m] = cplx(first[m], second.empty() ? 0.0 : second[m]);
    fftw_execute(plans_->forward);
    const double scale = 1.0 / static_cast<double>(size_);
    const int n = n_;
    std::size_t m = 0;
    for (int i = 0; i < n; ++i) {
        const int pi = (n - i) % n;
        for (int j = 0; j < n; ++j) {
            const int pj = (n - j) % n;
            for (int k = 0; k < n; ++k, ++m) {
                const int pk = (n - k) % n;
                const std::size_t p = (static_cast<std::size_t>(pi) * n + pj) * n + pk;
                const cplx z = buf[m];
                const cplx zp = std::conj(buf[p]);
                out_first[m] = 0.5 * scale * (z + zp);
                if (!second.empty()) out_second[m] = cplx(0.0, -0.5) * scale * (z - zp);
            }
        }
    }
}

void Fft3d::to_physical_complex(std::span<const cplx> spec, std::span<cplx> out) {
    auto* buf = reinterpret_cast<cplx*>(plans_->buffer);
    std::copy(spec.begin(), spec.end(), buf);
    fftw_execute(plans_->backward);
    std::copy(buf, buf + size_, out.begin());
}

Fft3d& fft_engine(int n) {
    thread_local std::map<int, std::unique_ptr<Fft3d>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fft3d>(n);
    return *slot;
}

std::vector<double> to_physical(const SpectralField& f) {
    auto& fft = fft_engine(f.grid().n());
    const std::size_t N = f.modes();
    std::vector<double> out(N * f.components());
    std::span<double> all(out);
    int c = 0;
    for (; c + 1 < f.components(); c += 2) {
        fft.to_physical(f.component(c), f.component(c + 1), all.subspan(c * N, N), all.subspan((c + 1) * N, N));
    }
    if (c < f.components()) fft.to_physical(f.component(c), {}, all.subspan(c * N, N), {});
    return out;
}

SpectralField to_spectral(const TorusGrid& grid, std::span<const double> values, int components) {
    SpectralField f(grid, components);
    const std::size_t N = grid.size();
    require(values.size() == N * components, "to_spectral: sample count mismatch");
    auto& fft = fft_engine(grid.n());
    int c = 0;
    for (; c + 1 < components; c += 2) {
        fft.to_spectral(values.subspan(c * N, N), values.subspan((c + 1) * N, N), f.component(c), f.component(c + 1));
    }
    if (c < components) fft.to_spectral(values.subspan(c * N, N), {}, f.component(c), {});
    return f;
}

}  // namespace nsc
