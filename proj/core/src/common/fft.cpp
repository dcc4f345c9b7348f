#include "iotphy/common/fft.hpp"

#include <mutex>
#include <new>
#include <stdexcept>
#include <utility>

#include <fftw3.h>

namespace iotphy {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
    if (n == 0) {
        throw std::invalid_argument("FFT length must be positive");
    }
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    if (in == nullptr || out == nullptr) {
        fftw_free(in);
        fftw_free(out);
        throw std::bad_alloc();
    }
    in_ = in;
    out_ = out;
    {
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    if (plan_ == nullptr) {
        release();
        throw std::runtime_error("FFTW failed to create a plan");
    }
}

Fft::~Fft() { release(); }

Fft::Fft(Fft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      in_(std::exchange(other.in_, nullptr)),
      out_(std::exchange(other.out_, nullptr)),
      plan_(std::exchange(other.plan_, nullptr)) {}

Fft& Fft::operator=(Fft&& other) noexcept {
    if (this != &other) {
        release();
        n_ = std::exchange(other.n_, 0);
        in_ = std::exchange(other.in_, nullptr);
        out_ = std::exchange(other.out_, nullptr);
        plan_ = std::exchange(other.plan_, nullptr);
    }
    return *this;
}

void Fft::release() noexcept {
    if (plan_ != nullptr) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
        plan_ = nullptr;
    }
    fftw_free(in_);
    fftw_free(out_);
    in_ = nullptr;
    out_ = nullptr;
}

std::span<std::complex<double>> Fft::input() noexcept {
    return {reinterpret_cast<std::complex<double>*>(in_), n_};
}

std::span<const std::complex<double>> Fft::output() const noexcept {
    return {reinterpret_cast<const std::complex<double>*>(out_), n_};
}

void Fft::execute() { fftw_execute(static_cast<fftw_plan>(plan_)); }

}  // namespace iotphy
