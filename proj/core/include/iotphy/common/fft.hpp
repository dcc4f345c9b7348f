#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace iotphy {

// Forward complex DFT of fixed length backed by an FFTW plan. Each instance
// owns its plan and aligned buffers; instances are not shareable across
// threads but independent instances may run concurrently.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&& other) noexcept;

    std::size_t size() const noexcept { return n_; }

    // Fill input(), call execute(), read output().
    std::span<std::complex<double>> input() noexcept;
    std::span<const std::complex<double>> output() const noexcept;
    void execute();

private:
    void release() noexcept;

    std::size_t n_ = 0;
    void* in_ = nullptr;
    void* out_ = nullptr;
    void* plan_ = nullptr;
};

}  // namespace iotphy
