#pragma once

#include "n1ma/grid_field.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace n1ma {

/// FFT-based differentiation on one periodic grid. Owns the FFTW plans and
/// scratch buffers, so an instance must not be shared between threads; use
/// one per solve.
class SpectralOps {
public:
    explicit SpectralOps(std::vector<int> shape);
    ~SpectralOps();
    SpectralOps(SpectralOps&&) noexcept;
    SpectralOps& operator=(SpectralOps&&) noexcept;
    SpectralOps(const SpectralOps&) = delete;
    SpectralOps& operator=(const SpectralOps&) = delete;

    using Spectrum = std::vector<std::complex<double>>;

    [[nodiscard]] const std::vector<int>& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t spectrum_size() const noexcept { return spectrum_size_; }

    /// Unnormalized r2c transform.
    [[nodiscard]] Spectrum forward(const GridField& u);
    /// Inverse of forward(), including the 1/N normalization.
    [[nodiscard]] GridField inverse(const Spectrum& s);

    /// Integer wavenumber of spectral mode `mode` along `axis`.
    [[nodiscard]] int wavenumber(std::size_t mode, int axis) const noexcept {
        return wavenumbers_[mode * shape_.size() + static_cast<std::size_t>(axis)];
    }
    /// True when the mode sits on the Nyquist plane of `axis`.
    [[nodiscard]] bool nyquist(std::size_t mode, int axis) const noexcept {
        return 2 * std::abs(wavenumber(mode, axis)) == shape_[static_cast<std::size_t>(axis)];
    }

    /// d u / d x_axis.
    [[nodiscard]] GridField derivative(const GridField& u, int axis);
    /// d^2 u / (d x_i d x_j) from a precomputed spectrum of u.
    [[nodiscard]] GridField second_derivative(const Spectrum& u_hat, int i, int j);

    /// Complex Hessian of a function of Re z only: (1/4) times the real Hessian.
    [[nodiscard]] MatrixField complex_hessian(const GridField& u);

    /// Multiplies the spectrum by `symbol(mode)` and transforms back.
    [[nodiscard]] GridField apply_symbol(const Spectrum& s,
                                         const std::function<std::complex<double>(std::size_t)>& symbol);

private:
    struct Plans;

    std::vector<int> shape_;
    std::size_t real_size_ = 0;
    std::size_t spectrum_size_ = 0;
    std::vector<int> wavenumbers_;
    std::unique_ptr<Plans> plans_;
};

/// Free-function form of SpectralOps::complex_hessian for one-off use.
[[nodiscard]] MatrixField complex_hessian(const GridField& u);

}  // namespace n1ma
