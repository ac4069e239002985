#include "n1ma/spectral.hpp"

#include "n1ma/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace n1ma {

namespace {

// FFTW planning touches global state.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct SpectralOps::Plans {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        fftw_free(real);
        fftw_free(spec);
    }
};

SpectralOps::SpectralOps(std::vector<int> shape) : shape_(std::move(shape)) {
    validate_shape(shape_);
    const std::size_t d = shape_.size();
    real_size_ = shape_size(shape_);
    spectrum_size_ = real_size_ / static_cast<std::size_t>(shape_.back()) *
                     static_cast<std::size_t>(shape_.back() / 2 + 1);

    wavenumbers_.resize(spectrum_size_ * d);
    for (std::size_t m = 0; m < spectrum_size_; ++m) {
        std::size_t rest = m;
        for (int axis = static_cast<int>(d) - 1; axis >= 0; --axis) {
            const int N = shape_[static_cast<std::size_t>(axis)];
            const int len = axis == static_cast<int>(d) - 1 ? N / 2 + 1 : N;
            const int idx = static_cast<int>(rest % static_cast<std::size_t>(len));
            rest /= static_cast<std::size_t>(len);
            wavenumbers_[m * d + static_cast<std::size_t>(axis)] = idx <= N / 2 ? idx : idx - N;
        }
    }

    plans_ = std::make_unique<Plans>();
    std::lock_guard lock(planner_mutex());
    plans_->real = fftw_alloc_real(real_size_);
    plans_->spec = fftw_alloc_complex(spectrum_size_);
    plans_->r2c = fftw_plan_dft_r2c(static_cast<int>(d), shape_.data(), plans_->real,
                                    plans_->spec, FFTW_ESTIMATE);
    plans_->c2r = fftw_plan_dft_c2r(static_cast<int>(d), shape_.data(), plans_->spec,
                                    plans_->real, FFTW_ESTIMATE);
    if (!plans_->r2c || !plans_->c2r) {
        throw Error("torus_solver", "SpectralOps", "FFTW planning failed");
    }
}

SpectralOps::~SpectralOps() = default;
SpectralOps::SpectralOps(SpectralOps&&) noexcept = default;
SpectralOps& SpectralOps::operator=(SpectralOps&&) noexcept = default;

SpectralOps::Spectrum SpectralOps::forward(const GridField& u) {
    if (u.shape() != shape_) throw DomainError("torus_solver", "SpectralOps", "grid mismatch");
    std::copy(u.data().begin(), u.data().end(), plans_->real);
    fftw_execute(plans_->r2c);
    Spectrum s(spectrum_size_);
    for (std::size_t m = 0; m < spectrum_size_; ++m) {
        s[m] = {plans_->spec[m][0], plans_->spec[m][1]};
    }
    return s;
}

GridField SpectralOps::inverse(const Spectrum& s) {
    // c2r destroys its input, so it always runs on the scratch buffer.
    for (std::size_t m = 0; m < spectrum_size_; ++m) {
        plans_->spec[m][0] = s[m].real();
        plans_->spec[m][1] = s[m].imag();
    }
    fftw_execute(plans_->c2r);
    GridField u(shape_);
    const double scale = 1.0 / static_cast<double>(real_size_);
    for (std::size_t i = 0; i < real_size_; ++i) u[i] = plans_->real[i] * scale;
    return u;
}

GridField SpectralOps::apply_symbol(const Spectrum& s,
                                    const std::function<std::complex<double>(std::size_t)>& symbol) {
    Spectrum t(s.size());
    for (std::size_t m = 0; m < s.size(); ++m) t[m] = s[m] * symbol(m);
    return inverse(t);
}

GridField SpectralOps::derivative(const GridField& u, int axis) {
    const auto s = forward(u);
    return apply_symbol(s, [&](std::size_t m) -> std::complex<double> {
        if (nyquist(m, axis)) return 0.0;
        return {0.0, static_cast<double>(wavenumber(m, axis))};
    });
}

GridField SpectralOps::second_derivative(const Spectrum& u_hat, int i, int j) {
    return apply_symbol(u_hat, [&](std::size_t m) -> std::complex<double> {
        if (i != j && (nyquist(m, i) || nyquist(m, j))) return 0.0;
        return -static_cast<double>(wavenumber(m, i)) * static_cast<double>(wavenumber(m, j));
    });
}

MatrixField SpectralOps::complex_hessian(const GridField& u) {
    const int d = static_cast<int>(shape_.size());
    const auto s = forward(u);
    MatrixField h(shape_, d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            GridField dij = second_derivative(s, i, j);
            dij *= 0.25;
            h.set_component(i, j, dij);
        }
    }
    return h;
}

MatrixField complex_hessian(const GridField& u) {
    SpectralOps ops(u.shape());
    return ops.complex_hessian(u);
}

}  // namespace n1ma
