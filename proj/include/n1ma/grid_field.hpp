#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace n1ma {

/// Real samples on the uniform periodic grid over [0, 2*pi)^d, row-major
/// with the last axis fastest. Axis sizes are even and >= 8.
class GridField {
public:
    GridField() = default;
    explicit GridField(std::vector<int> shape, double fill = 0.0);

    /// Samples `fn(x)` at every grid node; `x` has one entry per axis.
    static GridField sample(std::vector<int> shape,
                            const std::function<double(std::span<const double>)>& fn);

    [[nodiscard]] int n_dim() const noexcept { return static_cast<int>(shape_.size()); }
    [[nodiscard]] const std::vector<int>& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    /// Grid coordinates of the node with flat index `flat`.
    void coordinates(std::size_t flat, std::span<double> x) const;
    [[nodiscard]] std::vector<double> coordinates(std::size_t flat) const;

    [[nodiscard]] bool same_grid(const GridField& other) const noexcept {
        return shape_ == other.shape_;
    }

    [[nodiscard]] double max() const;
    [[nodiscard]] double min() const;
    /// Grid mean; equals the normalized trapezoidal (spectral) quadrature.
    [[nodiscard]] double mean() const;
    [[nodiscard]] double sup_norm() const;

    GridField& operator+=(const GridField& other);
    GridField& operator-=(const GridField& other);
    GridField& operator*=(double s);
    GridField& operator+=(double s);

    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(double s, GridField a) { return a *= s; }

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

/// Validates a grid shape: n_dim >= 3, every axis even and >= 8.
void validate_shape(const std::vector<int>& shape);

[[nodiscard]] std::size_t shape_size(const std::vector<int>& shape);

/// Symmetric real n x n matrix per grid node, stored densely.
class MatrixField {
public:
    MatrixField() = default;
    MatrixField(std::vector<int> shape, int n);

    /// Constant field equal to `m` at every node.
    static MatrixField constant(std::vector<int> shape, const Eigen::MatrixXd& m);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const std::vector<int>& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t points() const noexcept { return points_; }

    [[nodiscard]] Eigen::Map<Eigen::MatrixXd> at(std::size_t i) noexcept {
        return {data_.data() + i * stride(), n_, n_};
    }
    [[nodiscard]] Eigen::Map<const Eigen::MatrixXd> at(std::size_t i) const noexcept {
        return {data_.data() + i * stride(), n_, n_};
    }

    /// Scalar field of entry (r, c).
    [[nodiscard]] GridField component(int r, int c) const;
    /// Sets entries (r, c) and (c, r) from `f`.
    void set_component(int r, int c, const GridField& f);

    /// Smallest eigenvalue over all nodes.
    [[nodiscard]] double min_eigenvalue() const;

private:
    [[nodiscard]] std::size_t stride() const noexcept {
        return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
    }

    std::vector<int> shape_;
    int n_ = 0;
    std::size_t points_ = 0;
    std::vector<double> data_;
};

}  // namespace n1ma
