#include "n1ma/grid_field.hpp"

#include "n1ma/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace n1ma {

void validate_shape(const std::vector<int>& shape) {
    if (shape.size() < 3) {
        throw DomainError("torus_solver", "GridField",
                          "n_dim must be >= 3, got " + std::to_string(shape.size()));
    }
    for (int N : shape) {
        if (N < 8 || N % 2 != 0) {
            throw DomainError("torus_solver", "GridField",
                              "axis sizes must be even and >= 8, got " + std::to_string(N));
        }
    }
}

std::size_t shape_size(const std::vector<int>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
}

GridField::GridField(std::vector<int> shape, double fill) : shape_(std::move(shape)) {
    validate_shape(shape_);
    data_.assign(shape_size(shape_), fill);
}

GridField GridField::sample(std::vector<int> shape,
                            const std::function<double(std::span<const double>)>& fn) {
    GridField f(std::move(shape));
    std::vector<double> x(f.shape_.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.coordinates(i, x);
        f.data_[i] = fn(x);
    }
    return f;
}

void GridField::coordinates(std::size_t flat, std::span<double> x) const {
    for (int axis = n_dim() - 1; axis >= 0; --axis) {
        const auto N = static_cast<std::size_t>(shape_[axis]);
        x[axis] = 2.0 * std::numbers::pi * static_cast<double>(flat % N) / static_cast<double>(N);
        flat /= N;
    }
}

std::vector<double> GridField::coordinates(std::size_t flat) const {
    std::vector<double> x(shape_.size());
    coordinates(flat, x);
    return x;
}

double GridField::max() const { return *std::max_element(data_.begin(), data_.end()); }
double GridField::min() const { return *std::min_element(data_.begin(), data_.end()); }

double GridField::mean() const {
    return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

double GridField::sup_norm() const {
    double s = 0.0;
    for (double v : data_) s = std::max(s, std::abs(v));
    return s;
}

GridField& GridField::operator+=(const GridField& other) {
    if (!same_grid(other)) throw DomainError("torus_solver", "GridField", "grid mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

GridField& GridField::operator-=(const GridField& other) {
    if (!same_grid(other)) throw DomainError("torus_solver", "GridField", "grid mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

GridField& GridField::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

GridField& GridField::operator+=(double s) {
    for (double& v : data_) v += s;
    return *this;
}

MatrixField::MatrixField(std::vector<int> shape, int n)
    : shape_(std::move(shape)), n_(n), points_(shape_size(shape_)) {
    validate_shape(shape_);
    data_.assign(points_ * stride(), 0.0);
}

MatrixField MatrixField::constant(std::vector<int> shape, const Eigen::MatrixXd& m) {
    MatrixField f(std::move(shape), static_cast<int>(m.rows()));
    for (std::size_t i = 0; i < f.points_; ++i) f.at(i) = m;
    return f;
}

GridField MatrixField::component(int r, int c) const {
    GridField f(shape_);
    for (std::size_t i = 0; i < points_; ++i) f[i] = at(i)(r, c);
    return f;
}

void MatrixField::set_component(int r, int c, const GridField& f) {
    for (std::size_t i = 0; i < points_; ++i) {
        at(i)(r, c) = f[i];
        at(i)(c, r) = f[i];
    }
}

double MatrixField::min_eigenvalue() const {
    double lo = std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (std::size_t i = 0; i < points_; ++i) {
        es.compute(at(i), Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues()(0));
    }
    return lo;
}

}  // namespace n1ma
