#include "n1ma/form_algebra.hpp"

#include "n1ma/eigencone.hpp"
#include "n1ma/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

namespace n1ma::forms {

namespace {

constexpr const char* kModule = "form_algebra";

int popcount(IndexSet s) { return std::popcount(s); }

/// Sign of the permutation sorting the concatenation (A, B) of two disjoint
/// increasing sequences: (-1)^{#{(a, b) : a > b}}.
int merge_sign(IndexSet a, IndexSet b) {
    int inversions = 0;
    for (int k = 0; k < 32 && (b >> k) != 0U; ++k) {
        if ((b >> k) & 1U) inversions += popcount(a & ~((IndexSet{2} << k) - 1U));
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

IndexSet full_set(int n) { return (IndexSet{1} << n) - 1U; }

std::vector<int> members(IndexSet s) {
    std::vector<int> out;
    for (int k = 0; k < 32; ++k) {
        if ((s >> k) & 1U) out.push_back(k);
    }
    return out;
}

Complex subdeterminant(const Eigen::MatrixXcd& g, IndexSet rows, IndexSet cols) {
    const auto r = members(rows);
    const auto c = members(cols);
    if (r.empty()) return 1.0;
    Eigen::MatrixXcd sub(r.size(), c.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) sub(i, j) = g(r[i], c[j]);
    }
    return sub.determinant();
}

Eigen::MatrixXcd checked_inverse(const Eigen::MatrixXcd& metric, int n, const char* op) {
    if (metric.rows() != n || metric.cols() != n) {
        throw DomainError(kModule, op, "metric must be n x n");
    }
    const Eigen::LLT<Eigen::MatrixXcd> llt(metric);
    if (llt.info() != Eigen::Success) {
        throw DomainError(kModule, op, "metric is not positive definite");
    }
    return llt.solve(Eigen::MatrixXcd::Identity(n, n));
}

/// Top-degree coefficient of e_{I,J} ^ e_{K,L} for basis forms, K = I^c, L = J^c.
int complementary_sign(IndexSet I, IndexSet J, int n) {
    const IndexSet K = full_set(n) & ~I;
    const IndexSet L = full_set(n) & ~J;
    const int move = (popcount(J) * popcount(K)) % 2 == 0 ? 1 : -1;
    return move * merge_sign(I, K) * merge_sign(J, L);
}

}  // namespace

std::vector<IndexSet> index_sets(int n, int k) {
    std::vector<IndexSet> out;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return out;
    while (true) {
        IndexSet s = 0;
        for (int i : idx) s |= IndexSet{1} << i;
        out.push_back(s);
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
    return out;
}

PQForm::PQForm(int n, int p, int q) : n_(n), p_(p), q_(q) {
    if (n < 1 || n > kMaxDimension) {
        throw DomainError(kModule, "PQForm", "n must be in 1.." + std::to_string(kMaxDimension));
    }
    if (p < 0 || q < 0 || p > n || q > n) {
        throw DomainError(kModule, "PQForm", "bidegree out of range");
    }
    sets_p_ = index_sets(n, p);
    sets_q_ = index_sets(n, q);
    rank_p_.assign(std::size_t{1} << n, -1);
    rank_q_.assign(std::size_t{1} << n, -1);
    for (std::size_t i = 0; i < sets_p_.size(); ++i) rank_p_[sets_p_[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < sets_q_.size(); ++i) rank_q_[sets_q_[i]] = static_cast<int>(i);
    coeffs_.assign(sets_p_.size() * sets_q_.size(), 0.0);
}

std::size_t PQForm::slot(IndexSet I, IndexSet J) const {
    if (I >= rank_p_.size() || J >= rank_q_.size() || rank_p_[I] < 0 || rank_q_[J] < 0) {
        throw DomainError(kModule, "PQForm", "index set does not match the bidegree");
    }
    return static_cast<std::size_t>(rank_p_[I]) * sets_q_.size() + static_cast<std::size_t>(rank_q_[J]);
}

Complex PQForm::coeff(IndexSet I, IndexSet J) const { return coeffs_[slot(I, J)]; }
void PQForm::set(IndexSet I, IndexSet J, Complex value) { coeffs_[slot(I, J)] = value; }
void PQForm::add(IndexSet I, IndexSet J, Complex value) { coeffs_[slot(I, J)] += value; }

Complex PQForm::coeff(const std::vector<int>& I, const std::vector<int>& J) const {
    const auto canonical = [](std::vector<int> seq, IndexSet& mask) {
        int sign = 1;
        // Insertion sort, counting transpositions.
        for (std::size_t i = 1; i < seq.size(); ++i) {
            for (std::size_t j = i; j > 0 && seq[j - 1] > seq[j]; --j) {
                std::swap(seq[j - 1], seq[j]);
                sign = -sign;
            }
        }
        mask = 0;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (i > 0 && seq[i] == seq[i - 1]) return 0;
            mask |= IndexSet{1} << seq[i];
        }
        return sign;
    };
    IndexSet mi = 0;
    IndexSet mj = 0;
    const int si = canonical(I, mi);
    const int sj = canonical(J, mj);
    if (si == 0 || sj == 0) return 0.0;
    return static_cast<double>(si * sj) * coeff(mi, mj);
}

PQForm PQForm::conjugate() const {
    // conj(c dz^I ^ dzbar^J) = conj(c) (-1)^{pq} dz^J ^ dzbar^I.
    PQForm out(n_, q_, p_);
    const double sign = (p_ * q_) % 2 == 0 ? 1.0 : -1.0;
    for (IndexSet I : sets_p_) {
        for (IndexSet J : sets_q_) out.set(J, I, sign * std::conj(coeff(I, J)));
    }
    return out;
}

bool PQForm::is_real(double tolerance) const {
    return p_ == q_ && max_abs_diff(conjugate()) <= tolerance;
}

void PQForm::require_same_type(const PQForm& other, const char* op) const {
    if (n_ != other.n_ || p_ != other.p_ || q_ != other.q_) {
        throw DomainError(kModule, op, "forms of different type");
    }
}

double PQForm::max_abs_diff(const PQForm& other) const {
    require_same_type(other, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) m = std::max(m, std::abs(coeffs_[i] - other.coeffs_[i]));
    return m;
}

PQForm& PQForm::operator+=(const PQForm& other) {
    require_same_type(other, "operator+");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

PQForm& PQForm::operator-=(const PQForm& other) {
    require_same_type(other, "operator-");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

PQForm& PQForm::operator*=(Complex s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

PQForm wedge(const PQForm& a, const PQForm& b) {
    if (a.n() != b.n()) throw DomainError(kModule, "wedge", "forms on different C^n");
    const int n = a.n();
    if (a.p() + b.p() > n || a.q() + b.q() > n) {
        throw DomainError(kModule, "wedge", "degree overflow");
    }
    PQForm out(n, a.p() + b.p(), a.q() + b.q());
    const int move = (a.q() * b.p()) % 2 == 0 ? 1 : -1;
    for (IndexSet I : a.holomorphic_sets()) {
        for (IndexSet J : a.antiholomorphic_sets()) {
            const Complex ca = a.coeff(I, J);
            if (ca == 0.0) continue;
            for (IndexSet K : b.holomorphic_sets()) {
                if (I & K) continue;
                for (IndexSet L : b.antiholomorphic_sets()) {
                    if (J & L) continue;
                    const Complex cb = b.coeff(K, L);
                    if (cb == 0.0) continue;
                    const int sign = move * merge_sign(I, K) * merge_sign(J, L);
                    out.add(I | K, J | L, static_cast<double>(sign) * ca * cb);
                }
            }
        }
    }
    return out;
}

PQForm power(const PQForm& a, int k) {
    if (k < 0) throw DomainError(kModule, "power", "negative exponent");
    PQForm out(a.n(), 0, 0);
    out.set(0, 0, 1.0);
    for (int i = 0; i < k; ++i) out = wedge(out, a);
    return out;
}

PQForm hermitian_form(const Eigen::MatrixXcd& h) {
    const int n = static_cast<int>(h.rows());
    PQForm out(n, 1, 1);
    const Complex half_i(0.0, 0.5);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) out.set(IndexSet{1} << j, IndexSet{1} << k, half_i * h(j, k));
    }
    return out;
}

PQForm volume_form(const Eigen::MatrixXcd& metric) {
    const int n = static_cast<int>(metric.rows());
    return (1.0 / std::tgamma(n + 1.0)) * power(hermitian_form(metric), n);
}

Complex inner_product(const PQForm& a, const PQForm& b, const Eigen::MatrixXcd& metric) {
    if (a.n() != b.n() || a.p() != b.p() || a.q() != b.q()) {
        throw DomainError(kModule, "inner_product", "forms of different type");
    }
    const int n = a.n();
    const Eigen::MatrixXcd inv = checked_inverse(metric, n, "inner_product");
    // <dz^j, dz^k> = 2 (h^{-1})_{kj},  <dzbar^j, dzbar^k> = 2 (h^{-1})_{jk}.
    const Eigen::MatrixXcd g10 = 2.0 * inv.transpose();
    const Eigen::MatrixXcd g01 = 2.0 * inv;
    Complex total = 0.0;
    for (IndexSet I : a.holomorphic_sets()) {
        for (IndexSet J : a.antiholomorphic_sets()) {
            const Complex ca = a.coeff(I, J);
            if (ca == 0.0) continue;
            for (IndexSet K : b.holomorphic_sets()) {
                const Complex gi = subdeterminant(g10, I, K);
                for (IndexSet L : b.antiholomorphic_sets()) {
                    total += ca * std::conj(b.coeff(K, L)) * gi * subdeterminant(g01, J, L);
                }
            }
        }
    }
    return total;
}

PQForm hodge_star(const PQForm& a, const Eigen::MatrixXcd& metric) {
    const int n = a.n();
    checked_inverse(metric, n, "hodge_star");
    const PQForm psi = a.conjugate();  // type (s, r) for a of type (r, s)
    const int s = psi.p();
    const int r = psi.q();
    const Complex v0 = volume_form(metric).coeff(full_set(n), full_set(n));

    PQForm out(n, n - s, n - r);
    // For each basis phi = e_{I,J} of type (s, r), phi ^ X only sees the
    // complementary coefficient of X.
    for (IndexSet I : index_sets(n, s)) {
        for (IndexSet J : index_sets(n, r)) {
            PQForm phi(n, s, r);
            phi.set(I, J, 1.0);
            const Complex g = inner_product(phi, psi, metric);
            const int w = complementary_sign(I, J, n);
            out.set(full_set(n) & ~I, full_set(n) & ~J, g * v0 / static_cast<double>(w));
        }
    }
    return out;
}

double hat_identity_residual(const Eigen::MatrixXcd& H, int n) {
    if (n < 3 || H.rows() != n || H.cols() != n) {
        throw DomainError(kModule, "hat_identity_residual", "H must be n x n with n >= 3");
    }
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const PQForm omega = hermitian_form(id);
    const PQForm h = hermitian_form(H);
    const PQForm lhs = (1.0 / std::tgamma(static_cast<double>(n))) *
                       hodge_star(wedge(h, power(omega, n - 2)), id);
    const PQForm rhs = (1.0 / (n - 1.0)) * (H.trace() * omega - h);
    return lhs.max_abs_diff(rhs);
}

double restricted_ratio(const PQForm& psi, const Eigen::VectorXcd& normal) {
    const int n = psi.n();
    const int m = n - 1;
    const Eigen::VectorXcd nu = normal.normalized();

    // For unitary U = [nu | V], the minor of V without row k is
    // (-1)^k det(U) conj(nu_k); the unit phase det(U) cancels below.
    const auto& sets = psi.holomorphic_sets();
    const IndexSet all = (IndexSet{1} << n) - 1U;
    std::vector<Complex> minors(sets.size());
    for (std::size_t a = 0; a < sets.size(); ++a) {
        const int k = std::countr_zero(static_cast<unsigned>(all & ~sets[a]));
        minors[a] = (k % 2 == 0 ? 1.0 : -1.0) * std::conj(nu(k));
    }
    Complex total = 0.0;
    for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = 0; b < sets.size(); ++b) {
            total += psi.coeff(sets[a], sets[b]) * minors[a] * std::conj(minors[b]);
        }
    }
    // vol_V = (i/2)^m (-1)^{m(m-1)/2} dw^{1..m} ^ dwbar^{1..m}.
    const Complex vol = std::pow(Complex(0.0, 0.5), m) * ((m * (m - 1) / 2) % 2 == 0 ? 1.0 : -1.0);
    return (total / vol).real();
}

double weak_positivity_margin(const PQForm& psi, int samples, std::uint64_t seed) {
    const int n = psi.n();
    if (psi.p() != n - 1 || psi.q() != n - 1) {
        throw DomainError(kModule, "weak_positivity_margin", "Psi must have bidegree (n-1, n-1)");
    }
    if (samples < 1) throw DomainError(kModule, "weak_positivity_margin", "samples must be >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const auto random_normal = [&] {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        return Eigen::VectorXcd(v.normalized());
    };

    std::vector<std::pair<double, Eigen::VectorXcd>> trial;
    trial.reserve(static_cast<std::size_t>(samples) + static_cast<std::size_t>(n));
    // Coordinate hyperplanes first, then random ones.
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
        e(i) = 1.0;
        trial.emplace_back(restricted_ratio(psi, e), e);
    }
    for (int s = 0; s < samples; ++s) {
        auto v = random_normal();
        trial.emplace_back(restricted_ratio(psi, v), v);
    }
    std::sort(trial.begin(), trial.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    constexpr int kRefined = 4;
    constexpr int kSteps = 40;
    constexpr double kFd = 1e-6;
    double best = trial.front().first;
    for (int t = 0; t < std::min<int>(kRefined, static_cast<int>(trial.size())); ++t) {
        auto [value, eta] = trial[static_cast<std::size_t>(t)];
        for (int step = 0; step < kSteps; ++step) {
            Eigen::VectorXcd grad(n);
            for (int i = 0; i < n; ++i) {
                for (int part = 0; part < 2; ++part) {
                    const Complex dir = part == 0 ? Complex(kFd, 0.0) : Complex(0.0, kFd);
                    Eigen::VectorXcd plus = eta;
                    Eigen::VectorXcd minus = eta;
                    plus(i) += dir;
                    minus(i) -= dir;
                    const double d = (restricted_ratio(psi, plus) - restricted_ratio(psi, minus)) / (2 * kFd);
                    if (part == 0) {
                        grad(i).real(d);
                    } else {
                        grad(i).imag(d);
                    }
                }
            }
            const double gnorm = grad.norm();
            if (gnorm < 1e-14) break;
            bool improved = false;
            for (double len = 0.5; len > 1e-12; len *= 0.5) {
                const Eigen::VectorXcd cand = (eta - (len / gnorm) * grad).normalized();
                const double cv = restricted_ratio(psi, cand);
                if (cv < value) {
                    eta = cand;
                    value = cv;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        best = std::min(best, value);
    }
    return best;
}

EquivalenceReport equivalence_suite(const Eigen::MatrixXcd& H, int n, double tolerance, int samples,
                                    std::uint64_t seed) {
    if (n < 3 || H.rows() != n || H.cols() != n) {
        throw DomainError(kModule, "equivalence_suite", "H must be n x n with n >= 3");
    }
    const Eigen::MatrixXcd Hs = 0.5 * (H + H.adjoint());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hs, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd lambda = es.eigenvalues();

    EquivalenceReport rep;
    const auto hat = eigencone::hat_transform(
        eigencone::Spectrum(std::vector<double>(lambda.data(), lambda.data() + n)));
    rep.min_hat = *std::min_element(hat.values().begin(), hat.values().end());
    rep.hyperplane_analytic = lambda.sum() - lambda.maxCoeff();

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    const double trace = Hs.trace().real();
    rep.hyperplane_sampled = std::numeric_limits<double>::infinity();
    for (int s = 0; s < std::max(1, samples); ++s) {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        v.normalize();
        rep.hyperplane_sampled = std::min(rep.hyperplane_sampled, trace - (v.adjoint() * Hs * v)(0).real());
    }

    const PQForm omega = hermitian_form(Eigen::MatrixXcd::Identity(n, n));
    const PQForm psi = wedge(hermitian_form(Hs), power(omega, n - 2));
    rep.weak_margin = weak_positivity_margin(psi, samples, seed) / std::tgamma(n - 1.0);

    rep.eigenvalue_verdict = rep.min_hat >= -tolerance;
    rep.hyperplane_verdict = rep.hyperplane_analytic >= -tolerance;
    rep.hyperplane_sampled_verdict = rep.hyperplane_sampled >= -tolerance;
    rep.weak_positivity_verdict = rep.weak_margin >= -tolerance;
    return rep;
}

}  // namespace n1ma::forms
