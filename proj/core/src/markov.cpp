#include "metastable/markov.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace metastable {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_)
        throw validation_error("matrix: dimension mismatch in product");
    Matrix out(rows_, rhs.cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j)
                out(i, j) += a * rhs(k, j);
        }
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw validation_error("matrix: dimension mismatch in difference");
    Matrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

std::vector<double> Matrix::operator*(const std::vector<double>& v) const {
    if (v.size() != cols_)
        throw validation_error("matrix: dimension mismatch in mat-vec");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

EnvChain EnvChain::two_state(const DrivingSystem& ds, double epsilon,
                             std::size_t idx_beta_L, std::size_t idx_beta_R) {
    if (epsilon < 0.0)
        throw validation_error("chain: epsilon must be >= 0");
    if (idx_beta_L >= ds.value_dim() || idx_beta_R >= ds.value_dim())
        throw validation_error("chain: beta component index out of range");
    EnvChain c;
    c.ds_ = ds;
    c.m_ = 2;
    c.epsilon_ = epsilon;
    c.layout_two_state_ = true;
    c.idx_L_ = idx_beta_L;
    c.idx_R_ = idx_beta_R;
    return c;
}

EnvChain EnvChain::chain(const DrivingSystem& ds, std::size_t m, double epsilon) {
    if (m < 2)
        throw validation_error("chain: m must be >= 2");
    if (epsilon < 0.0)
        throw validation_error("chain: epsilon must be >= 0");
    if (ds.value_dim() != 2 * m)
        throw validation_error("chain: driving value vectors must have 2m components");
    // boundary states must not leak outward anywhere in the (finite) range
    auto check = [&](const std::vector<double>& v) {
        if (v.front() != 0.0 || v.back() != 0.0)
            throw validation_error("chain: leak beyond the end states");
    };
    if (ds.kind() == DrivingKind::rotation)
        for (const Arc& a : ds.arcs()) check(a.values);
    else
        for (const Symbol& s : ds.alphabet()) check(s.values);

    EnvChain c;
    c.ds_ = ds;
    c.m_ = m;
    c.epsilon_ = epsilon;
    c.layout_two_state_ = false;
    return c;
}

Matrix EnvChain::beta(long k) const {
    const std::vector<double>& v = ds_.fiber_params(k);
    Matrix b(m_, m_, 0.0);
    if (layout_two_state_) {
        b(0, 1) = v[idx_L_];
        b(1, 0) = v[idx_R_];
    } else {
        for (std::size_t i = 0; i < m_; ++i) {
            if (i > 0) b(i, i - 1) = v[2 * i];
            if (i + 1 < m_) b(i, i + 1) = v[2 * i + 1];
        }
    }
    return b;
}

Matrix EnvChain::beta_average() const {
    Matrix b(m_, m_, 0.0);
    if (layout_two_state_) {
        b(0, 1) = ds_.average_observable(idx_L_);
        b(1, 0) = ds_.average_observable(idx_R_);
    } else {
        for (std::size_t i = 0; i < m_; ++i) {
            if (i > 0) b(i, i - 1) = ds_.average_observable(2 * i);
            if (i + 1 < m_) b(i, i + 1) = ds_.average_observable(2 * i + 1);
        }
    }
    return b;
}

double EnvChain::beta_sup(std::size_t i, std::size_t j) const {
    if (layout_two_state_) {
        if (i == 0 && j == 1) return ds_.sup_observable(idx_L_);
        if (i == 1 && j == 0) return ds_.sup_observable(idx_R_);
        return 0.0;
    }
    if (j + 1 == i) return ds_.sup_observable(2 * i);
    if (j == i + 1) return ds_.sup_observable(2 * i + 1);
    return 0.0;
}

namespace {

Matrix decompose_delta(const Matrix& beta) {
    const std::size_t m = beta.rows();
    Matrix delta(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) row += beta(i, j);
        delta(i, i) = row;
    }
    return delta;
}

Matrix decompose_n(const Matrix& beta) {
    const std::size_t m = beta.rows();
    Matrix n(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j) n(i, j) = beta(j, i);
    return n;
}

// A-priori term count making the geometric certificate close at the averaged
// rate; used only to size the window hint in the truncation error message.
long estimate_required_terms(double eps, double gamma_avg, double beta_sup,
                             double tol) {
    const double denom = 1.0 - std::exp(-eps * gamma_avg / 2.0);
    if (beta_sup == 0.0 || denom <= 0.0) return 0;
    const double t = std::log(eps * beta_sup / (tol * denom)) / (eps * gamma_avg / 2.0);
    return t > 0.0 ? static_cast<long>(std::ceil(t)) : 0;
}

Matrix assemble_transition(const Matrix& beta, double eps) {
    const std::size_t m = beta.rows();
    Matrix M = Matrix::identity(m);
    const Matrix delta = decompose_delta(beta);
    const Matrix n = decompose_n(beta);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) {
                M(i, i) = 1.0 - eps * delta(i, i);
                if (M(i, i) < 0.0)
                    throw validation_error(
                        "transition_matrix: epsilon too large, negative diagonal");
            } else if (n(i, j) != 0.0) {
                M(i, j) = eps * n(i, j);
            }
        }
    return M;
}

}  // namespace

Matrix transition_matrix(const EnvChain& chain, long fiber_k) {
    return assemble_transition(chain.beta(fiber_k), chain.epsilon());
}

Matrix backward_product(const EnvChain& chain, long fiber_k, long n) {
    if (n < 0)
        throw validation_error("backward_product: n must be >= 0");
    Matrix acc = Matrix::identity(chain.m());
    for (long j = 1; j <= n; ++j)
        acc = acc * transition_matrix(chain, fiber_k - j);
    return acc;
}

Matrix backward_product_closed_form(const EnvChain& chain, long fiber_k, long n) {
    if (chain.m() != 2)
        throw validation_error("closed form: only defined for 2-state chains");
    const double eps = chain.epsilon();
    double sum_l = 0.0, sum_r = 0.0, prod = 1.0;
    for (long t = 0; t < n; ++t) {
        const long fiber = fiber_k - t - 1;
        sum_l += chain.beta_L(fiber) * prod;
        sum_r += chain.beta_R(fiber) * prod;
        prod *= 1.0 - eps * chain.gamma(fiber);
    }
    Matrix p(2, 2);
    p(0, 0) = 1.0 - eps * sum_l;
    p(1, 0) = eps * sum_l;
    p(0, 1) = eps * sum_r;
    p(1, 1) = 1.0 - eps * sum_r;
    return p;
}

PiSeriesResult pi_series(const EnvChain& chain, long fiber_k, double tail_tol) {
    if (chain.m() != 2)
        throw validation_error("pi_series: only defined for 2-state chains");
    if (!(tail_tol > 0.0))
        throw validation_error("pi_series: tail_tol must be positive");
    const double eps = chain.epsilon();
    const Matrix avg = chain.beta_average();
    const double gamma_avg = avg(0, 1) + avg(1, 0);
    if (!(gamma_avg > 0.0))
        throw validation_error("pi_series: int gamma dP must be positive");
    const double beta_r_sup = chain.beta_sup(1, 0);

    // Geometric tail certificate: remaining terms are bounded by
    // eps * sup(beta_R) * prod_so_far / (1 - e^{-eps*gamma_avg/2}), the
    // half-rate guarding the Birkhoff fluctuation of the orbit products.
    const double denom = 1.0 - std::exp(-eps * gamma_avg / 2.0);
    const long hard_cap = 100'000'000;

    double value = 0.0, prod = 1.0;
    long t = 0;
    while (true) {
        const double tail = (beta_r_sup == 0.0 || eps == 0.0)
                                ? 0.0
                                : eps * beta_r_sup * prod / denom;
        if (tail <= tail_tol)
            return {value, t, tail};
        if (t >= hard_cap)
            throw validation_error("pi_series: certificate did not close (gamma "
                                   "vanishes along the sampled orbit?)");
        const long fiber = fiber_k - t - 1;
        if (fiber < -chain.driving().window_radius())
            throw window_error("pi_series: window too small for certified truncation",
                               estimate_required_terms(eps, gamma_avg, beta_r_sup,
                                                       tail_tol));
        value += eps * chain.beta_R(fiber) * prod;
        prod *= 1.0 - eps * chain.gamma(fiber);
        ++t;
    }
}

double pi_limit(const EnvChain& chain) {
    const Matrix avg = chain.beta_average();
    const double denom = avg(0, 1) + avg(1, 0);
    if (denom == 0.0)
        throw validation_error("pi_limit: int (beta_L + beta_R) dP vanishes");
    return avg(1, 0) / denom;
}

double p_recursion(const EnvChain& chain, long fiber_k, long n, double p_start) {
    if (!(p_start >= 0.0 && p_start <= 1.0))
        throw validation_error("p_recursion: p_start must lie in [0,1]");
    if (n < 0)
        throw validation_error("p_recursion: n must be >= 0");
    const double eps = chain.epsilon();
    double p = p_start;
    for (long j = n; j >= 1; --j) {
        const long fiber = fiber_k - j;
        p = p * (1.0 - eps * chain.gamma(fiber)) + eps * chain.beta_R(fiber);
    }
    return p;
}

std::pair<Matrix, Matrix> delta_n_decompose(const EnvChain& chain, long fiber_k) {
    const Matrix b = chain.beta(fiber_k);
    return {decompose_delta(b), decompose_n(b)};
}

std::pair<Matrix, Matrix> delta_n_average(const EnvChain& chain) {
    const Matrix b = chain.beta_average();
    return {decompose_delta(b), decompose_n(b)};
}

std::vector<double> solve_v0(const Matrix& delta_avg, const Matrix& n_avg) {
    const std::size_t m = delta_avg.rows();
    if (m != delta_avg.cols() || n_avg.rows() != m || n_avg.cols() != m)
        throw validation_error("solve_v0: matrices must be square of equal size");

    std::size_t zero_diag = 0, absorbing = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (delta_avg(i, i) == 0.0) {
            ++zero_diag;
            absorbing = i;
        }
    if (zero_diag == 1) {
        // that state never leaks: the limit concentrates there
        std::vector<double> v(m, 0.0);
        v[absorbing] = 1.0;
        return v;
    }
    if (zero_diag > 1)
        throw validation_error("solve_v0: averaged Delta is singular (multiple "
                               "absorbing states)");

    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                  static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -=
                n_avg(i, j) / delta_avg(i, i);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * sv(0);
    std::size_t kernel_dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol) ++kernel_dim;
    if (kernel_dim != 1)
        throw validation_error("solve_v0: kernel dimension is not 1");

    Eigen::VectorXd v = svd.matrixV().col(static_cast<Eigen::Index>(m) - 1);
    const double sum = v.sum();
    if (std::abs(sum) < 1e-12)
        throw validation_error("solve_v0: kernel vector has vanishing total mass");
    v /= sum;
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        double x = v(static_cast<Eigen::Index>(i));
        if (x < 0.0) {
            if (x < -1e-12)
                throw validation_error("solve_v0: kernel vector is not nonnegative");
            x = 0.0;
        }
        out[i] = x;
    }
    return out;
}

std::vector<double> chain_v0(const EnvChain& chain) {
    auto [delta, n] = delta_n_average(chain);
    return solve_v0(delta, n);
}

std::vector<double> two_state_v0_closed_form(const EnvChain& chain) {
    if (chain.m() != 2)
        throw validation_error("closed form v0: only defined for 2-state chains");
    const Matrix avg = chain.beta_average();
    const double beta_l = avg(0, 1), beta_r = avg(1, 0);
    const double gamma = beta_l + beta_r;
    if (gamma == 0.0)
        throw validation_error("closed form v0: averaged gamma vanishes");
    return {beta_r / gamma, beta_l / gamma};
}

std::vector<ChainLimitRow> chain_limit_check(const EnvChain& proto,
                                             const std::vector<double>& eps_list,
                                             long n, const std::vector<long>& fibers) {
    const std::vector<double> v0 = chain_v0(proto);
    auto [delta_avg, n_avg] = delta_n_average(proto);
    double min_pos_diag = 0.0;
    for (std::size_t i = 0; i < proto.m(); ++i)
        if (delta_avg(i, i) > 0.0)
            min_pos_diag = (min_pos_diag == 0.0) ? delta_avg(i, i)
                                                 : std::min(min_pos_diag, delta_avg(i, i));

    std::vector<ChainLimitRow> rows;
    for (double eps : eps_list) {
        const EnvChain chain = proto.with_epsilon(eps);
        const bool saturated =
            (eps > 0.0 && min_pos_diag > 0.0) &&
            (static_cast<double>(n) >= 20.0 / (eps * min_pos_diag));
        for (long fiber : fibers) {
            const Matrix p = backward_product(chain, fiber, n);
            for (std::size_t col = 0; col < chain.m(); ++col) {
                double dist = 0.0;
                for (std::size_t row = 0; row < chain.m(); ++row)
                    dist = std::max(dist, std::abs(p(row, col) - v0[row]));
                rows.push_back({eps, fiber, n, col, dist, saturated});
            }
        }
    }
    return rows;
}

}  // namespace metastable
