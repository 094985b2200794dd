#ifndef METASTABLE_MARKOV_HPP
#define METASTABLE_MARKOV_HPP

#include <cstddef>
#include <vector>

#include "metastable/driving.hpp"

namespace metastable {

// Small dense matrix, row-major.  Chains here have a handful of states, so
// nothing heavier is warranted in the public surface.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix operator*(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    std::vector<double> operator*(const std::vector<double>& v) const;

    double max_abs() const;
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// m-state Markov chain in a random environment.  The per-fiber leak rates
// beta[i][j] (transitions allowed only between neighbors |i-j| = 1) are read
// from the driving system's value vectors; epsilon scales them into one-step
// transition probabilities.
//
// Value-vector layouts:
//   two_state:  component order (beta_L, beta_R) given by two indices, so the
//               paired-tent identification beta_L = b, beta_R = a is just
//               (idx_beta_L, idx_beta_R) = (1, 0) on an (a, b) driving.
//   chain:      2m components, rows (left-leak_i, right-leak_i) for each
//               state i; left-leak of state 1 and right-leak of state m are
//               required to be zero.
class EnvChain {
public:
    static EnvChain two_state(const DrivingSystem& ds, double epsilon,
                              std::size_t idx_beta_L = 0, std::size_t idx_beta_R = 1);
    static EnvChain chain(const DrivingSystem& ds, std::size_t m, double epsilon);

    std::size_t m() const { return m_; }
    double epsilon() const { return epsilon_; }
    const DrivingSystem& driving() const { return ds_; }

    /// Leak-rate table at fiber k: beta(i, j) with i, j zero-based states.
    Matrix beta(long k) const;
    /// Exact P-average of the leak-rate table.
    Matrix beta_average() const;
    /// Exact P-supremum of one leak rate (finite range makes this a max).
    double beta_sup(std::size_t i, std::size_t j) const;

    /// Shorthands for the two-state chain.
    double beta_L(long k) const { return beta(k)(0, 1); }
    double beta_R(long k) const { return beta(k)(1, 0); }
    double gamma(long k) const { return beta_L(k) + beta_R(k); }

    /// Same chain at a different perturbation size.
    EnvChain with_epsilon(double epsilon) const {
        EnvChain c = *this;
        c.epsilon_ = epsilon;
        return c;
    }

private:
    EnvChain() = default;

    DrivingSystem ds_;  // owned copy
    std::size_t m_ = 2;
    double epsilon_ = 0.0;
    bool layout_two_state_ = true;
    std::size_t idx_L_ = 0, idx_R_ = 1;
};

/// Column-stochastic one-step transition matrix at fiber k:
/// M = I - eps*Delta + eps*N.  Throws if epsilon pushes a diagonal below 0.
Matrix transition_matrix(const EnvChain& chain, long fiber_k);

/// Cocycle product M_{sigma^-1} ... M_{sigma^-n} ending at fiber_k (identity
/// for n = 0), evaluated by direct multiplication.
Matrix backward_product(const EnvChain& chain, long fiber_k, long n);

/// Entrywise closed form of the same backward product for 2-state chains:
/// off-diagonal entries are eps * sum_k beta_{*,sigma^{-k-1}} prod_{i<k}
/// (1 - eps*gamma_{sigma^{-i-1}}).  Independent cross-check route for
/// backward_product.
Matrix backward_product_closed_form(const EnvChain& chain, long fiber_k, long n);

struct PiSeriesResult {
    double value;
    long terms;
    double tail_bound;  // certified remainder of the truncated series
};

/// Truncated weight series with a certified geometric tail bound.  Throws
/// window_error (carrying the required length) if the driving window cannot
/// certify tail <= tail_tol.
PiSeriesResult pi_series(const EnvChain& chain, long fiber_k, double tail_tol);

/// Averaged limit of the weight series: int beta_R dP / int (beta_L+beta_R) dP.
double pi_limit(const EnvChain& chain);

/// n-step iterate of p <- p(1 - eps*gamma) + eps*beta_R along the orbit,
/// starting n fibers before fiber_k.  Independent oracle for pi_series.
double p_recursion(const EnvChain& chain, long fiber_k, long n, double p_start);

/// Splits the transition matrix as M = I - eps*Delta + eps*N: Delta diagonal
/// with row sums of beta, N the transposed off-diagonal rates.  The result
/// does not depend on epsilon.
std::pair<Matrix, Matrix> delta_n_decompose(const EnvChain& chain, long fiber_k);

/// Exact P-averages of Delta and N.
std::pair<Matrix, Matrix> delta_n_average(const EnvChain& chain);

/// Unique nonnegative kernel vector of I - avg(Delta)^{-1} avg(N), normalized
/// to sum 1.  Handles the absorbing shortcut (exactly one zero diagonal in
/// avg(Delta) makes that state absorbing); throws on a singular average with
/// two or more zero diagonals or on an ambiguous kernel.
std::vector<double> solve_v0(const Matrix& delta_avg, const Matrix& n_avg);

/// Convenience: v0 of the chain from exactly averaged Delta and N.
std::vector<double> chain_v0(const EnvChain& chain);

/// Closed form for m = 2: (avg beta_R, avg beta_L) / avg gamma.
std::vector<double> two_state_v0_closed_form(const EnvChain& chain);

struct ChainLimitRow {
    double epsilon;
    long fiber;
    long n;
    std::size_t col;
    double max_dist_to_v0;
    bool saturation_ok;  // n >= 20 / (eps * min positive diagonal of avg Delta)
};

/// Distance of every backward-product column to v0, per epsilon and fiber.
/// The chain is rebuilt per epsilon from the same driving/layout.
std::vector<ChainLimitRow> chain_limit_check(const EnvChain& proto,
                                             const std::vector<double>& eps_list,
                                             long n, const std::vector<long>& fibers);

}  // namespace metastable

#endif
