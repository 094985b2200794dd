#include "metastable/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace metastable {

Density::Density(int grid_n, std::vector<double> values)
    : grid_n_(grid_n), values_(std::move(values)) {
    if (grid_n < 2)
        throw validation_error("density: grid_n must be >= 2");
    if (values_.size() != static_cast<std::size_t>(grid_n))
        throw validation_error("density: values length must equal grid_n");
}

Density Density::constant(int grid_n, double value) {
    return Density(grid_n, std::vector<double>(static_cast<std::size_t>(grid_n), value));
}

namespace {

// Pairwise (tree) summation: better rounding than a running sum, and exact for
// power-of-two runs of equal values, which keeps block masses on aligned grids
// bit-identical to their defining weights.
double pairwise_sum(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return x[0];
    if (n == 2) return x[0] + x[1];
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace

Density Density::block_constant(int grid_n, const std::vector<double>& boundaries,
                                const std::vector<double>& block_values) {
    if (boundaries.size() != block_values.size() + 1)
        throw validation_error("block_constant: need one boundary more than values");
    std::vector<double> v(static_cast<std::size_t>(grid_n));
    const double h = 2.0 / grid_n;
    for (int i = 0; i < grid_n; ++i) {
        const double center = -1.0 + (i + 0.5) * h;
        std::size_t blk = 0;
        while (blk + 1 < block_values.size() && center >= boundaries[blk + 1]) ++blk;
        v[static_cast<std::size_t>(i)] = block_values[blk];
    }
    return Density(grid_n, std::move(v));
}

double Density::integral() const {
    return pairwise_sum(values_.data(), values_.size()) * cell_width();
}

double Density::l1_norm() const {
    std::vector<double> mag(values_.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(values_[i]);
    return pairwise_sum(mag.data(), mag.size()) * cell_width();
}

double Density::variation() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i)
        s += std::abs(values_[i + 1] - values_[i]);
    return s;
}

double Density::integral_on(double lo, double hi) const {
    const double h = cell_width();
    std::vector<double> terms;
    terms.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double a = -1.0 + static_cast<double>(i) * h;
        const double b = (i + 1 == values_.size()) ? 1.0 : -1.0 + static_cast<double>(i + 1) * h;
        const double ov = std::min(b, hi) - std::max(a, lo);
        if (ov > 0.0) terms.push_back(values_[i] * ov);
    }
    return pairwise_sum(terms.data(), terms.size());
}

Density& Density::operator*=(double c) {
    for (double& x : values_) x *= c;
    return *this;
}

Density& Density::operator-=(const Density& other) {
    if (other.grid_n_ != grid_n_)
        throw validation_error("density: grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

double Density::l1_distance(const Density& other) const {
    if (other.grid_n_ != grid_n_)
        throw validation_error("density: grid mismatch");
    std::vector<double> diff(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
        diff[i] = std::abs(values_[i] - other.values_[i]);
    return pairwise_sum(diff.data(), diff.size()) * cell_width();
}

UlamOperator UlamOperator::build(const PiecewiseLinearMap& map, int grid_n) {
    if (grid_n < 2)
        throw validation_error("ulam_matrix: grid_n must be >= 2");
    const double h = 2.0 / grid_n;
    auto node = [&](int i) { return (i == grid_n) ? 1.0 : -1.0 + i * h; };

    UlamOperator op;
    op.grid_n_ = grid_n;
    op.col_ptr_.assign(static_cast<std::size_t>(grid_n) + 1, 0);

    // accumulate one column at a time; a cell's image meets O(branches) cells
    std::vector<int> rows;
    std::vector<double> vals;
    const auto& branches = map.branches();
    std::size_t first_branch = 0;

    for (int j = 0; j < grid_n; ++j) {
        const double xj = node(j), xj1 = node(j + 1);
        rows.clear();
        vals.clear();
        while (first_branch < branches.size() && branches[first_branch].hi <= xj)
            ++first_branch;
        for (std::size_t bi = first_branch; bi < branches.size(); ++bi) {
            const AffineBranch& br = branches[bi];
            if (br.lo >= xj1) break;
            const double p = std::max(br.lo, xj);
            const double q = std::min(br.hi, xj1);
            if (!(q > p)) continue;
            double y0 = br(p), y1 = br(q);
            if (y0 > y1) std::swap(y0, y1);
            const double inv_mass = 1.0 / (std::abs(br.slope) * h);
            int i = std::clamp(static_cast<int>((y0 + 1.0) / h), 0, grid_n - 1);
            while (i < grid_n && node(i) < y1) {
                const double ov = std::min(node(i + 1), y1) - std::max(node(i), y0);
                if (ov > 0.0) {
                    rows.push_back(i);
                    vals.push_back(ov * inv_mass);
                }
                ++i;
            }
        }
        // merge duplicate rows within the column
        std::vector<std::size_t> order(rows.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return rows[a] < rows[b]; });
        for (std::size_t k = 0; k < order.size(); ++k) {
            const int r = rows[order[k]];
            const double v = vals[order[k]];
            if (!op.row_idx_.empty() &&
                op.col_ptr_[static_cast<std::size_t>(j)] <
                    static_cast<std::int64_t>(op.row_idx_.size()) &&
                op.row_idx_.back() == r) {
                op.values_.back() += v;
            } else {
                op.row_idx_.push_back(r);
                op.values_.push_back(v);
            }
        }
        op.col_ptr_[static_cast<std::size_t>(j) + 1] =
            static_cast<std::int64_t>(op.row_idx_.size());
    }
    return op;
}

Density UlamOperator::apply(const Density& f) const {
    if (f.grid_n() != grid_n_)
        throw validation_error("apply: grid mismatch");
    std::vector<double> out(static_cast<std::size_t>(grid_n_), 0.0);
    apply_inplace(f.values(), out);
    return Density(grid_n_, std::move(out));
}

void UlamOperator::apply_inplace(const std::vector<double>& in,
                                 std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(grid_n_), 0.0);
    for (int j = 0; j < grid_n_; ++j) {
        const double fj = in[static_cast<std::size_t>(j)];
        if (fj == 0.0) continue;
        for (std::int64_t k = col_ptr_[static_cast<std::size_t>(j)];
             k < col_ptr_[static_cast<std::size_t>(j) + 1]; ++k)
            out[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(k)])] +=
                values_[static_cast<std::size_t>(k)] * fj;
    }
}

double UlamOperator::entry(int row, int col) const {
    for (std::int64_t k = col_ptr_[static_cast<std::size_t>(col)];
         k < col_ptr_[static_cast<std::size_t>(col) + 1]; ++k)
        if (row_idx_[static_cast<std::size_t>(k)] == row)
            return values_[static_cast<std::size_t>(k)];
    return 0.0;
}

double UlamOperator::column_sum(int col) const {
    double s = 0.0;
    for (std::int64_t k = col_ptr_[static_cast<std::size_t>(col)];
         k < col_ptr_[static_cast<std::size_t>(col) + 1]; ++k)
        s += values_[static_cast<std::size_t>(k)];
    return s;
}

std::vector<std::vector<double>> UlamOperator::to_dense() const {
    std::vector<std::vector<double>> d(
        static_cast<std::size_t>(grid_n_),
        std::vector<double>(static_cast<std::size_t>(grid_n_), 0.0));
    for (int j = 0; j < grid_n_; ++j)
        for (std::int64_t k = col_ptr_[static_cast<std::size_t>(j)];
             k < col_ptr_[static_cast<std::size_t>(j) + 1]; ++k)
            d[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(k)])]
             [static_cast<std::size_t>(j)] = values_[static_cast<std::size_t>(k)];
    return d;
}

LyReport verify_ly(const std::vector<PiecewiseLinearMap>& cocycle, int trials,
                   int grid_n, std::uint64_t seed) {
    if (cocycle.empty())
        throw validation_error("verify_ly: empty cocycle");
    std::vector<UlamOperator> ops;
    ops.reserve(cocycle.size());
    for (const auto& m : cocycle) ops.push_back(UlamOperator::build(m, grid_n));

    std::mt19937_64 rng(seed);
    LyReport report;
    bool first = true;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(grid_n));
        for (double& x : v) x = 2.0 * uniform_unit(rng) - 1.0;
        Density f(grid_n, v);
        const double var0 = f.variation();
        const double norm_leb_bar = 0.5 * f.l1_norm();  // normalized Lebesgue

        Density g = f;
        double pow34 = 1.0;
        for (std::size_t step = 1; step <= ops.size(); ++step) {
            g = ops[step - 1].apply(g);
            if (step % 2 != 0) continue;
            pow34 *= 0.75;  // (3/4)^n after 2n steps
            const double bound = pow34 * var0 + 26.0 * norm_leb_bar;
            const double observed = g.variation();
            const double slack = bound - observed;
            report.records.push_back({trial, static_cast<int>(step), var0, observed,
                                      bound, slack});
            if (slack < 0.0) ++report.violations;
            if (first) {
                report.min_slack = report.max_slack = slack;
                first = false;
            } else {
                report.min_slack = std::min(report.min_slack, slack);
                report.max_slack = std::max(report.max_slack, slack);
            }
        }
    }
    return report;
}

void save_density_csv(const Density& f, std::ostream& out) {
    out << "grid_n," << f.grid_n() << "\n";
    out.precision(17);
    for (double x : f.values()) out << x << "\n";
}

Density load_density_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("grid_n,", 0) != 0)
        throw validation_error("density csv: missing grid_n header");
    const int n = std::stoi(line.substr(7));
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    while (std::getline(in, line) && !line.empty()) v.push_back(std::stod(line));
    return Density(n, std::move(v));
}

void save_ulam_csv(const UlamOperator& op, std::ostream& out) {
    out << "grid_n," << op.grid_n() << ",nnz," << op.nnz() << "\n";
    out.precision(17);
    for (int j = 0; j < op.grid_n(); ++j)
        for (std::int64_t k = op.col_ptr()[static_cast<std::size_t>(j)];
             k < op.col_ptr()[static_cast<std::size_t>(j) + 1]; ++k)
            out << op.row_idx()[static_cast<std::size_t>(k)] << "," << j << ","
                << op.entries()[static_cast<std::size_t>(k)] << "\n";
}

UlamOperator load_ulam_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("grid_n,", 0) != 0)
        throw validation_error("ulam csv: missing header");
    std::istringstream hdr(line);
    std::string tok;
    std::getline(hdr, tok, ',');
    std::getline(hdr, tok, ',');
    const int n = std::stoi(tok);

    UlamOperator op;
    op.grid_n_ = n;
    op.col_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n));
    while (std::getline(in, line) && !line.empty()) {
        std::istringstream row(line);
        std::string r, c, v;
        std::getline(row, r, ',');
        std::getline(row, c, ',');
        std::getline(row, v, ',');
        cols[static_cast<std::size_t>(std::stoi(c))].emplace_back(std::stoi(r),
                                                                  std::stod(v));
    }
    for (int j = 0; j < n; ++j) {
        for (auto& [r, v] : cols[static_cast<std::size_t>(j)]) {
            op.row_idx_.push_back(r);
            op.values_.push_back(v);
        }
        op.col_ptr_[static_cast<std::size_t>(j) + 1] =
            static_cast<std::int64_t>(op.row_idx_.size());
    }
    return op;
}

}  // namespace metastable
