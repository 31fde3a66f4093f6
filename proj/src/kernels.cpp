#include "semistatic/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>

namespace semistatic::kernels {

void SparseRows::add_row(std::span<const int> cols, std::span<const double> vals, double offset) {
    if (cols.size() != vals.size()) {
        throw std::invalid_argument("row column and value lists differ in length");
    }
    std::map<int, double> merged;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] < 0 || static_cast<std::size_t>(cols[k]) >= num_columns_) {
            throw std::out_of_range("row column index out of range");
        }
        merged[cols[k]] += vals[k];
    }
    for (const auto& [c, v] : merged) {
        if (v != 0.0) {
            cols_.push_back(c);
            vals_.push_back(v);
        }
    }
    row_ptr_.push_back(cols_.size());
    offset_.push_back(offset);
    finalized_ = false;
}

void SparseRows::finalize() {
    col_ptr_.assign(num_columns_ + 1, 0);
    for (int c : cols_) {
        ++col_ptr_[static_cast<std::size_t>(c) + 1];
    }
    for (std::size_t j = 0; j < num_columns_; ++j) {
        col_ptr_[j + 1] += col_ptr_[j];
    }
    col_row_.resize(cols_.size());
    col_entry_.resize(cols_.size());
    std::vector<std::size_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
            const auto c = static_cast<std::size_t>(cols_[e]);
            col_row_[fill[c]] = static_cast<int>(i);
            col_entry_[fill[c]] = e;
            ++fill[c];
        }
    }
    finalized_ = true;
}

std::span<const int> SparseRows::row_cols(std::size_t i) const {
    return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const double> SparseRows::row_vals(std::size_t i) const {
    return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

void SparseRows::scale_row(std::size_t i, double s) {
    for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
        vals_[e] *= s;
    }
    offset_[i] *= s;
}

SparseRows SparseRows::restrict_columns(std::span<const int> keep, std::span<const double> values) const {
    if (values.size() != num_columns_) {
        throw std::invalid_argument("restrict_columns needs a value for every column");
    }
    std::vector<int> remap(num_columns_, -1);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        remap[static_cast<std::size_t>(keep[k])] = static_cast<int>(k);
    }
    SparseRows out(keep.size());
    std::vector<int> c;
    std::vector<double> v;
    for (std::size_t i = 0; i < rows(); ++i) {
        c.clear();
        v.clear();
        double off = offset_[i];
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
            const int to = remap[static_cast<std::size_t>(cols_[e])];
            if (to >= 0) {
                c.push_back(to);
                v.push_back(vals_[e]);
            } else {
                off += vals_[e] * values[static_cast<std::size_t>(cols_[e])];
            }
        }
        out.add_row(c, v, off);
    }
    out.finalize();
    return out;
}

SparseRows SparseRows::with_extra_column(double coeff) const {
    SparseRows out(num_columns_ + 1);
    std::vector<int> c;
    std::vector<double> v;
    for (std::size_t i = 0; i < rows(); ++i) {
        auto rc = row_cols(i);
        auto rv = row_vals(i);
        c.assign(rc.begin(), rc.end());
        v.assign(rv.begin(), rv.end());
        c.push_back(static_cast<int>(num_columns_));
        v.push_back(coeff);
        out.add_row(c, v, offset_[i]);
    }
    out.finalize();
    return out;
}

std::span<const int> SparseRows::col_rows(std::size_t j) const {
    return {col_row_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

std::span<const std::size_t> SparseRows::col_entries(std::size_t j) const {
    return {col_entry_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

namespace {

void require_finalized(const SparseRows& rows) {
    if (!rows.finalized()) {
        throw std::logic_error("sparse rows used before finalize()");
    }
}

double row_dot(const SparseRows& rows, std::size_t i, std::span<const double> x, bool with_offset) {
    auto c = rows.row_cols(i);
    auto v = rows.row_vals(i);
    double s = with_offset ? rows.offset(i) : 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        s += v[k] * x[static_cast<std::size_t>(c[k])];
    }
    return s;
}

struct LseAcc {
    double max = -std::numeric_limits<double>::infinity();
    double scaled = 0.0;

    void add(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity()) {
            return;
        }
        if (log_term > max) {
            scaled = scaled * std::exp(max - log_term) + 1.0;
            max = log_term;
        } else {
            scaled += std::exp(log_term - max);
        }
    }

    void merge(const LseAcc& o) {
        if (o.max == -std::numeric_limits<double>::infinity()) {
            return;
        }
        if (o.max > max) {
            scaled = scaled * std::exp(max - o.max) + o.scaled;
            max = o.max;
        } else {
            scaled += o.scaled * std::exp(o.max - max);
        }
    }

    [[nodiscard]] double value() const {
        return max == -std::numeric_limits<double>::infinity() ? max : max + std::log(scaled);
    }
};

}  // namespace

void evaluate_rows(const SparseRows& rows, std::span<const double> x, std::span<double> out, bool with_offset) {
    const auto n = static_cast<std::int64_t>(rows.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = row_dot(rows, static_cast<std::size_t>(i), x, with_offset);
    }
}

void evaluate_rows_serial(const SparseRows& rows, std::span<const double> x, std::span<double> out,
                          bool with_offset) {
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        out[i] = row_dot(rows, i, x, with_offset);
    }
}

void weighted_row_sum(const SparseRows& rows, std::span<const double> w, std::span<double> out) {
    require_finalized(rows);
    const auto n = static_cast<std::int64_t>(rows.columns());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        auto r = rows.col_rows(ju);
        auto e = rows.col_entries(ju);
        double s = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            s += w[static_cast<std::size_t>(r[k])] * rows.entry_value(e[k]);
        }
        out[ju] = s;
    }
}

void weighted_row_sum_serial(const SparseRows& rows, std::span<const double> w, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        auto c = rows.row_cols(i);
        auto v = rows.row_vals(i);
        for (std::size_t k = 0; k < c.size(); ++k) {
            out[static_cast<std::size_t>(c[k])] += w[i] * v[k];
        }
    }
}

void weighted_gram(const SparseRows& rows, std::span<const double> w, Eigen::MatrixXd& H) {
    require_finalized(rows);
    const auto n = static_cast<std::int64_t>(rows.columns());
    // Row j of the upper triangle is owned by one thread; the sum over grid
    // rows runs in increasing order, as in the serial loop.
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        auto r = rows.col_rows(ju);
        auto e = rows.col_entries(ju);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const auto i = static_cast<std::size_t>(r[k]);
            auto c = rows.row_cols(i);
            auto v = rows.row_vals(i);
            const std::size_t pos = e[k] - rows.row_begin(i);
            const double wv = w[i] * v[pos];
            for (std::size_t q = pos; q < c.size(); ++q) {
                H(j, c[q]) += wv * v[q];
            }
        }
    }
}

void weighted_gram_serial(const SparseRows& rows, std::span<const double> w, Eigen::MatrixXd& H) {
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        auto c = rows.row_cols(i);
        auto v = rows.row_vals(i);
        for (std::size_t p = 0; p < c.size(); ++p) {
            const double wv = w[i] * v[p];
            for (std::size_t q = p; q < c.size(); ++q) {
                H(c[p], c[q]) += wv * v[q];
            }
        }
    }
}

std::size_t reduction_chunk(std::size_t n) {
    return std::max<std::size_t>(512, (n + 63) / 64);
}

double log_sum_exp(std::span<const double> masses, std::span<const double> a, double k) {
    const std::size_t n = a.size();
    const std::size_t chunk = reduction_chunk(n);
    const std::size_t chunks = (n + chunk - 1) / chunk;
    std::vector<LseAcc> partial(chunks);
    const auto nc = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < nc; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        LseAcc acc;
        for (std::size_t i = begin; i < end; ++i) {
            if (masses[i] > 0.0) {
                acc.add(std::log(masses[i]) + k * a[i]);
            }
        }
        partial[static_cast<std::size_t>(c)] = acc;
    }
    LseAcc total;
    for (const auto& p : partial) {
        total.merge(p);
    }
    return total.value();
}

double log_sum_exp_serial(std::span<const double> masses, std::span<const double> a, double k) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (masses[i] > 0.0) {
            peak = std::max(peak, std::log(masses[i]) + k * a[i]);
        }
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
        return peak;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (masses[i] > 0.0) {
            s += std::exp(std::log(masses[i]) + k * a[i] - peak);
        }
    }
    return peak + std::log(s);
}

double sum(std::span<const double> v) {
    const std::size_t n = v.size();
    const std::size_t chunk = reduction_chunk(n);
    const std::size_t chunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(chunks, 0.0);
    const auto nc = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < nc; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            s += v[i];
        }
        partial[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return total;
}

double sum_serial(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s;
}

}  // namespace semistatic::kernels
