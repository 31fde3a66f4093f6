#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

// Data-parallel kernels used by the solver. Each OpenMP kernel has a plain
// serial counterpart with the same signature; the tests compare the two and
// bench/ times them. Results never depend on the number of threads: per-row
// and per-column kernels write disjoint outputs in a fixed order, and scalar
// reductions use a chunk partition that depends only on the input length.

namespace semistatic::kernels {

/// Affine rows r_i . x + offset_i in compressed sparse row form, with a
/// column-major index built on demand for the transposed kernels.
class SparseRows {
public:
    SparseRows() = default;
    explicit SparseRows(std::size_t num_columns) : num_columns_(num_columns) {}

    /// Entries with equal column are summed; zeros are dropped.
    void add_row(std::span<const int> cols, std::span<const double> vals, double offset);
    void finalize();

    [[nodiscard]] std::size_t rows() const { return offset_.size(); }
    [[nodiscard]] std::size_t columns() const { return num_columns_; }
    [[nodiscard]] std::size_t nonzeros() const { return vals_.size(); }

    [[nodiscard]] std::span<const int> row_cols(std::size_t i) const;
    [[nodiscard]] std::span<const double> row_vals(std::size_t i) const;
    [[nodiscard]] double offset(std::size_t i) const { return offset_[i]; }
    [[nodiscard]] std::span<const double> offsets() const { return offset_; }

    /// Multiply row i (coefficients and offset) by s.
    void scale_row(std::size_t i, double s);
    /// Replace the offset of row i.
    void set_offset(std::size_t i, double v) { offset_[i] = v; }
    /// Column-sliced view: rows reading only the listed columns, with the
    /// remaining columns folded into the offsets at the given values.
    [[nodiscard]] SparseRows restrict_columns(std::span<const int> keep, std::span<const double> values) const;
    /// Append a new column with one coefficient per row.
    [[nodiscard]] SparseRows with_extra_column(double coeff) const;

    // transposed index: for column j, the rows and entry positions touching it
    [[nodiscard]] std::span<const int> col_rows(std::size_t j) const;
    [[nodiscard]] std::span<const std::size_t> col_entries(std::size_t j) const;
    [[nodiscard]] double entry_value(std::size_t e) const { return vals_[e]; }
    [[nodiscard]] std::size_t row_begin(std::size_t i) const { return row_ptr_[i]; }
    [[nodiscard]] bool finalized() const { return finalized_; }

private:
    std::size_t num_columns_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<int> cols_;
    std::vector<double> vals_;
    std::vector<double> offset_;
    std::vector<std::size_t> col_ptr_;
    std::vector<int> col_row_;
    std::vector<std::size_t> col_entry_;
    bool finalized_ = false;
};

/// out_i = r_i . x + offset_i, or r_i . x alone when with_offset is false.
void evaluate_rows(const SparseRows& rows, std::span<const double> x, std::span<double> out,
                   bool with_offset = true);
void evaluate_rows_serial(const SparseRows& rows, std::span<const double> x, std::span<double> out,
                          bool with_offset = true);

/// out_j = sum_i w_i r_ij
void weighted_row_sum(const SparseRows& rows, std::span<const double> w, std::span<double> out);
void weighted_row_sum_serial(const SparseRows& rows, std::span<const double> w, std::span<double> out);

/// Upper triangle of H += sum_i w_i r_i r_i^T.
void weighted_gram(const SparseRows& rows, std::span<const double> w, Eigen::MatrixXd& H);
void weighted_gram_serial(const SparseRows& rows, std::span<const double> w, Eigen::MatrixXd& H);

/// log(sum_i m_i exp(k * a_i)); entries with m_i == 0 are skipped.
double log_sum_exp(std::span<const double> masses, std::span<const double> a, double k);
double log_sum_exp_serial(std::span<const double> masses, std::span<const double> a, double k);

/// Chunked deterministic sum.
double sum(std::span<const double> v);
double sum_serial(std::span<const double> v);

/// Chunk length used by the scalar reductions for an input of length n.
std::size_t reduction_chunk(std::size_t n);

}  // namespace semistatic::kernels
