#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace adanorm {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Selects the OpenMP kernel or the plain-loop reference it is tested against.
enum class Execution { Serial, Parallel };

namespace kernels {

// Rows per reduction block. Partial sums are combined in block order, so the
// parallel kernels return bit-identical results for any thread count.
inline constexpr std::size_t kBlockRows = 128;

/// (1/n) Aᵀ(Ax − y)
void least_squares_gradient(const RowMatrix& a, const Vector& y, const Vector& x, Vector& out);

/// (1/2n) ‖Ax − y‖²
double least_squares_value(const RowMatrix& a, const Vector& y, const Vector& x);

/// Full gradient of L(W) = (1/2n) Σᵢ (m^{-1/2} Σᵣ aᵣ relu(⟨wᵣ, xᵢ⟩) − yᵢ)².
/// `w` is the m×d inner-weight matrix flattened row-major (row r is wᵣ).
void relu_net_gradient(const RowMatrix& inputs, const Vector& targets, const Vector& outer,
                       const Vector& w, Vector& out);

double relu_net_value(const RowMatrix& inputs, const Vector& targets, const Vector& outer,
                      const Vector& w);

/// Number of threads the parallel kernels will use.
int max_threads();

namespace serial {

// Reference implementations: one pass over the rows in index order.
void least_squares_gradient(const RowMatrix& a, const Vector& y, const Vector& x, Vector& out);
double least_squares_value(const RowMatrix& a, const Vector& y, const Vector& x);
void relu_net_gradient(const RowMatrix& inputs, const Vector& targets, const Vector& outer,
                       const Vector& w, Vector& out);
double relu_net_value(const RowMatrix& inputs, const Vector& targets, const Vector& outer,
                      const Vector& w);

}  // namespace serial

/// Residual and activation pattern for one sample of the ReLU net; shared by
/// the component oracle and both kernels.
double relu_net_output(const RowMatrix& inputs, std::size_t sample, const Vector& outer,
                       const Vector& w);
void relu_net_accumulate_sample_gradient(const RowMatrix& inputs, std::size_t sample,
                                         const Vector& outer, const Vector& w, double scale,
                                         Vector& out);

}  // namespace kernels
}  // namespace adanorm
