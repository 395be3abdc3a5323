#include "adanorm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

namespace adanorm::kernels {
namespace {

std::size_t block_count(std::size_t rows) { return (rows + kBlockRows - 1) / kBlockRows; }

Eigen::Map<const RowMatrix> inner_weights(const Vector& w, std::size_t m, std::size_t d) {
  return Eigen::Map<const RowMatrix>(w.data(), static_cast<Eigen::Index>(m),
                                     static_cast<Eigen::Index>(d));
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void least_squares_gradient(const RowMatrix& a, const Vector& y, const Vector& x, Vector& out) {
  const auto n = static_cast<std::size_t>(a.rows());
  const auto blocks = block_count(n);
  std::vector<Vector> partial(blocks);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const auto first = static_cast<Eigen::Index>(static_cast<std::size_t>(b) * kBlockRows);
    const auto rows = std::min<Eigen::Index>(kBlockRows, static_cast<Eigen::Index>(n) - first);
    const auto block = a.middleRows(first, rows);
    const Vector residual = block * x - y.segment(first, rows);
    partial[static_cast<std::size_t>(b)] = block.transpose() * residual;
  }

  out.setZero(a.cols());
  for (const auto& p : partial) out += p;
  out /= static_cast<double>(n);
}

double least_squares_value(const RowMatrix& a, const Vector& y, const Vector& x) {
  const auto n = static_cast<std::size_t>(a.rows());
  const auto blocks = block_count(n);
  std::vector<double> partial(blocks, 0.0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const auto first = static_cast<Eigen::Index>(static_cast<std::size_t>(b) * kBlockRows);
    const auto rows = std::min<Eigen::Index>(kBlockRows, static_cast<Eigen::Index>(n) - first);
    partial[static_cast<std::size_t>(b)] =
        (a.middleRows(first, rows) * x - y.segment(first, rows)).squaredNorm();
  }

  double total = 0.0;
  for (double p : partial) total += p;
  return 0.5 * total / static_cast<double>(n);
}

double relu_net_output(const RowMatrix& inputs, std::size_t sample, const Vector& outer,
                       const Vector& w) {
  const auto m = static_cast<std::size_t>(outer.size());
  const auto d = static_cast<std::size_t>(inputs.cols());
  const auto weights = inner_weights(w, m, d);
  const Vector pre = weights * inputs.row(static_cast<Eigen::Index>(sample)).transpose();
  return outer.dot(pre.cwiseMax(0.0)) / std::sqrt(static_cast<double>(m));
}

void relu_net_accumulate_sample_gradient(const RowMatrix& inputs, std::size_t sample,
                                         const Vector& outer, const Vector& w, double scale,
                                         Vector& out) {
  const auto m = static_cast<std::size_t>(outer.size());
  const auto d = static_cast<std::size_t>(inputs.cols());
  const auto weights = inner_weights(w, m, d);
  const auto xi = inputs.row(static_cast<Eigen::Index>(sample));
  const Vector pre = weights * xi.transpose();
  const double factor = scale / std::sqrt(static_cast<double>(m));
  Eigen::Map<RowMatrix> grad(out.data(), static_cast<Eigen::Index>(m),
                             static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < m; ++r) {
    // relu'(0) is taken as 0
    if (pre[static_cast<Eigen::Index>(r)] > 0.0) {
      grad.row(static_cast<Eigen::Index>(r)) += (factor * outer[static_cast<Eigen::Index>(r)]) * xi;
    }
  }
}

void relu_net_gradient(const RowMatrix& inputs, const Vector& targets, const Vector& outer,
                       const Vector& w, Vector& out) {
  const auto n = static_cast<std::size_t>(inputs.rows());
  const auto blocks = block_count(n);
  std::vector<Vector> partial(blocks);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * kBlockRows;
    const std::size_t last = std::min(n, first + kBlockRows);
    Vector acc = Vector::Zero(w.size());
    for (std::size_t i = first; i < last; ++i) {
      const double residual =
          relu_net_output(inputs, i, outer, w) - targets[static_cast<Eigen::Index>(i)];
      relu_net_accumulate_sample_gradient(inputs, i, outer, w, residual, acc);
    }
    partial[static_cast<std::size_t>(b)] = std::move(acc);
  }

  out.setZero(w.size());
  for (const auto& p : partial) out += p;
  out /= static_cast<double>(n);
}

double relu_net_value(const RowMatrix& inputs, const Vector& targets, const Vector& outer,
                      const Vector& w) {
  const auto n = static_cast<std::size_t>(inputs.rows());
  const auto blocks = block_count(n);
  std::vector<double> partial(blocks, 0.0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * kBlockRows;
    const std::size_t last = std::min(n, first + kBlockRows);
    double acc = 0.0;
    for (std::size_t i = first; i < last; ++i) {
      const double r =
          relu_net_output(inputs, i, outer, w) - targets[static_cast<Eigen::Index>(i)];
      acc += r * r;
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }

  double total = 0.0;
  for (double p : partial) total += p;
  return 0.5 * total / static_cast<double>(n);
}

namespace serial {

void least_squares_gradient(const RowMatrix& a, const Vector& y, const Vector& x, Vector& out) {
  out.setZero(a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double residual = a.row(i).dot(x) - y[i];
    out += residual * a.row(i).transpose();
  }
  out /= static_cast<double>(a.rows());
}

double least_squares_value(const RowMatrix& a, const Vector& y, const Vector& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double residual = a.row(i).dot(x) - y[i];
    total += residual * residual;
  }
  return 0.5 * total / static_cast<double>(a.rows());
}

void relu_net_gradient(const RowMatrix& inputs, const Vector& targets, const Vector& outer,
                       const Vector& w, Vector& out) {
  out.setZero(w.size());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    const auto sample = static_cast<std::size_t>(i);
    const double residual = relu_net_output(inputs, sample, outer, w) - targets[i];
    relu_net_accumulate_sample_gradient(inputs, sample, outer, w, residual, out);
  }
  out /= static_cast<double>(inputs.rows());
}

double relu_net_value(const RowMatrix& inputs, const Vector& targets, const Vector& outer,
                      const Vector& w) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    const double r = relu_net_output(inputs, static_cast<std::size_t>(i), outer, w) - targets[i];
    total += r * r;
  }
  return 0.5 * total / static_cast<double>(inputs.rows());
}

}  // namespace serial
}  // namespace adanorm::kernels
