#include "adanorm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "adanorm/rng.hpp"

namespace adanorm {

std::string to_string(Flavor flavor) {
  return flavor == Flavor::StronglyConvex ? "strongly-convex" : "pl-nonconvex";
}

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("noise sigma must be finite and >= 0");
  }
  if (sigma == 0.0) return noiseless();
  return {Kind::AdditiveGaussian, sigma};
}

// ---------------------------------------------------------------------------

double ProblemInstance::value(const Vector& x, Execution) const {
  double total = 0.0;
  for (std::size_t i = 0; i < component_count(); ++i) total += component_value(i, x);
  return total / static_cast<double>(component_count());
}

void ProblemInstance::gradient(const Vector& x, Vector& out, Execution) const {
  out.setZero(dimension_index());
  Vector g(dimension_index());
  for (std::size_t i = 0; i < component_count(); ++i) {
    component_gradient(i, x, g);
    out += g;
  }
  out /= static_cast<double>(component_count());
}

Vector ProblemInstance::gradient(const Vector& x) const {
  Vector out(dimension_index());
  gradient(x, out);
  return out;
}

Vector ProblemInstance::component_gradient(std::size_t i, const Vector& x) const {
  Vector out(dimension_index());
  component_gradient(i, x, out);
  return out;
}

void ProblemInstance::batch_gradient(std::span<const std::size_t> indices, const Vector& x,
                                     Vector& out) const {
  if (indices.empty()) throw std::invalid_argument("batch_gradient: empty index set");
  out.setZero(dimension_index());
  Vector g(dimension_index());
  for (std::size_t i : indices) {
    component_gradient(i, x, g);
    out += g;
  }
  out /= static_cast<double>(indices.size());
}

// ---------------------------------------------------------------------------

LeastSquaresProblem::LeastSquaresProblem(Constants constants, RowMatrix rows, Vector labels)
    : ProblemInstance(std::move(constants)),
      rows_(std::move(rows)),
      labels_(std::move(labels)),
      row_norm_sq_(rows_.rowwise().squaredNorm()),
      min_row_norm_sq_(row_norm_sq_.minCoeff()) {}

double LeastSquaresProblem::value(const Vector& x, Execution exec) const {
  return exec == Execution::Parallel ? kernels::least_squares_value(rows_, labels_, x)
                                     : kernels::serial::least_squares_value(rows_, labels_, x);
}

void LeastSquaresProblem::gradient(const Vector& x, Vector& out, Execution exec) const {
  if (exec == Execution::Parallel) {
    kernels::least_squares_gradient(rows_, labels_, x, out);
  } else {
    kernels::serial::least_squares_gradient(rows_, labels_, x, out);
  }
}

double LeastSquaresProblem::component_value(std::size_t i, const Vector& x) const {
  const auto row = static_cast<Eigen::Index>(i);
  const double r = rows_.row(row).dot(x) - labels_[row];
  return 0.5 * r * r;
}

void LeastSquaresProblem::component_gradient(std::size_t i, const Vector& x, Vector& out) const {
  const auto row = static_cast<Eigen::Index>(i);
  const double r = rows_.row(row).dot(x) - labels_[row];
  out = r * rows_.row(row).transpose();
}

double LeastSquaresProblem::component_smoothness(std::size_t i) const {
  return row_norm_sq_[static_cast<Eigen::Index>(i)];
}

// ---------------------------------------------------------------------------

RegularizedProblem::RegularizedProblem(Constants constants, RowMatrix rows, Vector labels,
                                       Vector center, double lambda)
    : ProblemInstance(std::move(constants)),
      rows_(std::move(rows)),
      labels_(std::move(labels)),
      center_(std::move(center)),
      lambda_(lambda),
      row_norm_sq_(rows_.rowwise().squaredNorm()) {}

double RegularizedProblem::value(const Vector& x, Execution exec) const {
  const double data = exec == Execution::Parallel
                          ? kernels::least_squares_value(rows_, labels_, x)
                          : kernels::serial::least_squares_value(rows_, labels_, x);
  return data + 0.5 * lambda_ * (x - center_).squaredNorm();
}

void RegularizedProblem::gradient(const Vector& x, Vector& out, Execution exec) const {
  if (exec == Execution::Parallel) {
    kernels::least_squares_gradient(rows_, labels_, x, out);
  } else {
    kernels::serial::least_squares_gradient(rows_, labels_, x, out);
  }
  out += lambda_ * (x - center_);
}

double RegularizedProblem::component_value(std::size_t i, const Vector& x) const {
  const auto row = static_cast<Eigen::Index>(i);
  const double r = rows_.row(row).dot(x) - labels_[row];
  return 0.5 * r * r + 0.5 * lambda_ * (x - center_).squaredNorm();
}

void RegularizedProblem::component_gradient(std::size_t i, const Vector& x, Vector& out) const {
  const auto row = static_cast<Eigen::Index>(i);
  const double r = rows_.row(row).dot(x) - labels_[row];
  out = r * rows_.row(row).transpose() + lambda_ * (x - center_);
}

double RegularizedProblem::component_smoothness(std::size_t i) const {
  return row_norm_sq_[static_cast<Eigen::Index>(i)] + lambda_;
}

std::optional<double> RegularizedProblem::component_strong_convexity(std::size_t i) const {
  // Hessian aᵢaᵢᵀ + λI: its smallest eigenvalue is λ unless d = 1.
  if (dimension() == 1) return row_norm_sq_[static_cast<Eigen::Index>(i)] + lambda_;
  return lambda_;
}

std::optional<double> RegularizedProblem::alpha_unit() const {
  double mu_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < component_count(); ++i) {
    mu_min = std::min(mu_min, *component_strong_convexity(i));
  }
  return mu_min * mu_min;
}

// ---------------------------------------------------------------------------

TwoLayerReluProblem::TwoLayerReluProblem(Constants constants, RowMatrix inputs, Vector targets,
                                         Vector outer, Vector initial_weights)
    : ProblemInstance(std::move(constants)),
      inputs_(std::move(inputs)),
      targets_(std::move(targets)),
      outer_(std::move(outer)),
      initial_weights_(std::move(initial_weights)) {}

double TwoLayerReluProblem::value(const Vector& w, Execution exec) const {
  return exec == Execution::Parallel
             ? kernels::relu_net_value(inputs_, targets_, outer_, w)
             : kernels::serial::relu_net_value(inputs_, targets_, outer_, w);
}

void TwoLayerReluProblem::gradient(const Vector& w, Vector& out, Execution exec) const {
  if (exec == Execution::Parallel) {
    kernels::relu_net_gradient(inputs_, targets_, outer_, w, out);
  } else {
    kernels::serial::relu_net_gradient(inputs_, targets_, outer_, w, out);
  }
}

double TwoLayerReluProblem::component_value(std::size_t i, const Vector& w) const {
  const double r =
      kernels::relu_net_output(inputs_, i, outer_, w) - targets_[static_cast<Eigen::Index>(i)];
  return 0.5 * r * r;
}

void TwoLayerReluProblem::component_gradient(std::size_t i, const Vector& w, Vector& out) const {
  const double r =
      kernels::relu_net_output(inputs_, i, outer_, w) - targets_[static_cast<Eigen::Index>(i)];
  out.setZero(w.size());
  kernels::relu_net_accumulate_sample_gradient(inputs_, i, outer_, w, r, out);
}

double TwoLayerReluProblem::component_smoothness(std::size_t i) const {
  // Within one activation region ∇²fᵢ = JᵢJᵢᵀ with ‖Jᵢ‖² ≤ ‖xᵢ‖².
  return inputs_.row(static_cast<Eigen::Index>(i)).squaredNorm();
}

// ---------------------------------------------------------------------------

namespace {

RowMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = normal(engine);
  return m;
}

Vector gaussian_vector(std::size_t size, std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  Vector v(static_cast<Eigen::Index>(size));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(engine);
  return v;
}

double min_gram_eigenvalue(const RowMatrix& rows) {
  const Eigen::MatrixXd gram = rows.transpose() * rows / static_cast<double>(rows.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, solver.eigenvalues().minCoeff());
}

// Same expression as the component oracles, so ∇fᵢ(x*) is exactly zero.
Vector exact_labels(const RowMatrix& rows, const Vector& x_star) {
  Vector labels(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) labels[i] = rows.row(i).dot(x_star);
  return labels;
}

void require_positive(std::size_t value, const char* what) {
  if (value == 0) throw std::invalid_argument(std::string(what) + " must be >= 1");
}

}  // namespace

std::shared_ptr<const LeastSquaresProblem> least_squares_from_data(RowMatrix rows, Vector labels,
                                                                   std::optional<Vector> x_star,
                                                                   bool allow_degenerate) {
  const auto n = static_cast<std::size_t>(rows.rows());
  const auto d = static_cast<std::size_t>(rows.cols());
  require_positive(n, "n");
  require_positive(d, "d");
  if (labels.size() != rows.rows()) throw std::invalid_argument("labels/rows size mismatch");
  if (n < d && !allow_degenerate) {
    throw std::invalid_argument("least squares with n < d has mu = 0; pass allow_degenerate");
  }

  ProblemInstance::Constants c;
  c.name = "least_squares";
  c.dimension = d;
  c.component_count = n;
  c.smoothness = rows.rowwise().squaredNorm().maxCoeff();
  c.strong_convexity = min_gram_eigenvalue(rows);
  c.flavor = Flavor::StronglyConvex;
  if (c.strong_convexity <= 0.0 && !allow_degenerate) {
    throw std::invalid_argument("least squares matrix is rank deficient (mu = 0)");
  }

  if (x_star) {
    if (x_star->size() != rows.cols()) throw std::invalid_argument("x_star dimension mismatch");
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      if (rows.row(i).dot(*x_star) != labels[i]) {
        throw std::invalid_argument("labels are not exactly A x*; omit x_star for noisy data");
      }
    }
    c.minimizer = std::move(x_star);
    c.optimal_value = 0.0;
    c.noiseless = true;
  } else {
    Vector solution = rows.colPivHouseholderQr().solve(labels);
    c.optimal_value = kernels::serial::least_squares_value(rows, labels, solution);
    c.minimizer = std::move(solution);
    c.noiseless = false;
  }
  return std::make_shared<const LeastSquaresProblem>(std::move(c), std::move(rows),
                                                     std::move(labels));
}

std::shared_ptr<const LeastSquaresProblem> make_least_squares(std::size_t n, std::size_t d,
                                                              std::uint64_t seed,
                                                              NoiseModel noise,
                                                              bool allow_degenerate) {
  require_positive(n, "n");
  require_positive(d, "d");
  if (n < d && !allow_degenerate) {
    throw std::invalid_argument("least squares with n < d has mu = 0; pass allow_degenerate");
  }
  auto engine = make_engine(seed, 0);
  RowMatrix rows = gaussian_matrix(n, d, engine);
  Vector x_star = gaussian_vector(d, engine);
  Vector labels = exact_labels(rows, x_star);
  if (!noise.is_noiseless()) {
    labels += noise.sigma * gaussian_vector(n, engine);
    auto problem = least_squares_from_data(std::move(rows), std::move(labels), std::nullopt,
                                           allow_degenerate);
    return problem;
  }
  return least_squares_from_data(std::move(rows), std::move(labels), std::move(x_star),
                                 allow_degenerate);
}

std::shared_ptr<const RegularizedProblem> regularized_from_data(RowMatrix rows, Vector x_star,
                                                                double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and > 0");
  }
  const auto n = static_cast<std::size_t>(rows.rows());
  const auto d = static_cast<std::size_t>(rows.cols());
  require_positive(n, "n");
  require_positive(d, "d");
  if (x_star.size() != rows.cols()) throw std::invalid_argument("x_star dimension mismatch");

  Vector labels = exact_labels(rows, x_star);
  ProblemInstance::Constants c;
  c.name = "regularized";
  c.dimension = d;
  c.component_count = n;
  c.smoothness = rows.rowwise().squaredNorm().maxCoeff() + lambda;
  c.strong_convexity = min_gram_eigenvalue(rows) + lambda;
  c.flavor = Flavor::StronglyConvex;
  c.minimizer = x_star;
  c.optimal_value = 0.0;
  c.noiseless = true;
  return std::make_shared<const RegularizedProblem>(std::move(c), std::move(rows),
                                                    std::move(labels), std::move(x_star), lambda);
}

std::shared_ptr<const RegularizedProblem> make_regularized_strongly_convex(std::size_t n,
                                                                           std::size_t d,
                                                                           double lambda,
                                                                           std::uint64_t seed) {
  require_positive(n, "n");
  require_positive(d, "d");
  auto engine = make_engine(seed, 0);
  RowMatrix rows = gaussian_matrix(n, d, engine);
  Vector x_star = gaussian_vector(d, engine);
  return regularized_from_data(std::move(rows), std::move(x_star), lambda);
}

std::shared_ptr<const TwoLayerReluProblem> make_two_layer_relu(std::size_t n, std::size_t m,
                                                               std::size_t d,
                                                               std::uint64_t seed) {
  require_positive(n, "n");
  require_positive(m, "m");
  require_positive(d, "d");
  auto engine = make_engine(seed, 0);

  RowMatrix inputs = gaussian_matrix(n, d, engine);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) inputs.row(i).normalize();
  Vector targets = gaussian_vector(n, engine);

  std::bernoulli_distribution coin(0.5);
  Vector outer(static_cast<Eigen::Index>(m));
  for (Eigen::Index r = 0; r < outer.size(); ++r) outer[r] = coin(engine) ? 1.0 : -1.0;
  Vector initial = gaussian_vector(m * d, engine);

  ProblemInstance::Constants c;
  c.name = "two_layer_relu";
  c.dimension = m * d;
  c.component_count = n;
  c.smoothness = inputs.rowwise().squaredNorm().maxCoeff();
  c.strong_convexity = 0.0;  // PL constant unknown; see empirical_pl_lower_bound
  c.flavor = Flavor::PlNonconvex;
  c.optimal_value = 0.0;
  c.noiseless = true;
  return std::make_shared<const TwoLayerReluProblem>(std::move(c), std::move(inputs),
                                                     std::move(targets), std::move(outer),
                                                     std::move(initial));
}

// ---------------------------------------------------------------------------

namespace {

struct PairSampler {
  PairSampler(const ProblemInstance& problem, const ProbeOptions& options)
      : engine(make_engine(options.seed, 0x70726f6265ULL)), scale(options.scale) {
    if (options.center) {
      center = *options.center;
    } else if (problem.minimizer()) {
      center = *problem.minimizer();
    } else {
      center = problem.default_initial_point();
    }
  }

  Vector point() {
    std::normal_distribution<double> normal;
    Vector v(center.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = center[i] + scale * normal(engine);
    return v;
  }

  std::mt19937_64 engine;
  double scale;
  Vector center;
};

}  // namespace

double probe_smoothness_ratio(const ProblemInstance& problem, const ProbeOptions& options) {
  PairSampler sampler(problem, options);
  CounterRng pick(derive_seed(options.seed, 1));
  double worst = 0.0;
  Vector gx(static_cast<Eigen::Index>(problem.dimension()));
  Vector gy(gx.size());
  for (std::size_t p = 0; p < options.pairs; ++p) {
    const Vector x = sampler.point();
    const Vector y = sampler.point();
    const std::size_t i = pick.uniform_index(problem.component_count());
    problem.component_gradient(i, x, gx);
    problem.component_gradient(i, y, gy);
    const double ratio =
        (gx - gy).norm() / (problem.component_smoothness(i) * (x - y).norm());
    worst = std::max(worst, ratio);
  }
  return worst;
}

double probe_strong_convexity(const ProblemInstance& problem, const ProbeOptions& options) {
  PairSampler sampler(problem, options);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < options.pairs; ++p) {
    const Vector x = sampler.point();
    const Vector y = sampler.point();
    const Vector dx = x - y;
    const Vector dg = problem.gradient(x) - problem.gradient(y);
    best = std::min(best, dg.dot(dx) / dx.squaredNorm());
  }
  return best;
}

double probe_cocoercivity(const ProblemInstance& problem, const ProbeOptions& options) {
  PairSampler sampler(problem, options);
  double worst = std::numeric_limits<double>::infinity();
  Vector gx(static_cast<Eigen::Index>(problem.dimension()));
  Vector gy(gx.size());
  for (std::size_t p = 0; p < options.pairs; ++p) {
    const Vector x = sampler.point();
    const Vector y = sampler.point();
    const Vector dx = x - y;
    for (std::size_t i = 0; i < problem.component_count(); ++i) {
      problem.component_gradient(i, x, gx);
      problem.component_gradient(i, y, gy);
      const Vector dg = gx - gy;
      const double li = problem.component_smoothness(i);
      const double slack = li * dx.dot(dg) - dg.squaredNorm();
      worst = std::min(worst, slack / (li * li * dx.squaredNorm()));
    }
  }
  return worst;
}

double probe_strong_cocoercivity(const ProblemInstance& problem, const ProbeOptions& options) {
  PairSampler sampler(problem, options);
  const double mu = problem.strong_convexity();
  const double l = problem.smoothness();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < options.pairs; ++p) {
    const Vector x = sampler.point();
    const Vector y = sampler.point();
    const Vector dx = x - y;
    const Vector dg = problem.gradient(x) - problem.gradient(y);
    const double slack =
        dg.dot(dx) - mu * l / (mu + l) * dx.squaredNorm() - dg.squaredNorm() / (mu + l);
    worst = std::min(worst, slack / (l * dx.squaredNorm()));
  }
  return worst;
}

double max_stationary_residual(const ProblemInstance& problem) {
  if (!problem.minimizer()) throw std::logic_error("problem has no known minimizer");
  double worst = 0.0;
  Vector g(static_cast<Eigen::Index>(problem.dimension()));
  for (std::size_t i = 0; i < problem.component_count(); ++i) {
    problem.component_gradient(i, *problem.minimizer(), g);
    worst = std::max(worst, g.norm());
  }
  return worst;
}

double unbiasedness_error(const ProblemInstance& problem, const Vector& x) {
  Vector avg = Vector::Zero(x.size());
  Vector g(x.size());
  for (std::size_t i = 0; i < problem.component_count(); ++i) {
    problem.component_gradient(i, x, g);
    avg += g;
  }
  avg /= static_cast<double>(problem.component_count());
  const Vector full = problem.gradient(x);
  return (avg - full).norm() / std::max(1.0, full.norm());
}

double empirical_pl_lower_bound(const ProblemInstance& problem, const ProbeOptions& options) {
  PairSampler sampler(problem, options);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < options.pairs; ++p) {
    const Vector x = sampler.point();
    const double gap = problem.gap(x);
    if (!(gap > 0.0)) continue;
    best = std::min(best, problem.gradient(x).squaredNorm() / (2.0 * gap));
  }
  return best;
}

}  // namespace adanorm
