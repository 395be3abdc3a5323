#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "adanorm/kernels.hpp"

namespace adanorm {

enum class Flavor { StronglyConvex, PlNonconvex };

std::string to_string(Flavor flavor);

struct NoiseModel {
  enum class Kind { Noiseless, AdditiveGaussian };

  Kind kind = Kind::Noiseless;
  double sigma = 0.0;  // standard deviation of the label noise

  static NoiseModel noiseless() { return {}; }
  /// Throws std::invalid_argument for sigma < 0; sigma == 0 yields noiseless.
  static NoiseModel gaussian(double sigma);

  bool is_noiseless() const { return kind == Kind::Noiseless; }
};

/// An empirical risk F(x) = (1/n) Σᵢ fᵢ(x) with component oracles and the
/// constants the convergence bounds are stated in.
///
/// Instances are immutable after construction; every oracle is const and
/// keeps no scratch state, so one instance can serve concurrent runs. Index
/// sampling is the caller's business.
class ProblemInstance {
 public:
  struct Constants {
    std::string name;
    std::size_t dimension = 0;
    std::size_t component_count = 0;
    double smoothness = 0.0;       // L = supᵢ Lᵢ
    double strong_convexity = 0.0; // μ (strong convexity or PL)
    Flavor flavor = Flavor::StronglyConvex;
    std::optional<Vector> minimizer;
    double optimal_value = 0.0;
    bool noiseless = true;         // ∇fᵢ(x*) = 0 for every i
  };

  virtual ~ProblemInstance() = default;

  const std::string& name() const { return constants_.name; }
  std::size_t dimension() const { return constants_.dimension; }
  std::size_t component_count() const { return constants_.component_count; }
  double smoothness() const { return constants_.smoothness; }
  double strong_convexity() const { return constants_.strong_convexity; }
  Flavor flavor() const { return constants_.flavor; }
  const std::optional<Vector>& minimizer() const { return constants_.minimizer; }
  double optimal_value() const { return constants_.optimal_value; }
  bool noiseless() const { return constants_.noiseless; }

  virtual double component_value(std::size_t i, const Vector& x) const = 0;
  virtual void component_gradient(std::size_t i, const Vector& x, Vector& out) const = 0;
  virtual double component_smoothness(std::size_t i) const = 0;

  /// μᵢ when every component is strongly convex.
  virtual std::optional<double> component_strong_convexity(std::size_t) const {
    return std::nullopt;
  }

  /// Natural unit for RUIG α grids: minⱼ‖aⱼ‖² for least squares, (minⱼ μⱼ)²
  /// for strongly convex components.
  virtual std::optional<double> alpha_unit() const { return std::nullopt; }

  virtual Vector default_initial_point() const { return Vector::Zero(dimension_index()); }

  /// Full objective and gradient; the default averages the components.
  virtual double value(const Vector& x, Execution exec = Execution::Parallel) const;
  virtual void gradient(const Vector& x, Vector& out,
                        Execution exec = Execution::Parallel) const;

  Vector gradient(const Vector& x) const;
  Vector component_gradient(std::size_t i, const Vector& x) const;

  /// Average of ∇fᵢ over a sampled index multiset.
  void batch_gradient(std::span<const std::size_t> indices, const Vector& x, Vector& out) const;

  /// F(x) − F*
  double gap(const Vector& x) const { return value(x) - optimal_value(); }

 protected:
  explicit ProblemInstance(Constants constants) : constants_(std::move(constants)) {}
  Eigen::Index dimension_index() const { return static_cast<Eigen::Index>(dimension()); }

 private:
  Constants constants_;
};

using ProblemPtr = std::shared_ptr<const ProblemInstance>;

/// fᵢ(x) = ½(⟨aᵢ, x⟩ − yᵢ)²
class LeastSquaresProblem final : public ProblemInstance {
 public:
  LeastSquaresProblem(Constants constants, RowMatrix rows, Vector labels);

  double value(const Vector& x, Execution exec = Execution::Parallel) const override;
  void gradient(const Vector& x, Vector& out, Execution exec = Execution::Parallel) const override;
  using ProblemInstance::gradient;

  double component_value(std::size_t i, const Vector& x) const override;
  void component_gradient(std::size_t i, const Vector& x, Vector& out) const override;
  using ProblemInstance::component_gradient;
  double component_smoothness(std::size_t i) const override;
  std::optional<double> alpha_unit() const override { return min_row_norm_sq_; }

  const RowMatrix& rows() const { return rows_; }
  const Vector& labels() const { return labels_; }
  double min_row_norm_sq() const { return min_row_norm_sq_; }

 private:
  RowMatrix rows_;
  Vector labels_;
  Vector row_norm_sq_;
  double min_row_norm_sq_;
};

/// fᵢ(x) = ½(⟨aᵢ, x⟩ − yᵢ)² + (λ/2)‖x − x_c‖²
class RegularizedProblem final : public ProblemInstance {
 public:
  RegularizedProblem(Constants constants, RowMatrix rows, Vector labels, Vector center,
                     double lambda);

  double value(const Vector& x, Execution exec = Execution::Parallel) const override;
  void gradient(const Vector& x, Vector& out, Execution exec = Execution::Parallel) const override;
  using ProblemInstance::gradient;

  double component_value(std::size_t i, const Vector& x) const override;
  void component_gradient(std::size_t i, const Vector& x, Vector& out) const override;
  using ProblemInstance::component_gradient;
  double component_smoothness(std::size_t i) const override;
  std::optional<double> component_strong_convexity(std::size_t i) const override;
  std::optional<double> alpha_unit() const override;

  double lambda() const { return lambda_; }
  const Vector& center() const { return center_; }

 private:
  RowMatrix rows_;
  Vector labels_;
  Vector center_;
  double lambda_;
  Vector row_norm_sq_;
};

/// One hidden ReLU layer with frozen ±1 output weights; the variable is the
/// m×d inner weight matrix flattened row-major.
class TwoLayerReluProblem final : public ProblemInstance {
 public:
  TwoLayerReluProblem(Constants constants, RowMatrix inputs, Vector targets, Vector outer,
                      Vector initial_weights);

  double value(const Vector& w, Execution exec = Execution::Parallel) const override;
  void gradient(const Vector& w, Vector& out, Execution exec = Execution::Parallel) const override;
  using ProblemInstance::gradient;

  double component_value(std::size_t i, const Vector& w) const override;
  void component_gradient(std::size_t i, const Vector& w, Vector& out) const override;
  using ProblemInstance::component_gradient;
  double component_smoothness(std::size_t i) const override;
  Vector default_initial_point() const override { return initial_weights_; }

  std::size_t width() const { return static_cast<std::size_t>(outer_.size()); }
  const RowMatrix& inputs() const { return inputs_; }
  const Vector& targets() const { return targets_; }
  const Vector& outer_weights() const { return outer_; }

 private:
  RowMatrix inputs_;
  Vector targets_;
  Vector outer_;
  Vector initial_weights_;
};

// ---------------------------------------------------------------------------
// Generators

/// Rows and x* i.i.d. standard Gaussian, y = A x* (+ σ z). Lᵢ = ‖aᵢ‖²,
/// L = maxᵢ Lᵢ, μ = λ_min(AᵀA)/n. Throws std::invalid_argument when n < d
/// unless `allow_degenerate` (then μ may be 0).
///
/// Noisy instances carry the least-squares solution as x* and F(x*) as F*.
std::shared_ptr<const LeastSquaresProblem> make_least_squares(std::size_t n, std::size_t d,
                                                              std::uint64_t seed,
                                                              NoiseModel noise = {},
                                                              bool allow_degenerate = false);

/// Least squares from explicit data. `x_star`, when given, must satisfy
/// y = A x* (the instance is then noiseless).
std::shared_ptr<const LeastSquaresProblem> least_squares_from_data(
    RowMatrix rows, Vector labels, std::optional<Vector> x_star = std::nullopt,
    bool allow_degenerate = false);

/// Regularized quadratic centred at a shared x* so that ∇fᵢ(x*) = 0.
std::shared_ptr<const RegularizedProblem> make_regularized_strongly_convex(std::size_t n,
                                                                           std::size_t d,
                                                                           double lambda,
                                                                           std::uint64_t seed);

std::shared_ptr<const RegularizedProblem> regularized_from_data(RowMatrix rows, Vector x_star,
                                                                double lambda);

/// Inputs uniform on the unit sphere, targets standard Gaussian, outer
/// weights uniform in {−1, +1}, initial inner weights standard Gaussian.
/// F* = 0 (interpolation); no x*.
std::shared_ptr<const TwoLayerReluProblem> make_two_layer_relu(std::size_t n = 100,
                                                               std::size_t m = 200,
                                                               std::size_t d = 10,
                                                               std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Assumption probes. Each draws points x = center + scale·z, z ~ N(0, I).

struct ProbeOptions {
  std::size_t pairs = 100;
  std::uint64_t seed = 0;
  double scale = 1.0;
  std::optional<Vector> center;  // defaults to x* or the default initial point
};

/// max over pairs and sampled components of ‖∇fᵢ(x)−∇fᵢ(y)‖ / (Lᵢ‖x−y‖); ≤ 1 under smoothness.
double probe_smoothness_ratio(const ProblemInstance& problem, const ProbeOptions& options);

/// min over pairs of ⟨∇F(x)−∇F(y), x−y⟩ / ‖x−y‖².
double probe_strong_convexity(const ProblemInstance& problem, const ProbeOptions& options);

/// min over pairs and components of Lᵢ⟨x−y, ∇fᵢ(x)−∇fᵢ(y)⟩ − ‖∇fᵢ(x)−∇fᵢ(y)‖²,
/// scaled by ‖x−y‖²·Lᵢ². Nonnegative for convex smooth components.
double probe_cocoercivity(const ProblemInstance& problem, const ProbeOptions& options);

/// min over pairs of ⟨Δg, Δx⟩ − μL/(μ+L)‖Δx‖² − ‖Δg‖²/(μ+L), relative to ‖Δx‖²·L.
double probe_strong_cocoercivity(const ProblemInstance& problem, const ProbeOptions& options);

/// maxᵢ ‖∇fᵢ(x*)‖. Throws std::logic_error without x*.
double max_stationary_residual(const ProblemInstance& problem);

/// ‖(1/n) Σᵢ ∇fᵢ(x) − ∇F(x)‖ / max(1, ‖∇F(x)‖)
double unbiasedness_error(const ProblemInstance& problem, const Vector& x);

/// min over probe points of ‖∇F(x)‖² / (2(F(x) − F*)): an empirical PL constant.
double empirical_pl_lower_bound(const ProblemInstance& problem, const ProbeOptions& options);

}  // namespace adanorm
