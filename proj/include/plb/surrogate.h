#ifndef PLB_SURROGATE_H
#define PLB_SURROGATE_H

#include <cstdint>
#include <string>
#include <vector>

namespace plb {

// Convex activation of a hidden neuron.
struct Activation {
  enum class Kind { kIdentity, kPower, kExp, kRelu };

  Kind kind = Kind::kIdentity;
  int exponent = 1;  // only for kPower; always even and >= 2

  static Activation identity() { return {Kind::kIdentity, 1}; }
  static Activation power(int even_exponent);
  static Activation exp() { return {Kind::kExp, 1}; }
  static Activation relu() { return {Kind::kRelu, 1}; }

  double value(double u) const;
  double derivative(double u) const;  // 0 at the relu kink
  bool is_convex() const;

  // "identity", "pow2".."pow20", "exp", "relu"
  std::string name() const;
  static Activation parse(const std::string& name);

  friend bool operator==(const Activation&, const Activation&) = default;
};

struct Neuron {
  Activation activation;
  double ax = 0.0;  // weight of input x
  double ay = 0.0;  // weight of input y
  double bias = 0.0;
  double out = 0.0;  // output weight, >= 0 keeps P convex

  double pre_activation(double x, double y) const { return ax * x + ay * y + bias; }

  friend bool operator==(const Neuron&, const Neuron&) = default;
};

struct Gradient2 {
  double dx = 0.0;
  double dy = 0.0;
};

// One-hidden-layer network P(x, y) = sum_i out_i * f_i(ax_i x + ay_i y + b_i) + bias,
// fitted to x / (1 - y).
struct ConvexSurrogate {
  std::vector<Neuron> neurons;
  double bias = 0.0;

  double evaluate(double x, double y) const;
  Gradient2 gradient(double x, double y) const;

  // Nonnegative output weights and convex activations.
  bool is_valid() const;

  friend bool operator==(const ConvexSurrogate&, const ConvexSurrogate&) = default;
};

// The function being approximated.
inline double protection_ratio(double x, double y) { return x / (1.0 - y); }

struct GridSample {
  double x = 0.0;
  double y = 0.0;
  double label = 0.0;
};

struct TrainingGrid {
  std::vector<GridSample> samples;
};

// 100 x-values on [0.05, 1], 100 y-values on [0, 0.99], pairs with x + y <= 1.
TrainingGrid build_training_grid();

// Default activation set: identity, x^2..x^20 (even), exp, relu.
std::vector<Activation> default_activations();

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 32;
  int neurons_per_kind = 5;
  std::uint64_t seed = 7;
  // Extra weight on squared under-approximation (P < f).
  double lambda_under = 0.0;
  std::vector<Activation> activations = default_activations();
};

struct TrainResult {
  ConvexSurrogate surrogate;
  // loss_history[0] is the loss before training, [i] after epoch i.
  std::vector<double> loss_history;
};

TrainResult train(const TrainingGrid& grid, const TrainConfig& config);

// Mean squared error of the surrogate over the grid (plus the under penalty).
double grid_loss(const ConvexSurrogate& surrogate, const TrainingGrid& grid,
                 double lambda_under = 0.0);

struct FitProfile {
  double max_relative_error = 0.0;
  double mean_relative_error = 0.0;
  double max_abs_error = 0.0;
  double under_fraction = 0.0;     // share of grid points with P < f
  double worst_under = 0.0;        // max of f - P (0 if never under)
  double worst_under_x = 0.0;
  double worst_under_y = 0.0;
  double worst_over = 0.0;         // max of P - f
  double worst_rel_x = 0.0;
  double worst_rel_y = 0.0;
};

template <typename Model>
FitProfile fit_profile(const Model& model, const TrainingGrid& grid) {
  FitProfile p;
  int under = 0;
  double rel_sum = 0.0;
  for (const GridSample& s : grid.samples) {
    const double v = model.evaluate(s.x, s.y);
    const double diff = v - s.label;
    const double rel = (diff < 0 ? -diff : diff) / s.label;
    rel_sum += rel;
    if (rel > p.max_relative_error) {
      p.max_relative_error = rel;
      p.worst_rel_x = s.x;
      p.worst_rel_y = s.y;
    }
    if ((diff < 0 ? -diff : diff) > p.max_abs_error) p.max_abs_error = diff < 0 ? -diff : diff;
    if (diff < 0) {
      ++under;
      if (-diff > p.worst_under) {
        p.worst_under = -diff;
        p.worst_under_x = s.x;
        p.worst_under_y = s.y;
      }
    } else if (diff > p.worst_over) {
      p.worst_over = diff;
    }
  }
  if (!grid.samples.empty()) {
    p.mean_relative_error = rel_sum / static_cast<double>(grid.samples.size());
    p.under_fraction = static_cast<double>(under) / static_cast<double>(grid.samples.size());
  }
  return p;
}

struct ConvexityAudit {
  int trials = 0;
  int violations = 0;
  double worst_violation = 0.0;
  FitProfile profile;
};

// Random segment tests P(l u + (1-l) v) <= l P(u) + (1-l) P(v) + 1e-9 over
// points of the unit triangle, plus the fit profile against x/(1-y).
ConvexityAudit convexity_audit(const ConvexSurrogate& surrogate, int trials,
                               std::uint64_t seed = 1);

// P(x, y) = alpha x + beta y + gamma.
struct Plane {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double evaluate(double x, double y) const { return alpha * x + beta * y + gamma; }
};

// Ordinary least squares over the grid. Throws SingularFit on collinear data.
Plane fit_linear_regression(const TrainingGrid& grid);

// Plane expressed as a single identity neuron, for use in the solver.
ConvexSurrogate plane_surrogate(const Plane& plane);

// Regression plane reported for the linear baseline.
inline constexpr Plane kReportedPlane{1.299, 0.748, -0.169};

}  // namespace plb

#endif  // PLB_SURROGATE_H
