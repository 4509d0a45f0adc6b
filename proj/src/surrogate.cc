#include "plb/surrogate.h"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "plb/error.h"

namespace plb {

namespace {

double ipow(double u, int n) {
  double result = 1.0;
  double base = u;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

// Uniform double in [0, 1) from 53 random bits; identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

}  // namespace

Activation Activation::power(int even_exponent) {
  if (even_exponent < 2 || even_exponent % 2 != 0) {
    throw InvalidParameter("power activation needs an even exponent >= 2");
  }
  return {Kind::kPower, even_exponent};
}

double Activation::value(double u) const {
  switch (kind) {
    case Kind::kIdentity:
      return u;
    case Kind::kPower:
      return ipow(u, exponent);
    case Kind::kExp:
      return std::exp(u);
    case Kind::kRelu:
      return u > 0.0 ? u : 0.0;
  }
  return 0.0;
}

double Activation::derivative(double u) const {
  switch (kind) {
    case Kind::kIdentity:
      return 1.0;
    case Kind::kPower:
      return exponent * ipow(u, exponent - 1);
    case Kind::kExp:
      return std::exp(u);
    case Kind::kRelu:
      return u > 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

bool Activation::is_convex() const {
  return kind != Kind::kPower || (exponent >= 2 && exponent % 2 == 0);
}

std::string Activation::name() const {
  switch (kind) {
    case Kind::kIdentity:
      return "identity";
    case Kind::kPower:
      return "pow" + std::to_string(exponent);
    case Kind::kExp:
      return "exp";
    case Kind::kRelu:
      return "relu";
  }
  return "?";
}

Activation Activation::parse(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "exp") return exp();
  if (name == "relu") return relu();
  if (name.rfind("pow", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(name.substr(3));
    } catch (const std::exception&) {
      throw InvalidParameter("unknown activation " + name);
    }
    return power(n);
  }
  throw InvalidParameter("unknown activation " + name);
}

double ConvexSurrogate::evaluate(double x, double y) const {
  double v = bias;
  for (const Neuron& n : neurons) v += n.out * n.activation.value(n.pre_activation(x, y));
  return v;
}

Gradient2 ConvexSurrogate::gradient(double x, double y) const {
  Gradient2 g;
  for (const Neuron& n : neurons) {
    const double d = n.out * n.activation.derivative(n.pre_activation(x, y));
    g.dx += d * n.ax;
    g.dy += d * n.ay;
  }
  return g;
}

bool ConvexSurrogate::is_valid() const {
  for (const Neuron& n : neurons) {
    if (!(n.out >= 0.0) || !n.activation.is_convex()) return false;
  }
  return true;
}

TrainingGrid build_training_grid() {
  constexpr int kSteps = 100;
  TrainingGrid grid;
  for (int i = 0; i < kSteps; ++i) {
    const double x = 0.05 + (1.0 - 0.05) * i / (kSteps - 1);
    for (int j = 0; j < kSteps; ++j) {
      const double y = 0.99 * j / (kSteps - 1);
      // small slack so pairs like (0.5, 0.5) survive rounding
      if (x + y <= 1.0 + 1e-12) grid.samples.push_back({x, y, protection_ratio(x, y)});
    }
  }
  return grid;
}

std::vector<Activation> default_activations() {
  std::vector<Activation> out{Activation::identity()};
  for (int p = 2; p <= 20; p += 2) out.push_back(Activation::power(p));
  out.push_back(Activation::exp());
  out.push_back(Activation::relu());
  return out;
}

double grid_loss(const ConvexSurrogate& surrogate, const TrainingGrid& grid, double lambda_under) {
  if (grid.samples.empty()) return 0.0;
  double sum = 0.0;
  for (const GridSample& s : grid.samples) {
    const double r = surrogate.evaluate(s.x, s.y) - s.label;
    sum += r * r;
    if (r < 0.0) sum += lambda_under * r * r;
  }
  return sum / static_cast<double>(grid.samples.size());
}

namespace {

Neuron init_neuron(const Activation& act, std::mt19937_64& rng) {
  Neuron n;
  n.activation = act;
  switch (act.kind) {
    case Activation::Kind::kPower:
      // keep |u| < 1 on the unit square so high powers start small
      n.ax = uniform(rng, -0.4, 0.4);
      n.ay = uniform(rng, -0.4, 0.4);
      n.bias = uniform(rng, -0.2, 0.2);
      break;
    case Activation::Kind::kExp:
      n.ax = uniform(rng, -1.0, 1.0);
      n.ay = uniform(rng, -1.0, 1.0);
      n.bias = uniform(rng, -1.0, 0.0);
      break;
    default:
      n.ax = uniform(rng, -1.0, 1.0);
      n.ay = uniform(rng, -1.0, 1.0);
      n.bias = uniform(rng, -0.5, 0.5);
      break;
  }
  n.out = uniform(rng, 0.0, 0.1);
  return n;
}

class Adam {
 public:
  Adam(std::size_t size, const TrainConfig& c)
      : m_(size, 0.0), v_(size, 0.0), lr_(c.learning_rate), b1_(c.beta1), b2_(c.beta2),
        eps_(c.adam_epsilon) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, t_);
    const double c2 = 1.0 - std::pow(b2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = b1_ * m_[i] + (1.0 - b1_) * grad[i];
      v_[i] = b2_ * v_[i] + (1.0 - b2_) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
  }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  double lr_, b1_, b2_, eps_;
  int t_ = 0;
};

// Parameter vector layout: [ax, ay, bias, out] per neuron, then output bias.
constexpr int kPerNeuron = 4;

void unpack(const std::vector<double>& params, ConvexSurrogate& s) {
  for (std::size_t i = 0; i < s.neurons.size(); ++i) {
    Neuron& n = s.neurons[i];
    n.ax = params[kPerNeuron * i];
    n.ay = params[kPerNeuron * i + 1];
    n.bias = params[kPerNeuron * i + 2];
    n.out = params[kPerNeuron * i + 3];
  }
  s.bias = params.back();
}

std::vector<double> pack(const ConvexSurrogate& s) {
  std::vector<double> params;
  params.reserve(kPerNeuron * s.neurons.size() + 1);
  for (const Neuron& n : s.neurons) {
    params.insert(params.end(), {n.ax, n.ay, n.bias, n.out});
  }
  params.push_back(s.bias);
  return params;
}

}  // namespace

TrainResult train(const TrainingGrid& grid, const TrainConfig& config) {
  if (grid.samples.empty()) throw InvalidParameter("training grid is empty");
  if (config.epochs < 1) throw InvalidParameter("epochs must be >= 1");
  if (config.lambda_under < 0.0) throw InvalidParameter("lambda_under must be >= 0");
  if (config.batch_size < 1 || config.neurons_per_kind < 1) {
    throw InvalidParameter("batch size and neurons per kind must be >= 1");
  }

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  ConvexSurrogate& model = result.surrogate;
  for (const Activation& act : config.activations) {
    if (!act.is_convex()) throw InvalidParameter("activation " + act.name() + " is not convex");
    for (int r = 0; r < config.neurons_per_kind; ++r) model.neurons.push_back(init_neuron(act, rng));
  }
  model.bias = 0.0;

  std::vector<double> params = pack(model);
  std::vector<double> grad(params.size());
  Adam adam(params.size(), config);

  const std::size_t n_samples = grid.samples.size();
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), 0);

  result.loss_history.push_back(grid_loss(model, grid, config.lambda_under));
  std::vector<double> act_val(model.neurons.size());
  std::vector<double> act_der(model.neurons.size());

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = n_samples - 1; i > 0; --i) {
      std::swap(order[i], order[rng() % (i + 1)]);
    }
    for (std::size_t start = 0; start < n_samples; start += config.batch_size) {
      const std::size_t end = std::min(n_samples, start + config.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const GridSample& s = grid.samples[order[b]];
        double pred = model.bias;
        for (std::size_t i = 0; i < model.neurons.size(); ++i) {
          const Neuron& n = model.neurons[i];
          const double u = n.pre_activation(s.x, s.y);
          act_val[i] = n.activation.value(u);
          act_der[i] = n.activation.derivative(u);
          pred += n.out * act_val[i];
        }
        const double r = pred - s.label;
        double dl = 2.0 * r * inv_batch;
        if (r < 0.0) dl += 2.0 * config.lambda_under * r * inv_batch;
        for (std::size_t i = 0; i < model.neurons.size(); ++i) {
          const double through = dl * model.neurons[i].out * act_der[i];
          grad[kPerNeuron * i] += through * s.x;
          grad[kPerNeuron * i + 1] += through * s.y;
          grad[kPerNeuron * i + 2] += through;
          grad[kPerNeuron * i + 3] += dl * act_val[i];
        }
        grad.back() += dl;
      }
      adam.step(params, grad);
      // project output weights onto a_i >= 0
      for (std::size_t i = 0; i < model.neurons.size(); ++i) {
        double& out = params[kPerNeuron * i + 3];
        if (out < 0.0) out = 0.0;
      }
      unpack(params, model);
    }
    const double loss = grid_loss(model, grid, config.lambda_under);
    if (!std::isfinite(loss)) throw TrainingFailure("loss is not finite", epoch);
    result.loss_history.push_back(loss);
  }
  return result;
}

ConvexityAudit convexity_audit(const ConvexSurrogate& surrogate, int trials, std::uint64_t seed) {
  constexpr double kTol = 1e-9;
  std::mt19937_64 rng(seed);
  auto sample_point = [&rng]() {
    // uniform over the triangle x, y >= 0, x + y <= 1
    double x = unit(rng);
    double y = unit(rng);
    if (x + y > 1.0) {
      x = 1.0 - x;
      y = 1.0 - y;
    }
    return std::array<double, 2>{x, y};
  };
  ConvexityAudit audit;
  audit.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const auto u = sample_point();
    const auto v = sample_point();
    const double lambda = unit(rng);
    const double mx = lambda * u[0] + (1.0 - lambda) * v[0];
    const double my = lambda * u[1] + (1.0 - lambda) * v[1];
    const double lhs = surrogate.evaluate(mx, my);
    const double rhs =
        lambda * surrogate.evaluate(u[0], u[1]) + (1.0 - lambda) * surrogate.evaluate(v[0], v[1]);
    const double excess = lhs - rhs;
    if (excess > kTol) {
      ++audit.violations;
      audit.worst_violation = std::max(audit.worst_violation, excess);
    }
  }
  audit.profile = fit_profile(surrogate, build_training_grid());
  return audit;
}

Plane fit_linear_regression(const TrainingGrid& grid) {
  if (grid.samples.empty()) throw SingularFit("empty grid");
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (const GridSample& s : grid.samples) {
    const Eigen::Vector3d row(s.x, s.y, 1.0);
    normal += row * row.transpose();
    rhs += row * s.label;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  lu.setThreshold(1e-12);
  if (lu.rank() < 3) throw SingularFit("grid points are collinear");
  const Eigen::Vector3d coef = lu.solve(rhs);
  return Plane{coef(0), coef(1), coef(2)};
}

ConvexSurrogate plane_surrogate(const Plane& plane) {
  ConvexSurrogate s;
  s.neurons.push_back(Neuron{Activation::identity(), plane.alpha, plane.beta, 0.0, 1.0});
  s.bias = plane.gamma;
  return s;
}

}  // namespace plb
