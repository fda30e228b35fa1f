#include "stochtaylor/model.hpp"

#include <cmath>
#include <limits>

#include "stochtaylor/errors.hpp"

namespace stochtaylor {

std::string OperatorWord::str() const {
  std::string s;
  for (const auto& op : ops) {
    switch (op.kind) {
      case OpKind::L:
        s += "L ";
        break;
      case OpKind::LBar:
        s += "Lbar ";
        break;
      case OpKind::G0:
        s += "G" + std::to_string(op.index) + " ";
        break;
    }
  }
  switch (terminal) {
    case TerminalKind::Drift:
      s += "a";
      break;
    case TerminalKind::DriftBar:
      s += "abar";
      break;
    case TerminalKind::Sigma:
      s += "S" + std::to_string(terminal_index);
      break;
  }
  return s;
}

int OperatorWord::derivative_order() const {
  int d = terminal == TerminalKind::DriftBar ? 1 : 0;
  for (const auto& op : ops) d += op.kind == OpKind::G0 ? 1 : 2;
  return d;
}

void SdeModel::validate() const {
  if (n < 1 || m < 1) throw ArgumentError("model dimensions must be positive");
  if (!drift || !diffusion) throw ArgumentError("model needs drift and diffusion callbacks");
  if (x0.size() != n) throw ArgumentError("initial state has the wrong dimension");
  const Vec a = drift(x0, 0.0);
  const Mat s = diffusion(x0, 0.0);
  if (a.size() != n) throw ArgumentError("drift returns the wrong dimension");
  if (s.rows() != n || s.cols() != m) throw ArgumentError("diffusion returns the wrong shape");
  if (!a.allFinite() || !s.allFinite()) throw ArgumentError("model is not finite at the initial state");
  if (linear) {
    if (linear->A.rows() != n || linear->A.cols() != n || linear->c.size() != n ||
        static_cast<int>(linear->B.size()) != m || static_cast<int>(linear->d.size()) != m)
      throw ArgumentError("linear structure has inconsistent dimensions");
  }
}

namespace {

double fd_base(int depth) { return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (4.0 + depth)); }

double fd_step(const Vec& x, int depth) { return fd_base(depth) * (1.0 + x.lpNorm<Eigen::Infinity>()); }

// Fourth-order central stencils along v, with the step measured in the max norm.
Vec directional(const Field& f, const Vec& x, double t, const Vec& v, double h) {
  const double scale = v.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return Vec::Zero(f(x, t).size());
  const double s = h / scale;
  return (8.0 * (f(x + s * v, t) - f(x - s * v, t)) - (f(x + 2.0 * s * v, t) - f(x - 2.0 * s * v, t))) / (12.0 * s);
}

Vec directional2(const Field& f, const Vec& x, double t, const Vec& v, double h, const Vec& fx) {
  const double scale = v.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return Vec::Zero(fx.size());
  const double s = h / scale;
  return (16.0 * (f(x + s * v, t) + f(x - s * v, t)) - (f(x + 2.0 * s * v, t) + f(x - 2.0 * s * v, t)) - 30.0 * fx) /
         (12.0 * s * s);
}

Vec time_derivative(const Field& f, const Vec& x, double t, double h) {
  return (8.0 * (f(x, t + h) - f(x, t - h)) - (f(x, t + 2.0 * h) - f(x, t - 2.0 * h))) / (12.0 * h);
}

void require_fd(const SdeModel& model) {
  if (!model.allow_finite_differences)
    throw ArgumentError("model '" + model.name + "' has no exact derivatives and finite differences are disabled");
}

Field sigma_column(const SdeModel& model, int i) {
  return [&model, i](const Vec& x, double t) -> Vec { return model.diffusion(x, t).col(i - 1); };
}

Vec bar_a_fd(const SdeModel& model, const Vec& x, double t, int depth);

Field terminal_field(const SdeModel& model, const OperatorWord& word, int depth) {
  switch (word.terminal) {
    case TerminalKind::Drift:
      return model.drift;
    case TerminalKind::DriftBar:
      return [&model, depth](const Vec& x, double t) { return bar_a_fd(model, x, t, depth); };
    case TerminalKind::Sigma:
      if (word.terminal_index < 1 || word.terminal_index > model.m)
        throw ArgumentError("word references diffusion column " + std::to_string(word.terminal_index));
      return sigma_column(model, word.terminal_index);
  }
  throw ArgumentError("unknown terminal");
}

}  // namespace

Vec apply_G0(const SdeModel& model, int i, const Field& f, const Vec& x, double t, int depth) {
  if (i < 1 || i > model.m) throw ArgumentError("G0 index " + std::to_string(i) + " outside 1..m");
  require_fd(model);
  const Vec col = model.diffusion(x, t).col(i - 1);
  return directional(f, x, t, col, fd_step(x, depth));
}

Vec apply_L(const SdeModel& model, const Field& f, const Vec& x, double t, int depth) {
  require_fd(model);
  const double h = fd_step(x, depth);
  const double ht = fd_base(depth) * (1.0 + std::fabs(t));
  const Vec fx = f(x, t);
  Vec out = time_derivative(f, x, t, ht);
  out += directional(f, x, t, model.drift(x, t), h);
  const Mat sig = model.diffusion(x, t);
  for (int r = 0; r < model.m; ++r) out += 0.5 * directional2(f, x, t, sig.col(r), h, fx);
  return out;
}

Vec bar_a(const SdeModel& model, const Vec& x, double t) {
  if (model.linear) {
    const auto& lin = *model.linear;
    Vec out = lin.A * x + lin.c;
    for (int j = 0; j < model.m; ++j) out -= 0.5 * lin.B[j] * (lin.B[j] * x + lin.d[j]);
    return out;
  }
  if (model.exact_word) {
    OperatorWord w;
    w.terminal = TerminalKind::DriftBar;
    return model.exact_word(w, x, t);
  }
  return bar_a_fd(model, x, t, 1);
}

namespace {

Vec bar_a_fd(const SdeModel& model, const Vec& x, double t, int depth) {
  Vec out = model.drift(x, t);
  for (int j = 1; j <= model.m; ++j) out -= 0.5 * apply_G0(model, j, sigma_column(model, j), x, t, depth);
  return out;
}

}  // namespace

Vec bar_L(const SdeModel& model, const Field& f, const Vec& x, double t, int depth) {
  Vec out = apply_L(model, f, x, t, depth);
  for (int j = 1; j <= model.m; ++j) {
    Field inner = [&model, &f, j, depth](const Vec& y, double s) { return apply_G0(model, j, f, y, s, depth); };
    out -= 0.5 * apply_G0(model, j, inner, x, t, depth);
  }
  return out;
}

std::pair<Mat, Vec> linear_word(const LinearStructure& lin, const OperatorWord& word) {
  const int n = static_cast<int>(lin.A.rows());
  const int m = static_cast<int>(lin.B.size());
  Mat Abar = lin.A;
  Vec cbar = lin.c;
  for (int j = 0; j < m; ++j) {
    Abar -= 0.5 * lin.B[j] * lin.B[j];
    cbar -= 0.5 * lin.B[j] * lin.d[j];
  }
  Mat M;
  Vec v;
  switch (word.terminal) {
    case TerminalKind::Drift:
      M = lin.A;
      v = lin.c;
      break;
    case TerminalKind::DriftBar:
      M = Abar;
      v = cbar;
      break;
    case TerminalKind::Sigma:
      if (word.terminal_index < 1 || word.terminal_index > m)
        throw ArgumentError("word references diffusion column " + std::to_string(word.terminal_index));
      M = lin.B[word.terminal_index - 1];
      v = lin.d[word.terminal_index - 1];
      break;
  }
  (void)n;
  for (auto it = word.ops.rbegin(); it != word.ops.rend(); ++it) {
    switch (it->kind) {
      case OpKind::G0: {
        if (it->index < 1 || it->index > m) throw ArgumentError("G0 index outside 1..m");
        v = M * lin.d[it->index - 1];
        M = M * lin.B[it->index - 1];
        break;
      }
      case OpKind::L:
        v = M * lin.c;
        M = M * lin.A;
        break;
      case OpKind::LBar:
        v = M * cbar;
        M = M * Abar;
        break;
    }
  }
  return {M, v};
}

Vec evaluate_word(const SdeModel& model, const OperatorWord& word, const Vec& x, double t, WordStrategy strategy) {
  if (word.ops.size() > 6) throw ArgumentError("operator words are limited to six operators");
  if (strategy == WordStrategy::Exact || (strategy == WordStrategy::Auto && model.exact_word)) {
    if (!model.exact_word) throw ArgumentError("model '" + model.name + "' has no exact word callback");
    return model.exact_word(word, x, t);
  }
  if (strategy == WordStrategy::Linear || (strategy == WordStrategy::Auto && model.linear)) {
    if (!model.linear) throw ArgumentError("model '" + model.name + "' is not linear");
    const auto [M, v] = linear_word(*model.linear, word);
    return M * x + v;
  }
  require_fd(model);
  // Build the nested field from the terminal outwards.
  std::vector<Field> fields(word.ops.size() + 1);
  // Every level shares the step of the word's total derivative order.
  const int d = word.derivative_order();
  fields[word.ops.size()] = terminal_field(model, word, d);
  for (int p = static_cast<int>(word.ops.size()) - 1; p >= 0; --p) {
    const WordOp op = word.ops[p];
    const Field& inner = fields[p + 1];
    switch (op.kind) {
      case OpKind::G0:
        fields[p] = [&model, &inner, op, d](const Vec& y, double s) { return apply_G0(model, op.index, inner, y, s, d); };
        break;
      case OpKind::L:
        fields[p] = [&model, &inner, d](const Vec& y, double s) { return apply_L(model, inner, y, s, d); };
        break;
      case OpKind::LBar:
        fields[p] = [&model, &inner, d](const Vec& y, double s) { return bar_L(model, inner, y, s, d); };
        break;
    }
  }
  const Vec out = fields[0](x, t);
  if (!out.allFinite()) throw ArgumentError("finite-difference evaluation of '" + word.str() + "' is not finite");
  return out;
}

SdeModel make_linear_model(std::string name, Mat A, Vec c, std::vector<Mat> B, std::vector<Vec> d, Vec x0) {
  SdeModel model;
  model.name = std::move(name);
  model.n = static_cast<int>(A.rows());
  model.m = static_cast<int>(B.size());
  model.linear = LinearStructure{std::move(A), std::move(c), std::move(B), std::move(d)};
  const LinearStructure lin = *model.linear;
  model.drift = [lin](const Vec& x, double) -> Vec { return lin.A * x + lin.c; };
  model.diffusion = [lin](const Vec& x, double) -> Mat {
    Mat s(lin.A.rows(), static_cast<Eigen::Index>(lin.B.size()));
    for (size_t i = 0; i < lin.B.size(); ++i) s.col(static_cast<Eigen::Index>(i)) = lin.B[i] * x + lin.d[i];
    return s;
  };
  model.x0 = std::move(x0);
  model.lipschitz_note = "affine coefficients: globally Lipschitz with linear growth";
  model.validate();
  return model;
}

namespace {

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  if (!std::isfinite(v)) throw ArgumentError("parameter '" + key + "' must be finite");
  return v;
}

void reject_leftovers(const std::string& model, const std::map<std::string, double>& params) {
  if (!params.empty())
    throw ArgumentError("model '" + model + "' has no parameter '" + params.begin()->first + "'");
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

std::vector<std::string> builtin_model_names() { return {"linear2d", "gbm", "additive2d", "scalar"}; }

SdeModel builtin_model(const std::string& name, const std::map<std::string, double>& params_in) {
  auto params = params_in;
  if (name == "linear2d") {
    const double s = take(params, "sigma", 1.0);
    const double l = take(params, "lambda", 1.0);
    const Vec x0 = vec2(take(params, "x1", 1.0), take(params, "x2", 0.5));
    reject_leftovers(name, params);
    std::vector<Mat> B{s * mat2(0.3, 0.2, 0.0, 0.1), s * mat2(0.1, 0.0, 0.25, 0.2)};
    std::vector<Vec> d{s * vec2(0.1, 0.0), s * vec2(0.0, 0.1)};
    return make_linear_model(name, l * mat2(-0.5, 0.4, -0.3, -0.6), vec2(0.1, 0.0), B, d, x0);
  }
  if (name == "gbm") {
    const double mu = take(params, "mu", 0.5);
    const double sigma = take(params, "sigma", 0.4);
    const double x0 = take(params, "x0", 1.0);
    reject_leftovers(name, params);
    return make_linear_model(name, Mat::Constant(1, 1, mu), Vec::Zero(1), {Mat::Constant(1, 1, sigma)},
                             {Vec::Zero(1)}, Vec::Constant(1, x0));
  }
  if (name == "additive2d") {
    const double s = take(params, "sigma", 1.0);
    const Vec x0 = vec2(take(params, "x1", 1.0), take(params, "x2", -0.5));
    reject_leftovers(name, params);
    std::vector<Mat> B{Mat::Zero(2, 2), Mat::Zero(2, 2)};
    std::vector<Vec> d{s * vec2(0.3, 0.1), s * vec2(-0.1, 0.4)};
    return make_linear_model(name, mat2(-1.0, 0.3, -0.3, -0.5), vec2(0.2, 0.0), B, d, x0);
  }
  if (name == "scalar") {
    const double lambda = take(params, "lambda", -1.0);
    const double b = take(params, "b", 0.5);
    const double x0 = take(params, "x0", 1.0);
    reject_leftovers(name, params);
    return make_linear_model(name, Mat::Constant(1, 1, lambda), Vec::Zero(1), {Mat::Constant(1, 1, b)},
                             {Vec::Zero(1)}, Vec::Constant(1, x0));
  }
  throw ArgumentError("unknown model '" + name + "'");
}

}  // namespace stochtaylor
