#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stochtaylor {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class OpKind { L, LBar, G0 };
enum class TerminalKind { Drift, DriftBar, Sigma };

struct WordOp {
  OpKind kind = OpKind::L;
  int index = 0;  // noise component for G0, 1-based
  bool operator==(const WordOp&) const = default;
};

// ops[0] is applied last: the word denotes ops[0](ops[1](...(terminal))).
struct OperatorWord {
  std::vector<WordOp> ops;
  TerminalKind terminal = TerminalKind::Drift;
  int terminal_index = 0;  // column of Sigma, 1-based

  std::string str() const;
  int derivative_order() const;
  bool operator==(const OperatorWord&) const = default;
};

// a(x) = A x + c and Sigma_i(x) = B_i x + d_i.
struct LinearStructure {
  Mat A;
  Vec c;
  std::vector<Mat> B;
  std::vector<Vec> d;
};

struct SdeModel {
  std::string name;
  int n = 0;
  int m = 0;
  std::function<Vec(const Vec&, double)> drift;
  std::function<Mat(const Vec&, double)> diffusion;  // n x m
  std::optional<LinearStructure> linear;
  // Exact value of any operator word, when the user can supply one.
  std::function<Vec(const OperatorWord&, const Vec&, double)> exact_word;
  bool allow_finite_differences = true;
  Vec x0;
  std::string lipschitz_note;

  void validate() const;
};

// Column field f(x, t) -> R^n used by the operator helpers.
using Field = std::function<Vec(const Vec&, double)>;

// Fourth-order central differences with h = eps^{1/(4+depth)} (1 + |x|_inf), where depth is the
// total derivative order of the word being evaluated.
Vec apply_L(const SdeModel& model, const Field& f, const Vec& x, double t, int depth = 0);
Vec apply_G0(const SdeModel& model, int i, const Field& f, const Vec& x, double t, int depth = 0);
Vec bar_a(const SdeModel& model, const Vec& x, double t);
Vec bar_L(const SdeModel& model, const Field& f, const Vec& x, double t, int depth = 0);

enum class WordStrategy { Auto, Exact, Linear, FiniteDifference };

Vec evaluate_word(const SdeModel& model, const OperatorWord& word, const Vec& x, double t,
                  WordStrategy strategy = WordStrategy::Auto);

// Affine form (M, v) of a word on a linear model: word(x) = M x + v.
std::pair<Mat, Vec> linear_word(const LinearStructure& lin, const OperatorWord& word);

SdeModel make_linear_model(std::string name, Mat A, Vec c, std::vector<Mat> B, std::vector<Vec> d, Vec x0);

// Built-in registry: linear2d, gbm, additive2d, scalar. Unknown parameters raise argument errors.
SdeModel builtin_model(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_model_names();

}  // namespace stochtaylor
