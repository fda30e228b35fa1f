#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <set>
#include <string>
#include <vector>

#include "stochtaylor/iterints.hpp"
#include "stochtaylor/model.hpp"
#include "stochtaylor/mserr.hpp"
#include "stochtaylor/noise.hpp"

namespace stochtaylor {

struct SchemeSpec {
  IntegralKind kind = IntegralKind::Ito;
  double gamma = 3.0;
  StepPlan plan;

  void validate() const;
};

// One additive piece of a term coefficient: factor * delta^power * I_family (or no integral).
struct CoefficientPiece {
  double factor = 1.0;
  int delta_power = 0;
  std::optional<WeightFamily> family;
};

// A scheme term: the operator word with its noise slots left open, and its coefficient.
struct SchemeTerm {
  std::string word;  // tokens "G" (G0 with a slot), "L", "S" (Sigma with a slot), "a"
  std::vector<CoefficientPiece> pieces;
  double min_gamma = 2.0;
  int slots() const;
};

// Terms of the order-gamma scheme, with the drift and L already barred for Stratonovich.
std::vector<SchemeTerm> scheme_terms(IntegralKind kind, double gamma);
// Builds the concrete word for one assignment of noise indices to the slots (left to right).
OperatorWord instantiate_word(const std::string& word, IntegralKind kind, std::span<const int> slots);

struct StepInstrumentation {
  std::set<WeightFamily> families;
  std::set<std::string> words;
};

// One scheme step from state y at time p*delta using a sampled basis.
class Stepper {
 public:
  Stepper(const SdeModel& model, SchemeSpec spec);

  const SchemeSpec& spec() const { return spec_; }
  Vec step(const Vec& y, long p, const NoiseBasis& basis, StepInstrumentation* instr = nullptr) const;
  // Step with precomputed integrals (used by the coupled reference runs).
  Vec step(const Vec& y, long p, const IntegralBatch& integrals, StepInstrumentation* instr = nullptr) const;

 private:
  struct Instance {
    std::vector<int> slots;
    OperatorWord word;
    Mat M;
    Vec v;
  };
  struct Compiled {
    SchemeTerm term;
    std::vector<Instance> instances;
  };
  const SdeModel& model_;
  SchemeSpec spec_;
  std::vector<Compiled> terms_;
};

Vec step_ito(const SdeModel& model, const SchemeSpec& spec, const Vec& y, long p, const NoiseBasis& basis);
Vec step_strat(const SdeModel& model, const SchemeSpec& spec, const Vec& y, long p, const NoiseBasis& basis);
Vec euler_maruyama_step(const SdeModel& model, const Vec& y, long p, const NoiseBasis& basis);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// N steps of size T_end / N, which must match the plan's delta.
Trajectory simulate(const SdeModel& model, const SchemeSpec& spec, double T_end, long N, std::uint64_t seed,
                    std::uint64_t stream = 0);

// Number of worker threads to use for path-parallel loops (0 selects hardware concurrency).
int resolve_threads(int requested);

}  // namespace stochtaylor
