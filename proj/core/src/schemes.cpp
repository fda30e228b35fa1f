#include "stochtaylor/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "stochtaylor/errors.hpp"

namespace stochtaylor {

namespace {

CoefficientPiece piece(double factor, int power, const char* family = nullptr) {
  CoefficientPiece p;
  p.factor = factor;
  p.delta_power = power;
  if (family) p.family = WeightFamily::parse(family);
  return p;
}

std::vector<std::string> tokens(const std::string& word) {
  std::istringstream in(word);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

const std::vector<SchemeTerm>& ito_table() {
  static const std::vector<SchemeTerm> table = [] {
    std::vector<SchemeTerm> t;
    auto add = [&t](double g, std::string w, std::vector<CoefficientPiece> pieces) {
      t.push_back(SchemeTerm{std::move(w), std::move(pieces), g});
    };
    add(2.0, "S", {piece(1, 0, "0")});
    add(2.0, "a", {piece(1, 1)});
    add(2.0, "G S", {piece(1, 0, "00")});
    add(2.0, "G a", {piece(1, 1, "0"), piece(1, 0, "1")});
    add(2.0, "L S", {piece(-1, 0, "1")});
    add(2.0, "G G S", {piece(1, 0, "000")});
    add(2.0, "L a", {piece(0.5, 2)});
    add(2.0, "G L S", {piece(1, 0, "10"), piece(-1, 0, "01")});
    add(2.0, "L G S", {piece(-1, 0, "10")});
    add(2.0, "G G a", {piece(1, 0, "01"), piece(1, 1, "00")});
    add(2.0, "G G G S", {piece(1, 0, "0000")});

    add(2.5, "G L a", {piece(0.5, 0, "2"), piece(1, 1, "1"), piece(0.5, 2, "0")});
    add(2.5, "L L S", {piece(0.5, 0, "2")});
    add(2.5, "L G a", {piece(-1, 0, "2"), piece(-1, 1, "1")});
    add(2.5, "G L G S", {piece(1, 0, "100"), piece(-1, 0, "010")});
    add(2.5, "G G L S", {piece(1, 0, "010"), piece(-1, 0, "001")});
    add(2.5, "G G G a", {piece(1, 1, "000"), piece(1, 0, "001")});
    add(2.5, "L G G S", {piece(-1, 0, "100")});
    add(2.5, "G G G G S", {piece(1, 0, "00000")});
    add(2.5, "L L a", {piece(1.0 / 6.0, 3)});

    add(3.0, "G G L a", {piece(0.5, 0, "02"), piece(1, 1, "01"), piece(0.5, 2, "00")});
    add(3.0, "L L G S", {piece(0.5, 0, "20")});
    add(3.0, "G L G a", {piece(1, 0, "11"), piece(-1, 0, "02"), piece(1, 1, "10"), piece(-1, 1, "01")});
    add(3.0, "L G L S", {piece(1, 0, "11"), piece(-1, 0, "20")});
    add(3.0, "G L L S", {piece(0.5, 0, "02"), piece(0.5, 0, "20"), piece(-1, 0, "11")});
    add(3.0, "L G G a", {piece(-1, 1, "10"), piece(-1, 0, "11")});
    add(3.0, "G G G G a", {piece(1, 1, "0000"), piece(1, 0, "0001")});
    add(3.0, "G G L G S", {piece(1, 0, "0100"), piece(-1, 0, "0010")});
    add(3.0, "L G G G S", {piece(-1, 0, "1000")});
    add(3.0, "G L G G S", {piece(1, 0, "1000"), piece(-1, 0, "0100")});
    add(3.0, "G G G L S", {piece(1, 0, "0010"), piece(-1, 0, "0001")});
    add(3.0, "G G G G G S", {piece(1, 0, "000000")});
    return t;
  }();
  return table;
}

bool gamma_known(double gamma) { return gamma == 2.0 || gamma == 2.5 || gamma == 3.0; }

}  // namespace

int SchemeTerm::slots() const {
  int s = 0;
  for (const auto& t : tokens(word)) s += (t == "G" || t == "S") ? 1 : 0;
  return s;
}

void SchemeSpec::validate() const {
  if (!gamma_known(gamma)) throw ArgumentError("scheme order must be 2.0, 2.5 or 3.0");
  if (!(plan.delta > 0.0)) throw ArgumentError("scheme plan has no step size");
  if (plan.gamma != gamma) throw ArgumentError("scheme order does not match the plan order");
  for (const auto& f : order_families(gamma))
    if (!plan.q_map.count(f)) throw ArgumentError("plan has no level for family " + f.str());
}

std::vector<SchemeTerm> scheme_terms(IntegralKind kind, double gamma) {
  if (!gamma_known(gamma)) throw ArgumentError("scheme order must be 2.0, 2.5 or 3.0");
  std::vector<SchemeTerm> out;
  for (SchemeTerm term : ito_table()) {
    if (term.min_gamma > gamma) continue;
    if (kind == IntegralKind::Stratonovich) {
      // The order-2.5 scheme keeps the plain third-order drift term.
      const bool keep_plain = term.word == "L L a" && gamma < 3.0;
      if (!keep_plain) {
        std::string barred;
        for (const auto& t : tokens(term.word)) {
          if (!barred.empty()) barred += ' ';
          barred += t == "L" ? "Lb" : t == "a" ? "ab" : t;
        }
        term.word = barred;
      }
    }
    out.push_back(std::move(term));
  }
  return out;
}

OperatorWord instantiate_word(const std::string& word, IntegralKind, std::span<const int> slots) {
  const auto toks = tokens(word);
  if (toks.empty()) throw ArgumentError("empty scheme word");
  OperatorWord w;
  size_t s = 0;
  auto next_slot = [&]() {
    if (s >= slots.size()) throw ArgumentError("too few noise indices for word '" + word + "'");
    return slots[s++];
  };
  for (size_t p = 0; p + 1 < toks.size(); ++p) {
    const auto& t = toks[p];
    if (t == "G")
      w.ops.push_back({OpKind::G0, next_slot()});
    else if (t == "L")
      w.ops.push_back({OpKind::L, 0});
    else if (t == "Lb")
      w.ops.push_back({OpKind::LBar, 0});
    else
      throw ArgumentError("bad operator token '" + t + "'");
  }
  const auto& last = toks.back();
  if (last == "S") {
    w.terminal = TerminalKind::Sigma;
    w.terminal_index = next_slot();
  } else if (last == "a") {
    w.terminal = TerminalKind::Drift;
  } else if (last == "ab") {
    w.terminal = TerminalKind::DriftBar;
  } else {
    throw ArgumentError("bad terminal token '" + last + "'");
  }
  if (s != slots.size()) throw ArgumentError("too many noise indices for word '" + word + "'");
  return w;
}

Stepper::Stepper(const SdeModel& model, SchemeSpec spec) : model_(model), spec_(std::move(spec)) {
  model_.validate();
  spec_.validate();
  for (auto& term : scheme_terms(spec_.kind, spec_.gamma)) {
    Compiled c{term, {}};
    const int s = term.slots();
    std::vector<int> slots(s, 1);
    long count = 1;
    for (int r = 0; r < s; ++r) count *= model_.m;
    for (long idx = 0; idx < count; ++idx) {
      long rest = idx;
      for (int r = 0; r < s; ++r) {
        slots[r] = static_cast<int>(rest % model_.m) + 1;
        rest /= model_.m;
      }
      Instance inst{slots, instantiate_word(term.word, spec_.kind, slots), {}, {}};
      if (model_.linear && !model_.exact_word) std::tie(inst.M, inst.v) = linear_word(*model_.linear, inst.word);
      c.instances.push_back(std::move(inst));
    }
    terms_.push_back(std::move(c));
  }
}

Vec Stepper::step(const Vec& y, long p, const NoiseBasis& basis, StepInstrumentation* instr) const {
  if (basis.m() != model_.m) throw ArgumentError("noise basis dimension does not match the model");
  if (std::abs(basis.delta() - spec_.plan.delta) > 1e-12 * spec_.plan.delta)
    throw ArgumentError("noise basis step does not match the plan");
  return step(y, p, batch_evaluate(spec_.plan, basis, spec_.kind), instr);
}

Vec Stepper::step(const Vec& y, long p, const IntegralBatch& integrals, StepInstrumentation* instr) const {
  const double delta = spec_.plan.delta;
  const double t = static_cast<double>(p) * delta;
  const bool linear = model_.linear && !model_.exact_word;
  Vec out = y;
  Mat Msum;
  Vec vsum;
  if (linear) {
    Msum = Mat::Zero(model_.n, model_.n);
    vsum = Vec::Zero(model_.n);
  }
  for (const auto& c : terms_) {
    if (instr) instr->words.insert(c.term.word);
    for (const auto& inst : c.instances) {
      double coef = 0.0;
      for (const auto& pc : c.term.pieces) {
        double v = pc.factor * std::pow(delta, pc.delta_power);
        if (pc.family) {
          if (instr) instr->families.insert(*pc.family);
          v *= integrals.value(*pc.family, inst.slots);
        }
        coef += v;
      }
      if (coef == 0.0) continue;
      if (linear) {
        Msum.noalias() += coef * inst.M;
        vsum.noalias() += coef * inst.v;
      } else {
        out.noalias() += coef * evaluate_word(model_, inst.word, y, t);
      }
    }
  }
  if (linear) out += Msum * y + vsum;
  return out;
}

Vec step_ito(const SdeModel& model, const SchemeSpec& spec, const Vec& y, long p, const NoiseBasis& basis) {
  SchemeSpec s = spec;
  s.kind = IntegralKind::Ito;
  return Stepper(model, s).step(y, p, basis);
}

Vec step_strat(const SdeModel& model, const SchemeSpec& spec, const Vec& y, long p, const NoiseBasis& basis) {
  SchemeSpec s = spec;
  s.kind = IntegralKind::Stratonovich;
  return Stepper(model, s).step(y, p, basis);
}

Vec euler_maruyama_step(const SdeModel& model, const Vec& y, long p, const NoiseBasis& basis) {
  const double delta = basis.delta();
  const double t = static_cast<double>(p) * delta;
  Vec out = y + delta * model.drift(y, t);
  const Mat S = model.diffusion(y, t);
  const double sd = std::sqrt(delta);
  for (int i = 1; i <= model.m; ++i) out += S.col(i - 1) * (sd * basis.zeta(i, 0));
  return out;
}

Trajectory simulate(const SdeModel& model, const SchemeSpec& spec, double T_end, long N, std::uint64_t seed,
                    std::uint64_t stream) {
  if (N <= 0) throw ArgumentError("number of steps must be positive");
  if (!(T_end > 0.0)) throw ArgumentError("time horizon must be positive");
  const double delta = T_end / static_cast<double>(N);
  if (std::abs(delta - spec.plan.delta) > 1e-12 * delta) throw ArgumentError("T / N does not match the plan step");
  const Stepper stepper(model, spec);
  RngStream rng(seed, stream);
  Trajectory traj;
  traj.seed = seed;
  traj.stream = stream;
  traj.times.push_back(0.0);
  traj.states.push_back(model.x0);
  Vec y = model.x0;
  for (long p = 0; p < N; ++p) {
    const NoiseBasis basis = sample_basis(model.m, spec.plan.j_max, delta, rng);
    y = stepper.step(y, p, basis);
    if (!y.allFinite()) throw BlowUpError(p, "state became non-finite at step " + std::to_string(p));
    traj.times.push_back(static_cast<double>(p + 1) * delta);
    traj.states.push_back(y);
  }
  return traj;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace stochtaylor
