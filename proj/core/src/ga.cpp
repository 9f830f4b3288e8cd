#include "slt/ga.hpp"

#include <algorithm>
#include <cmath>

#include "slt/errors.hpp"
#include "slt/parallel.hpp"

namespace slt::ga {

namespace {

bool perf_better(double a, double b, Objective obj) {
  return obj == Objective::Accuracy ? a > b : a < b;
}

// Losses within the tie tolerance must group transitively, so compare decay
// buckets instead of |a-b| <= tol (which is not transitive).
double loss_bucket(double loss, double tol) {
  return tol > 0.0 ? std::floor(loss / tol) : loss;
}

void require_rate(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ConfigError(std::string(name) + " must be in [0, 1]");
}

}  // namespace

void GaConfig::validate() const {
  if (pop_size < 1) throw ConfigError("pop_size must be positive");
  require_rate(rec_rate, "rec_rate");
  require_rate(par_rate, "par_rate");
  require_rate(mut_rate, "mut_rate");
  require_rate(mig_rate, "mig_rate");
  if (!(init_density > 0.0 && init_density <= 1.0))
    throw ConfigError("init_density must be in (0, 1]");
  if (min_generations < 0) throw ConfigError("min_generations must be nonnegative");
  if (stagnation_window < 1) throw ConfigError("stagnation_window must be positive");
  if (max_generations && *max_generations < 1)
    throw ConfigError("max_generations must be positive");
  if (loss_tie_tol < 0.0) throw ConfigError("loss_tie_tol must be nonnegative");
  if (adaptive_bound) {
    if (!(adaptive_bound->initial_bound > 0.0))
      throw ConfigError("adaptive bound initial_bound must be positive");
    if (!(adaptive_bound->decay_lambda > 0.0))
      throw ConfigError("adaptive bound decay_lambda must be positive");
    if (adaptive_bound->attempts_per_step < 1)
      throw ConfigError("adaptive bound attempts_per_step must be positive");
    if (adaptive_bound->min_bound && !(*adaptive_bound->min_bound >= 0.0))
      throw ConfigError("adaptive bound min_bound must be nonnegative");
  }
}

const FitnessCache::Entry* FitnessCache::find(const BitMask& mask) const {
  auto it = map_.find(key_of(mask));
  return it == map_.end() ? nullptr : &it->second;
}

void FitnessCache::insert(const BitMask& mask, const Entry& e) {
  map_.emplace(key_of(mask), e);
}

std::string FitnessCache::key_of(const BitMask& mask) {
  std::string key(static_cast<std::size_t>((mask.size() + 7) / 8), '\0');
  for (int i = 0; i < mask.size(); ++i) {
    if (mask.bits[static_cast<std::size_t>(i)])
      key[static_cast<std::size_t>(i >> 3)] |= static_cast<char>(1 << (i & 7));
  }
  return key;
}

BitMask generate_individual(int n_bits, double density, Rng& rng) {
  if (!(density > 0.0 && density <= 1.0))
    throw ConfigError("mask density must be in (0, 1]");
  BitMask m = BitMask::zeros(n_bits);
  for (int i = 0; i < n_bits; ++i)
    m.bits[static_cast<std::size_t>(i)] = rng.next_double() < density ? 1 : 0;
  return m;
}

namespace {

FitnessCache::Entry compute_entry(const BitMask& mask, const EvalContext& ctx) {
  const EvalMetrics m =
      evaluate_metrics(MaskedNetwork(*ctx.params, mask), *ctx.train);
  const double perf =
      ctx.objective == Objective::Accuracy ? m.accuracy : m.cross_entropy;
  return FitnessCache::Entry{perf, m.accuracy, m.sparsity};
}

void fill_from_entry(Individual& ind, const FitnessCache::Entry& e) {
  ind.fitness_performance = e.performance;
  ind.fitness_sparsity = e.sparsity;
  ind.train_accuracy = e.accuracy;
  ind.evaluated = true;
}

}  // namespace

void evaluate(Individual& ind, const EvalContext& ctx) {
  if (ctx.cache != nullptr) {
    if (const auto* e = ctx.cache->find(ind.mask)) {
      fill_from_entry(ind, *e);
      return;
    }
  }
  const auto e = compute_entry(ind.mask, ctx);
  fill_from_entry(ind, e);
  if (ctx.cache != nullptr) ctx.cache->insert(ind.mask, e);
}

void evaluate_all(std::vector<Individual>& inds, const EvalContext& ctx) {
  std::vector<int> misses;
  for (int i = 0; i < static_cast<int>(inds.size()); ++i) {
    Individual& ind = inds[static_cast<std::size_t>(i)];
    if (ind.evaluated) continue;
    if (ctx.cache != nullptr) {
      if (const auto* e = ctx.cache->find(ind.mask)) {
        fill_from_entry(ind, *e);
        continue;
      }
    }
    misses.push_back(i);
  }
  std::vector<FitnessCache::Entry> results(misses.size());
  parallel_for(static_cast<int>(misses.size()), ctx.workers, [&](int j) {
    results[static_cast<std::size_t>(j)] =
        compute_entry(inds[static_cast<std::size_t>(misses[static_cast<std::size_t>(j)])].mask, ctx);
  });
  for (std::size_t j = 0; j < misses.size(); ++j) {
    Individual& ind = inds[static_cast<std::size_t>(misses[j])];
    fill_from_entry(ind, results[j]);
    if (ctx.cache != nullptr) ctx.cache->insert(ind.mask, results[j]);
  }
}

std::pair<double, double> evaluate_fitness(const BitMask& mask,
                                           const EvalContext& ctx) {
  Individual ind;
  ind.mask = mask;
  evaluate(ind, ctx);
  return {ind.fitness_performance, ind.fitness_sparsity};
}

bool lexical_less(const Individual& a, const Individual& b, Objective objective,
                  double loss_tie_tol) {
  if (objective == Objective::Accuracy) {
    if (a.fitness_performance != b.fitness_performance)
      return a.fitness_performance > b.fitness_performance;
  } else {
    const double ba = loss_bucket(a.fitness_performance, loss_tie_tol);
    const double bb = loss_bucket(b.fitness_performance, loss_tie_tol);
    if (ba != bb) return ba < bb;
  }
  return a.fitness_sparsity > b.fitness_sparsity;
}

void sort_lexical(std::vector<Individual>& inds, Objective objective,
                  double loss_tie_tol) {
  std::stable_sort(inds.begin(), inds.end(),
                   [&](const Individual& a, const Individual& b) {
                     return lexical_less(a, b, objective, loss_tie_tol);
                   });
}

std::vector<std::pair<int, int>> select_parents(const Population& pop,
                                                const GaConfig& cfg, Rng& rng) {
  const int n = static_cast<int>(pop.members.size());
  int l = static_cast<int>(std::llround(cfg.pop_size * cfg.par_rate));
  l = std::clamp(l, 1, n);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    if (rng.next_double() < cfg.rec_rate) pairs.emplace_back(i, rng.below_int(l));
  }
  return pairs;
}

BitMask crossover(const BitMask& a, const BitMask& b, Rng& rng,
                  CrossoverKind kind) {
  if (a.size() != b.size()) throw ShapeError("crossover mask lengths differ");
  const int n = a.size();
  BitMask child = BitMask::zeros(n);
  if (kind == CrossoverKind::Uniform) {
    for (int i = 0; i < n; ++i) {
      child.bits[static_cast<std::size_t>(i)] =
          rng.next_double() < 0.5 ? a.bits[static_cast<std::size_t>(i)]
                                  : b.bits[static_cast<std::size_t>(i)];
    }
  } else {
    const int cut = n > 1 ? 1 + rng.below_int(n - 1) : 1;
    for (int i = 0; i < n; ++i) {
      child.bits[static_cast<std::size_t>(i)] =
          i < cut ? a.bits[static_cast<std::size_t>(i)]
                  : b.bits[static_cast<std::size_t>(i)];
    }
  }
  return child;
}

Individual mutate(const Individual& ind, Rng& rng) {
  Individual out;
  out.mask = ind.mask;
  const int idx = rng.below_int(out.mask.size());
  out.mask.bits[static_cast<std::size_t>(idx)] ^= 1;
  return out;
}

void BoundState::register_rejection() {
  if (!active) return;
  if (++consecutive_rejections >= attempts_per_step) {
    consecutive_rejections = 0;
    ++decay_steps;
    bound = std::max(min_bound, initial_bound * std::exp(-decay_lambda * decay_steps));
  }
}

BoundState make_bound_state(const GaConfig& cfg, int class_count) {
  BoundState s;
  if (!cfg.adaptive_bound) return s;
  const auto& ab = *cfg.adaptive_bound;
  s.active = true;
  s.initial_bound = ab.initial_bound;
  s.bound = ab.initial_bound;
  s.decay_lambda = ab.decay_lambda;
  s.attempts_per_step = ab.attempts_per_step;
  s.min_bound = ab.min_bound ? *ab.min_bound : 1.0 / std::max(class_count, 1);
  return s;
}

std::vector<Individual> generate_accepted(int count, const GaConfig& cfg,
                                          const EvalContext& ctx, Rng& rng,
                                          BoundState& bound) {
  const int n_bits = ctx.params->arch.weight_count();
  std::vector<Individual> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    Individual ind;
    ind.mask = generate_individual(n_bits, cfg.init_density, rng);
    evaluate(ind, ctx);
    if (!bound.active || ind.train_accuracy >= bound.bound) {
      bound.register_acceptance();
      out.push_back(std::move(ind));
    } else {
      bound.register_rejection();
    }
  }
  return out;
}

Population generate_initial_population(const GaConfig& cfg,
                                       const EvalContext& ctx, Rng& rng,
                                       BoundState& bound) {
  Population pop;
  pop.members = generate_accepted(cfg.pop_size, cfg, ctx, rng, bound);
  sort_lexical(pop.members, cfg.objective, cfg.loss_tie_tol);
  pop.generation = 0;
  pop.best_ever = pop.members.front();
  return pop;
}

Population generate_initial_population(const GaConfig& cfg,
                                       const EvalContext& ctx) {
  Rng rng(cfg.master_seed);
  BoundState bound = make_bound_state(cfg, ctx.train->class_count);
  return generate_initial_population(cfg, ctx, rng, bound);
}

std::vector<Individual> migrate(const GaConfig& cfg, const EvalContext& ctx,
                                Rng& rng, BoundState& bound) {
  const int m = static_cast<int>(std::llround(cfg.pop_size * cfg.mig_rate));
  if (m <= 0) return {};
  return generate_accepted(m, cfg, ctx, rng, bound);
}

Population select_survivors(Population interim, const GaConfig& cfg) {
  sort_lexical(interim.members, cfg.objective, cfg.loss_tie_tol);
  if (static_cast<int>(interim.members.size()) > cfg.pop_size)
    interim.members.resize(static_cast<std::size_t>(cfg.pop_size));
  if (interim.members.empty()) throw EmptyDataError("empty interim population");
  const Individual& top = interim.members.front();
  if (!interim.best_ever.evaluated ||
      lexical_less(top, interim.best_ever, cfg.objective, cfg.loss_tie_tol)) {
    interim.best_ever = top;
  }
  return interim;
}

RunResult evolve(const GaConfig& cfg, const ParamVector& params,
                 const SplitDataset& data, int workers) {
  cfg.validate();
  params.validate();
  data.train.validate();
  data.test.validate();
  if (params.arch.input_width() != data.train.feature_count())
    throw ShapeError("architecture input width does not match dataset");

  FitnessCache cache;
  EvalContext ctx{&params, &data.train, cfg.objective, workers, &cache};

  // Draw-order contract (fixed so runs reproduce from master_seed alone):
  // initial population candidates, then per generation: first-parent
  // bernoullis interleaved with partner picks in member order, crossover bits
  // per pair, mutation bernoullis interleaved with flip indices in member
  // order, migrant candidates. Fitness evaluation never consumes RNG state.
  Rng rng(cfg.master_seed);
  BoundState bound = make_bound_state(cfg, data.train.class_count);
  Population pop = generate_initial_population(cfg, ctx, rng, bound);

  double best_perf = pop.best_ever.fitness_performance;
  int last_improve = 0;
  const int max_g = cfg.effective_max_generations();

  RunResult result;
  int g = 0;
  while (true) {
    if (max_g > 0 && g >= max_g) break;
    if (g >= cfg.min_generations && g - last_improve >= cfg.stagnation_window) break;
    ++g;

    const auto pairs = select_parents(pop, cfg, rng);
    std::vector<Individual> offspring;
    offspring.reserve(pairs.size());
    for (const auto& [first, second] : pairs) {
      Individual child;
      child.mask = crossover(pop.members[static_cast<std::size_t>(first)].mask,
                             pop.members[static_cast<std::size_t>(second)].mask,
                             rng, cfg.crossover);
      offspring.push_back(std::move(child));
    }
    std::vector<Individual> mutants;
    for (const auto& member : pop.members) {
      if (rng.next_double() < cfg.mut_rate) mutants.push_back(mutate(member, rng));
    }
    std::vector<Individual> migrants = migrate(cfg, ctx, rng, bound);

    evaluate_all(offspring, ctx);
    evaluate_all(mutants, ctx);

    Population interim;
    interim.generation = g;
    interim.best_ever = pop.best_ever;
    interim.members = std::move(pop.members);
    auto append = [&interim](std::vector<Individual>&& v) {
      for (auto& ind : v) interim.members.push_back(std::move(ind));
    };
    append(std::move(offspring));
    append(std::move(mutants));
    append(std::move(migrants));

    pop = select_survivors(std::move(interim), cfg);
    pop.generation = g;

    if (perf_better(pop.best_ever.fitness_performance, best_perf, cfg.objective)) {
      best_perf = pop.best_ever.fitness_performance;
      last_improve = g;
    }

    GenerationRecord rec;
    rec.generation = g;
    rec.best_perf = pop.members.front().fitness_performance;
    rec.best_sparsity = pop.members.front().fitness_sparsity;
    rec.pop_max_sparsity = 0.0;
    for (const auto& member : pop.members)
      rec.pop_max_sparsity = std::max(rec.pop_max_sparsity, member.fitness_sparsity);
    rec.ever_best_sparsity = pop.best_ever.fitness_sparsity;
    result.history.push_back(rec);
  }

  result.generations_run = g;
  result.best_mask = pop.best_ever.mask;
  result.best_train_metrics =
      evaluate_metrics(MaskedNetwork(params, result.best_mask), data.train);
  result.best_test_metrics =
      evaluate_metrics(MaskedNetwork(params, result.best_mask), data.test);
  return result;
}

BitMask post_evolutionary_prune(const BitMask& mask, const EvalContext& ctx) {
  BitMask m = mask;
  bool removed_any = true;
  // Each pass is monotone in accuracy and sparsity, and every pass that is
  // not the last removes at least one bit, so the loop ends within popcount
  // passes. Stopping at a pass that removes nothing makes the result a fixed
  // point: re-running the function returns it unchanged.
  while (removed_any) {
    removed_any = false;
    double running = accuracy(MaskedNetwork(*ctx.params, m), *ctx.train);
    for (int i = 0; i < m.size(); ++i) {
      if (!m.bits[static_cast<std::size_t>(i)]) continue;
      m.bits[static_cast<std::size_t>(i)] = 0;
      const double after = accuracy(MaskedNetwork(*ctx.params, m), *ctx.train);
      if (after >= running) {
        if (after > running) running = after;
        removed_any = true;
      } else {
        m.bits[static_cast<std::size_t>(i)] = 1;
      }
    }
  }
  return m;
}

}  // namespace slt::ga
