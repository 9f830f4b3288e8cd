#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "slt/dataset.hpp"
#include "slt/network.hpp"
#include "slt/rng.hpp"

namespace slt::ga {

enum class Objective { Accuracy, CrossEntropyLoss };
enum class CrossoverKind { Uniform, SinglePoint };

// Exponential acceptance bound for freshly generated individuals: candidates
// whose train accuracy falls below the current bound are discarded, and after
// every attempts_per_step consecutive rejections the bound decays to
// initial_bound * exp(-decay_lambda * steps), floored at min_bound.
struct AdaptiveBoundConfig {
  double initial_bound = 0.85;
  double decay_lambda = 0.05;
  int attempts_per_step = 1000;
  std::optional<double> min_bound;  // unset: 1 / class_count
};

struct GaConfig {
  int pop_size = 100;
  double rec_rate = 0.3;  // chance each member becomes a first parent
  double par_rate = 0.3;  // partners drawn from top round(N*par_rate)
  double mut_rate = 0.1;  // chance each member spawns a one-bit mutant
  double mig_rate = 0.1;  // round(N*mig_rate) fresh individuals per generation
  Objective objective = Objective::Accuracy;
  double init_density = 0.5;
  int min_generations = 100;
  int stagnation_window = 50;
  // Unset means unlimited, except that an active adaptive_bound defaults the
  // limit to 200 generations.
  std::optional<int> max_generations;
  std::optional<AdaptiveBoundConfig> adaptive_bound;
  CrossoverKind crossover = CrossoverKind::Uniform;
  double loss_tie_tol = 1e-6;
  std::uint64_t master_seed = 0;

  int effective_max_generations() const {
    if (max_generations) return *max_generations;
    return adaptive_bound ? 200 : -1;  // -1 = unlimited
  }
  void validate() const;  // throws ConfigError
};

struct Individual {
  BitMask mask;
  // Train accuracy or train cross-entropy, depending on the objective.
  double fitness_performance = 0.0;
  double fitness_sparsity = 0.0;
  double train_accuracy = 0.0;
  bool evaluated = false;
};

struct Population {
  std::vector<Individual> members;
  int generation = 0;
  Individual best_ever;
};

struct GenerationRecord {
  int generation = 0;
  double best_perf = 0.0;
  double best_sparsity = 0.0;
  double pop_max_sparsity = 0.0;
  double ever_best_sparsity = 0.0;
};

struct RunResult {
  BitMask best_mask;
  EvalMetrics best_train_metrics;
  EvalMetrics best_test_metrics;
  int generations_run = 0;
  std::vector<GenerationRecord> history;  // one record per generation
};

// Memo of mask evaluations; keyed by packed mask bits. Only the coordinator
// thread touches it, so no locking.
class FitnessCache {
 public:
  struct Entry {
    double performance;
    double accuracy;
    double sparsity;
  };
  const Entry* find(const BitMask& mask) const;
  void insert(const BitMask& mask, const Entry& e);
  std::size_t size() const { return map_.size(); }

 private:
  static std::string key_of(const BitMask& mask);
  std::unordered_map<std::string, Entry> map_;
};

// Read-only evaluation context shared by all fitness evaluations of a run.
struct EvalContext {
  const ParamVector* params = nullptr;
  const Dataset* train = nullptr;
  Objective objective = Objective::Accuracy;
  int workers = 1;
  FitnessCache* cache = nullptr;  // optional
};

// Each bit independently 1 with probability density.
BitMask generate_individual(int n_bits, double density, Rng& rng);

// Fills in fitness fields from one forward pass over ctx.train.
void evaluate(Individual& ind, const EvalContext& ctx);

// Evaluates every not-yet-evaluated member; cache-aware; parallel over
// ctx.workers with results stored by index, so the outcome is independent of
// the worker count.
void evaluate_all(std::vector<Individual>& inds, const EvalContext& ctx);

// (performance, sparsity) of a single mask under ctx.objective.
std::pair<double, double> evaluate_fitness(const BitMask& mask,
                                           const EvalContext& ctx);

// Strict weak ordering: better performance first (higher accuracy or lower
// loss; losses compared by floor(loss / loss_tie_tol) bucket so that
// tolerance ties are transitive), then higher sparsity. Full ties compare
// false both ways; stable sorting keeps insertion order.
bool lexical_less(const Individual& a, const Individual& b, Objective objective,
                  double loss_tie_tol);

void sort_lexical(std::vector<Individual>& inds, Objective objective,
                  double loss_tie_tol);

// Index pairs (first, second) into pop.members (which must be sorted).
// Each member becomes a first parent with probability rec_rate; partners are
// drawn uniformly from the top l = round(N * par_rate) members (floored at 1).
// Self-pairing is allowed.
std::vector<std::pair<int, int>> select_parents(const Population& pop,
                                                const GaConfig& cfg, Rng& rng);

// Uniform: each bit from a or b with probability 1/2. SinglePoint: one cut
// uniform in [1, n-1], prefix from a, suffix from b.
BitMask crossover(const BitMask& a, const BitMask& b, Rng& rng,
                  CrossoverKind kind = CrossoverKind::Uniform);

// Mutant with exactly one uniformly chosen bit flipped; not yet evaluated.
Individual mutate(const Individual& ind, Rng& rng);

// Live decay state of the adaptive accuracy bound. Inactive state accepts
// everything.
struct BoundState {
  bool active = false;
  double bound = 0.0;
  double initial_bound = 0.0;
  double decay_lambda = 0.0;
  int attempts_per_step = 0;
  double min_bound = 0.0;
  int decay_steps = 0;
  int consecutive_rejections = 0;

  void register_rejection();
  void register_acceptance() { consecutive_rejections = 0; }
};

BoundState make_bound_state(const GaConfig& cfg, int class_count);

// Draws random individuals until `count` pass the bound; evaluated on accept.
// All RNG draws happen on the caller's stream in a fixed order.
std::vector<Individual> generate_accepted(int count, const GaConfig& cfg,
                                          const EvalContext& ctx, Rng& rng,
                                          BoundState& bound);

// Initial population: pop_size accepted individuals, lexically sorted.
Population generate_initial_population(const GaConfig& cfg,
                                       const EvalContext& ctx, Rng& rng,
                                       BoundState& bound);
Population generate_initial_population(const GaConfig& cfg,
                                       const EvalContext& ctx);

// round(N * mig_rate) fresh individuals under the current bound.
std::vector<Individual> migrate(const GaConfig& cfg, const EvalContext& ctx,
                                Rng& rng, BoundState& bound);

// Lexically sorts interim members, keeps the top pop_size (all members when
// fewer), and updates best_ever.
Population select_survivors(Population interim, const GaConfig& cfg);

// Full evolution loop. Terminates when generation >= min_generations and the
// best performance has not strictly improved for stagnation_window
// generations, or at effective_max_generations. Deterministic in
// (cfg, params, data) for any worker count.
RunResult evolve(const GaConfig& cfg, const ParamVector& params,
                 const SplitDataset& data, int workers = 1);

// Sweeps bit indices in order: each 1-bit is tentatively zeroed and the zero
// kept iff train accuracy stays at or above the running best, which updates
// whenever a flip improves it. The sweep repeats until a full pass removes
// nothing; a bit that is load-bearing in a dense mask can become removable
// after later removals, so a single pass is not a fixed point. Never lowers
// train accuracy, never lowers sparsity, idempotent.
BitMask post_evolutionary_prune(const BitMask& mask, const EvalContext& ctx);

}  // namespace slt::ga
