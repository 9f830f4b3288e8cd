// Acceptance checks. Each invocation runs one numbered criterion and prints
// a single "ACCEPT <n>: PASS|FAIL ..." line with the observed statistics and
// the bands it was judged against; exit code 0 on pass, 1 on fail.
//
// Criteria 1-6 are desk-scale reproductions of published mean accuracies:
// stochastic, but fully seeded, so reruns are bit-identical. Criteria 7-12
// are deterministic property checks against independent oracles. Criterion
// 13 drives the installed command line binary twice and compares payload
// bytes.
//
// Sizing note: this suite is tuned for a single-core machine. Where the
// reference experiments used 66k-point datasets, criteria 1 and 2 subsample
// to 10k points and the acceptance band is widened to +-0.03; every such
// adaptation is printed in the verdict line.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slt/analysis.hpp"
#include "slt/backprop.hpp"
#include "slt/dataset.hpp"
#include "slt/edge_popup.hpp"
#include "slt/errors.hpp"
#include "slt/ga.hpp"
#include "slt/landscape.hpp"
#include "slt/network.hpp"
#include "slt/rng.hpp"

namespace fs = std::filesystem;
using namespace slt;

namespace {

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
  int n = 0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  s.n = static_cast<int>(xs.size());
  for (double x : xs) s.mean += x;
  s.mean /= s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

// Mirrors the tool's per-repeat seeding: parameters and evolution draw from
// independent streams derived from the repeat seed.
struct GaOut {
  ga::RunResult result;
  ParamVector params;
};

GaOut ga_repeat(const NetworkArch& arch, const InitScheme& scheme,
                const SplitDataset& data, ga::GaConfig cfg,
                std::uint64_t repeat_seed) {
  GaOut out;
  out.params = init_network(arch, scheme, mix_seed(repeat_seed, 1));
  cfg.master_seed = mix_seed(repeat_seed, 2);
  out.result = ga::evolve(cfg, out.params, data, 1);
  return out;
}

void progress(const char* what, int done, int total, double value) {
  std::fprintf(stderr, "  %s %d/%d: %.4f\n", what, done, total, value);
  std::fflush(stderr);
}

bool verdict(int criterion, bool pass, const std::string& details) {
  std::printf("ACCEPT %d: %s -- %s\n", criterion, pass ? "PASS" : "FAIL",
              details.c_str());
  return pass;
}

std::string fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

// --- criterion 1: GA reproduces the published moons accuracy -------------

bool criterion_1() {
  const Dataset raw = gen_moons(10000, 0.07, 4242);
  const SplitDataset data = split(minmax_normalize(raw, -0.7, 0.7), 0.25, 4243);
  const NetworkArch arch = named_arch('D', 2, 2);
  const ga::GaConfig cfg;  // default configuration
  const int repeats = 50;

  std::vector<double> accs;
  for (int r = 0; r < repeats; ++r) {
    const GaOut out = ga_repeat(arch, InitScheme::uniform(-1.0, 1.0), data,
                                cfg, 1000 + static_cast<std::uint64_t>(r));
    accs.push_back(out.result.best_test_metrics.accuracy);
    progress("moons run", r + 1, repeats, accs.back());
  }
  const Stats s = stats_of(accs);
  const double center = 0.998, half = 0.03;
  const bool pass = std::abs(s.mean - center) <= half;
  return verdict(
      1, pass,
      fmt("GA moons arch D, R=%d: mean test accuracy %.4f (std %.4f) vs "
          "%.3f +- %.3f [dataset subsampled to 10k points, band widened to "
          "+-0.03]",
          repeats, s.mean, s.stddev, center, half));
}

// --- criterion 2: GA reproduces the published circles accuracy -----------

bool criterion_2() {
  const SplitDataset data = split(gen_circles(10000, 0.07, 5252), 0.25, 5253);
  const NetworkArch arch = named_arch('D', 2, 2);
  const ga::GaConfig cfg;  // default configuration
  const int repeats = 25;

  std::vector<double> accs;
  for (int r = 0; r < repeats; ++r) {
    const GaOut out = ga_repeat(arch, InitScheme::uniform(-1.0, 1.0), data,
                                cfg, 2000 + static_cast<std::uint64_t>(r));
    accs.push_back(out.result.best_test_metrics.accuracy);
    progress("circles run", r + 1, repeats, accs.back());
  }
  const Stats s = stats_of(accs);
  const double center = 0.916, half = 0.03;
  const bool pass = std::abs(s.mean - center) <= half;
  return verdict(
      2, pass,
      fmt("GA circles arch D, R=%d: mean test accuracy %.4f (std %.4f) vs "
          "%.3f +- %.3f [dataset subsampled to 10k points, band widened to "
          "+-0.03]",
          repeats, s.mean, s.stddev, center, half));
}

// --- criterion 3: loss-objective GA solves normalized blobs --------------

bool criterion_3() {
  const int repeats = 10;
  bool pass = true;
  std::string detail = "GA loss objective, blobs arch C, mean test accuracy:";
  for (int classes = 3; classes <= 9; ++classes) {
    const Dataset raw =
        gen_blobs(4000, classes, 6000 + static_cast<std::uint64_t>(classes));
    const SplitDataset data = split(minmax_normalize(raw, 0.0, 1.0), 0.25,
                                    6100 + static_cast<std::uint64_t>(classes));
    const NetworkArch arch = named_arch('C', 2, classes);

    ga::GaConfig cfg;
    cfg.objective = ga::Objective::CrossEntropyLoss;
    // Default config otherwise; the generation cap bounds desk-scale runtime
    // (loss keeps creeping, so stagnation alone can run very long).
    cfg.max_generations = 250;

    std::vector<double> accs;
    for (int r = 0; r < repeats; ++r) {
      const GaOut out = ga_repeat(
          arch, InitScheme::uniform(-1.0, 1.0), data, cfg,
          3000 + 100 * static_cast<std::uint64_t>(classes) +
              static_cast<std::uint64_t>(r));
      accs.push_back(out.result.best_test_metrics.accuracy);
      progress("blobs run", r + 1, repeats, accs.back());
    }
    const Stats s = stats_of(accs);
    std::fprintf(stderr, "  blobs %d classes: mean %.4f\n", classes, s.mean);
    pass = pass && s.mean >= 0.99;
    detail += fmt(" %d:%.4f", classes, s.mean);
  }
  detail += " (threshold 0.99 per class count)";
  return verdict(3, pass, detail);
}

// --- criterion 4: edge-popup initialization ablation on circles ----------

bool criterion_4() {
  const SplitDataset data = split(gen_circles(10000, 0.07, 5252), 0.25, 5253);
  const NetworkArch arch = named_arch('B', 2, 2);
  const int repeats = 5;

  auto mean_acc = [&](EpInit init, std::uint64_t base) {
    std::vector<double> accs;
    for (int r = 0; r < repeats; ++r) {
      EdgePopupConfig cfg;
      cfg.init = init;
      cfg.seed = base + static_cast<std::uint64_t>(r);
      const EdgePopupResult res = edge_popup_train(arch, data, cfg);
      accs.push_back(accuracy(MaskedNetwork(res.params, res.mask), data.test));
      progress("edge-popup run", r + 1, repeats, accs.back());
    }
    return stats_of(accs).mean;
  };

  const double kaiming = mean_acc(EpInit::KaimingNormalScaled, 4100);
  const double signed_k = mean_acc(EpInit::SignedKaimingConstantScaled, 4200);
  const double uniform = mean_acc(EpInit::UniformPm1, 4300);

  const bool pass = std::abs(kaiming - 0.5) <= 0.05 &&
                    std::abs(signed_k - 0.5) <= 0.05 && uniform >= 0.65 &&
                    uniform - std::max(kaiming, signed_k) >= 0.1;
  return verdict(
      4, pass,
      fmt("edge-popup circles arch B, R=%d per init: kaiming-normal %.4f, "
          "signed-kaiming-constant %.4f (both required within 0.5 +- 0.05), "
          "uniform-pm1 %.4f (required >= 0.65 and >= 0.1 above both)",
          repeats, kaiming, signed_k, uniform));
}

// --- criterion 5: post-evolutionary pruning on 2-class digits ------------

bool criterion_5() {
  const Dataset raw = load_digits(SLT_DIGITS_CSV, {0, 1});
  const SplitDataset data = split(minmax_normalize(raw, 0.0, 1.0), 0.25, 7001);
  const NetworkArch arch = named_arch('B', 64, 2);
  const ga::GaConfig cfg;  // default configuration
  const int repeats = 5;

  std::vector<double> sparsities;
  double min_acc_delta = 1.0;
  for (int r = 0; r < repeats; ++r) {
    const GaOut out = ga_repeat(arch, InitScheme::uniform(-1.0, 1.0), data,
                                cfg, 5000 + static_cast<std::uint64_t>(r));
    ga::FitnessCache cache;
    ga::EvalContext ctx;
    ctx.params = &out.params;
    ctx.train = &data.train;
    ctx.objective = ga::Objective::Accuracy;
    ctx.workers = 1;
    ctx.cache = &cache;

    const double before =
        accuracy(MaskedNetwork(out.params, out.result.best_mask), data.train);
    const BitMask pruned =
        ga::post_evolutionary_prune(out.result.best_mask, ctx);
    const double after =
        accuracy(MaskedNetwork(out.params, pruned), data.train);

    sparsities.push_back(sparsity(pruned));
    min_acc_delta = std::min(min_acc_delta, after - before);
    progress("prune run", r + 1, repeats, sparsities.back());
  }
  const Stats s = stats_of(sparsities);
  const bool pass = s.mean >= 0.9 && min_acc_delta >= 0.0;
  return verdict(
      5, pass,
      fmt("post-evolutionary prune, digits {0,1} arch B, R=%d: mean "
          "post-prune sparsity %.4f (required >= 0.9), worst train-accuracy "
          "change %+.6f (required >= 0)",
          repeats, s.mean, min_acc_delta));
}

// --- criterion 6: algorithm ordering on 10-class digits ------------------

bool criterion_6() {
  const Dataset raw = load_digits(SLT_DIGITS_CSV, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const SplitDataset data = split(minmax_normalize(raw, 0.0, 1.0), 0.25, 7101);
  const NetworkArch arch = named_arch('B', 64, 10);

  std::vector<double> bp_accs;
  for (int r = 0; r < 3; ++r) {
    BackpropConfig cfg;
    cfg.solver = Solver::Adam;
    cfg.lr_schedule = LrSchedule::Adaptive;
    cfg.lr_init = 0.002783;
    cfg.epsilon = 7.74e-09;
    cfg.batch_size = 32;
    cfg.alpha = 0.004642;
    cfg.epochs = 1000;
    cfg.seed = 6100 + static_cast<std::uint64_t>(r);
    const BackpropResult res = train_backprop(arch, data, cfg);
    bp_accs.push_back(accuracy(MaskedNetwork(res.params), data.test));
    progress("backprop run", r + 1, 3, bp_accs.back());
  }

  std::vector<double> ep_accs;
  for (int r = 0; r < 5; ++r) {
    EdgePopupConfig cfg;
    cfg.prune_rate = 0.5;
    cfg.init = EpInit::UniformPm1;
    cfg.seed = 6200 + static_cast<std::uint64_t>(r);
    const EdgePopupResult res = edge_popup_train(arch, data, cfg);
    ep_accs.push_back(accuracy(MaskedNetwork(res.params, res.mask), data.test));
    progress("edge-popup run", r + 1, 5, ep_accs.back());
  }

  // The 94.0% reference row is the loss-objective GA on the normalized
  // dataset with the standard configuration; the accuracy objective stalls
  // near chance on ten classes.
  std::vector<double> ga_accs;
  for (int r = 0; r < 5; ++r) {
    ga::GaConfig cfg;
    cfg.objective = ga::Objective::CrossEntropyLoss;
    cfg.max_generations = 2000;  // desk-scale cap on stagnation termination
    const GaOut out = ga_repeat(arch, InitScheme::uniform(-1.0, 1.0), data,
                                cfg, 6300 + static_cast<std::uint64_t>(r));
    ga_accs.push_back(out.result.best_test_metrics.accuracy);
    progress("ga run", r + 1, 5, ga_accs.back());
  }

  const double bp = stats_of(bp_accs).mean;
  const double ep = stats_of(ep_accs).mean;
  const double ga_m = stats_of(ga_accs).mean;
  const double gap1 = bp - ep;   // reference 0.981 - 0.970 = 0.011
  const double gap2 = ep - ga_m; // reference 0.970 - 0.940 = 0.030
  const bool pass = bp >= ep && ep >= ga_m && std::abs(gap1 - 0.011) <= 0.02 &&
                    std::abs(gap2 - 0.030) <= 0.02;
  return verdict(
      6, pass,
      fmt("digits 10-class arch B mean test accuracy: backprop %.4f >= "
          "edge-popup(0.5) %.4f >= ga %.4f required; gaps %.4f vs 0.011 "
          "+- 0.02 and %.4f vs 0.030 +- 0.02",
          bp, ep, ga_m, gap1, gap2));
}

// --- criterion 7: analytic gradient vs central finite differences --------

bool criterion_7() {
  Rng rng(777);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<int> widths;
    const int layers = 2 + static_cast<int>(rng.below(2));
    widths.push_back(2 + rng.below_int(3));
    for (int l = 1; l < layers; ++l) widths.push_back(1 + rng.below_int(4));
    widths.push_back(2 + rng.below_int(3));
    const NetworkArch arch{std::vector<int>(widths)};

    const int rows = 8;
    Dataset ds;
    ds.class_count = arch.output_width();
    ds.features.resize(rows, arch.input_width());
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < arch.input_width(); ++j)
        ds.features(i, j) = rng.normal();
      ds.labels.push_back(rng.below_int(ds.class_count));
    }

    ParamVector p = init_network(arch, InitScheme::uniform(-1.0, 1.0),
                                 rng.next_u64());
    const double alpha = (t % 3 == 0) ? 0.0 : (t % 3 == 1 ? 0.01 : 0.1);
    const std::vector<double> g = gradient(p, ds, alpha);

    auto coord = [&](int i) -> double& {
      const int nw = arch.weight_count();
      return i < nw ? p.weights[static_cast<std::size_t>(i)]
                    : p.biases[static_cast<std::size_t>(i - nw)];
    };
    const int dim = arch.weight_count() + arch.bias_count();
    for (int i = 0; i < dim; ++i) {
      const double h = 1e-5;
      const double saved = coord(i);
      coord(i) = saved + h;
      const double up = penalized_loss(p, ds, alpha);
      coord(i) = saved - h;
      const double down = penalized_loss(p, ds, alpha);
      coord(i) = saved;
      const double fd = (up - down) / (2.0 * h);
      const double diff = std::abs(g[static_cast<std::size_t>(i)] - fd);
      if (diff < 1e-10) continue;  // finite-difference noise floor
      worst = std::max(worst, diff / std::max(1e-8, std::abs(fd)));
    }
  }
  const bool pass = worst < 1e-4;
  return verdict(7, pass,
                 fmt("gradient vs central finite differences over 100 random "
                     "tiny nets: max relative error %.3e (required < 1e-4)",
                     worst));
}

// --- criterion 8: GA matches the exhaustive 16-bit optimum ---------------

bool criterion_8() {
  // 20 points, linearly separable by the sign of x0 with margin 0.5. Init
  // seed 996 was probed exhaustively: optimum train accuracy 1.0, reached by
  // only 20 of the 65536 masks, so matching the oracle is a real search.
  Dataset ds;
  ds.class_count = 2;
  ds.features.resize(20, 2);
  {
    Rng rng(888);
    for (int i = 0; i < 20; ++i) {
      const int label = i % 2;
      ds.features(i, 0) = (label == 0 ? -1.0 : 1.0) * rng.uniform(0.25, 1.0);
      ds.features(i, 1) = rng.uniform(-1.0, 1.0);
      ds.labels.push_back(label);
    }
  }
  const SplitDataset data{ds, ds, 0.0};
  const NetworkArch arch{2, 4, 2};
  const ParamVector params =
      init_network(arch, InitScheme::uniform(-1.0, 1.0), 996);

  double best_exhaustive = 0.0;
  for (std::uint32_t m = 0; m < 65536u; ++m) {
    BitMask mask = BitMask::zeros(16);
    for (int b = 0; b < 16; ++b)
      mask.bits[static_cast<std::size_t>(b)] =
          static_cast<std::uint8_t>((m >> b) & 1u);
    best_exhaustive =
        std::max(best_exhaustive, accuracy(MaskedNetwork(params, mask), ds));
  }

  int matches = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) {
    ga::GaConfig cfg;
    cfg.master_seed = 9000 + static_cast<std::uint64_t>(r);
    const ga::RunResult res = ga::evolve(cfg, params, data, 1);
    if (std::abs(res.best_train_metrics.accuracy - best_exhaustive) < 1e-12)
      ++matches;
    progress("exhaustive-match run", r + 1, runs,
             res.best_train_metrics.accuracy);
  }
  const bool pass = matches >= 19;
  return verdict(
      8, pass,
      fmt("2-4-2 net, 20 points: exhaustive optimum over 65536 masks %.4f; "
          "GA matched it in %d/%d seeded runs (required >= 19)",
          best_exhaustive, matches, runs));
}

// --- criterion 9: lexical order laws and survivor selection oracle -------

ga::Individual make_ind(double perf, double sparsity_value) {
  ga::Individual ind;
  ind.fitness_performance = perf;
  ind.fitness_sparsity = sparsity_value;
  ind.evaluated = true;
  return ind;
}

bool criterion_9() {
  Rng rng(1234);
  const double tol = 1e-3;

  auto random_ind = [&](ga::Objective obj) {
    // Heavily quantized values so ties and near-ties are common.
    const double perf = obj == ga::Objective::Accuracy
                            ? rng.below_int(17) / 16.0
                            : rng.below_int(40) * (tol / 2.0);
    return make_ind(perf, rng.below_int(10) / 9.0);
  };

  for (ga::Objective obj :
       {ga::Objective::Accuracy, ga::Objective::CrossEntropyLoss}) {
    for (int t = 0; t < 10000; ++t) {
      const ga::Individual a = random_ind(obj);
      const ga::Individual b = random_ind(obj);
      const ga::Individual c = random_ind(obj);
      const bool ab = ga::lexical_less(a, b, obj, tol);
      const bool ba = ga::lexical_less(b, a, obj, tol);
      if (ab && ba)
        return verdict(9, false, "lexical order is not asymmetric");
      if (ga::lexical_less(a, a, obj, tol))
        return verdict(9, false, "lexical order is not irreflexive");
      const bool bc = ga::lexical_less(b, c, obj, tol);
      if (ab && bc && !ga::lexical_less(a, c, obj, tol))
        return verdict(9, false, "lexical order is not transitive");
      const bool cb = ga::lexical_less(c, b, obj, tol);
      if (!ab && !ba && !bc && !cb &&
          (ga::lexical_less(a, c, obj, tol) ||
           ga::lexical_less(c, a, obj, tol)))
        return verdict(9, false, "lexical equivalence is not transitive");
    }
  }

  // Survivor selection equals an independent stable sort plus truncation.
  for (int t = 0; t < 20; ++t) {
    ga::GaConfig cfg;
    cfg.pop_size = 100;
    cfg.loss_tie_tol = tol;
    ga::Population interim;
    interim.generation = t;
    for (int i = 0; i < 200; ++i) {
      ga::Individual ind = random_ind(cfg.objective);
      ind.mask = BitMask::zeros(8);
      for (int b = 0; b < 8; ++b)
        ind.mask.bits[static_cast<std::size_t>(b)] =
            static_cast<std::uint8_t>(rng.below(2));
      interim.members.push_back(ind);
    }
    std::vector<ga::Individual> expected = interim.members;
    std::stable_sort(expected.begin(), expected.end(),
                     [&](const ga::Individual& x, const ga::Individual& y) {
                       return ga::lexical_less(x, y, cfg.objective,
                                               cfg.loss_tie_tol);
                     });
    expected.resize(100);
    const ga::Population survivors = ga::select_survivors(interim, cfg);
    if (survivors.members.size() != expected.size())
      return verdict(9, false, "survivor count deviates from the oracle");
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const ga::Individual& got = survivors.members[i];
      const ga::Individual& want = expected[i];
      if (got.fitness_performance != want.fitness_performance ||
          got.fitness_sparsity != want.fitness_sparsity ||
          !(got.mask == want.mask))
        return verdict(9, false,
                       fmt("survivor %zu deviates from the sort-and-truncate "
                           "oracle in trial %d",
                           i, t));
    }
  }
  return verdict(9, true,
                 "lexical order laws hold over 10000 random tuples per "
                 "objective; survivor selection equals sort-and-truncate on "
                 "20 random populations");
}

// --- criterion 10: post-prune monotonicity and idempotence ---------------

bool criterion_10() {
  Rng rng(555);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> widths = {2 + rng.below_int(3), 1 + rng.below_int(5),
                               2 + rng.below_int(2)};
    const NetworkArch arch{std::vector<int>(widths)};
    const ParamVector params =
        init_network(arch, InitScheme::uniform(-1.0, 1.0), rng.next_u64());

    const int rows = 30;
    Dataset ds;
    ds.class_count = arch.output_width();
    ds.features.resize(rows, arch.input_width());
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < arch.input_width(); ++j)
        ds.features(i, j) = rng.normal();
      ds.labels.push_back(rng.below_int(ds.class_count));
    }

    const double density = 0.3 + 0.6 * rng.next_double();
    Rng mask_rng(rng.next_u64());
    const BitMask mask =
        ga::generate_individual(arch.weight_count(), density, mask_rng);

    ga::EvalContext ctx;
    ctx.params = &params;
    ctx.train = &ds;
    ctx.workers = 1;

    const double acc_before = accuracy(MaskedNetwork(params, mask), ds);
    const BitMask pruned = ga::post_evolutionary_prune(mask, ctx);
    const double acc_after = accuracy(MaskedNetwork(params, pruned), ds);

    if (acc_after < acc_before)
      return verdict(10, false,
                     fmt("trial %d: accuracy decreased %.4f -> %.4f", t,
                         acc_before, acc_after));
    if (sparsity(pruned) < sparsity(mask))
      return verdict(10, false, fmt("trial %d: sparsity decreased", t));
    const BitMask again = ga::post_evolutionary_prune(pruned, ctx);
    if (!(again == pruned))
      return verdict(10, false,
                     fmt("trial %d: second prune pass changed the mask", t));
  }
  return verdict(10, true,
                 "accuracy and sparsity non-decreasing and prune idempotent "
                 "on 100 random masked nets");
}

// --- criterion 11: edge-popup retained counts and frozen weights ---------

bool criterion_11() {
  const SplitDataset data = split(gen_moons(400, 0.1, 4040), 0.25, 4041);
  const NetworkArch arch{2, 10, 2};

  EdgePopupConfig cfg;
  cfg.prune_rate = 0.4;
  cfg.epochs = 12;
  cfg.batch_size = 32;
  cfg.seed = 11011;

  const EdgePopupResult res = edge_popup_train(arch, data, cfg);

  EdgePopupConfig one = cfg;
  one.epochs = 1;
  const EdgePopupResult short_run = edge_popup_train(arch, data, one);
  if (res.params.weights != short_run.params.weights ||
      res.params.biases != short_run.params.biases)
    return verdict(11, false, "weights changed between 1- and 12-epoch runs");

  if (res.epochs.size() != 12)
    return verdict(11, false, "epoch log has the wrong length");
  for (const EpEpochRecord& rec : res.epochs) {
    if (rec.retained_per_layer.size() != 2)
      return verdict(11, false, "retained counts missing a layer");
    for (int l = 0; l < 2; ++l) {
      const long expected =
          std::llround(cfg.prune_rate * arch.layer_weight_count(l));
      if (rec.retained_per_layer[static_cast<std::size_t>(l)] != expected)
        return verdict(
            11, false,
            fmt("epoch %d layer %d retained %d, expected %ld", rec.epoch, l,
                rec.retained_per_layer[static_cast<std::size_t>(l)],
                expected));
    }
  }

  // The final mask must obey the same per-layer counts.
  for (int l = 0; l < 2; ++l) {
    int count = 0;
    for (int i = 0; i < arch.layer_weight_count(l); ++i)
      count += res.mask.bits[static_cast<std::size_t>(
          arch.layer_weight_offset(l) + i)];
    if (count != std::llround(cfg.prune_rate * arch.layer_weight_count(l)))
      return verdict(11, false, fmt("final mask layer %d count %d", l, count));
  }
  return verdict(11, true,
                 "retained counts exactly round(k*count) in every epoch "
                 "record and the final mask; weights bit-identical across "
                 "epoch budgets");
}

// --- criterion 12: landscape center, HVP, and eigenprobe ------------------

bool criterion_12() {
  // Center anchoring on a small blobs problem.
  const Dataset blobs = minmax_normalize(gen_blobs(300, 3, 1212), 0.0, 1.0);
  const NetworkArch arch{2, 5, 3};
  const ParamVector params =
      init_network(arch, InitScheme::uniform(-1.0, 1.0), 1313);
  const int dim = arch.weight_count() + arch.bias_count();
  Directions dirs = sample_directions(dim, 1414);
  normalize_directions_per_block(dirs.d1, params);
  normalize_directions_per_block(dirs.d2, params);
  const LandscapeGrid grid =
      landscape_grid(params, dirs.d1, dirs.d2, -1.0, 1.0, 5,
                     LandscapeMetric::Loss, blobs, 1);
  const double direct = cross_entropy(MaskedNetwork(params), blobs);
  if (grid.values(2, 2) != direct)
    return verdict(12, false,
                   fmt("grid center %.17g differs from direct loss %.17g",
                       grid.values(2, 2), direct));

  // Hessian-vector products against a dense finite-difference Hessian.
  const NetworkArch tiny{2, 2, 2};
  const ParamVector tp = init_network(tiny, InitScheme::uniform(-1.0, 1.0), 77);
  const Dataset small = gen_moons(40, 0.1, 78);
  const double alpha = 0.05;
  const int tdim = tiny.weight_count() + tiny.bias_count();

  Eigen::MatrixXd hess(tdim, tdim);
  {
    ParamVector work = tp;
    auto coord = [&](int i) -> double& {
      const int nw = tiny.weight_count();
      return i < nw ? work.weights[static_cast<std::size_t>(i)]
                    : work.biases[static_cast<std::size_t>(i - nw)];
    };
    const double h = 1e-5;
    for (int i = 0; i < tdim; ++i) {
      const double saved = coord(i);
      coord(i) = saved + h;
      const std::vector<double> up = gradient(work, small, alpha);
      coord(i) = saved - h;
      const std::vector<double> down = gradient(work, small, alpha);
      coord(i) = saved;
      for (int j = 0; j < tdim; ++j)
        hess(j, i) = (up[static_cast<std::size_t>(j)] -
                      down[static_cast<std::size_t>(j)]) /
                     (2.0 * h);
    }
    hess = (hess + hess.transpose().eval()) / 2.0;
  }

  Rng rng(79);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    std::vector<double> v(static_cast<std::size_t>(tdim));
    for (double& x : v) x = rng.normal();
    const std::vector<double> hv =
        hessian_vector_product(tp, v, small, 1e-4, alpha);
    Eigen::VectorXd ve(tdim), hve(tdim);
    for (int i = 0; i < tdim; ++i) {
      ve(i) = v[static_cast<std::size_t>(i)];
      hve(i) = hv[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd want = hess * ve;
    worst = std::max(worst, (hve - want).norm() / std::max(1e-12, want.norm()));
  }
  if (worst >= 1e-4)
    return verdict(12, false,
                   fmt("HVP vs dense FD Hessian relative error %.3e", worst));

  // Injected quadratic: the probe must recover a known diagonal spectrum.
  const std::vector<double> diag = {5.0, 1.0, 0.1};
  LinearOperator op = [&](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = diag[i] * v[i];
    return out;
  };
  const EigenProbe probe = top_eigenvalues(op, 3, 3, 2000, 1e-12, 7);
  double spec_err = 0.0;
  for (int i = 0; i < 3; ++i)
    spec_err = std::max(
        spec_err,
        std::abs(probe.eigenvalues[static_cast<std::size_t>(i)] - diag[static_cast<std::size_t>(i)]));
  if (spec_err > 1e-6)
    return verdict(
        12, false,
        fmt("eigenprobe spectrum error %.3e on diag(5, 1, 0.1)", spec_err));

  return verdict(
      12, true,
      fmt("grid center bit-exact; HVP vs dense FD Hessian max relative error "
          "%.3e (< 1e-4); diag(5,1,0.1) recovered within %.1e (<= 1e-6)",
          worst, spec_err));
}

// --- criterion 13: CLI determinism across identical reruns ----------------

#ifdef SLT_BINARY_PATH

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const fs::path& scratch, const std::string& args) {
  const std::string cmd = std::string(SLT_BINARY_PATH) + " " + args + " > " +
                          (scratch / "stdout.txt").string() + " 2> " +
                          (scratch / "stderr.txt").string();
  return WEXITSTATUS(std::system(cmd.c_str()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

bool criterion_13() {
  const fs::path scratch = fs::temp_directory_path() / "slt_acceptance_13";
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  const fs::path out = scratch / "out";

  // Every subcommand runs twice against the same config file, so the two
  // executions are literally identical (result JSON embeds the config,
  // including out_dir). Payload bytes are captured between executions; the
  // second pass carries --force to overwrite the first pass's outputs.
  write_text(scratch / "gen.json",
             "{\n  \"dataset\": {\"kind\": \"moons\", \"n\": 2000, "
             "\"noise_std\": 0.07,\n"
             "    \"normalize\": {\"lo\": -0.7, \"hi\": 0.7},\n"
             "    \"test_fraction\": 0.25, \"seed\": 11},\n"
             "  \"out_dir\": \"" +
                 (out / "gen").string() + "\"\n}");
  write_text(scratch / "run.json",
             "{\n  \"label\": \"det\",\n"
             "  \"dataset\": {\"kind\": \"moons\", \"n\": 160, "
             "\"noise_std\": 0.07, \"test_fraction\": 0.25, \"seed\": 3},\n"
             "  \"architecture\": \"A\",\n"
             "  \"algorithm\": {\"kind\": \"ga\", \"config\": {\"pop_size\": "
             "12, \"min_generations\": 3,\n"
             "    \"stagnation_window\": 2, \"max_generations\": 6}},\n"
             "  \"repeats\": 2,\n  \"master_seed\": 9,\n  \"out_dir\": \"" +
                 (out / "run").string() + "\"\n}");
  write_text(scratch / "prune.json",
             "{\n  \"run_dir\": \"" + (out / "run").string() +
                 "\",\n  \"label\": \"det_prune\",\n  \"out_dir\": \"" +
                 (out / "prune").string() + "\"\n}");
  write_text(scratch / "land.json",
             "{\n  \"run_dir\": \"" + (out / "run").string() +
                 "\",\n  \"repeat\": 0,\n  \"metric\": \"loss\",\n"
                 "  \"lo\": -1.0,\n  \"hi\": 1.0,\n  \"resolution\": 3,\n"
                 "  \"normalize_per_block\": true,\n"
                 "  \"restrict_to_active\": false,\n  \"on_test\": false,\n"
                 "  \"direction_seed\": 5,\n  \"eigen\": null,\n"
                 "  \"out_dir\": \"" +
                 (out / "land").string() + "\"\n}");
  write_text(scratch / "stats.json",
             "{\n  \"runs\": [{\"label\": \"det\", \"dir\": \"" +
                 (out / "run").string() +
                 "\"}],\n  \"metric\": \"test_accuracy\",\n"
                 "  \"out_dir\": \"" +
                 (out / "stats").string() + "\"\n}");

  const std::vector<std::pair<std::string, fs::path>> payloads = {
      {"gen-data train.csv", out / "gen" / "train.csv"},
      {"gen-data test.csv", out / "gen" / "test.csv"},
      {"run repeat_000 result.json", out / "run" / "repeat_000" / "result.json"},
      {"run repeat_000 history.csv", out / "run" / "repeat_000" / "history.csv"},
      {"run repeat_001 result.json", out / "run" / "repeat_001" / "result.json"},
      {"run repeat_001 history.csv", out / "run" / "repeat_001" / "history.csv"},
      {"prune repeat_000 result.json",
       out / "prune" / "repeat_000" / "result.json"},
      {"prune repeat_001 result.json",
       out / "prune" / "repeat_001" / "result.json"},
      {"landscape.csv", out / "land" / "landscape.csv"},
      {"landscape.json", out / "land" / "landscape.json"},
      {"stats.csv", out / "stats" / "stats.csv"}};

  std::vector<std::vector<std::string>> captured(2);
  for (int side = 0; side < 2; ++side) {
    const std::string force = side == 0 ? "" : " --force";
    for (const char* sub : {"gen", "run", "prune", "land", "stats"}) {
      const std::string name = std::string(sub) == "gen"
                                   ? "gen-data"
                                   : (std::string(sub) == "land" ? "landscape"
                                                                 : sub);
      if (run_cli(scratch, name + " --config " +
                               (scratch / (std::string(sub) + ".json"))
                                   .string() +
                               force) != 0)
        return verdict(13, false, name + " invocation failed");
    }
    for (const auto& [what, path] : payloads)
      captured[static_cast<std::size_t>(side)].push_back(slurp(path));
  }

  std::string mismatches;
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    if (captured[0][i].empty() || captured[0][i] != captured[1][i])
      mismatches += " " + payloads[i].first + ";";
  }
  if (!mismatches.empty())
    return verdict(13, false, "payload mismatch:" + mismatches);
  return verdict(13, true,
                 "identical result JSON and CSV payloads across two "
                 "executions of gen-data, run, prune, landscape, and stats");
}

#else

bool criterion_13() {
  return verdict(13, false, "command line binary unavailable in this build");
}

#endif

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: slt_acceptance <criterion 1-13>\n");
    return 1;
  }
  const int n = std::atoi(argv[1]);
  bool pass = false;
  try {
    switch (n) {
      case 1: pass = criterion_1(); break;
      case 2: pass = criterion_2(); break;
      case 3: pass = criterion_3(); break;
      case 4: pass = criterion_4(); break;
      case 5: pass = criterion_5(); break;
      case 6: pass = criterion_6(); break;
      case 7: pass = criterion_7(); break;
      case 8: pass = criterion_8(); break;
      case 9: pass = criterion_9(); break;
      case 10: pass = criterion_10(); break;
      case 11: pass = criterion_11(); break;
      case 12: pass = criterion_12(); break;
      case 13: pass = criterion_13(); break;
      default:
        std::fprintf(stderr, "unknown criterion %d\n", n);
        return 1;
    }
  } catch (const std::exception& e) {
    std::printf("ACCEPT %d: FAIL -- unexpected exception: %s\n", n, e.what());
    return 1;
  }
  return pass ? 0 : 1;
}
