#pragma once

// Repeated-game episodes, loss accounting and Monte Carlo estimates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "lossbound/error.hpp"
#include "lossbound/families.hpp"
#include "lossbound/io.hpp"
#include "lossbound/learners.hpp"
#include "lossbound/opponents.hpp"
#include "lossbound/rng.hpp"

namespace lossbound {

struct TraceRow {
  int round = 0;  // 1-based
  Action a1 = 0;
  Action a2 = 0;
  NatureDraw nature;
  double u1 = 0.0;
  double loss = 0.0;  // V - u1
  double cum_loss = 0.0;
  int epoch = 0;  // learner epoch after observing this round
  bool learned = false;
};

struct TraceHeader {
  FamilyParams params;
  std::string learner;
  std::string opponent;
  std::uint64_t seed = 0;
  double value = 0.0;
  int rounds = 0;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceRow> rows;

  double cumulative_loss() const { return rows.empty() ? 0.0 : rows.back().cum_loss; }
  // 1-based round after which the learner first reported learned, 0 if it
  // started learned, -1 if it never did.
  int learned_round() const {
    for (const auto& r : rows)
      if (r.learned) return r.round;
    return -1;
  }
};

struct EpisodeOptions {
  std::string learner_name = "learner";
  // Replaces Nature's random move: round i uses nature_script[i % size].
  std::vector<NatureDraw> nature_script;
  // Game value; computed from the parameters when NaN.
  double value = std::numeric_limits<double>::quiet_NaN();
};

// Per round: the learner's mixed strategy is sampled, then the opponent acts
// on the learner's state (not its realized action), then Nature moves.
template <LearnerMachine L>
Trace run_episode(const FamilyParams& params, L learner, const Opponent& opponent, int rounds,
                  std::uint64_t seed, const EpisodeOptions& options = {}) {
  require(rounds >= 1, "an episode needs at least one round");
  validate(params);
  Trace trace;
  trace.header = {params,  options.learner_name, opponent.name(), seed,
                  std::isnan(options.value) ? game_value(params) : options.value, rounds};
  trace.rows.reserve(rounds);
  Rng rng(seed);
  double cum = 0.0;
  for (int r = 0; r < rounds; ++r) {
    const MixedStrategy s(learner.act());
    const Action a1 = static_cast<Action>(sample_index(s.probs(), rng)) + 1;
    const Action a2 = opponent.act(learner, r, rounds - r, rng);
    const NatureDraw nature =
        options.nature_script.empty()
            ? sample_nature(params, rng)
            : options.nature_script[static_cast<std::size_t>(r) % options.nature_script.size()];
    const RoundOutcome o = resolve_outcome(params, a1, a2, nature);
    learner = learner.observe(o);
    const double loss = trace.header.value - o.u1;
    cum += loss;
    trace.rows.push_back({r + 1, a1, a2, nature, o.u1, loss, cum, learner.epoch(), learner.learned()});
  }
  return trace;
}

// Cumulative loss only; same random stream as run_episode.
template <LearnerMachine L>
double episode_loss(const FamilyParams& params, L learner, const Opponent& opponent, int rounds,
                    std::uint64_t seed, double value) {
  Rng rng(seed);
  double cum = 0.0;
  for (int r = 0; r < rounds; ++r) {
    const auto& s = learner.act();
    const Action a1 = static_cast<Action>(sample_index(s.probs(), rng)) + 1;
    const Action a2 = opponent.act(learner, r, rounds - r, rng);
    const RoundOutcome o = resolve_outcome(params, a1, a2, sample_nature(params, rng));
    learner = learner.observe(o);
    cum += value - o.u1;
  }
  return cum;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int episodes = 0;
  int rounds = 0;
  std::uint64_t seed = 0;
};

// Episode i uses split_seed(seed, i). Episodes run on `threads` workers and
// are aggregated in index order, so the result does not depend on threads.
template <LearnerMachine L>
MonteCarloEstimate monte_carlo_loss(const FamilyParams& params, const L& learner,
                                    const Opponent& opponent, int rounds, int episodes,
                                    std::uint64_t seed, unsigned threads = 0) {
  require(episodes >= 2, "Monte Carlo needs at least two episodes");
  require(rounds >= 1, "horizon must be at least 1");
  const double value = game_value(params);
  std::vector<double> losses(episodes, 0.0);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(episodes));
  auto work = [&](unsigned worker) {
    for (int i = static_cast<int>(worker); i < episodes; i += static_cast<int>(threads))
      losses[i] = episode_loss(params, learner, opponent, rounds, split_seed(seed, i), value);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  double sum = 0.0;
  for (double x : losses) sum += x;
  const double mean = sum / episodes;
  double ss = 0.0;
  for (double x : losses) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (episodes - 1));
  return {mean, sd / std::sqrt(static_cast<double>(episodes)), episodes, rounds, seed};
}

// ---------------------------------------------------------------------------
// Export.

inline void write_trace_csv_header(std::ostream& out) {
  out << "episode,round,a1,a2,nature,u1,loss,cum_loss,epoch,learned\n";
}

inline void write_trace_csv_rows(std::ostream& out, const Trace& trace, int episode) {
  for (const auto& r : trace.rows) {
    out << episode << ',' << r.round << ',' << r.a1 << ',' << r.a2 << ',' << r.nature.to_string()
        << ',' << format_number(r.u1) << ',' << format_number(r.loss) << ','
        << format_number(r.cum_loss) << ',' << r.epoch << ',' << (r.learned ? 1 : 0) << '\n';
  }
}

inline Json trace_sidecar(const TraceHeader& h, int episodes) {
  Json j;
  j["params"] = params_to_json(h.params);
  j["learner"] = h.learner;
  j["opponent"] = h.opponent;
  j["seed"] = h.seed;
  j["value"] = h.value;
  j["rounds"] = h.rounds;
  j["episodes"] = episodes;
  j["columns"] = {"episode", "round", "a1", "a2", "nature", "u1", "loss", "cum_loss", "epoch",
                  "learned"};
  return j;
}

}  // namespace lossbound
