#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fdiv/distribution.hpp"
#include "fdiv/ext_real.hpp"
#include "fdiv/generator.hpp"

namespace fdx {

// Finite predictor class with a loss table over discrete outcomes. A dataset
// is n_samples i.i.d. draws from outcome_dist.
struct RiskModel {
    std::size_t n_predictors = 0;
    std::vector<std::vector<double>> loss_table;  // [predictor][outcome]
    FiniteDistribution outcome_dist = FiniteDistribution::uniform(1);
    std::size_t n_samples = 1;

    std::size_t n_outcomes() const { return outcome_dist.size(); }
    // Throws std::invalid_argument on inconsistent shapes or non-finite losses.
    void validate() const;
    std::vector<double> true_risk() const;
    // Empirical risk given outcome counts summing to n_samples.
    std::vector<double> empirical_risk(const std::vector<std::size_t>& counts) const;
};

// Two predictors, Bernoulli(1/2) outcome, 0/1 loss: predictor i guesses i.
RiskModel bernoulli_model(std::size_t n_samples);

// Random losses on [0, 1] and a flat Dirichlet outcome law, fixed by seed.
RiskModel synthetic_model(std::size_t n_predictors, std::size_t n_outcomes, std::size_t n_samples,
                          std::uint64_t seed);

// Equiprobable outcomes at the mid-quantiles of a Pareto(alpha) law, absolute
// loss against predictions spread over [1, 3]. Losses are unbounded as the
// outcome grid is refined.
RiskModel pareto_model(std::size_t n_predictors, std::size_t n_outcomes, std::size_t n_samples,
                       double alpha);

// Delta(true risk, empirical risk); |R - r| by default.
using DeltaFn = std::function<double(double, double)>;
double absolute_gap(double true_risk, double empirical_risk);

struct MomentOptions {
    // Enumerate when n_outcomes^n_samples is at most this.
    std::uint64_t enumeration_limit = 1'000'000;
    std::size_t mc_draws = 100'000;
    std::uint64_t seed = 0;
    bool force_monte_carlo = false;
};

// E_P E_pi[f*(Delta(R, r))].
struct GapMoment {
    ExtReal value = 0.0;
    double std_error = 0.0;  // 0 when exact
    bool exact = true;
    std::size_t samples = 0;  // count vectors enumerated or Monte Carlo draws
};

GapMoment gap_moment(const Generator& g, const FiniteDistribution& prior, const RiskModel& model,
                     const DeltaFn& delta = absolute_gap, const MomentOptions& opts = {});

// epsilon^-1 E_P E_pi[f*(|R - r|)] + d_value. With probability at least
// 1 - epsilon over the data, E_nu[R] <= E_nu[r] + this for every nu, with
// d_value = D_f(nu, pi). Throws std::invalid_argument unless 0 < epsilon <= 1.
ExtReal generalisation_bound(const Generator& g, const FiniteDistribution& prior,
                             const RiskModel& model, double epsilon, ExtReal d_value,
                             const MomentOptions& opts = {});

// Same with the gap replaced by delta(R, r), which should be convex in its
// second argument (not checked).
ExtReal delta_bound(const Generator& g, const FiniteDistribution& prior, const RiskModel& model,
                    double epsilon, ExtReal d_value, const DeltaFn& delta,
                    const MomentOptions& opts = {});

struct PosteriorRule {
    enum class Kind { fixed, gibbs, argmin_dirac };
    Kind kind = Kind::fixed;
    std::optional<FiniteDistribution> nu;  // fixed; the prior when unset
    double lambda = 1.0;                   // gibbs

    // "fixed", "gibbs:<lambda>", "argmin". Throws std::invalid_argument.
    static PosteriorRule parse(const std::string& text);
    std::string label() const;
};

// Posterior for a dataset with empirical risks r. Gibbs weights are
// pi exp(-lambda r) normalised; the Dirac sits on the first minimiser of r.
FiniteDistribution make_posterior(const PosteriorRule& rule, const FiniteDistribution& prior,
                                  const std::vector<double>& empirical_risk);

struct TrialReport {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<double> empirical_risk;
    std::vector<double> true_risk;
    std::vector<double> gap;
    double e_nu_r = 0.0;
    double e_nu_R = 0.0;
    ExtReal certificate = kPosInf;  // epsilon^-1 moment + D_f(nu, pi)
    ExtReal bound_value = kPosInf;  // e_nu_r + certificate
    double posterior_gap = 0.0;     // e_nu_R - e_nu_r
    bool violated = false;
};

struct CoverageSummary {
    std::size_t n_trials = 0;
    std::size_t violations = 0;
    double violation_frequency = 0.0;
    // epsilon + 3 sqrt(epsilon (1 - epsilon) / n_trials)
    double tolerance = 0.0;
    ExtReal mean_slack = 0.0;
    ExtReal slack_q05 = 0.0;
    ExtReal slack_q50 = 0.0;
    ExtReal slack_q95 = 0.0;
    GapMoment moment;
    std::vector<TrialReport> trials;  // by trial index
};

// Trial t draws its dataset from rng::substream(master_seed, t); results do
// not depend on the thread count. The moment uses opts as given.
CoverageSummary coverage_experiment(const Generator& g, const FiniteDistribution& prior,
                                    const PosteriorRule& rule, const RiskModel& model,
                                    double epsilon, std::size_t n_trials,
                                    std::uint64_t master_seed, unsigned threads,
                                    const MomentOptions& opts = {});

// JSON experiment description:
//   {"model": {"type": "synthetic", "n_predictors": 4, "n_outcomes": 4,
//              "n_samples": 6, "seed": 1}
//          | {"type": "pareto", ..., "alpha": 2.5}
//          | {"type": "bernoulli", "n_samples": 2}
//          | {"type": "table", "loss": [[...]], "outcome_dist": [...], "n_samples": 3},
//    "generator": "kl", "epsilon": 0.05, "posterior": "gibbs:1",
//    "posterior_weights": [...], "prior": [...], "n_trials": 2000,
//    "master_seed": 0, "mc_draws": 100000}
// Everything but "model" and "generator" is optional; the prior defaults to
// uniform. Throws std::invalid_argument on malformed input.
struct ExperimentConfig {
    RiskModel model;
    std::string generator = "kl";
    double epsilon = 0.05;
    PosteriorRule posterior;
    std::optional<FiniteDistribution> prior;
    std::size_t n_trials = 2000;
    std::uint64_t master_seed = 0;
    MomentOptions moment;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig read_experiment_config(const std::string& path);

}  // namespace fdx
