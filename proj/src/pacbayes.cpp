#include "fdiv/pacbayes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fdiv/divergence.hpp"
#include "fdiv/parallel.hpp"
#include "fdiv/random.hpp"

namespace fdx {

void RiskModel::validate() const {
    if (n_predictors == 0) throw std::invalid_argument("RiskModel: no predictors");
    if (n_samples == 0) throw std::invalid_argument("RiskModel: n_samples must be positive");
    if (loss_table.size() != n_predictors)
        throw std::invalid_argument("RiskModel: loss table has " + std::to_string(loss_table.size()) +
                                    " rows for " + std::to_string(n_predictors) + " predictors");
    for (const auto& row : loss_table) {
        if (row.size() != n_outcomes())
            throw std::invalid_argument("RiskModel: loss table row length differs from the outcome count");
        for (double v : row)
            if (!std::isfinite(v)) throw std::invalid_argument("RiskModel: losses must be finite");
    }
}

std::vector<double> RiskModel::true_risk() const {
    std::vector<double> out(n_predictors);
    for (std::size_t i = 0; i < n_predictors; ++i) {
        ExtSum s;
        for (std::size_t k = 0; k < n_outcomes(); ++k)
            if (outcome_dist[k] > 0.0) s.add(outcome_dist[k] * loss_table[i][k]);
        out[i] = s.total().value();
    }
    return out;
}

std::vector<double> RiskModel::empirical_risk(const std::vector<std::size_t>& counts) const {
    std::vector<double> out(n_predictors);
    const double n = static_cast<double>(n_samples);
    for (std::size_t i = 0; i < n_predictors; ++i) {
        ExtSum s;
        for (std::size_t k = 0; k < n_outcomes(); ++k)
            if (counts[k] > 0) s.add(static_cast<double>(counts[k]) * loss_table[i][k]);
        out[i] = s.total().value() / n;
    }
    return out;
}

RiskModel bernoulli_model(std::size_t n_samples) {
    RiskModel m;
    m.n_predictors = 2;
    m.loss_table = {{0.0, 1.0}, {1.0, 0.0}};
    m.outcome_dist = FiniteDistribution({0.5, 0.5});
    m.n_samples = n_samples;
    m.validate();
    return m;
}

RiskModel synthetic_model(std::size_t n_predictors, std::size_t n_outcomes, std::size_t n_samples,
                          std::uint64_t seed) {
    if (n_outcomes == 0) throw std::invalid_argument("synthetic_model: no outcomes");
    auto e = rng::substream(seed, 0);
    RiskModel m;
    m.n_predictors = n_predictors;
    m.loss_table.assign(n_predictors, std::vector<double>(n_outcomes));
    for (auto& row : m.loss_table)
        for (double& v : row) v = rng::uniform01(e);
    m.outcome_dist = rng::dirichlet(e, n_outcomes);
    m.n_samples = n_samples;
    m.validate();
    return m;
}

RiskModel pareto_model(std::size_t n_predictors, std::size_t n_outcomes, std::size_t n_samples,
                       double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("pareto_model: alpha must be positive");
    if (n_outcomes == 0) throw std::invalid_argument("pareto_model: no outcomes");
    RiskModel m;
    m.n_predictors = n_predictors;
    std::vector<double> y(n_outcomes);
    for (std::size_t k = 0; k < n_outcomes; ++k) {
        const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n_outcomes);
        y[k] = std::pow(1.0 - u, -1.0 / alpha);
    }
    m.loss_table.assign(n_predictors, std::vector<double>(n_outcomes));
    for (std::size_t i = 0; i < n_predictors; ++i) {
        const double guess =
            n_predictors == 1 ? 2.0 : 1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_predictors - 1);
        for (std::size_t k = 0; k < n_outcomes; ++k) m.loss_table[i][k] = std::abs(y[k] - guess);
    }
    m.outcome_dist = FiniteDistribution::uniform(n_outcomes);
    m.n_samples = n_samples;
    m.validate();
    return m;
}

double absolute_gap(double true_risk, double empirical_risk) { return std::abs(true_risk - empirical_risk); }

namespace {

void require_prior(const FiniteDistribution& prior, const RiskModel& model) {
    model.validate();
    if (prior.size() != model.n_predictors)
        throw std::invalid_argument("prior has " + std::to_string(prior.size()) + " atoms for " +
                                    std::to_string(model.n_predictors) + " predictors");
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
}

// E_pi[f*(delta(R, r))] for one dataset.
ExtReal prior_term(const Generator& g, const FiniteDistribution& prior, const DeltaFn& delta,
                   const std::vector<double>& R, const std::vector<double>& r) {
    ExtSum s;
    for (std::size_t i = 0; i < prior.size(); ++i) {
        if (prior[i] == 0.0) continue;
        s.add(ExtReal(prior[i]) * g.eval_fstar(delta(R[i], r[i])));
    }
    return s.total();
}

bool enumerable(std::size_t k, std::size_t n, std::uint64_t limit) {
    long double paths = 1.0L;
    for (std::size_t i = 0; i < n; ++i) {
        paths *= static_cast<long double>(k);
        if (paths > static_cast<long double>(limit)) return false;
    }
    return true;
}

// Visits every count vector of length k summing to n.
template <class Fn>
void for_each_composition(std::size_t k, std::size_t n, Fn&& fn) {
    std::vector<std::size_t> c(k, 0);
    auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
        if (pos + 1 == k) {
            c[pos] = left;
            fn(c);
            return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
            c[pos] = v;
            self(self, pos + 1, left - v);
        }
    };
    rec(rec, 0, n);
}

std::vector<std::size_t> draw_counts(rng::Engine& e, const RiskModel& model) {
    std::vector<std::size_t> counts(model.n_outcomes(), 0);
    for (std::size_t j = 0; j < model.n_samples; ++j) ++counts[rng::categorical(e, model.outcome_dist)];
    return counts;
}

ExtReal quantile(const std::vector<ExtReal>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = std::ceil(q * static_cast<double>(sorted.size()));
    const std::size_t idx = pos < 1.0 ? 0 : static_cast<std::size_t>(pos) - 1;
    return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace

GapMoment gap_moment(const Generator& g, const FiniteDistribution& prior, const RiskModel& model,
                     const DeltaFn& delta, const MomentOptions& opts) {
    require_prior(prior, model);
    const auto R = model.true_risk();
    GapMoment out;
    if (!opts.force_monte_carlo && enumerable(model.n_outcomes(), model.n_samples, opts.enumeration_limit)) {
        const double lg_n = std::lgamma(static_cast<double>(model.n_samples) + 1.0);
        ExtSum total;
        for_each_composition(model.n_outcomes(), model.n_samples, [&](const std::vector<std::size_t>& c) {
            double logp = lg_n;
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (c[k] == 0) continue;
                const double p = model.outcome_dist[k];
                if (p == 0.0) return;
                logp += static_cast<double>(c[k]) * std::log(p) - std::lgamma(static_cast<double>(c[k]) + 1.0);
            }
            ++out.samples;
            total.add(ExtReal(std::exp(logp)) * prior_term(g, prior, delta, R, model.empirical_risk(c)));
        });
        out.value = total.total();
        return out;
    }
    if (opts.mc_draws < 2) throw std::invalid_argument("gap_moment: need at least 2 Monte Carlo draws");
    auto e = rng::substream(opts.seed, 0);
    double mean = 0.0, m2 = 0.0;
    bool infinite = false;
    for (std::size_t t = 0; t < opts.mc_draws; ++t) {
        const ExtReal v = prior_term(g, prior, delta, R, model.empirical_risk(draw_counts(e, model)));
        if (!v.is_finite()) {
            infinite = true;
            continue;
        }
        const double x = v.value();
        const double d = x - mean;
        mean += d / static_cast<double>(t + 1);
        m2 += d * (x - mean);
    }
    out.exact = false;
    out.samples = opts.mc_draws;
    if (infinite) {
        out.value = kPosInf;
        return out;
    }
    const double n = static_cast<double>(opts.mc_draws);
    out.value = mean;
    out.std_error = std::sqrt(m2 / (n - 1.0) / n);
    return out;
}

ExtReal delta_bound(const Generator& g, const FiniteDistribution& prior, const RiskModel& model,
                    double epsilon, ExtReal d_value, const DeltaFn& delta, const MomentOptions& opts) {
    require_epsilon(epsilon);
    if (d_value < ExtReal(0.0)) throw std::invalid_argument("d_value must be >= 0");
    const GapMoment m = gap_moment(g, prior, model, delta, opts);
    return m.value / ExtReal(epsilon) + d_value;
}

ExtReal generalisation_bound(const Generator& g, const FiniteDistribution& prior,
                             const RiskModel& model, double epsilon, ExtReal d_value,
                             const MomentOptions& opts) {
    return delta_bound(g, prior, model, epsilon, d_value, absolute_gap, opts);
}

PosteriorRule PosteriorRule::parse(const std::string& text) {
    PosteriorRule r;
    if (text == "fixed") {
        r.kind = Kind::fixed;
    } else if (text == "argmin" || text == "argmin-dirac" || text == "argmin_dirac") {
        r.kind = Kind::argmin_dirac;
    } else if (text.rfind("gibbs", 0) == 0) {
        r.kind = Kind::gibbs;
        if (text.size() > 5) {
            if (text[5] != ':') throw std::invalid_argument("unknown posterior rule '" + text + "'");
            const std::string arg = text.substr(6);
            std::size_t used = 0;
            try {
                r.lambda = std::stod(arg, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (arg.empty() || used != arg.size() || !(r.lambda >= 0.0) || !std::isfinite(r.lambda))
                throw std::invalid_argument("bad Gibbs temperature in '" + text + "'");
        }
    } else {
        throw std::invalid_argument("unknown posterior rule '" + text + "'");
    }
    return r;
}

std::string PosteriorRule::label() const {
    switch (kind) {
        case Kind::fixed: return "fixed";
        case Kind::argmin_dirac: return "argmin";
        case Kind::gibbs: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "gibbs:%.9g", lambda);
            return buf;
        }
    }
    return "fixed";
}

FiniteDistribution make_posterior(const PosteriorRule& rule, const FiniteDistribution& prior,
                                  const std::vector<double>& r) {
    require_same_support(prior.size(), r.size(), "make_posterior");
    switch (rule.kind) {
        case PosteriorRule::Kind::fixed: {
            if (!rule.nu) return prior;
            require_same_support(rule.nu->size(), prior.size(), "make_posterior");
            return *rule.nu;
        }
        case PosteriorRule::Kind::argmin_dirac: {
            const auto it = std::min_element(r.begin(), r.end());
            return FiniteDistribution::dirac(r.size(), static_cast<std::size_t>(it - r.begin()));
        }
        case PosteriorRule::Kind::gibbs: {
            double lo = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < r.size(); ++i)
                if (prior[i] > 0.0) lo = std::min(lo, r[i]);
            std::vector<double> w(r.size(), 0.0);
            for (std::size_t i = 0; i < r.size(); ++i)
                if (prior[i] > 0.0) w[i] = prior[i] * std::exp(-rule.lambda * (r[i] - lo));
            return FiniteDistribution::normalized(std::move(w));
        }
    }
    return prior;
}

CoverageSummary coverage_experiment(const Generator& g, const FiniteDistribution& prior,
                                    const PosteriorRule& rule, const RiskModel& model,
                                    double epsilon, std::size_t n_trials,
                                    std::uint64_t master_seed, unsigned threads,
                                    const MomentOptions& opts) {
    require_epsilon(epsilon);
    require_prior(prior, model);
    if (rule.kind == PosteriorRule::Kind::fixed && rule.nu)
        require_same_support(rule.nu->size(), prior.size(), "coverage_experiment");

    CoverageSummary out;
    out.n_trials = n_trials;
    out.moment = gap_moment(g, prior, model, absolute_gap, opts);
    const ExtReal scaled = out.moment.value / ExtReal(epsilon);
    const auto R = model.true_risk();

    out.trials.resize(n_trials);
    parallel_for(n_trials, threads, [&](std::size_t t) {
        TrialReport& tr = out.trials[t];
        tr.trial = t;
        tr.seed = rng::derive_seed(master_seed, t);
        auto e = rng::substream(master_seed, t);
        tr.true_risk = R;
        tr.empirical_risk = model.empirical_risk(draw_counts(e, model));
        tr.gap.resize(R.size());
        for (std::size_t i = 0; i < R.size(); ++i) tr.gap[i] = absolute_gap(R[i], tr.empirical_risk[i]);
        const FiniteDistribution nu = make_posterior(rule, prior, tr.empirical_risk);
        tr.e_nu_r = expectation(nu, MeasurableFunction(tr.empirical_risk));
        tr.e_nu_R = expectation(nu, MeasurableFunction(R));
        tr.posterior_gap = tr.e_nu_R - tr.e_nu_r;
        tr.certificate = scaled + f_divergence(g, nu, prior);
        tr.bound_value = ExtReal(tr.e_nu_r) + tr.certificate;
        tr.violated = ExtReal(tr.e_nu_R) > tr.bound_value;
    });

    std::vector<ExtReal> slack;
    slack.reserve(n_trials);
    ExtSum total;
    for (const auto& tr : out.trials) {
        out.violations += tr.violated ? 1 : 0;
        const ExtReal s = tr.bound_value - ExtReal(tr.e_nu_R);
        slack.push_back(s);
        total.add(s);
    }
    if (n_trials > 0) {
        const double n = static_cast<double>(n_trials);
        out.violation_frequency = static_cast<double>(out.violations) / n;
        out.tolerance = epsilon + 3.0 * std::sqrt(epsilon * (1.0 - epsilon) / n);
        out.mean_slack = total.total() / ExtReal(n);
        std::sort(slack.begin(), slack.end());
        out.slack_q05 = quantile(slack, 0.05);
        out.slack_q50 = quantile(slack, 0.50);
        out.slack_q95 = quantile(slack, 0.95);
    }
    return out;
}

namespace {

using nlohmann::json;

std::size_t get_count(const json& j, const char* key, std::optional<std::size_t> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw std::invalid_argument(std::string("experiment config: missing '") + key + "'");
    }
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw std::invalid_argument(std::string("experiment config: '") + key + "' must be a positive integer");
    return v.get<std::size_t>();
}

double get_real(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw std::invalid_argument(std::string("experiment config: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> get_reals(const json& v, const char* what) {
    if (!v.is_array()) throw std::invalid_argument(std::string("experiment config: '") + what + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw std::invalid_argument(std::string("experiment config: non-numeric entry in '") + what + "'");
        out.push_back(x.get<double>());
    }
    return out;
}

RiskModel parse_model(const json& m) {
    if (!m.is_object() || !m.contains("type") || !m.at("type").is_string())
        throw std::invalid_argument("experiment config: model needs a string 'type'");
    const std::string type = m.at("type").get<std::string>();
    if (type == "bernoulli") return bernoulli_model(get_count(m, "n_samples"));
    if (type == "synthetic") {
        std::uint64_t seed = 0;
        if (m.contains("seed")) {
            if (!m.at("seed").is_number_unsigned())
                throw std::invalid_argument("experiment config: model seed must be a non-negative integer");
            seed = m.at("seed").get<std::uint64_t>();
        }
        return synthetic_model(get_count(m, "n_predictors"), get_count(m, "n_outcomes"),
                               get_count(m, "n_samples"), seed);
    }
    if (type == "pareto")
        return pareto_model(get_count(m, "n_predictors"), get_count(m, "n_outcomes"),
                            get_count(m, "n_samples"), get_real(m, "alpha", 2.5));
    if (type == "table") {
        if (!m.contains("loss") || !m.at("loss").is_array())
            throw std::invalid_argument("experiment config: table model needs 'loss'");
        if (!m.contains("outcome_dist")) throw std::invalid_argument("experiment config: table model needs 'outcome_dist'");
        RiskModel r;
        for (const auto& row : m.at("loss")) r.loss_table.push_back(get_reals(row, "loss"));
        r.n_predictors = r.loss_table.size();
        r.outcome_dist = FiniteDistribution(get_reals(m.at("outcome_dist"), "outcome_dist"));
        r.n_samples = get_count(m, "n_samples");
        r.validate();
        return r;
    }
    throw std::invalid_argument("experiment config: unknown model type '" + type + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
    if (!j.contains("model")) throw std::invalid_argument("experiment config: missing 'model'");
    if (!j.contains("generator") || !j.at("generator").is_string())
        throw std::invalid_argument("experiment config: missing string 'generator'");

    ExperimentConfig c;
    c.model = parse_model(j.at("model"));
    c.generator = j.at("generator").get<std::string>();
    (void)parse_generator(c.generator);
    c.epsilon = get_real(j, "epsilon", c.epsilon);
    require_epsilon(c.epsilon);
    if (j.contains("posterior")) {
        if (!j.at("posterior").is_string()) throw std::invalid_argument("experiment config: 'posterior' must be a string");
        c.posterior = PosteriorRule::parse(j.at("posterior").get<std::string>());
    }
    if (j.contains("posterior_weights")) c.posterior.nu = FiniteDistribution(get_reals(j.at("posterior_weights"), "posterior_weights"));
    if (j.contains("prior")) c.prior = FiniteDistribution(get_reals(j.at("prior"), "prior"));
    c.n_trials = get_count(j, "n_trials", c.n_trials);
    if (j.contains("master_seed")) {
        if (!j.at("master_seed").is_number_unsigned())
            throw std::invalid_argument("experiment config: 'master_seed' must be a non-negative integer");
        c.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
    c.moment.mc_draws = get_count(j, "mc_draws", c.moment.mc_draws);
    c.moment.seed = rng::derive_seed(c.master_seed, std::uint64_t{1} << 63);
    const std::size_t n = c.model.n_predictors;
    if (c.prior && c.prior->size() != n) throw std::invalid_argument("experiment config: prior size differs from n_predictors");
    if (c.posterior.nu && c.posterior.nu->size() != n)
        throw std::invalid_argument("experiment config: posterior_weights size differs from n_predictors");
    return c;
}

ExperimentConfig read_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path + "'");
    return parse_experiment_config(ss.str());
}

}  // namespace fdx
