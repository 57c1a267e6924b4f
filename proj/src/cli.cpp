#include "fdiv/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdiv/bounds.hpp"
#include "fdiv/divergence.hpp"
#include "fdiv/errors.hpp"
#include "fdiv/format.hpp"
#include "fdiv/legendre.hpp"
#include "fdiv/pacbayes.hpp"
#include "fdiv/parallel.hpp"

namespace fdx::cli {

namespace {

using Json = nlohmann::ordered_json;

// Numbers at 9 significant digits so JSON and text agree; infinities as
// strings.
Json num(ExtReal x) {
    if (!x.is_finite()) return format_real(x);
    return std::stod(format_real(x));
}

Json num_list(std::span<const double> xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(num(x));
    return a;
}

std::string csv_field(const std::optional<double>& x) { return x ? format_real(*x) : std::string(); }

std::string joined(std::span<const double> xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        s += format_real(xs[i]);
    }
    return s;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    return f;
}

void finish_output(std::ofstream& f, const std::string& path) {
    f.flush();
    if (!f) throw IoError("cannot write '" + path + "'");
}

// Key/value records rendered in one of the three formats.
struct Record {
    std::vector<std::pair<std::string, Json>> fields;

    void add(std::string key, Json value) { fields.emplace_back(std::move(key), std::move(value)); }

    static std::string text_of(const Json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number_float()) return format_real(v.get<double>());
        if (v.is_array()) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) s += ' ';
                s += text_of(v[i]);
            }
            return s;
        }
        return v.dump();
    }

    void write(std::ostream& out, const std::string& format) const {
        if (format == "json") {
            Json j = Json::object();
            for (const auto& [k, v] : fields) j[k] = v;
            out << j.dump(2) << '\n';
        } else if (format == "csv") {
            for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].first;
            out << '\n';
            for (std::size_t i = 0; i < fields.size(); ++i) {
                std::string cell = text_of(fields[i].second);
                if (cell.find_first_of(", ") != std::string::npos) cell = '"' + cell + '"';
                out << (i ? "," : "") << cell;
            }
            out << '\n';
        } else {
            for (const auto& [k, v] : fields) out << k << ' ' << text_of(v) << '\n';
        }
    }
};

struct BoundArgs {
    std::string row;
    std::string pi_path, h_path, nu_path;
    std::optional<double> d, lambda, c, gamma, p, theta;
};

void add_bound_options(CLI::App* sub, BoundArgs& a) {
    sub->add_option("--row", a.row, "bound row")->required();
    sub->add_option("--pi", a.pi_path, "prior weights file")->required();
    sub->add_option("--h", a.h_path, "function values file")->required();
    auto* d = sub->add_option("--d", a.d, "divergence value");
    auto* nu = sub->add_option("--nu", a.nu_path, "posterior weights file");
    d->excludes(nu);
    sub->add_option("--lambda", a.lambda);
    sub->add_option("--c", a.c);
    sub->add_option("--gamma", a.gamma);
    sub->add_option("--p", a.p, "power exponent");
    sub->add_option("--theta", a.theta, "Lin weight");
}

struct BoundInputs {
    BoundSpec spec;
    FiniteDistribution pi = FiniteDistribution::uniform(1);
    MeasurableFunction h = MeasurableFunction({0.0});
    ExtReal d = 0.0;
};

BoundInputs load_bound_inputs(const BoundArgs& a) {
    if (!a.d && a.nu_path.empty()) throw std::invalid_argument("one of --d or --nu is required");
    BoundInputs in;
    in.spec.row = parse_row(a.row);
    in.spec.lambda = a.lambda;
    in.spec.c = a.c;
    in.spec.gamma = a.gamma;
    in.spec.p = a.p;
    in.spec.theta = a.theta;
    in.pi = read_distribution(a.pi_path);
    in.h = read_function(a.h_path);
    require_same_support(in.pi.size(), in.h.size(), "bound");
    if (a.d) {
        if (std::isnan(*a.d)) throw std::invalid_argument("--d must be a number");
        in.d = *a.d;
    } else {
        const auto nu = read_distribution(a.nu_path);
        require_same_support(nu.size(), in.pi.size(), "bound");
        in.d = f_divergence(row_generator(in.spec), nu, in.pi);
    }
    return in;
}

int cmd_divergence(const std::string& g_spec, const std::string& nu_path, const std::string& pi_path,
                   const std::string& format, std::ostream& out) {
    const auto g = parse_generator(g_spec);
    const auto nu = read_distribution(nu_path);
    const auto pi = read_distribution(pi_path);
    const ExtReal v = f_divergence(g, nu, pi);
    if (format == "text") {
        out << format_real(v) << '\n';
        return kOk;
    }
    Record r;
    r.add("generator", g.label());
    r.add("value", num(v));
    r.write(out, format);
    return kOk;
}

int cmd_legendre(const std::string& g_spec, const std::string& pi_path, const std::string& h_path,
                 const std::string& oracle, double tol, const std::string& format, std::ostream& out) {
    const auto g = parse_generator(g_spec);
    const auto pi = read_distribution(pi_path);
    const auto h = read_function(h_path);
    require_same_support(pi.size(), h.size(), "legendre");

    const bool have_exact = g.strictly_convex();
    TransformReport rep = have_exact ? exact_transform(g, pi, h, tol) : [&] {
        TransformReport t;
        t.crude = crude_transform(g, pi, h);
        if (g.in_fc()) t.tight = tight_transform(g, pi, h);
        return t;
    }();
    if (oracle == "grid") {
        if (pi.size() > kMaxGridSupport)
            throw std::invalid_argument("grid oracle supports at most " + std::to_string(kMaxGridSupport) + " atoms");
        rep.oracle = simplex_oracle(g, pi, h, default_grid_resolution(pi.size()), OracleMode::grid);
    } else if (oracle == "ascent") {
        rep.oracle = simplex_oracle(g, pi, h, 0.0, OracleMode::ascent);
    }

    Record r;
    r.add("generator", g.label());
    if (have_exact) r.add("exact", num(rep.exact));
    if (rep.c_star) r.add("c_star", num(*rep.c_star));
    if (rep.nu_star) {
        if (format == "json")
            r.add("nu_star", num_list(rep.nu_star->weights()));
        else
            r.add("nu_star", joined(rep.nu_star->weights()));
    }
    r.add("crude", num(rep.crude));
    if (rep.tight) r.add("tight", num(*rep.tight));
    if (rep.oracle) r.add("oracle", num(*rep.oracle));
    r.write(out, format);
    return kOk;
}

int cmd_bound(const BoundArgs& a, const std::string& format, std::ostream& out) {
    const auto in = load_bound_inputs(a);
    const auto res = eval_bound(in.spec, in.pi, in.h, in.d);
    const auto need = row_parameters(res.row);
    Record r;
    r.add("row", std::string(to_string(res.row)));
    r.add("value", num(res.value));
    r.add("d_value", num(res.divergence_value));
    if (need.lambda) r.add("lambda", num(*res.spec_used.lambda));
    if (need.c) r.add("c", num(*res.spec_used.c));
    if (need.gamma) r.add("gamma", num(*res.spec_used.gamma));
    if (res.spec_used.p) r.add("p", num(*res.spec_used.p));
    if (res.row == BoundRow::lin) r.add("theta", num(row_theta(res.spec_used)));
    r.write(out, format);
    return kOk;
}

std::vector<BoundRow> parse_rows(const std::string& text) {
    if (text == "all") return {kAllRows.begin(), kAllRows.end()};
    std::vector<BoundRow> rows;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) rows.push_back(parse_row(item));
    if (rows.empty()) throw std::invalid_argument("--rows is empty");
    return rows;
}

void write_sweep_csv(std::ostream& out, const SweepSummary& s) {
    out << "row,n,seed,lambda,c,gamma,d_value,e_nu_h,bound,slack\n";
    for (const auto& r : s.records) {
        const auto need = row_parameters(r.row);
        out << to_string(r.row) << ',' << r.n << ',' << r.seed << ','
            << (need.lambda ? csv_field(r.spec.lambda) : "") << ','
            << (need.c ? csv_field(r.spec.c) : "") << ','
            << (need.gamma ? csv_field(r.spec.gamma) : "") << ',' << format_real(r.d_value) << ','
            << format_real(r.e_nu_h) << ',' << format_real(r.bound) << ','
            << format_real(r.bound - ExtReal(r.e_nu_h)) << '\n';
    }
}

int cmd_verify(const std::string& rows_text, std::size_t instances, std::uint64_t seed, bool dominance,
               const std::string& csv_path, const std::string& format, std::ostream& out) {
    const auto rows = parse_rows(rows_text);
    const auto s = soundness_sweep(rows, instances, seed, worker_count(), dominance);
    if (!csv_path.empty()) {
        auto f = open_output(csv_path);
        write_sweep_csv(f, s);
        finish_output(f, csv_path);
    }
    const std::size_t total = s.violations + s.dominance_violations;
    Record r;
    r.add("rows", static_cast<std::uint64_t>(rows.size()));
    r.add("instances", static_cast<std::uint64_t>(instances));
    r.add("seed", seed);
    r.add("records", static_cast<std::uint64_t>(s.records.size()));
    r.add("soundness_violations", static_cast<std::uint64_t>(s.violations));
    r.add("dominance_checks", static_cast<std::uint64_t>(s.dominance_checks));
    r.add("dominance_violations", static_cast<std::uint64_t>(s.dominance_violations));
    r.add("violations", static_cast<std::uint64_t>(total));
    r.write(out, format);
    return total == 0 ? kOk : kViolations;
}

int cmd_pacbayes(const std::string& config_path, const std::string& trials_path, const std::string& format,
                 std::ostream& out) {
    const auto cfg = read_experiment_config(config_path);
    const auto g = parse_generator(cfg.generator);
    const auto prior = cfg.prior.value_or(FiniteDistribution::uniform(cfg.model.n_predictors));
    const auto s = coverage_experiment(g, prior, cfg.posterior, cfg.model, cfg.epsilon, cfg.n_trials,
                                       cfg.master_seed, worker_count(), cfg.moment);
    if (!trials_path.empty()) {
        auto f = open_output(trials_path);
        f << "trial,seed,e_nu_r,e_nu_R,certificate,violated\n";
        for (const auto& t : s.trials)
            f << t.trial << ',' << t.seed << ',' << format_real(t.e_nu_r) << ',' << format_real(t.e_nu_R) << ','
              << format_real(t.certificate) << ',' << (t.violated ? 1 : 0) << '\n';
        finish_output(f, trials_path);
    }
    Record r;
    r.add("generator", g.label());
    r.add("posterior", cfg.posterior.label());
    r.add("epsilon", num(cfg.epsilon));
    r.add("n_trials", static_cast<std::uint64_t>(s.n_trials));
    r.add("violations", static_cast<std::uint64_t>(s.violations));
    r.add("violation_frequency", num(s.violation_frequency));
    r.add("tolerance", num(s.tolerance));
    r.add("mean_slack", num(s.mean_slack));
    r.add("slack_q05", num(s.slack_q05));
    r.add("slack_q50", num(s.slack_q50));
    r.add("slack_q95", num(s.slack_q95));
    r.add("moment", num(s.moment.value));
    r.add("moment_std_error", num(s.moment.std_error));
    r.add("moment_exact", s.moment.exact);
    r.write(out, format);
    return s.violation_frequency <= s.tolerance ? kOk : kViolations;
}

int cmd_sweep(const BoundArgs& a, const std::string& param, double from, double to, std::size_t points,
              bool log_scale, std::ostream& out) {
    auto in = load_bound_inputs(a);
    if (points < 2) throw std::invalid_argument("--points must be at least 2");
    if (!std::isfinite(from) || !std::isfinite(to)) throw std::invalid_argument("--from/--to must be finite");
    if (log_scale && !(from > 0.0 && to > 0.0)) throw std::invalid_argument("--log needs positive --from/--to");
    std::optional<double> BoundSpec::*slot = nullptr;
    if (param == "lambda") slot = &BoundSpec::lambda;
    else if (param == "c") slot = &BoundSpec::c;
    else if (param == "gamma") slot = &BoundSpec::gamma;
    else throw std::invalid_argument("--param must be lambda, c or gamma");
    out << "row,param,x,value\n";
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(points - 1);
        const double x = log_scale ? std::exp(std::log(from) + t * (std::log(to) - std::log(from)))
                                   : from + t * (to - from);
        BoundSpec s = in.spec;
        s.*slot = x;
        const auto res = eval_bound(s, in.pi, in.h, in.d);
        out << to_string(s.row) << ',' << param << ',' << format_real(x) << ',' << format_real(res.value) << '\n';
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"f-divergence change-of-measure toolkit", "fdiv"};
    app.require_subcommand(1);
    // --h names the function file, so help is long-form only
    app.set_help_flag("--help", "print this help and exit");

    std::string format = "text";
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    };

    std::string g_spec, nu_path, pi_path, h_path;

    auto* div = app.add_subcommand("divergence", "D_f(nu, pi)");
    div->add_option("--g", g_spec, "generator, e.g. kl or power:1.5")->required();
    div->add_option("--nu", nu_path)->required();
    div->add_option("--pi", pi_path)->required();
    add_format(div);

    std::string oracle = "none";
    double tol = 1e-12;
    auto* leg = app.add_subcommand("legendre", "transform of the divergence at h");
    leg->add_option("--g", g_spec)->required();
    leg->add_option("--pi", pi_path)->required();
    leg->add_option("--h", h_path)->required();
    leg->add_option("--oracle", oracle)->check(CLI::IsMember({"none", "grid", "ascent"}));
    leg->add_option("--tol", tol, "root-finding tolerance");
    add_format(leg);

    BoundArgs bargs;
    auto* bnd = app.add_subcommand("bound", "evaluate one bound row");
    add_bound_options(bnd, bargs);
    add_format(bnd);

    std::string rows = "all", csv_path;
    std::size_t instances = 1000;
    std::uint64_t seed = 0;
    bool dominance = false;
    auto* ver = app.add_subcommand("verify", "randomised soundness sweep");
    ver->add_option("--rows", rows, "all or a comma-separated list");
    ver->add_option("--instances", instances, "instances per row");
    ver->add_option("--seed", seed);
    ver->add_flag("--dominance", dominance, "also check the transform ordering");
    ver->add_option("--csv", csv_path, "per-instance CSV output");
    add_format(ver);

    std::string config_path, trials_path;
    auto* pb = app.add_subcommand("pacbayes", "coverage experiment");
    pb->add_option("--config", config_path)->required();
    pb->add_option("--trials-csv", trials_path);
    add_format(pb);

    BoundArgs sargs;
    std::string param;
    double from = 0.0, to = 0.0;
    std::size_t points = 21;
    bool log_scale = false;
    auto* swp = app.add_subcommand("sweep", "bound row along one parameter, as CSV");
    add_bound_options(swp, sargs);
    swp->add_option("--param", param)->required();
    swp->add_option("--from", from)->required();
    swp->add_option("--to", to)->required();
    swp->add_option("--points", points);
    swp->add_flag("--log", log_scale);

    try {
        // CLI11 consumes arguments from the back
        std::vector<std::string> rest;
        for (std::size_t i = args.size(); i > 1; --i) rest.push_back(args[i - 1]);
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidConfig;
    }

    try {
        if (*div) return cmd_divergence(g_spec, nu_path, pi_path, format, out);
        if (*leg) return cmd_legendre(g_spec, pi_path, h_path, oracle, tol, format, out);
        if (*bnd) return cmd_bound(bargs, format, out);
        if (*ver) return cmd_verify(rows, instances, seed, dominance, csv_path, format, out);
        if (*pb) return cmd_pacbayes(config_path, trials_path, format, out);
        if (*swp) return cmd_sweep(sargs, param, from, to, points, log_scale, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    }
    return kInvalidConfig;
}

}  // namespace fdx::cli
