#include "fdiv/divergence.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fdx {

ExtReal f_divergence(const Generator& g, const FiniteDistribution& nu,
                     const FiniteDistribution& pi) {
    require_same_support(nu.size(), pi.size(), "f_divergence");
    ExtSum acc;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        const double p = pi[i];
        const double v = nu[i];
        if (p == 0.0) {
            if (v > 0.0) return kPosInf;
            continue;
        }
        acc.add(p * g.eval_f(v / p));
    }
    const ExtReal d = acc.total();
    return d < ExtReal(0.0) ? ExtReal(0.0) : d;
}

std::pair<ExtReal, ExtReal> divergence_pair_check(const Generator& g, const FiniteDistribution& nu,
                                                  const FiniteDistribution& pi) {
    require_same_support(nu.size(), pi.size(), "divergence_pair_check");
    return {f_divergence(reverse(g), nu, pi), f_divergence(g, pi, nu)};
}

namespace named {

double total_variation(const FiniteDistribution& nu, const FiniteDistribution& pi) {
    require_same_support(nu.size(), pi.size(), "total_variation");
    ExtSum s;
    for (std::size_t i = 0; i < nu.size(); ++i) s.add(std::abs(nu[i] - pi[i]));
    return 0.5 * s.total().value();
}

ExtReal pearson_chi2(const FiniteDistribution& nu, const FiniteDistribution& pi) {
    require_same_support(nu.size(), pi.size(), "pearson_chi2");
    ExtSum s;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        if (pi[i] == 0.0) {
            if (nu[i] > 0.0) return kPosInf;
            continue;
        }
        const double d = nu[i] - pi[i];
        s.add(d * d / pi[i]);
    }
    return s.total();
}

double squared_hellinger(const FiniteDistribution& nu, const FiniteDistribution& pi) {
    require_same_support(nu.size(), pi.size(), "squared_hellinger");
    ExtSum s;
    for (std::size_t i = 0; i < nu.size(); ++i) s.add(std::sqrt(nu[i] * pi[i]));
    return 1.0 - s.total().value();
}

ExtReal kl(const FiniteDistribution& nu, const FiniteDistribution& pi) {
    require_same_support(nu.size(), pi.size(), "kl");
    ExtSum s;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        if (nu[i] == 0.0) continue;
        if (pi[i] == 0.0) return kPosInf;
        s.add(nu[i] * std::log(nu[i] / pi[i]));
    }
    return s.total();
}

}  // namespace named

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path + "'");
    return ss.str();
}

std::vector<double> parse_column(const std::string& text, const char* json_key,
                                 const char* csv_header) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw std::invalid_argument("empty input");
    if (text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
        }
        if (!j.contains(json_key) || !j[json_key].is_array())
            throw std::invalid_argument(std::string("JSON must contain an array '") + json_key + "'");
        std::vector<double> out;
        for (const auto& v : j[json_key]) {
            if (!v.is_number()) throw std::invalid_argument("non-numeric entry in JSON array");
            out.push_back(v.get<double>());
        }
        return out;
    }
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t");
        const std::string cell = line.substr(b, e - b + 1);
        if (!header_seen) {
            if (cell != csv_header)
                throw std::invalid_argument(std::string("CSV header must be '") + csv_header + "'");
            header_seen = true;
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != cell.size()) throw std::invalid_argument("bad CSV value '" + cell + "'");
        out.push_back(v);
    }
    if (!header_seen) throw std::invalid_argument("CSV input has no header");
    return out;
}

}  // namespace

FiniteDistribution parse_distribution(const std::string& text) {
    return FiniteDistribution(parse_column(text, "weights", "w"));
}

MeasurableFunction parse_function(const std::string& text) {
    return MeasurableFunction(parse_column(text, "values", "h"));
}

FiniteDistribution read_distribution(const std::string& path) {
    return parse_distribution(slurp(path));
}

MeasurableFunction read_function(const std::string& path) { return parse_function(slurp(path)); }

}  // namespace fdx
