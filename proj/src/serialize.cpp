#include "ppmm/serialize.hpp"

#include <fstream>
#include <sstream>

#include "ppmm/error.hpp"

namespace ppmm {

namespace {

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from_json(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

void to_json(json& j, const PatternMoments& m) {
    j = json{{"mu_x", m.mu_x}, {"mu_y", m.mu_y}, {"var_x", m.var_x}, {"var_y", m.var_y}, {"cov_xy", m.cov_xy}};
}

void from_json(const json& j, PatternMoments& m) {
    j.at("mu_x").get_to(m.mu_x);
    j.at("mu_y").get_to(m.mu_y);
    j.at("var_x").get_to(m.var_x);
    j.at("var_y").get_to(m.var_y);
    j.at("cov_xy").get_to(m.cov_xy);
}

void to_json(json& j, const ObservedSummary& s) {
    j = json{{"respondent", s.respondent},
             {"nonresp_mu_x", s.nonresp_mu_x},
             {"nonresp_var_x", s.nonresp_var_x},
             {"pi", s.pi}};
}

void from_json(const json& j, ObservedSummary& s) {
    j.at("respondent").get_to(s.respondent);
    j.at("nonresp_mu_x").get_to(s.nonresp_mu_x);
    j.at("nonresp_var_x").get_to(s.nonresp_var_x);
    j.at("pi").get_to(s.pi);
}

void to_json(json& j, const Mechanism& m) {
    j = json{{"id", m.id},
             {"respondent", m.respondent},
             {"nonresp_mu_x", m.nonresp_mu_x},
             {"nonresp_var_x", m.nonresp_var_x},
             {"pi", m.pi}};
}

void from_json(const json& j, Mechanism& m) {
    const json& id = j.at("id");
    m.id = id.is_string() ? id.get<std::string>() : id.dump();
    j.at("respondent").get_to(m.respondent);
    j.at("nonresp_mu_x").get_to(m.nonresp_mu_x);
    j.at("nonresp_var_x").get_to(m.nonresp_var_x);
    j.at("pi").get_to(m.pi);
}

void to_json(json& j, const IdentifiedModel& m) {
    j = json{{"phi", m.phi.value()}, {"pi", m.pi}, {"respondent", m.respondent}, {"nonrespondent", m.nonrespondent}};
}

void to_json(json& j, const SelectionCoefficients& c) {
    j = json::object();
    for (std::size_t k = 0; k < c.lambda.size(); ++k) j["lambda" + std::to_string(k)] = c.lambda[k];
}

void to_json(json& j, const MarginalSelectionCoefficients& c) {
    j = json{{"tau0", c.tau0}, {"tau1", c.tau1}, {"tau2", c.tau2}};
}

void to_json(json& j, const PhiInterval& p) {
    j = json{{"lower", p.lower}, {"upper", p.upper}, {"complete", p.complete}};
}

void from_json(const json& j, PhiInterval& p) {
    j.at("lower").get_to(p.lower);
    j.at("upper").get_to(p.upper);
    j.at("complete").get_to(p.complete);
}

void to_json(json& j, const CurvePoint& p) {
    j = json{{"abscissa", p.abscissa}, {"value", optional_to_json(p.value)}};
    if (!p.valid()) j["reason"] = p.reason;
}

void from_json(const json& j, CurvePoint& p) {
    j.at("abscissa").get_to(p.abscissa);
    p.value = optional_from_json(j, "value");
    p.reason = j.value("reason", std::string{});
}

void to_json(json& j, const CurveSeries& s) {
    j = json{{"name", s.name},
             {"abscissa_name", s.abscissa_name},
             {"mechanism_id", s.mechanism_id},
             {"fixed_x", optional_to_json(s.fixed_x)},
             {"fixed_y", optional_to_json(s.fixed_y)},
             {"phi", optional_to_json(s.phi)},
             {"delta", optional_to_json(s.delta)},
             {"points", s.points}};
}

void from_json(const json& j, CurveSeries& s) {
    j.at("name").get_to(s.name);
    j.at("abscissa_name").get_to(s.abscissa_name);
    j.at("mechanism_id").get_to(s.mechanism_id);
    s.fixed_x = optional_from_json(j, "fixed_x");
    s.fixed_y = optional_from_json(j, "fixed_y");
    s.phi = optional_from_json(j, "phi");
    s.delta = optional_from_json(j, "delta");
    j.at("points").get_to(s.points);
}

void to_json(json& j, const NamedCoefficient& c) { j = json{{"name", c.name}, {"value", c.value}}; }

void from_json(const json& j, NamedCoefficient& c) {
    j.at("name").get_to(c.name);
    j.at("value").get_to(c.value);
}

void to_json(json& j, const AnalysisReport& r) {
    j = json{{"summary", r.summary},
             {"respondents", r.respondents},
             {"nonrespondents", r.nonrespondents},
             {"proxy_coefficients", r.proxy_coefficients},
             {"r_squared", r.r_squared},
             {"respondent_rho", r.respondent_rho},
             {"warnings", r.warnings},
             {"phi_bound", r.phi_bound},
             {"series", r.series}};
}

void from_json(const json& j, AnalysisReport& r) {
    j.at("summary").get_to(r.summary);
    j.at("respondents").get_to(r.respondents);
    j.at("nonrespondents").get_to(r.nonrespondents);
    j.at("proxy_coefficients").get_to(r.proxy_coefficients);
    j.at("r_squared").get_to(r.r_squared);
    j.at("respondent_rho").get_to(r.respondent_rho);
    j.at("warnings").get_to(r.warnings);
    j.at("phi_bound").get_to(r.phi_bound);
    j.at("series").get_to(r.series);
}

void to_json(json& j, const CoefficientComparison& c) {
    j = json{{"name", c.name}, {"analytic", c.analytic}, {"estimate", c.estimate}, {"se", c.se}, {"z", c.z}};
}

void from_json(const json& j, CoefficientComparison& c) {
    j.at("name").get_to(c.name);
    j.at("analytic").get_to(c.analytic);
    j.at("estimate").get_to(c.estimate);
    j.at("se").get_to(c.se);
    j.at("z").get_to(c.z);
}

void to_json(json& j, const OracleEntry& e) {
    j = json{{"mechanism_id", e.mechanism_id}, {"phi", e.phi},         {"excluded", e.excluded},
             {"reason", e.reason},             {"max_discrepancy", e.max_discrepancy}, {"passed", e.passed}};
}

void from_json(const json& j, OracleEntry& e) {
    j.at("mechanism_id").get_to(e.mechanism_id);
    j.at("phi").get_to(e.phi);
    j.at("excluded").get_to(e.excluded);
    j.at("reason").get_to(e.reason);
    j.at("max_discrepancy").get_to(e.max_discrepancy);
    j.at("passed").get_to(e.passed);
}

void to_json(json& j, const RecoveryEntry& e) {
    j = json{{"mechanism_id", e.mechanism_id}, {"phi", e.phi},       {"seed", e.seed},
             {"n", e.n},                       {"excluded", e.excluded}, {"reason", e.reason},
             {"converged", e.converged},       {"terms", e.terms},   {"passed", e.passed}};
}

void from_json(const json& j, RecoveryEntry& e) {
    j.at("mechanism_id").get_to(e.mechanism_id);
    j.at("phi").get_to(e.phi);
    j.at("seed").get_to(e.seed);
    j.at("n").get_to(e.n);
    j.at("excluded").get_to(e.excluded);
    j.at("reason").get_to(e.reason);
    j.at("converged").get_to(e.converged);
    j.at("terms").get_to(e.terms);
    j.at("passed").get_to(e.passed);
}

void to_json(json& j, const ValidationReport& r) {
    j = json{{"oracle", r.oracle},
             {"recovery", r.recovery},
             {"max_discrepancy", r.max_discrepancy},
             {"oracle_tolerance", r.oracle_tolerance},
             {"z_threshold", r.z_threshold},
             {"passed", r.passed}};
}

void from_json(const json& j, ValidationReport& r) {
    j.at("oracle").get_to(r.oracle);
    j.at("recovery").get_to(r.recovery);
    j.at("max_discrepancy").get_to(r.max_discrepancy);
    j.at("oracle_tolerance").get_to(r.oracle_tolerance);
    j.at("z_threshold").get_to(r.z_threshold);
    j.at("passed").get_to(r.passed);
}

std::vector<Mechanism> parse_mechanisms(const std::string& text) {
    try {
        const json j = json::parse(text);
        std::vector<Mechanism> out;
        if (j.is_array()) {
            out = j.get<std::vector<Mechanism>>();
        } else {
            out.push_back(j.get<Mechanism>());
        }
        for (const auto& m : out) validate_observed_summary(m.summary());
        return out;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("mechanism config: ") + e.what());
    }
}

std::vector<Mechanism> load_mechanisms(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mechanisms(buf.str());
}

}  // namespace ppmm
