// ppmm: command-line front end for the proxy pattern-mixture sensitivity tools.
#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ppmm/analysis.hpp"
#include "ppmm/csv.hpp"
#include "ppmm/curves.hpp"
#include "ppmm/error.hpp"
#include "ppmm/identification.hpp"
#include "ppmm/mechanisms.hpp"
#include "ppmm/selection.hpp"
#include "ppmm/serialize.hpp"
#include "ppmm/simulation.hpp"
#include "ppmm/validation.hpp"

namespace fs = std::filesystem;
using namespace ppmm;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNumericalError = 2;
constexpr int kValidationFailed = 3;

double parse_number(const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::InvalidArgument, "not a number: '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

/// "start:stop:step" (inclusive), or a comma-separated list of values.
std::vector<double> parse_grid(const std::string& text, bool phi = true) {
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "grid must be start:stop:step, got '" + text + "'");
        const double start = parse_number(parts[0]), stop = parse_number(parts[1]), step = parse_number(parts[2]);
        return phi ? make_phi_grid(start, stop, step) : make_grid(start, stop, step);
    }
    std::vector<double> out;
    for (const auto& p : split(text, ',')) out.push_back(parse_number(p));
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
    return out;
}

std::vector<std::string> parse_list(const std::string& text) {
    std::vector<std::string> out;
    for (auto& s : split(text, ',')) {
        if (!s.empty()) out.push_back(s);
    }
    return out;
}

struct Source {
    std::string mechanism;
    std::string config;

    void add_to(CLI::App* cmd) {
        cmd->add_option("-m,--mechanism", mechanism, "built-in mechanism id (1-18) or an id from --config");
        cmd->add_option("-c,--config", config, "JSON file with one mechanism or an array of them")
            ->check(CLI::ExistingFile);
    }

    std::vector<Mechanism> all() const {
        if (config.empty()) {
            if (mechanism.empty()) return builtin_mechanisms();
            return {builtin_mechanism(mechanism)};
        }
        auto loaded = load_mechanisms(config);
        if (mechanism.empty()) return loaded;
        for (auto& m : loaded) {
            if (m.id == mechanism) return {m};
        }
        throw Error(ErrorCode::InvalidArgument, "mechanism '" + mechanism + "' not found in " + config);
    }

    Mechanism one() const {
        if (mechanism.empty() && config.empty()) throw Error(ErrorCode::InvalidArgument, "give --mechanism or --config");
        const auto found = all();
        if (found.size() != 1) throw Error(ErrorCode::InvalidArgument, "config holds several mechanisms; pick one with --mechanism");
        return found.front();
    }
};

struct Output {
    std::string dir;
    std::string format = "json";

    void add_to(CLI::App* cmd) {
        cmd->add_option("-o,--out", dir, "output directory");
        cmd->add_option("-f,--format", format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
    }
};

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    out << text;
}

void write_series_files(const fs::path& dir, const std::vector<CurveSeries>& series) {
    for (const auto& s : series) {
        std::ostringstream csv;
        write_series_csv(csv, s);
        write_text(dir / "series" / (s.name + ".csv"), csv.str());
    }
}

void emit_series(const std::vector<CurveSeries>& series, const Output& out) {
    if (!out.dir.empty()) {
        write_series_files(out.dir, series);
        json manifest = json::array();
        for (const auto& s : series) {
            json meta = s;
            meta.erase("points");
            meta["file"] = "series/" + s.name + ".csv";
            manifest.push_back(meta);
        }
        write_text(fs::path(out.dir) / "summary.json", json{{"series", manifest}}.dump(2) + "\n");
        return;
    }
    if (out.format == "json") {
        std::cout << json(series).dump(2) << "\n";
        return;
    }
    std::cout << "series,abscissa,value,valid\n";
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            std::cout << s.name << ',' << format_double(p.abscissa) << ','
                      << (p.value ? format_double(*p.value) : std::string()) << ',' << (p.valid() ? 1 : 0) << "\n";
        }
    }
}

/// True when at least one φ > 0 was requested and none of them produced a value.
bool all_positive_phi_invalid(const std::vector<CurveSeries>& series) {
    bool any_positive = false;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            const double phi = s.abscissa_name == "phi" ? p.abscissa : s.phi.value_or(0.0);
            if (phi <= 0.0) continue;
            any_positive = true;
            if (p.valid()) return false;
        }
    }
    return any_positive;
}

int finish_sweep(const std::vector<CurveSeries>& series, const Output& out) {
    emit_series(series, out);
    if (all_positive_phi_invalid(series)) {
        std::cerr << "ppmm: identification fails at every requested phi > 0\n";
        return kNumericalError;
    }
    return kOk;
}

struct ModelRow {
    double phi;
    std::optional<IdentifiedModel> model;
    std::string reason;
};

std::vector<ModelRow> identify_grid(const ObservedSummary& obs, const std::vector<double>& grid) {
    std::vector<ModelRow> rows;
    for (double phi : grid) {
        try {
            rows.push_back({phi, identify(obs, Phi(phi)), {}});
        } catch (const Error& e) {
            if (e.is_input_error()) throw;
            rows.push_back({phi, std::nullopt, e.what()});
        }
    }
    return rows;
}

int rows_status(const std::vector<ModelRow>& rows) {
    bool any_positive = false;
    for (const auto& r : rows) {
        if (r.phi <= 0.0) continue;
        any_positive = true;
        if (r.model) return kOk;
    }
    if (any_positive) {
        std::cerr << "ppmm: identification fails at every requested phi > 0\n";
        return kNumericalError;
    }
    return kOk;
}

int run_identify(const Source& src, const std::string& grid_text, const Output& out, bool coeffs) {
    const Mechanism mech = src.one();
    const auto rows = identify_grid(mech.summary(), parse_grid(grid_text));

    if (out.format == "csv" && out.dir.empty()) {
        if (coeffs) {
            std::cout << "phi,valid,lambda0,lambda1,lambda2,lambda3,lambda4,lambda5\n";
        } else {
            std::cout << "phi,valid,mu_y0,var_y0,cov_xy0,marginal_mean\n";
        }
        for (const auto& r : rows) {
            std::cout << format_double(r.phi) << ',' << (r.model ? 1 : 0);
            if (!r.model) {
                std::cout << std::string(coeffs ? 6 : 4, ',') << "\n";
                continue;
            }
            if (coeffs) {
                for (double l : lambda_coefficients(*r.model).lambda) std::cout << ',' << format_double(l);
            } else {
                const auto& m0 = r.model->nonrespondent;
                std::cout << ',' << format_double(m0.mu_y) << ',' << format_double(m0.var_y) << ','
                          << format_double(m0.cov_xy) << ',' << format_double(marginal_mean(*r.model));
            }
            std::cout << "\n";
        }
        return rows_status(rows);
    }

    json arr = json::array();
    for (const auto& r : rows) {
        json j{{"phi", r.phi}};
        if (!r.model) {
            j["valid"] = false;
            j["reason"] = r.reason;
        } else if (coeffs) {
            j["valid"] = true;
            j["lambda"] = lambda_coefficients(*r.model);
            j["marginal"] = tau_coefficients(r.model->pi, {r.model->respondent.mu_x, r.model->respondent.var_x},
                                             {r.model->nonrespondent.mu_x, r.model->nonrespondent.var_x});
        } else {
            j["valid"] = true;
            j["model"] = *r.model;
            j["marginal_mean"] = marginal_mean(*r.model);
        }
        arr.push_back(j);
    }
    const json doc{{"mechanism", mech}, {coeffs ? "coefficients" : "models", arr}};
    if (!out.dir.empty()) {
        write_text(fs::path(out.dir) / "summary.json", doc.dump(2) + "\n");
    } else {
        std::cout << doc.dump(2) << "\n";
    }
    return rows_status(rows);
}

std::optional<double> optional_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return parse_number(text);
}

int run_analyze(const std::string& path, AnalyzeOptions opt, const Output& out) {
    const AnalysisReport rep = analyze(path, opt);
    for (const auto& w : rep.warnings) std::cerr << "ppmm: warning: " << w << "\n";
    if (!out.dir.empty()) {
        write_series_files(out.dir, rep.series);
        json doc = rep;
        doc["series"] = json::array();
        for (const auto& s : rep.series) {
            json meta = s;
            meta.erase("points");
            meta["file"] = "series/" + s.name + ".csv";
            doc["series"].push_back(meta);
        }
        write_text(fs::path(out.dir) / "summary.json", doc.dump(2) + "\n");
    } else if (out.format == "csv") {
        emit_series(rep.series, out);
    } else {
        std::cout << json(rep).dump(2) << "\n";
    }
    if (rep.phi_bound.upper <= 0.0) {
        std::cerr << "ppmm: identification fails at every phi > 0\n";
        return kNumericalError;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proxy pattern-mixture sensitivity analysis for nonignorable nonresponse"};
    app.require_subcommand(1);

    // mechanisms export
    auto* mechanisms = app.add_subcommand("mechanisms", "built-in factorial design mechanisms");
    mechanisms->require_subcommand(1);
    auto* mech_export = mechanisms->add_subcommand("export", "write the 18 built-in mechanisms");
    Output export_out;
    export_out.add_to(mech_export);

    // identify / coeffs
    Source ident_src, coeff_src;
    Output ident_out, coeff_out;
    std::string ident_grid = "0:1:0.1", coeff_grid = "0:1:0.1";
    auto* ident = app.add_subcommand("identify", "nonrespondent outcome moments and marginal mean per phi");
    ident_src.add_to(ident);
    ident->add_option("--phi-grid,--phi", ident_grid, "start:stop:step or comma list")->capture_default_str();
    ident_out.add_to(ident);
    auto* coeffs = app.add_subcommand("coeffs", "selection-model coefficients per phi");
    coeff_src.add_to(coeffs);
    coeffs->add_option("--phi-grid,--phi", coeff_grid, "start:stop:step or comma list")->capture_default_str();
    coeff_out.add_to(coeffs);

    // sweeps
    Source or_src, prob_src, mean_src;
    Output or_out, prob_out, mean_out;
    std::string or_grid = "0:1:0.01", or_levels, or_x, prob_levels = "0,0.25,0.5,0.75,1", prob_y, prob_x,
                mean_grid = "0:1:0.01";
    double or_delta = 1.0;
    bool or_delta_sd = false;
    auto* sweep_or_cmd = app.add_subcommand("sweep-or", "odds ratio of nonresponse versus phi");
    or_src.add_to(sweep_or_cmd);
    sweep_or_cmd->add_option("--phi-grid", or_grid, "start:stop:step or comma list")->capture_default_str();
    sweep_or_cmd->add_option("--y-levels", or_levels, "outcome levels (default: mean-sd, mean, mean+sd)");
    sweep_or_cmd->add_option("--x-fix", or_x, "proxy value held fixed (default: overall mean)");
    sweep_or_cmd->add_option("--delta", or_delta, "outcome increment")->capture_default_str();
    sweep_or_cmd->add_flag("--delta-sd", or_delta_sd, "use one respondent outcome sd as the increment");
    or_out.add_to(sweep_or_cmd);

    auto* sweep_prob_cmd = app.add_subcommand("sweep-prob", "nonresponse probability versus outcome");
    prob_src.add_to(sweep_prob_cmd);
    sweep_prob_cmd->add_option("--phi-levels", prob_levels, "phi values, one series each")->capture_default_str();
    sweep_prob_cmd->add_option("--y-grid", prob_y, "start:stop:step or comma list (default: mean ± 3 sd)");
    sweep_prob_cmd->add_option("--x-fix", prob_x, "proxy value held fixed (default: overall mean)");
    prob_out.add_to(sweep_prob_cmd);

    auto* sweep_mean_cmd = app.add_subcommand("sweep-mean", "marginal outcome mean versus phi");
    mean_src.add_to(sweep_mean_cmd);
    sweep_mean_cmd->add_option("--phi-grid", mean_grid, "start:stop:step or comma list")->capture_default_str();
    mean_out.add_to(sweep_mean_cmd);

    // analyze
    std::string csv_path, outcome, outcome_sum, exclude, an_grid = "0:1:0.01", an_levels = "0,0.25,0.5,0.75,1", an_y, an_x;
    double an_delta = 1.0, an_step = 0.01;
    bool ml_variance = false;
    Output an_out;
    auto* analyze_cmd = app.add_subcommand("analyze", "fit the proxy on a survey CSV and run all sweeps");
    analyze_cmd->add_option("csv", csv_path, "input CSV")->required()->check(CLI::ExistingFile);
    auto* outcome_opt = analyze_cmd->add_option("--outcome", outcome, "outcome column");
    auto* sum_opt = analyze_cmd->add_option("--outcome-sum", outcome_sum, "comma list of item columns to sum");
    outcome_opt->excludes(sum_opt);
    analyze_cmd->add_option("--exclude", exclude, "comma list of columns to ignore");
    analyze_cmd->add_option("--phi-grid", an_grid, "start:stop:step or comma list")->capture_default_str();
    analyze_cmd->add_option("--phi-levels", an_levels, "phi values for probability curves")->capture_default_str();
    analyze_cmd->add_option("--y-grid", an_y, "outcome grid for probability curves");
    analyze_cmd->add_option("--x-fix", an_x, "proxy value held fixed (default: overall mean)");
    analyze_cmd->add_option("--delta", an_delta, "outcome increment for odds ratios")->capture_default_str();
    analyze_cmd->add_option("--bound-step", an_step, "grid step for the phi validity bound")->capture_default_str();
    analyze_cmd->add_flag("--ml-variance", ml_variance, "divide variances by n instead of n-1");
    an_out.add_to(analyze_cmd);

    // simulate
    Source sim_src;
    double sim_phi = 0.5;
    std::size_t sim_n = 10000;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    auto* simulate_cmd = app.add_subcommand("simulate", "draw a dataset from an identified mechanism");
    sim_src.add_to(simulate_cmd);
    simulate_cmd->add_option("--phi", sim_phi, "sensitivity parameter")->capture_default_str();
    simulate_cmd->add_option("-n,--n", sim_n, "number of units")->capture_default_str();
    simulate_cmd->add_option("--seed", sim_seed, "random seed")->capture_default_str();
    simulate_cmd->add_option("-o,--out", sim_out, "output directory (writes simulated.csv); default stdout");

    // validate
    Source val_src;
    std::string val_grid = "0:1:0.1", val_mc_phis = "0.5", val_mc_ids;
    ValidationOptions vopt;
    bool no_mc = false;
    Output val_out;
    auto* validate_cmd = app.add_subcommand("validate", "oracle equivalence and Monte-Carlo recovery checks");
    val_src.add_to(validate_cmd);
    validate_cmd->add_option("--phi-grid", val_grid, "oracle phi grid")->capture_default_str();
    validate_cmd->add_option("--grid-points", vopt.grid_points, "oracle grid points per axis")->capture_default_str();
    validate_cmd->add_option("--grid-sd", vopt.grid_sd, "oracle grid half-width in sd")->capture_default_str();
    validate_cmd->add_option("--oracle-tolerance", vopt.oracle_tolerance, "largest allowed logit discrepancy")
        ->capture_default_str();
    validate_cmd->add_flag("--no-mc", no_mc, "skip Monte-Carlo recovery");
    validate_cmd->add_option("--mc-mechanisms", val_mc_ids, "comma list of ids for recovery (default: all selected)");
    validate_cmd->add_option("--mc-phi", val_mc_phis, "phi values for recovery")->capture_default_str();
    validate_cmd->add_option("--n-mc", vopt.n_mc, "units per recovery run")->capture_default_str();
    validate_cmd->add_option("--seed", vopt.seed, "random seed")->capture_default_str();
    val_out.add_to(validate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (mech_export->parsed()) {
            const auto all = builtin_mechanisms();
            if (!export_out.dir.empty()) {
                write_text(fs::path(export_out.dir) / "mechanisms.json", json(all).dump(2) + "\n");
            } else if (export_out.format == "csv") {
                std::cout << "id,mu_x1,mu_y1,var_x1,var_y1,cov_xy1,rho1,resid_var1,mu_x0,var_x0,pi\n";
                for (const auto& m : all) {
                    const auto& r = m.respondent;
                    std::cout << m.id << ',' << format_double(r.mu_x) << ',' << format_double(r.mu_y) << ','
                              << format_double(r.var_x) << ',' << format_double(r.var_y) << ','
                              << format_double(r.cov_xy) << ',' << format_double(r.correlation()) << ','
                              << format_double(respondent_residual_variance(m)) << ','
                              << format_double(m.nonresp_mu_x) << ',' << format_double(m.nonresp_var_x) << ','
                              << format_double(m.pi) << "\n";
                }
            } else {
                std::cout << json(all).dump(2) << "\n";
            }
            return kOk;
        }
        if (ident->parsed()) return run_identify(ident_src, ident_grid, ident_out, false);
        if (coeffs->parsed()) return run_identify(coeff_src, coeff_grid, coeff_out, true);

        if (sweep_or_cmd->parsed()) {
            const Mechanism m = or_src.one();
            const auto obs = m.summary();
            std::vector<OutcomeLevel> levels;
            if (or_levels.empty()) {
                levels = standard_outcome_levels(obs);
            } else {
                for (const auto& s : parse_list(or_levels)) levels.push_back({"y" + s, parse_number(s)});
            }
            const double delta = or_delta_sd ? obs.respondent.sd_y() : or_delta;
            return finish_sweep(sweep_or(obs, m.id, parse_grid(or_grid), levels, optional_number(or_x), delta), or_out);
        }
        if (sweep_prob_cmd->parsed()) {
            const Mechanism m = prob_src.one();
            const auto obs = m.summary();
            std::vector<double> y_grid;
            if (prob_y.empty()) {
                const double mu = obs.respondent.mu_y, sd = obs.respondent.sd_y();
                for (int i = 0; i <= 60; ++i) y_grid.push_back(mu - 3.0 * sd + 0.1 * sd * i);
            } else {
                y_grid = parse_grid(prob_y, false);
            }
            return finish_sweep(sweep_prob(obs, m.id, parse_grid(prob_levels), y_grid, optional_number(prob_x)), prob_out);
        }
        if (sweep_mean_cmd->parsed()) {
            const Mechanism m = mean_src.one();
            return finish_sweep({sweep_mean(m.summary(), m.id, parse_grid(mean_grid))}, mean_out);
        }

        if (analyze_cmd->parsed()) {
            if (outcome.empty() && outcome_sum.empty()) throw Error(ErrorCode::InvalidArgument, "give --outcome or --outcome-sum");
            AnalyzeOptions opt;
            opt.outcome = outcome;
            opt.outcome_sum = parse_list(outcome_sum);
            opt.exclude = parse_list(exclude);
            opt.denominator = ml_variance ? VarianceDenominator::MaximumLikelihood : VarianceDenominator::Unbiased;
            opt.phi_grid = parse_grid(an_grid);
            opt.prob_phi_levels = parse_grid(an_levels);
            if (!an_y.empty()) opt.y_grid = parse_grid(an_y, false);
            opt.x_fix = optional_number(an_x);
            opt.delta = an_delta;
            opt.bound_step = an_step;
            return run_analyze(csv_path, opt, an_out);
        }

        if (simulate_cmd->parsed()) {
            const Mechanism m = sim_src.one();
            const auto model = identify(m.summary(), Phi(sim_phi));
            const auto ds = simulate(model, sim_n, sim_seed, m.id);
            if (sim_out.empty()) {
                write_dataset_csv(std::cout, ds);
            } else {
                std::ostringstream csv;
                write_dataset_csv(csv, ds);
                write_text(fs::path(sim_out) / "simulated.csv", csv.str());
            }
            return kOk;
        }

        if (validate_cmd->parsed()) {
            vopt.phi_grid = parse_grid(val_grid);
            vopt.run_mc = !no_mc;
            vopt.mc_phis = parse_grid(val_mc_phis);
            vopt.mc_mechanisms = parse_list(val_mc_ids);
            const ValidationReport rep = validate(val_src.all(), vopt);
            const std::string text = json(rep).dump(2) + "\n";
            if (!val_out.dir.empty()) {
                write_text(fs::path(val_out.dir) / "validation.json", text);
            } else {
                std::cout << text;
            }
            std::cerr << "ppmm: max oracle discrepancy " << rep.max_discrepancy << "; "
                      << (rep.passed ? "passed" : "FAILED") << "\n";
            return rep.passed ? kOk : kValidationFailed;
        }
    } catch (const Error& e) {
        std::cerr << "ppmm: " << e.what() << "\n";
        return e.is_input_error() ? kInputError : kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "ppmm: " << e.what() << "\n";
        return kInputError;
    }
    return kOk;
}
