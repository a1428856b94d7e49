// tailwedge CLI: moment-explosion driven tail asymptotics for Gamma,
// variance-gamma, CIR superpositions and the Heston log-price, plus the
// Monte Carlo cross-checks and the validation suite.
//
// Exit codes: 0 success, 1 validation failure, 2 argument error,
// 3 numerical/domain failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tailwedge/analytic_models.hpp"
#include "tailwedge/cir_riccati.hpp"
#include "tailwedge/critical_moment.hpp"
#include "tailwedge/errors.hpp"
#include "tailwedge/montecarlo.hpp"
#include "tailwedge/tauberian.hpp"
#include "tailwedge/validation.hpp"

namespace {

using namespace tailwedge;

// CSV numbers carry 17 significant digits; never touches the locale.
std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw ArgumentError("bad numeric list entry: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw ArgumentError("empty numeric list");
    return out;
}

// Plain `key = value` config lines, `#` comments. Returns CLI-style tokens
// ("--key", "value", ...) spliced in ahead of the command-line flags, so
// explicit flags override file values; unknown keys fail the parse.
std::vector<std::string> load_config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot read config file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config: expected 'key = value', got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ArgumentError("config: expected 'key = value', got: " + line);
        if (key == "config") throw ArgumentError("config: nested config not allowed");
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    return tokens;
}

struct ModelFlags {
    std::string model;
    // gamma
    double k = 1.0, theta = 1.0;
    // variance gamma
    double c = 1.0, g = 1.0, m = 1.0;
    // cir / heston
    double a = 1.0, b = 1.0, sigma = 1.0, v0 = 1.0, rho = 0.0;
    double l1 = 0.0, l2 = 0.0, t = 1.0;

    cir::CirParams cir_params() const { return cir::CirParams{a, b, sigma, v0}; }
    cir::SuperpositionSpec spec() const { return cir::SuperpositionSpec{l1, l2, t}; }
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf, bool sim_only = false) {
    auto* model =
        cmd->add_option("--model", mf.model, "Model: gamma | vg | cir | heston")->required();
    if (sim_only)
        model->check(CLI::IsMember({"cir"}));
    else
        model->check(CLI::IsMember({"gamma", "vg", "cir", "heston"}));
    cmd->add_option("--k", mf.k, "Gamma shape");
    cmd->add_option("--theta", mf.theta, "Gamma scale");
    cmd->add_option("--c", mf.c, "Variance-gamma c");
    cmd->add_option("--g", mf.g, "Variance-gamma g");
    cmd->add_option("--m", mf.m, "Variance-gamma m (critical moment)");
    cmd->add_option("--a", mf.a, "CIR constant drift a");
    cmd->add_option("--b", mf.b, "CIR reversion rate b");
    cmd->add_option("--sigma", mf.sigma, "CIR diffusion coefficient");
    cmd->add_option("--v0", mf.v0, "CIR initial value");
    cmd->add_option("--rho", mf.rho, "Heston price-variance correlation");
    cmd->add_option("--l1", mf.l1, "Weight on V_t");
    cmd->add_option("--l2", mf.l2, "Weight on I_t (time integral)");
    cmd->add_option("--t", mf.t, "Horizon t");
}

// Rows are fully computed before anything is written, so a failing level
// never leaves a partial CSV behind.
void emit(const std::string& out_path, const std::string& header,
          const std::vector<std::string>& rows) {
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw ArgumentError("cannot open output file: " + out_path);
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    os << header << '\n';
    for (const auto& row : rows) os << row << '\n';
}

MgfModel build_mgf_model(const ModelFlags& mf) {
    if (mf.model == "gamma") return gamma_model(GammaParams{mf.k, mf.theta});
    if (mf.model == "vg") return vg_model(VarianceGammaParams{mf.c, mf.g, mf.m});
    if (mf.model == "cir") return cir::mgf_model(mf.cir_params(), mf.spec());
    throw ArgumentError("model '" + mf.model + "' has no MGF-model form here");
}

int cmd_mgf(const ModelFlags& mf, const std::string& p_csv, const std::string& out_path) {
    const std::vector<double> ps = parse_list(p_csv);
    std::vector<std::string> rows;
    for (double p : ps) {
        double lm = 0.0;
        if (mf.model == "heston") {
            lm = heston_log_mgf(HestonParams{mf.cir_params(), mf.rho}, p, mf.t);
        } else if (mf.model == "cir") {
            lm = cir::log_mgf(mf.cir_params(), p * mf.l1, p * mf.l2, mf.t);
        } else {
            lm = build_mgf_model(mf).log_mgf(p);
        }
        rows.push_back(num(p) + ',' + num(lm) + ',' + num(std::exp(lm)));
    }
    emit(out_path, "p,log_mgf,mgf", rows);
    return 0;
}

int cmd_critical(const ModelFlags& mf, const std::string& side, const std::string& out_path) {
    if (mf.model != "cir") throw ArgumentError("critical: only --model cir is supported");
    if (mf.l1 == 0.0 && mf.l2 == 0.0)
        throw ArgumentError("critical: l1 and l2 must not both be zero");
    const cir::CirParams params = mf.cir_params();
    const cir::SuperpositionSpec spec = mf.spec();

    std::vector<std::string> rows;
    const auto emit_side = [&](cir::Side s, const char* label) {
        const bool defined = s == cir::Side::plus ? std::max(spec.l1, spec.l2) > 0.0
                                                  : std::min(spec.l1, spec.l2) < 0.0;
        if (!defined) {
            rows.push_back(std::string(label) + ",inf,,,,,");
            return;
        }
        const double mu = s == cir::Side::plus ? cir::mu_plus(params, spec)
                                               : cir::mu_minus(params, spec);
        const auto fit = cir::omega_fit(params, spec, s);
        std::string closed_omega, closed_kappa;
        try {
            const auto closed = cir::omega_closed(params, spec, s);
            closed_omega = num(closed.omega);
            closed_kappa = num(closed.log_coeff);
        } catch (const NumericError&) {
            // Boundary case: the explicit expansion does not apply.
        }
        rows.push_back(std::string(label) + ',' + num(mu) + ',' + num(fit.omega) + ',' +
                       num(fit.log_coeff) + ',' + num(fit.max_residual) + ',' +
                       closed_omega + ',' + closed_kappa);
    };
    if (side == "plus" || side == "both") emit_side(cir::Side::plus, "plus");
    if (side == "minus" || side == "both") emit_side(cir::Side::minus, "minus");
    emit(out_path,
         "side,mu_star,omega_fit,log_coeff_fit,fit_residual,omega_closed,log_coeff_closed",
         rows);
    return 0;
}

int cmd_tail(const ModelFlags& mf, const std::string& r_csv, const std::string& out_path) {
    const std::vector<double> rs = parse_list(r_csv);
    const MgfModel model = build_mgf_model(mf);
    const bool is_cir = mf.model == "cir";

    std::string header =
        "R,p_star,lambda_star,chernoff_upper,band_exponent_low,band_exponent_high,"
        "log_band_upper,log_band_lower_limsup";
    if (is_cir) header += ",corollary_center,c_interval_low,c_interval_high";

    std::vector<std::string> rows;
    for (double R : rs) {
        const LegendrePoint pt = legendre(model, R);
        const TailBand band = tail_band(model, R);
        std::string row = num(R) + ',' + num(pt.p_star) + ',' + num(pt.lambda_star) + ',' +
                          num(std::exp(-pt.lambda_star)) + ',' +
                          num(band.exponent_interval.first) + ',' +
                          num(band.exponent_interval.second) + ',' + num(band.log_upper) +
                          ',' + num(band.log_lower_limsup);
        if (is_cir) {
            const cir::CorollaryBand cb = cir::corollary_band(mf.cir_params(), mf.spec(), R);
            row += ',' + num(cb.center) + ',' + num(cb.c_interval.first) + ',' +
                   num(cb.c_interval.second);
        }
        rows.push_back(std::move(row));
    }
    emit(out_path, header, rows);
    return 0;
}

int cmd_simulate(const ModelFlags& mf, const std::string& r_csv, const std::string& p_csv,
                 const mc::McConfig& config, const std::string& out_path) {
    if (r_csv.empty() && p_csv.empty()) throw ArgumentError("simulate: pass --R and/or --p");
    const cir::CirParams params = mf.cir_params();
    const cir::SuperpositionSpec spec = mf.spec();

    std::string text;
    if (!r_csv.empty()) {
        const MgfModel model = cir::mgf_model(params, spec);
        const auto tails = mc::estimate_tail(params, spec, parse_list(r_csv), config);
        text += "R,p_hat,ci_low,ci_high,n_exceed,chernoff_upper,n_paths,n_steps,seed\n";
        for (const auto& e : tails) {
            std::string bound;
            try {
                bound = num(chernoff_upper(model, e.R));
            } catch (const ArgumentError&) {
                // R at or below the mean: no bound to compare against.
            }
            text += num(e.R) + ',' + num(e.p_hat) + ',' + num(e.ci_low) + ',' +
                    num(e.ci_high) + ',' + std::to_string(e.n_exceed) + ',' + bound + ',' +
                    std::to_string(config.n_paths) + ',' + std::to_string(config.n_steps) +
                    ',' + std::to_string(config.seed) + '\n';
        }
    }
    if (!p_csv.empty()) {
        const auto mgfs = mc::estimate_mgf(params, spec, parse_list(p_csv), config);
        text += "p,estimate,std_error,closed_form,n_paths,n_steps,seed\n";
        for (const auto& e : mgfs) {
            const double closed =
                std::exp(cir::log_mgf(params, e.p * spec.l1, e.p * spec.l2, spec.t));
            text += num(e.p) + ',' + num(e.estimate) + ',' + num(e.std_error) + ',' +
                    num(closed) + ',' + std::to_string(config.n_paths) + ',' +
                    std::to_string(config.n_steps) + ',' + std::to_string(config.seed) + '\n';
        }
    }
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) throw ArgumentError("cannot open output file: " + out_path);
        file << text;
    }
    return 0;
}

std::uint32_t workers_from_env(std::uint32_t flag_value) {
    // TAILWEDGE_WORKERS overrides the flag; results are worker-independent,
    // so this only changes scheduling.
    if (const char* env = std::getenv("TAILWEDGE_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::uint32_t>(v);
    }
    return flag_value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tail asymptotics from moment explosions: closed-form CIR/Riccati "
                 "transforms, Legendre/Chernoff machinery and Monte Carlo cross-checks"};
    app.require_subcommand(1);

    ModelFlags mf_mgf, mf_crit, mf_tail, mf_sim;
    std::string p_csv, r_csv_tail, r_csv_sim, p_csv_sim, side = "both";
    std::string out_mgf, out_crit, out_tail, out_sim;
    std::string cfg_path;  // shared slot; one subcommand parses at a time
    mc::McConfig mc_config;
    std::uint32_t workers_flag = 0;
    validation::Options vopt;

    auto* mgf = app.add_subcommand("mgf", "Evaluate Lambda(p) = ln E e^{pZ} and the MGF");
    auto* crit = app.add_subcommand("critical", "Critical moments and omega coefficients");
    auto* tail = app.add_subcommand("tail", "Legendre points, Chernoff bounds, tail bands");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo tail / MGF estimates (CIR)");
    auto* validate = app.add_subcommand("validate", "Run the acceptance suite");
    // Later occurrences win, which is what lets command-line flags override
    // config-file values (config tokens are spliced in front).
    for (CLI::App* cmd : {mgf, crit, tail, sim, validate})
        cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    add_model_flags(mgf, mf_mgf);
    mgf->add_option("--p", p_csv, "Comma-separated p values")->required();
    mgf->add_option("--out", out_mgf, "Write CSV here instead of stdout");
    mgf->add_option("--config", cfg_path, "Config file (key = value lines)");

    add_model_flags(crit, mf_crit);
    crit->add_option("--side", side, "plus | minus | both")
        ->check(CLI::IsMember({"plus", "minus", "both"}));
    crit->add_option("--out", out_crit, "Write CSV here instead of stdout");
    crit->add_option("--config", cfg_path, "Config file (key = value lines)");

    add_model_flags(tail, mf_tail);
    tail->add_option("--R", r_csv_tail, "Comma-separated tail levels")->required();
    tail->add_option("--out", out_tail, "Write CSV here instead of stdout");
    tail->add_option("--config", cfg_path, "Config file (key = value lines)");

    add_model_flags(sim, mf_sim, /*sim_only=*/true);
    sim->add_option("--R", r_csv_sim, "Tail levels to score");
    sim->add_option("--p", p_csv_sim, "MGF arguments to score");
    sim->add_option("--paths", mc_config.n_paths, "Number of paths (>= 100)");
    sim->add_option("--steps", mc_config.n_steps, "Time steps for I_t (>= 8)");
    sim->add_option("--seed", mc_config.seed, "RNG seed");
    sim->add_option("--workers", workers_flag,
                    "Worker threads (0 = auto; TAILWEDGE_WORKERS overrides)");
    sim->add_option("--out", out_sim, "Write CSV here instead of stdout");
    sim->add_option("--config", cfg_path, "Config file (key = value lines)");

    validate->add_flag("--quick", vopt.quick, "Reduced path/config counts (documented factors)");
    validate->add_option("--only", vopt.only,
                         "Run a single block: riccati | explosion | gamma | lemma | "
                         "indices | critical | omega | mgf-mc | chernoff | corollary | "
                         "determinism");

    // Splice config-file tokens in right after the subcommand name.
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        if (!args.empty()) {
            std::string config_path;
            for (std::size_t i = 1; i < args.size(); ++i) {
                if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
                else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
            }
            if (!config_path.empty()) {
                const auto tokens = load_config_tokens(config_path);
                args.insert(args.begin() + 1, tokens.begin(), tokens.end());
            }
        }
        std::vector<const char*> cargv{argv[0]};
        for (const auto& a : args) cargv.push_back(a.c_str());
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "tailwedge: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "tailwedge: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(mgf)) return cmd_mgf(mf_mgf, p_csv, out_mgf);
        if (app.got_subcommand(crit)) return cmd_critical(mf_crit, side, out_crit);
        if (app.got_subcommand(tail)) return cmd_tail(mf_tail, r_csv_tail, out_tail);
        if (app.got_subcommand(sim)) {
            mc_config.workers = workers_from_env(workers_flag);
            return cmd_simulate(mf_sim, r_csv_sim, p_csv_sim, mc_config, out_sim);
        }
        if (app.got_subcommand(validate)) {
            vopt.cli_path = argv[0];
            const auto results = validation::run(vopt, std::cout);
            return validation::exit_code(results);
        }
    } catch (const ArgumentError& e) {
        std::cerr << "tailwedge: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "tailwedge: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "tailwedge: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
