// corrmine: correlation-screening toolkit.
//
// Subcommands: constants, params, threshold, counts, simulate, tv-curve,
// moments, fwer, sparsity.  Exit codes: 0 success, 2 usage error,
// 1 runtime error.  All randomness flows from --seed (or CORRMINE_SEED).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "corrmine/cpois.hpp"
#include "corrmine/graphs.hpp"
#include "corrmine/matrix_io.hpp"
#include "corrmine/params.hpp"
#include "corrmine/scores.hpp"
#include "corrmine/sim.hpp"
#include "corrmine/sparsity.hpp"

using nlohmann::json;

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

struct OutputOpts {
    std::string format = "json";
    std::string out;
};

void add_output_opts(CLI::App* cmd, OutputOpts& o) {
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out, "Write output to FILE instead of stdout");
}

void emit(const OutputOpts& o, const json& j, const std::string& csv) {
    const std::string text = o.format == "json" ? j.dump(2) + "\n" : csv;
    if (o.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(o.out);
        if (!f) throw std::runtime_error("cannot open " + o.out + " for writing");
        f << text;
    }
}

struct SeedOpt {
    std::uint64_t value = 0;
    CLI::Option* opt = nullptr;

    void add(CLI::App* cmd) {
        opt = cmd->add_option("--seed", value, "RNG seed (fallback: CORRMINE_SEED)");
    }

    bool resolve() { // true when a seed is available
        if (opt->count() > 0) return true;
        if (const char* env = std::getenv("CORRMINE_SEED")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && *end == '\0') {
                value = v;
                return true;
            }
            throw CLI::ValidationError("CORRMINE_SEED", "not a valid integer seed");
        }
        return false;
    }

    void require() {
        if (!resolve())
            throw CLI::ValidationError("--seed", "required (pass --seed or set CORRMINE_SEED)");
    }
};

struct SigmaOpts {
    std::string kind = "diagonal";
    int tau = 0, kappa = 0;
    double tau_pow = 0.0, kappa_pow = 0.0;
    double xi = 0.1;

    void add(CLI::App* cmd) {
        cmd->add_option("--sigma", kind, "Dispersion model")
            ->check(CLI::IsMember({"diagonal", "tau-kappa", "block"}))
            ->capture_default_str();
        cmd->add_option("--tau", tau, "Sparsity parameter tau")->check(CLI::PositiveNumber);
        cmd->add_option("--kappa", kappa, "Sparsity parameter kappa")->check(CLI::Range(2, 1 << 20));
        cmd->add_option("--tau-pow", tau_pow, "tau = ceil(p^tau-pow)")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--kappa-pow", kappa_pow, "kappa = ceil(p^kappa-pow)")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--xi", xi, "Off-diagonal magnitude")->capture_default_str();
    }

    corrmine::SigmaModel model() const {
        corrmine::SigmaModel m;
        if (kind == "diagonal") {
            m.kind = corrmine::CovKind::diagonal;
        } else if (kind == "tau-kappa") {
            m.kind = corrmine::CovKind::tau_kappa;
            if (tau == 0 && tau_pow == 0.0)
                throw CLI::ValidationError("--sigma tau-kappa", "needs --tau or --tau-pow");
            if (kappa == 0 && kappa_pow == 0.0)
                throw CLI::ValidationError("--sigma tau-kappa", "needs --kappa or --kappa-pow");
        } else {
            m.kind = corrmine::CovKind::block;
            if (tau == 0 && tau_pow == 0.0)
                throw CLI::ValidationError("--sigma block", "needs --tau or --tau-pow");
        }
        m.tau = tau;
        m.kappa = kappa;
        m.tau_pow = tau_pow;
        m.kappa_pow = kappa_pow;
        m.xi = xi;
        return m;
    }
};

corrmine::Statistic parse_stat(const std::string& s) {
    if (s == "n_e") return corrmine::Statistic::star;
    if (s == "n_v_exact") return corrmine::Statistic::v_exact;
    return corrmine::Statistic::v_atleast;
}

std::vector<int> parse_grid(const std::string& s) {
    std::vector<int> grid;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        grid.push_back(std::stoi(tok));
        if (grid.back() < 2) throw CLI::ValidationError("--p-grid", "entries must be >= 2");
    }
    if (grid.empty()) throw CLI::ValidationError("--p-grid", "no entries");
    return grid;
}

// ---------------------------------------------------------------- constants

void setup_constants(CLI::App& app) {
    auto* cmd = app.add_subcommand("constants", "Spherical-cap constants a_n, b_n and P_n(r)");
    auto n = std::make_shared<int>(4);
    auto r = std::make_shared<double>(-1.0);
    auto out = std::make_shared<OutputOpts>();
    cmd->add_option("--n", *n, "Sample size n")->required()->check(CLI::Range(4, 1 << 20));
    auto* ropt = cmd->add_option("--r", *r, "Also evaluate the cap probability at radius r");
    add_output_opts(cmd, *out);
    cmd->callback([n, r, out, ropt] {
        const corrmine::CapConstants c = corrmine::cap_constants(*n);
        json j{{"n", c.n}, {"a_n", c.a_n}, {"b_n", c.b_n}};
        std::string csv = "n,a_n,b_n";
        std::string row = std::to_string(c.n) + "," + fmt(c.a_n) + "," + fmt(c.b_n);
        if (ropt->count() > 0) {
            const double p = corrmine::pn(*r, *n);
            const auto [lo, hi] = corrmine::pn_bounds(*r, *n);
            j["r"] = *r;
            j["pn"] = p;
            j["pn_lower"] = lo;
            j["pn_upper"] = hi;
            csv += ",r,pn,pn_lower,pn_upper";
            row += "," + fmt(*r) + "," + fmt(p) + "," + fmt(lo) + "," + fmt(hi);
        }
        emit(*out, j, csv + "\n" + row + "\n");
    });
}

// ---------------------------------------------------------------- threshold

void setup_threshold(CLI::App& app) {
    auto* cmd = app.add_subcommand("threshold", "Correlation threshold rho_p from (p, n, delta, e)");
    auto p = std::make_shared<int>(0);
    auto n = std::make_shared<int>(0);
    auto delta = std::make_shared<int>(1);
    auto e = std::make_shared<double>(1.0);
    auto out = std::make_shared<OutputOpts>();
    cmd->add_option("--p", *p, "Variable count")->required()->check(CLI::Range(2, 1 << 30));
    cmd->add_option("--n", *n, "Sample size")->required()->check(CLI::Range(4, 1 << 20));
    cmd->add_option("--delta", *delta, "Degree threshold")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--e", *e, "Rate parameter e")->capture_default_str()->check(CLI::PositiveNumber);
    add_output_opts(cmd, *out);
    cmd->callback([p, n, delta, e, out] {
        const double rho = corrmine::rho_threshold(*p, *n, *delta, *e);
        const double radius = corrmine::rho_to_radius(rho);
        const double diag = corrmine::rate_diagnostic(*p, *n, *delta, rho);
        json j{{"p", *p},   {"n", *n},           {"delta", *delta}, {"e", *e},
               {"rho", rho}, {"radius", radius}, {"rate_diagnostic", diag}};
        std::string csv = "p,n,delta,e,rho,radius,rate_diagnostic\n"
            + std::to_string(*p) + "," + std::to_string(*n) + "," + std::to_string(*delta) + ","
            + fmt(*e) + "," + fmt(rho) + "," + fmt(radius) + "," + fmt(diag) + "\n";
        emit(*out, j, csv);
    });
}

// ------------------------------------------------------------------- params

void setup_params(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "params", "Compound-Poisson parameters: alpha, zeta, lambda, rho, FWER");
    auto n = std::make_shared<int>(0);
    auto delta = std::make_shared<int>(1);
    auto p = std::make_shared<int>(0);
    auto rho = std::make_shared<double>(-1.0);
    auto e = std::make_shared<double>(1.0);
    auto trials = std::make_shared<long>(100000);
    auto seed = std::make_shared<SeedOpt>();
    auto out = std::make_shared<OutputOpts>();
    cmd->add_option("--n", *n, "Sample size")->required()->check(CLI::Range(4, 1 << 20));
    cmd->add_option("--delta", *delta, "Degree threshold")->required()->check(CLI::PositiveNumber);
    auto* popt = cmd->add_option("--p", *p, "Variable count (enables the finite-p rate)")
        ->check(CLI::Range(2, 1 << 30));
    auto* rhoopt = cmd->add_option("--rho", *rho, "Explicit threshold (else derived from --e)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--e", *e, "Rate parameter e")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--trials", *trials, "Monte-Carlo trials for estimated alpha")
        ->capture_default_str()->check(CLI::PositiveNumber);
    seed->add(cmd);
    add_output_opts(cmd, *out);
    cmd->callback([n, delta, p, rho, e, trials, seed, out, popt, rhoopt] {
        const bool have_p = popt->count() > 0;
        const bool have_rho = rhoopt->count() > 0;
        const bool need_mc = *delta >= 3 || (have_p && *delta >= 2);
        if (need_mc) seed->require();

        corrmine::AlphaEstimate alpha;
        if (*delta <= 2) {
            alpha = corrmine::analytic_alpha(*n, *delta);
        } else {
            corrmine::CounterRng rng(seed->value, 0);
            alpha = corrmine::estimate_alpha_limit(*n, *delta, *trials, rng);
        }
        const corrmine::IncrementDist zeta = corrmine::increment_dist(alpha);

        json j{{"n", *n}, {"delta", *delta}};
        j["alpha"] = alpha.values;
        j["zeta"] = zeta.probs;
        double lambda;
        double e_used = *e;
        if (have_p) {
            const double rho_used = have_rho
                ? *rho : corrmine::rho_threshold(*p, *n, *delta, *e);
            if (have_rho) e_used = corrmine::e_from_rho(*p, *n, *delta, rho_used);
            corrmine::AlphaEstimate alpha_fin;
            if (*delta == 1) {
                alpha_fin.delta = 1;
                alpha_fin.values = {0.0, 1.0};
                alpha_fin.trials = 0;
            } else {
                corrmine::CounterRng rng(seed->value, 1);
                alpha_fin = corrmine::estimate_alpha_finite(*n, *delta, rho_used, *trials, rng);
            }
            lambda = corrmine::lambda_finite(*p, *n, *delta, rho_used, alpha_fin.values);
            j["p"] = *p;
            j["rho"] = rho_used;
            j["alpha_finite"] = alpha_fin.values;
        } else {
            lambda = corrmine::lambda_limit(*n, *delta, e_used, alpha.values);
        }
        j["e"] = e_used;
        j["lambda"] = lambda;
        j["fwer"] = corrmine::fwer(lambda);

        std::ostringstream csv;
        csv << "quantity,index,value\n";
        for (std::size_t i = 0; i < alpha.values.size(); ++i)
            csv << "alpha," << i + 1 << "," << fmt(alpha.values[i]) << "\n";
        for (std::size_t i = 0; i < zeta.probs.size(); ++i)
            csv << "zeta," << i + 1 << "," << fmt(zeta.probs[i]) << "\n";
        if (j.contains("rho")) csv << "rho,," << fmt(j["rho"].get<double>()) << "\n";
        csv << "e,," << fmt(e_used) << "\n";
        csv << "lambda,," << fmt(lambda) << "\n";
        csv << "fwer,," << fmt(j["fwer"].get<double>()) << "\n";
        emit(*out, j, csv.str());
    });
}

// ------------------------------------------------------------------- counts

void setup_counts(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "counts", "Count statistics of a thresholded correlation graph");
    auto matrix = std::make_shared<std::string>();
    auto data = std::make_shared<std::string>();
    auto rho = std::make_shared<double>(0.0);
    auto delta = std::make_shared<int>(1);
    auto partial = std::make_shared<bool>(false);
    auto edges = std::make_shared<std::string>();
    auto out = std::make_shared<OutputOpts>();
    auto* mopt = cmd->add_option("--matrix", *matrix, "Correlation-type matrix file (CSV or .cmx)");
    auto* dopt = cmd->add_option("--data", *data, "Data matrix file; correlations are computed");
    cmd->add_option("--rho", *rho, "Threshold in [0, 1)")->required()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--delta", *delta, "Degree threshold")->required()->check(CLI::PositiveNumber);
    cmd->add_flag("--partial", *partial, "Use the partial correlation (needs --data)");
    cmd->add_option("--export-edges", *edges, "Also write the edge list (CSV: i,j) to FILE");
    add_output_opts(cmd, *out);
    mopt->excludes(dopt);
    cmd->callback([matrix, data, rho, delta, partial, edges, out, mopt, dopt] {
        if (mopt->count() == 0 && dopt->count() == 0)
            throw CLI::ValidationError("counts", "one of --matrix or --data is required");
        if (*partial && dopt->count() == 0)
            throw CLI::ValidationError("--partial", "needs --data (scores come from samples)");
        corrmine::Matrix psi;
        if (mopt->count() > 0) {
            psi = corrmine::read_matrix_auto(*matrix);
        } else {
            const corrmine::Matrix x = corrmine::read_matrix_auto(*data);
            psi = *partial ? corrmine::partial_correlation(x) : corrmine::sample_correlation(x);
        }
        const corrmine::SimpleGraph g = corrmine::threshold_graph(psi, *rho);
        const corrmine::CountStatistics c = corrmine::count_statistics(g, *delta);
        const int universal = corrmine::count_universal(g);
        if (!edges->empty()) {
            std::ofstream f(*edges);
            if (!f) throw std::runtime_error("cannot open " + *edges + " for writing");
            corrmine::write_edge_list(f, g);
        }
        json j{{"p", g.p()},
               {"rho", *rho},
               {"delta", c.delta},
               {"n_e", c.n_e},
               {"n_v_exact", c.n_v_exact},
               {"n_v_atleast", c.n_v_atleast},
               {"edges", g.edge_count()},
               {"universal", universal}};
        std::string csv = "p,rho,delta,n_e,n_v_exact,n_v_atleast,edges,universal\n"
            + std::to_string(g.p()) + "," + fmt(*rho) + "," + std::to_string(c.delta) + ","
            + std::to_string(c.n_e) + "," + std::to_string(c.n_v_exact) + ","
            + std::to_string(c.n_v_atleast) + "," + std::to_string(g.edge_count()) + ","
            + std::to_string(universal) + "\n";
        emit(*out, j, csv);
    });
}

// ------------------------------------------------- shared simulate options

struct SimOpts {
    int n = 10, p = 100, delta = 1;
    double rho = -1.0, e = 1.0;
    long trials = 2000;
    bool partial = false;
    std::string family = "gaussian";
    double radial_sigma = 0.5, mean_shift = 0.0;
    int threads = 0;
    SigmaOpts sigma;
    SeedOpt seed;
    CLI::Option* rho_opt = nullptr;

    void add(CLI::App* cmd, bool with_p = true) {
        cmd->add_option("--n", n, "Sample size")->required()->check(CLI::Range(4, 1 << 20));
        if (with_p)
            cmd->add_option("--p", p, "Variable count")->required()->check(CLI::Range(2, 1 << 30));
        cmd->add_option("--delta", delta, "Degree threshold")->required()
            ->check(CLI::PositiveNumber);
        rho_opt = cmd->add_option("--rho", rho, "Explicit threshold (else derived from --e)")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--e", e, "Rate parameter e")->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--trials", trials, "Trials")->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--partial", partial, "Also build partial-correlation graphs");
        cmd->add_option("--family", family, "Sampling family")
            ->check(CLI::IsMember({"gaussian", "elliptical"}))->capture_default_str();
        cmd->add_option("--radial-sigma", radial_sigma, "Log-normal radial scale (elliptical)")
            ->capture_default_str();
        cmd->add_option("--mean-shift", mean_shift, "Scale of the deterministic mean pattern")
            ->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads (0 = hardware)")
            ->capture_default_str();
        sigma.add(cmd);
        seed.add(cmd);
    }

    corrmine::TrialConfig config() {
        seed.require();
        corrmine::TrialConfig cfg;
        cfg.n = n;
        cfg.p = p;
        cfg.delta = delta;
        cfg.sigma = sigma.model();
        cfg.rho = rho_opt->count() > 0 ? rho : -1.0;
        cfg.e = e;
        cfg.trials = trials;
        cfg.seed = seed.value;
        cfg.partial = partial;
        cfg.family = family == "elliptical" ? corrmine::Family::elliptical
                                            : corrmine::Family::gaussian;
        cfg.radial_sigma = radial_sigma;
        cfg.mean_shift = mean_shift;
        cfg.threads = threads > 0
            ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        return cfg;
    }
};

json histograms_json(const corrmine::EmpiricalDistribution& emp) {
    json j;
    const auto kinds = emp.has_partial
        ? std::vector<corrmine::GraphKind>{corrmine::GraphKind::correlation,
                                           corrmine::GraphKind::partial}
        : std::vector<corrmine::GraphKind>{corrmine::GraphKind::correlation};
    for (corrmine::GraphKind k : kinds) {
        json h;
        for (corrmine::Statistic s : {corrmine::Statistic::star, corrmine::Statistic::v_exact,
                                      corrmine::Statistic::v_atleast})
            h[corrmine::to_string(s)] = emp.histogram(k, s);
        j[corrmine::to_string(k)] = h;
    }
    return j;
}

void setup_simulate(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "Run seeded trials; emit count histograms");
    auto opts = std::make_shared<SimOpts>();
    auto out = std::make_shared<OutputOpts>();
    opts->add(cmd);
    add_output_opts(cmd, *out);
    cmd->callback([opts, out] {
        const corrmine::TrialConfig cfg = opts->config();
        const double rho = corrmine::resolve_rho(cfg);
        const corrmine::EmpiricalDistribution emp = corrmine::run_trials(cfg);
        json j{{"n", cfg.n},         {"p", cfg.p},   {"delta", cfg.delta},
               {"rho", rho},          {"e", corrmine::resolve_e(cfg)},
               {"trials", emp.trials}, {"seed", cfg.seed}};
        j["histograms"] = histograms_json(emp);
        std::ostringstream csv;
        csv << "kind,statistic,value,count\n";
        const auto kinds = emp.has_partial
            ? std::vector<corrmine::GraphKind>{corrmine::GraphKind::correlation,
                                               corrmine::GraphKind::partial}
            : std::vector<corrmine::GraphKind>{corrmine::GraphKind::correlation};
        for (corrmine::GraphKind k : kinds)
            for (corrmine::Statistic s : {corrmine::Statistic::star, corrmine::Statistic::v_exact,
                                          corrmine::Statistic::v_atleast}) {
                const auto& hist = emp.histogram(k, s);
                for (std::size_t v = 0; v < hist.size(); ++v)
                    if (hist[v] > 0)
                        csv << corrmine::to_string(k) << ',' << corrmine::to_string(s) << ','
                            << v << ',' << hist[v] << '\n';
            }
        emit(*out, j, csv.str());
    });
}

void setup_tv_curve(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "tv-curve", "TV distance between empirical counts and CP laws across a p-grid");
    auto opts = std::make_shared<SimOpts>();
    auto grid_str = std::make_shared<std::string>();
    auto stat_str = std::make_shared<std::string>("n_v_atleast");
    auto alpha_trials = std::make_shared<long>(20000);
    auto out = std::make_shared<OutputOpts>();
    opts->add(cmd, /*with_p=*/false);
    cmd->add_option("--p-grid", *grid_str, "Comma-separated p values, e.g. 50,100,500")
        ->required();
    cmd->add_option("--stat", *stat_str, "Statistic to compare")
        ->check(CLI::IsMember({"n_e", "n_v_exact", "n_v_atleast"}))->capture_default_str();
    cmd->add_option("--alpha-trials", *alpha_trials, "Trials for Monte-Carlo alpha")
        ->capture_default_str()->check(CLI::PositiveNumber);
    add_output_opts(cmd, *out);
    cmd->callback([opts, grid_str, stat_str, alpha_trials, out] {
        const std::vector<int> grid = parse_grid(*grid_str);
        const corrmine::TrialConfig cfg = opts->config();
        const auto rows = corrmine::tv_curve(cfg, grid, parse_stat(*stat_str), *alpha_trials);
        json jrows = json::array();
        std::ostringstream csv;
        csv << "p,kind,rho,e,lambda_finite,lambda_limit,tv_finite,tv_limit,tv_poisson\n";
        for (const auto& r : rows) {
            jrows.push_back(json{{"p", r.p},
                                 {"kind", corrmine::to_string(r.kind)},
                                 {"rho", r.rho},
                                 {"e", r.e},
                                 {"lambda_finite", r.lambda_finite},
                                 {"lambda_limit", r.lambda_limit},
                                 {"tv_finite", r.tv_finite},
                                 {"tv_limit", r.tv_limit},
                                 {"tv_poisson", r.tv_poisson}});
            csv << r.p << ',' << corrmine::to_string(r.kind) << ',' << fmt(r.rho) << ','
                << fmt(r.e) << ',' << fmt(r.lambda_finite) << ',' << fmt(r.lambda_limit) << ','
                << fmt(r.tv_finite) << ',' << fmt(r.tv_limit) << ',' << fmt(r.tv_poisson) << '\n';
        }
        emit(*out, json{{"stat", *stat_str}, {"rows", jrows}}, csv.str());
    });
}

void setup_moments(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "moments", "Empirical count moments vs compound-Poisson predictions");
    auto opts = std::make_shared<SimOpts>();
    auto alpha_trials = std::make_shared<long>(20000);
    auto out = std::make_shared<OutputOpts>();
    opts->add(cmd);
    cmd->add_option("--alpha-trials", *alpha_trials, "Trials for Monte-Carlo alpha")
        ->capture_default_str()->check(CLI::PositiveNumber);
    add_output_opts(cmd, *out);
    cmd->callback([opts, alpha_trials, out] {
        const auto rows = corrmine::moment_report(opts->config(), *alpha_trials);
        json jrows = json::array();
        std::ostringstream csv;
        csv << "kind,statistic,mean_emp,mean_se,second_emp,second_se,mean_pred,second_pred\n";
        for (const auto& r : rows) {
            jrows.push_back(json{{"kind", corrmine::to_string(r.kind)},
                                 {"statistic", corrmine::to_string(r.stat)},
                                 {"mean_emp", r.mean_emp},
                                 {"mean_se", r.mean_se},
                                 {"second_emp", r.second_emp},
                                 {"second_se", r.second_se},
                                 {"mean_pred", r.mean_pred},
                                 {"second_pred", r.second_pred}});
            csv << corrmine::to_string(r.kind) << ',' << corrmine::to_string(r.stat) << ','
                << fmt(r.mean_emp) << ',' << fmt(r.mean_se) << ',' << fmt(r.second_emp) << ','
                << fmt(r.second_se) << ',' << fmt(r.mean_pred) << ',' << fmt(r.second_pred)
                << '\n';
        }
        emit(*out, json{{"rows", jrows}}, csv.str());
    });
}

void setup_fwer(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "fwer", "Empirical P(count > 0) vs the 1 - exp(-lambda) prediction");
    auto opts = std::make_shared<SimOpts>();
    auto alpha_trials = std::make_shared<long>(20000);
    auto out = std::make_shared<OutputOpts>();
    opts->add(cmd);
    cmd->add_option("--alpha-trials", *alpha_trials, "Trials for Monte-Carlo alpha")
        ->capture_default_str()->check(CLI::PositiveNumber);
    add_output_opts(cmd, *out);
    cmd->callback([opts, alpha_trials, out] {
        const auto rows = corrmine::fwer_report(opts->config(), *alpha_trials);
        json jrows = json::array();
        std::ostringstream csv;
        csv << "kind,empirical,se,predicted,lambda\n";
        for (const auto& r : rows) {
            jrows.push_back(json{{"kind", corrmine::to_string(r.kind)},
                                 {"empirical", r.empirical},
                                 {"se", r.se},
                                 {"fwer", r.predicted},
                                 {"lambda", r.lambda}});
            csv << corrmine::to_string(r.kind) << ',' << fmt(r.empirical) << ',' << fmt(r.se)
                << ',' << fmt(r.predicted) << ',' << fmt(r.lambda) << '\n';
        }
        emit(*out, json{{"rows", jrows}}, csv.str());
    });
}

// ----------------------------------------------------------------- sparsity

void setup_sparsity(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "sparsity", "Generate or check sparse dispersion matrices; determinant functionals");
    auto p = std::make_shared<int>(0);
    auto tau = std::make_shared<int>(0);
    auto kappa = std::make_shared<int>(0);
    auto xi = std::make_shared<double>(0.1);
    auto block = std::make_shared<bool>(false);
    auto matrix = std::make_shared<std::string>();
    auto save = std::make_shared<std::string>();
    auto m = std::make_shared<int>(0);
    auto mode_str = std::make_shared<std::string>("exact");
    auto samples = std::make_shared<long>(1000);
    auto seed = std::make_shared<SeedOpt>();
    auto out = std::make_shared<OutputOpts>();
    auto* popt = cmd->add_option("--p", *p, "Dimension (generator)")->check(CLI::Range(1, 1 << 20));
    auto* tauopt = cmd->add_option("--tau", *tau, "Sparsity parameter tau")
        ->check(CLI::PositiveNumber);
    auto* kappaopt = cmd->add_option("--kappa", *kappa, "Sparsity parameter kappa")
        ->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--xi", *xi, "Off-diagonal magnitude")->capture_default_str();
    cmd->add_flag("--block", *block, "Generate the block-sparse family instead");
    auto* mopt = cmd->add_option("--matrix", *matrix, "Check an existing matrix (CSV or .cmx)");
    cmd->add_option("--save-matrix", *save, "Write the matrix to FILE (.cmx selects the binary format)");
    auto* mmopt = cmd->add_option("--m", *m, "Also compute mu_m for this submatrix order")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", *mode_str, "mu_m mode")
        ->check(CLI::IsMember({"exact", "bound", "sampled"}))->capture_default_str();
    cmd->add_option("--samples", *samples, "Random subsets in sampled mode")
        ->capture_default_str()->check(CLI::PositiveNumber);
    seed->add(cmd);
    add_output_opts(cmd, *out);
    mopt->excludes(popt);
    cmd->callback([p, tau, kappa, xi, block, matrix, save, m, mode_str, samples, seed, out,
                   popt, tauopt, kappaopt, mopt, mmopt] {
        corrmine::Matrix M;
        json j;
        if (mopt->count() > 0) {
            M = corrmine::read_matrix_auto(*matrix);
            j["p"] = M.rows();
        } else {
            if (popt->count() == 0)
                throw CLI::ValidationError("sparsity", "either --matrix or --p is required");
            if (tauopt->count() == 0)
                throw CLI::ValidationError("sparsity", "--tau is required with --p");
            if (!*block && kappaopt->count() == 0)
                throw CLI::ValidationError("sparsity", "--kappa is required with --p");
            const corrmine::CovarianceSpec spec = *block
                ? corrmine::make_block_sparse(*p, *tau, *xi)
                : corrmine::make_tau_kappa_sparse(*p, *tau, *kappa, *xi);
            M = spec.matrix;
            j["p"] = *p;
            j["xi"] = *xi;
            j["connected"] = corrmine::tau_kappa_connected(*p, spec.tau, spec.kappa);
        }
        j["row_kappa"] = corrmine::check_row_kappa(M);
        if (tauopt->count() > 0 && kappaopt->count() > 0) {
            j["tau"] = *tau;
            j["kappa"] = *kappa;
            j["tau_kappa_ok"] = corrmine::check_tau_kappa(M, *tau, *kappa);
        }
        j["normalized_det"] = corrmine::normalized_det(M);
        if (mmopt->count() > 0) {
            const corrmine::DetMode mode = *mode_str == "exact" ? corrmine::DetMode::exact
                : *mode_str == "bound" ? corrmine::DetMode::bound : corrmine::DetMode::sampled;
            double mu;
            if (mode == corrmine::DetMode::sampled) {
                seed->require();
                corrmine::CounterRng rng(seed->value, 0);
                mu = corrmine::local_normalized_det(M, *m, mode, &rng, *samples);
            } else {
                mu = corrmine::local_normalized_det(M, *m, mode);
            }
            j["m"] = *m;
            j["mu_m_mode"] = *mode_str;
            j["mu_m"] = mu;
        }
        if (!save->empty()) {
            if (save->size() >= 4 && save->compare(save->size() - 4, 4, ".cmx") == 0)
                corrmine::write_cmx_file(*save, M);
            else
                corrmine::write_csv_matrix_file(*save, M);
        }
        std::ostringstream csv;
        csv << "field,value\n";
        for (const auto& [key, val] : j.items())
            csv << key << ',' << (val.is_number_float() ? fmt(val.get<double>()) : val.dump())
                << '\n';
        emit(*out, j, csv.str());
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlation and partial-correlation screening toolkit"};
    app.require_subcommand(1);
    setup_constants(app);
    setup_threshold(app);
    setup_params(app);
    setup_counts(app);
    setup_simulate(app);
    setup_tv_curve(app);
    setup_moments(app);
    setup_fwer(app);
    setup_sparsity(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
