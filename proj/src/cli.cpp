#include "neqt/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "neqt/config_io.hpp"
#include "neqt/correlators.hpp"
#include "neqt/csv.hpp"
#include "neqt/hartree_fock.hpp"
#include "neqt/leads.hpp"
#include "neqt/oracle.hpp"
#include "neqt/parallel.hpp"
#include "neqt/spectral.hpp"
#include "neqt/transport.hpp"

#ifndef NEQT_VERSION
#define NEQT_VERSION "0.0.0"
#endif

namespace neqt::cli {

SiteArg parse_site(const std::string& text)
{
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty() || v < 0) throw ConfigError("bad site '" + text + "'; use x or lead:x");
        return v;
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) return {-1, to_int(text)};
    return {to_int(text.substr(0, colon)), to_int(text.substr(colon + 1))};
}

namespace {

struct Options {
    std::string config_path;
    std::string out_path;
    double tol = 1e-10;
    int threads = 0;
    std::uint64_t seed = 0;
};

struct Context {
    const Options& opt;
    std::string command;
    std::string parameters;
    std::ostream& out;
    std::ostream& err;
};

Site to_site(const SystemConfig& config, const std::string& text)
{
    const SiteArg s = parse_site(text);
    if (s.lead < 0) {
        if (s.index >= config.n_sites()) throw ConfigError("sample site " + text + " out of range");
        return Site::sample(s.index);
    }
    if (s.lead >= config.n_leads()) throw ConfigError("lead in site " + text + " out of range");
    return Site::on_lead(s.lead, s.index);
}

QuadratureSpec quadrature(const Options& opt)
{
    QuadratureSpec spec;
    spec.abs_tol = opt.tol;
    return spec;
}

std::string timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

Manifest manifest(const Context& ctx, const SystemConfig* config)
{
    Manifest m;
    m.emplace_back("tool", std::string("neqt ") + NEQT_VERSION);
    m.emplace_back("subcommand", ctx.command);
    m.emplace_back("parameters", ctx.parameters);
    if (config) m.emplace_back("config_hash", hex_hash(config_hash(*config)));
    m.emplace_back("density_normalization", density_normalization);
    m.emplace_back("quadrature_tol", format_number(ctx.opt.tol));
    return m;
}

void write_table(const Context& ctx, const Table& table, const Manifest& m, const std::string& suffix = "")
{
    if (ctx.opt.out_path.empty()) {
        ctx.out << render_csv(table, m);
        return;
    }
    std::string path = ctx.opt.out_path;
    if (!suffix.empty()) {
        const auto dot = path.rfind(".csv");
        path = (dot == std::string::npos ? path : path.substr(0, dot)) + suffix + ".csv";
    }
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    emit_csv(table, path, m);
    nlohmann::json doc;
    for (const auto& [k, v] : m) doc[k] = v;
    doc["timestamp"] = timestamp();
    doc["output"] = path;
    std::ofstream js(path + ".manifest.json");
    if (!js) throw std::runtime_error("cannot write " + path + ".manifest.json");
    js << doc.dump(2) << "\n";
}

void write_json(const Context& ctx, const nlohmann::json& doc, const std::string& suffix)
{
    if (ctx.opt.out_path.empty()) {
        ctx.err << doc.dump(2) << "\n";
        return;
    }
    const auto dot = ctx.opt.out_path.rfind(".csv");
    const std::string path = (dot == std::string::npos ? ctx.opt.out_path : ctx.opt.out_path.substr(0, dot)) + suffix;
    std::ofstream js(path);
    if (!js) throw std::runtime_error("cannot write " + path);
    js << doc.dump(2) << "\n";
}

std::string lead_label(int j) { return std::to_string(j + 1); }

int run_check_spectral(const Context& ctx, const SystemConfig& config, int grid)
{
    ScanSpec scan;
    scan.grid_points = grid;
    const auto report = check_spectral_condition(config, scan);
    Table t{{"E", "sigma_min"}, {}};
    for (const auto& v : report.violations) t.rows.push_back({v.E, v.sigma_min});
    auto m = manifest(ctx, &config);
    m.emplace_back("passed", report.passed ? "true" : "false");
    m.emplace_back("scan", format_number(report.E_lo) + " .. " + format_number(report.E_hi));
    m.emplace_back("grid_points", std::to_string(report.grid_points));
    m.emplace_back("singular_tol", format_number(report.singular_tol));
    m.emplace_back("grid_sigma_min", format_number(report.grid_sigma_min));
    write_table(ctx, t, m);
    if (report.passed) return exit_ok;
    for (const auto& v : report.violations)
        ctx.err << "spectral condition fails near E* = " << format_number(v.E) << " (sigma_min "
                << format_number(v.sigma_min) << ")\n";
    return exit_numerical;
}

int run_transmission(const Context& ctx, const SystemConfig& config, double e_min, double e_max, int points)
{
    const auto geo = band_geometry(config);
    if (!(e_min < e_max)) {
        e_min = geo.thresholds.front();
        e_max = geo.thresholds.back();
    }
    if (points < 2) throw ConfigError("--points must be at least 2");
    const int m = config.n_leads();
    Table t;
    t.header.push_back("E");
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
            if (j != k) t.header.push_back("T_" + lead_label(j) + "_" + lead_label(k));
    std::vector<double> energies(points);
    for (int i = 0; i < points; ++i) energies[i] = e_min + (e_max - e_min) * i / (points - 1);
    t.rows.resize(points);
    const Embedding emb(config);
    parallel_for(points, [&](std::size_t i) {
        const RMatrix T = transmission_matrix(emb, energies[i]);
        std::vector<double> row{energies[i]};
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                if (j != k) row.push_back(T(j, k));
        t.rows[i] = std::move(row);
    });
    write_table(ctx, t, manifest(ctx, &config));
    return exit_ok;
}

int run_currents(const Context& ctx, const SystemConfig& config)
{
    const auto obs = lb_currents(config, quadrature(ctx.opt));
    Table t{{"lead", "J", "E", "J_error", "E_error"}, {}};
    for (int j = 0; j < config.n_leads(); ++j)
        t.rows.push_back({double(j + 1), obs.J(j), obs.Eflux(j), obs.J_error(j), obs.Eflux_error(j)});
    auto m = manifest(ctx, &config);
    m.emplace_back("sum_J", format_number(obs.J.sum()));
    double energy_sum = 0.0;
    for (int j = 0; j < config.n_leads(); ++j) energy_sum += obs.Eflux(j) + config.leads[j].bias * obs.J(j);
    m.emplace_back("sum_E_plus_vJ", format_number(energy_sum));
    m.emplace_back("entropy_production", format_number(obs.sigma));
    write_table(ctx, t, m);
    return exit_ok;
}

int run_entropy(const Context& ctx, const SystemConfig& config)
{
    const auto rep = entropy_production(config, quadrature(ctx.opt));
    Table t{{"sigma", "strictly_positive"}, {{rep.sigma, rep.strictly_positive ? 1.0 : 0.0}}};
    write_table(ctx, t, manifest(ctx, &config));
    return exit_ok;
}

int run_onsager(const Context& ctx, const SystemConfig& config, double step)
{
    const auto ons = onsager_matrix(config, step, quadrature(ctx.opt));
    Table t;
    t.header.push_back("lead");
    for (int k = 0; k < config.n_leads(); ++k) t.header.push_back("L_" + lead_label(k));
    for (int j = 0; j < config.n_leads(); ++j) {
        std::vector<double> row{double(j + 1)};
        for (int k = 0; k < config.n_leads(); ++k) row.push_back(ons.L(j, k));
        t.rows.push_back(std::move(row));
    }
    auto m = manifest(ctx, &config);
    m.emplace_back("step", format_number(ons.step));
    m.emplace_back("richardson_change", format_number(ons.richardson_change));
    m.emplace_back("max_asymmetry", format_number((ons.L - ons.L.transpose()).cwiseAbs().maxCoeff()));
    write_table(ctx, t, m);
    return exit_ok;
}

struct GreensArgs {
    std::string kind = "lesser";
    std::string x = "0", y = "0";
    double t_max = 50.0, dt = 0.1;
    bool fourier = false;
    double w_min = 0.0, w_max = 0.0;
    int points = 401;
};

int run_greens(const Context& ctx, const SystemConfig& config, const GreensArgs& g)
{
    const Site x = to_site(config, g.x);
    const Site y = to_site(config, g.y);
    auto m = manifest(ctx, &config);
    if (g.fourier) {
        double lo = g.w_min, hi = g.w_max;
        if (!(lo < hi)) {
            const auto geo = band_geometry(config);
            lo = geo.thresholds.front() - 1.0;
            hi = geo.thresholds.back() + 1.0;
        }
        if (g.points < 2) throw ConfigError("--points must be at least 2");
        std::vector<double> omegas(g.points);
        for (int i = 0; i < g.points; ++i) omegas[i] = lo + (hi - lo) * i / (g.points - 1);
        const auto vals = fourier_lesser(config, omegas, x, y);
        Table t{{"omega", "Re G", "Im G"}, {}};
        for (int i = 0; i < g.points; ++i) t.rows.push_back({omegas[i], vals[i].real(), vals[i].imag()});
        m.emplace_back("kind", "lesser (frequency)");
        write_table(ctx, t, m);
        return exit_ok;
    }
    if (!(g.dt > 0.0) || g.t_max < 0.0) throw ConfigError("need --dt > 0 and --tmax >= 0");
    std::vector<double> times;
    const auto steps = static_cast<long>(std::floor(g.t_max / g.dt + 1e-9));
    for (long i = 0; i <= steps; ++i) times.push_back(i * g.dt);
    const auto series = green_time_series(config, times, x, y, quadrature(ctx.opt));
    Table t;
    m.emplace_back("x", g.x);
    m.emplace_back("y", g.y);
    if (g.kind == "all") {
        t.header = {"t", "Re G<", "Im G<", "Re G>", "Im G>", "Re Gr", "Im Gr", "Re Ga", "Im Ga"};
        for (std::size_t i = 0; i < times.size(); ++i)
            t.rows.push_back({times[i], series.lesser[i].real(), series.lesser[i].imag(), series.greater[i].real(),
                              series.greater[i].imag(), series.retarded[i].real(), series.retarded[i].imag(),
                              series.advanced[i].real(), series.advanced[i].imag()});
    } else {
        GreenKind kind;
        if (g.kind == "lesser") kind = GreenKind::lesser;
        else if (g.kind == "greater") kind = GreenKind::greater;
        else if (g.kind == "retarded") kind = GreenKind::retarded;
        else if (g.kind == "advanced") kind = GreenKind::advanced;
        else throw ConfigError("unknown Green function kind '" + g.kind + "'");
        const auto& vals = series.values(kind);
        t.header = {"t", "Re G", "Im G"};
        for (std::size_t i = 0; i < times.size(); ++i) t.rows.push_back({times[i], vals[i].real(), vals[i].imag()});
        m.emplace_back("kind", g.kind);
    }
    write_table(ctx, t, m);
    return exit_ok;
}

std::string format_row(const CMatrix& a, int row)
{
    std::ostringstream os;
    for (int c = 0; c < a.cols(); ++c) {
        if (c) os << " ";
        os << format_number(a(row, c).real());
        if (a(row, c).imag() != 0.0) os << (a(row, c).imag() < 0 ? "" : "+") << format_number(a(row, c).imag()) << "i";
    }
    return os.str();
}

int run_hartree_fock(const Context& ctx, const SystemConfig& config)
{
    const auto spec = quadrature(ctx.opt);
    const auto pot = build_potential(config, spec);
    const SystemConfig hf = hf_system(config, spec);
    SystemConfig bare = config;
    bare.sample.interaction = 0.0;
    const auto j0 = lb_currents(bare, spec);
    const auto jhf = lb_currents(hf, spec);
    Table t{{"lead", "J_0", "J_HF", "E_0", "E_HF"}, {}};
    for (int j = 0; j < config.n_leads(); ++j)
        t.rows.push_back({double(j + 1), j0.J(j), jhf.J(j), j0.Eflux(j), jhf.Eflux(j)});
    auto m = manifest(ctx, &config);
    m.emplace_back("xi", format_number(config.sample.interaction));
    for (int r = 0; r < pot.v_HF.rows(); ++r) m.emplace_back("v_HF row " + std::to_string(r), format_row(pot.v_HF, r));
    write_table(ctx, t, m);

    Table v{{"x", "y", "Re v_HF", "Im v_HF"}, {}};
    for (int a = 0; a < pot.v_HF.rows(); ++a)
        for (int b = 0; b < pot.v_HF.cols(); ++b) v.rows.push_back({double(a), double(b), pot.v_HF(a, b).real(), pot.v_HF(a, b).imag()});
    if (!ctx.opt.out_path.empty()) write_table(ctx, v, manifest(ctx, &config), ".potential");
    return exit_ok;
}

struct OracleArgs {
    std::string mode = "free";
    int L = 400;
    double t_max = -1.0;
    double dt = 0.5;
    std::string ramp = "linear";
    double ramp_duration = 200.0;
    double ramp_step = 0.5;
    std::string sample_state = "half";
    std::vector<std::string> states{"empty", "half", "full"};
    bool no_recurrence = false;
    bool allow_unconverged = false;
};

nlohmann::json plateau_json(const std::vector<Plateau>& ps)
{
    auto arr = nlohmann::json::array();
    for (const auto& p : ps)
        arr.push_back({{"value", p.value}, {"slope", p.slope}, {"t_lo", p.t_lo}, {"t_hi", p.t_hi},
                       {"samples", p.samples}, {"accepted", p.accepted}});
    return arr;
}

int run_oracle(const Context& ctx, const SystemConfig& config, const OracleArgs& a)
{
    OracleConfig oc;
    oc.lead_length = a.L;
    oc.t_max = a.t_max;
    oc.dt = a.dt;
    oc.ramp_step = a.ramp_step;
    oc.enforce_recurrence = !a.no_recurrence;
    oc.sample_state = parse_sample_state(a.sample_state);
    oc.seed = ctx.opt.seed;
    auto m = manifest(ctx, &config);
    m.emplace_back("mode", a.mode);
    m.emplace_back("lead_length", std::to_string(a.L));

    if (a.mode == "independence") {
        std::vector<CMatrix> states;
        for (const auto& name : a.states) {
            OracleConfig tmp = oc;
            tmp.sample_state = parse_sample_state(name);
            states.push_back(sample_initial_density(config.n_sites(), tmp));
        }
        const auto rep = initial_state_independence(config, oc, states);
        Table t;
        t.header.push_back("state");
        for (int j = 0; j < config.n_leads(); ++j) t.header.push_back("J_" + lead_label(j));
        bool accepted = true;
        for (std::size_t s = 0; s < rep.plateaus.size(); ++s) {
            std::vector<double> row{double(s)};
            for (const auto& p : rep.plateaus[s]) {
                row.push_back(p.value);
                accepted = accepted && p.accepted;
            }
            t.rows.push_back(std::move(row));
        }
        std::string names;
        for (const auto& n : a.states) names += (names.empty() ? "" : " ") + n;
        m.emplace_back("states", names);
        m.emplace_back("spread", format_number(rep.spread));
        write_table(ctx, t, m);
        if (!accepted && !a.allow_unconverged) {
            ctx.err << "plateau rejected: slope above threshold\n";
            return exit_numerical;
        }
        return exit_ok;
    }

    OracleRun run;
    if (a.mode == "free") {
        run = evolve_free(config, oc);
    } else if (a.mode == "interacting") {
        run = evolve_interacting(config, oc);
    } else if (a.mode == "adiabatic") {
        oc.ramp = parse_ramp_profile(a.ramp);
        oc.ramp_duration = a.ramp_duration;
        m.emplace_back("ramp", a.ramp);
        m.emplace_back("ramp_duration", format_number(a.ramp_duration));
        run = evolve_adiabatic(config, oc);
    } else {
        throw ConfigError("unknown oracle mode '" + a.mode + "'");
    }

    Table t;
    t.header.push_back("t");
    const int nl = config.n_leads();
    for (int j = 0; j < nl; ++j) t.header.push_back("J_" + lead_label(j));
    for (int j = 0; j < nl; ++j) t.header.push_back("E_" + lead_label(j));
    for (int x = 0; x < config.n_sites(); ++x) t.header.push_back("n_" + std::to_string(x));
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        std::vector<double> row{run.times[i]};
        for (int j = 0; j < nl; ++j) row.push_back(run.charge(r, j));
        for (int j = 0; j < nl; ++j) row.push_back(run.energy(r, j));
        for (int x = 0; x < config.n_sites(); ++x) row.push_back(run.density(r, x));
        t.rows.push_back(std::move(row));
    }
    m.emplace_back("t_rec", format_number(run.t_rec));
    m.emplace_back("particle_drift", format_number(run.particle_drift));
    write_table(ctx, t, m);

    nlohmann::json summary{{"charge", plateau_json(run.charge_plateaus)},
                           {"energy", plateau_json(run.energy_plateaus)},
                           {"t_rec", run.t_rec},
                           {"ramp_end", run.ramp_end},
                           {"particle_drift", run.particle_drift},
                           {"hermiticity_error", run.hermiticity_error},
                           {"accepted", run.plateaus_accepted()}};
    write_json(ctx, summary, ".plateau.json");
    if (!run.plateaus_accepted() && !a.allow_unconverged) {
        ctx.err << "plateau rejected: slope above threshold\n";
        return exit_numerical;
    }
    return exit_ok;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Steady-state quantum transport through a sample coupled to tight-binding leads", "neqt"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", NEQT_VERSION);

    Options opt;
    app.add_option("--config", opt.config_path, "JSON system description");
    app.add_option("--out", opt.out_path, "CSV output path (stdout when omitted)");
    app.add_option("--tol", opt.tol, "absolute quadrature tolerance")->check(CLI::PositiveNumber);
    app.add_option("--threads", opt.threads, "worker threads (falls back to NEQT_THREADS)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", opt.seed, "seed for randomized sample states");

    auto* spectral = app.add_subcommand("check-spectral", "scan the real axis for bound states and real resonances");
    int grid = 2048;
    spectral->add_option("--grid", grid, "scan grid points")->check(CLI::PositiveNumber);

    auto* transmission_cmd = app.add_subcommand("transmission", "transmission probabilities T_jk(E)");
    double e_min = 0.0, e_max = 0.0;
    int points = 401;
    transmission_cmd->add_option("--emin", e_min);
    transmission_cmd->add_option("--emax", e_max);
    transmission_cmd->add_option("--points", points);

    auto* currents = app.add_subcommand("currents", "steady charge and energy currents");
    auto* entropy = app.add_subcommand("entropy", "entropy production");
    auto* onsager = app.add_subcommand("onsager", "linear response matrix at equilibrium");
    double step = -1.0;
    onsager->add_option("--step", step, "finite-difference step in mu");

    auto* greens = app.add_subcommand("greens", "NESS Green-Keldysh functions");
    GreensArgs g;
    greens->add_option("--kind", g.kind, "lesser, greater, retarded, advanced or all");
    greens->add_option("--x", g.x, "site: x (sample) or lead:x");
    greens->add_option("--y", g.y, "site: x (sample) or lead:x");
    greens->add_option("--tmax", g.t_max);
    greens->add_option("--dt", g.dt);
    greens->add_flag("--fourier", g.fourier, "frequency-domain lesser function");
    greens->add_option("--wmin", g.w_min);
    greens->add_option("--wmax", g.w_max);
    greens->add_option("--points", g.points);

    auto* hf = app.add_subcommand("hartree-fock", "one-shot mean-field potential and corrected currents");

    auto* oracle = app.add_subcommand("oracle", "finite-lead time evolution");
    OracleArgs o;
    oracle->add_option("--mode", o.mode, "free, interacting, adiabatic or independence");
    oracle->add_option("--L", o.L, "sites per lead")->check(CLI::PositiveNumber);
    oracle->add_option("--tmax", o.t_max);
    oracle->add_option("--dt", o.dt);
    oracle->add_option("--ramp", o.ramp, "sudden, linear or smooth");
    oracle->add_option("--ramp-duration", o.ramp_duration);
    oracle->add_option("--ramp-step", o.ramp_step);
    oracle->add_option("--sample-state", o.sample_state, "half, empty, full or random");
    oracle->add_option("--states", o.states, "sample states compared in independence mode");
    oracle->add_flag("--no-recurrence-check", o.no_recurrence, "allow windows past the recurrence time");
    oracle->add_flag("--allow-unconverged", o.allow_unconverged, "exit 0 even when a plateau is rejected");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << NEQT_VERSION << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return exit_usage;
    }

    std::string joined;
    for (const auto& a : args) joined += (joined.empty() ? "" : " ") + a;
    Context ctx{opt, app.get_subcommands().front()->get_name(), joined, out, err};

    try {
        if (opt.threads > 0) set_thread_count(opt.threads);
        if (opt.config_path.empty()) throw ConfigError("--config is required");
        const SystemConfig config = load_config(opt.config_path);
        require_valid(config);
        if (*spectral) return run_check_spectral(ctx, config, grid);
        if (*transmission_cmd) return run_transmission(ctx, config, e_min, e_max, points);
        if (*currents) return run_currents(ctx, config);
        if (*entropy) return run_entropy(ctx, config);
        if (*onsager) return run_onsager(ctx, config, step);
        if (*greens) return run_greens(ctx, config, g);
        if (*hf) return run_hartree_fock(ctx, config);
        if (*oracle) return run_oracle(ctx, config, o);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const DimensionCap& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_usage;
}

int dispatch(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

} // namespace neqt::cli
