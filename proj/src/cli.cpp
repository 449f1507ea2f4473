#include "htc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "htc/dispersion.hpp"
#include "htc/io.hpp"
#include "htc/oracle.hpp"

namespace htc {

const char* to_string(Task t)
{
    switch (t) {
    case Task::dispersion: return "dispersion";
    case Task::spectra: return "spectra";
    case Task::find_critical: return "find-critical";
    case Task::dark_report: return "dark-report";
    case Task::validate: return "validate";
    }
    return "?";
}

Task task_from_string(const std::string& s)
{
    for (Task t : {Task::dispersion, Task::spectra, Task::find_critical, Task::dark_report, Task::validate})
        if (s == to_string(t)) return t;
    throw std::invalid_argument("unknown task '" + s + "'");
}

namespace {

using nlohmann::json;

std::vector<double> read_grid(const json& j, const std::string& field)
{
    try {
        if (j.is_array()) return j.get<std::vector<double>>();
        if (j.is_object()) {
            for (auto it = j.begin(); it != j.end(); ++it)
                if (it.key() != "start" && it.key() != "stop" && it.key() != "count")
                    throw std::invalid_argument("unknown key '" + it.key() + "'");
            const int n = j.at("count").get<int>();
            if (n < 1) throw std::invalid_argument("count must be >= 1");
            return linspace(j.at("start").get<double>(), j.at("stop").get<double>(), n);
        }
    } catch (const std::exception& e) {
        throw std::invalid_argument("config field '" + field + "': " + e.what());
    }
    throw std::invalid_argument("config field '" + field + "': expected an array or {start, stop, count}");
}

void require_increasing(const std::vector<double>& g, const std::string& field)
{
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) throw std::invalid_argument("config field '" + field + "': grid must increase");
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte)
{
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line, col = 1;
        else ++col;
    }
    return {line, col};
}

std::string fmt(double x, double scale = 1.0) { return format_number(x * scale); }

struct Emitter {
    const RunConfig& cfg;
    std::vector<std::string> files;

    std::vector<std::pair<std::string, std::string>> header(const std::string& what) const
    {
        std::vector<std::pair<std::string, std::string>> h{{"program", std::string("htc-cli ") + program_version},
                                                           {"task", to_string(cfg.task)},
                                                           {"content", what},
                                                           {"fingerprint", fingerprint(cfg.params)}};
        if (cfg.omega_v_ev > 0) h.emplace_back("units", "eV, omega_v = " + format_number(cfg.omega_v_ev) + " eV");
        else h.emplace_back("units", "omega_v, rotating frame at omega_c(k)");
        return h;
    }

    void table(const std::string& stem, const Table& t, const std::string& what)
    {
        std::filesystem::path path = cfg.out_dir / stem;
        if (cfg.format == OutputFormat::csv) {
            path += ".csv";
            write_csv(path, t, header(what));
        } else {
            path += ".json";
            json j;
            for (const auto& [k, v] : header(what)) j["header"][k] = v;
            j["rows"] = table_to_json(t);
            write_json(path, j);
        }
        files.push_back(path.filename().string());
    }

    void document(const std::string& name, const json& j)
    {
        write_json(cfg.out_dir / name, j);
        files.push_back(name);
    }
};

double unit_scale(const RunConfig& c) { return c.omega_v_ev > 0 ? c.omega_v_ev / c.params.omega_v : 1.0; }

json run_dispersion(const RunConfig& c, Emitter& out)
{
    if (c.k_grid.empty()) throw std::invalid_argument("task dispersion requires 'k_grid'");
    const DispersionGrid g = sweep_dispersion(c.params, c.k_grid, c.threads);
    const double s = unit_scale(c);
    Table t{{"k_par", "branch_id", "omega_over_omega_v", "photon_weight", "label"}, {}};
    for (const auto& pt : g.points)
        for (int b = 0; b < g.branches(); ++b)
            t.add_row({fmt(pt.k_par), std::to_string(b), fmt(pt.omega(b), s), fmt(pt.photon_weight(b)), g.labels[b]});
    out.table("dispersion", t, "eigenvalues and photon weights per k_par, branches tracked by eigenvector overlap");
    json labelled = json::object();
    for (int b = 0; b < g.branches(); ++b)
        if (!g.labels[b].empty()) labelled[g.labels[b]].push_back(b);
    return {{"branches", g.branches()}, {"k_points", g.points.size()}, {"labelled_branches", labelled}};
}

json run_spectra(const RunConfig& c, Emitter& out)
{
    if (c.omega_grid.empty()) throw std::invalid_argument("task spectra requires 'omega_grid'");
    if (c.omega_p_grid.empty()) throw std::invalid_argument("task spectra requires 'omega_p_grid'");
    const SpectralModel m = build_spectral_model(c.params, c.k_par);
    const RateSet r = transition_rates(m, c.params);
    const double s = unit_scale(c);

    DriveSpec drive{c.omega_p_grid, c.drive_amplitude};
    const SpectrumSeries a = absorption_spectrum(m, r, drive);
    Table ta{{"omega_p", "absorption"}, {}};
    for (std::size_t i = 0; i < a.omega.size(); ++i) ta.add_row({fmt(a.omega[i], s), fmt(a.intensity[i])});
    out.table("absorption", ta, "A(omega_p) = 1 - R - T");

    const SpectrumSeries b = bound_absorption_spectrum(m, r, c.omega_grid);
    Table tb{{"omega", "bound_absorption"}, {}};
    for (std::size_t i = 0; i < b.omega.size(); ++i) tb.add_row({fmt(b.omega[i], s), fmt(b.intensity[i])});
    out.table("bound_absorption", tb, "A_b(omega)");

    const ResolvedPopulation pop = resolve_population(m, c.population, c.params);
    const SpectrumSeries l = lpl_spectrum(m, r, pop, c.omega_grid);
    Table tl{{"omega", "lpl"}, {}};
    for (int v : l.channel_nu) tl.columns.push_back("lpl_nu" + std::to_string(v));
    for (std::size_t i = 0; i < l.omega.size(); ++i) {
        std::vector<std::string> row{fmt(l.omega[i], s), fmt(l.intensity[i])};
        for (const auto& ch : l.channels) row.push_back(fmt(ch[i]));
        tl.add_row(std::move(row));
    }
    out.table("lpl", tl, "leakage photoluminescence, total and per final-state vibrational quanta");

    const int up = find_upper_polariton(m), lp = find_lower_polariton(m);
    json res{{"populated_levels", pop.levels},
             {"population_upper_bound", pop.upper_bound * s},
             {"truncation_warning", r.truncation_warning}};
    if (up >= 0) res["omega_up"] = m.eig.values(up) * s;
    if (lp >= 0) res["omega_lp"] = m.eig.values(lp) * s;
    return res;
}

json run_find_critical(const RunConfig& c, Emitter& out)
{
    const CriticalResult r = find_critical_rabi(c.params);
    const double s = unit_scale(c);
    json res{{"rabi_single", r.rabi_single * s},
             {"rabi_collective", r.rabi_collective * s},
             {"omega_x", r.omega * s},
             {"mu_ground2_relative", r.mu_ground2_relative},
             {"dipole_strength_relative", r.F_relative}};
    if (!c.scan_huang_rhys.empty()) {
        std::vector<int> ns = c.scan_n.empty() ? std::vector<int>{c.params.n_molecules} : c.scan_n;
        Table t{{"n_molecules", "huang_rhys", "rabi_single", "rabi_collective"}, {}};
        for (int n : ns)
            for (double hr : c.scan_huang_rhys) {
                ModelParams q = c.params;
                q.n_molecules = n;
                q.huang_rhys = hr;
                const CriticalResult x = find_critical_rabi(q);
                t.add_row({std::to_string(n), fmt(hr), fmt(x.rabi_single, s), fmt(x.rabi_collective, s)});
            }
        out.table("critical_scan", t, "critical Rabi coupling versus Huang-Rhys factor");
    }
    return res;
}

json run_dark_report(const RunConfig& c, Emitter& out)
{
    const SpectralModel m = build_spectral_model(c.params, c.k_par);
    const RateSet r = transition_rates(m, c.params);
    const DarkStateReport rep = classify_dark(m, r, c.params);
    const double s = unit_scale(c);
    json entries = json::array();
    json counts = {{"bright", 0}, {"X", 0}, {"Y", 0}, {"other-dark", 0}};
    for (const auto& e : rep.entries) {
        counts[to_string(e.cls)] = counts[to_string(e.cls)].get<int>() + 1;
        entries.push_back({{"omega", e.omega * s},
                           {"class", to_string(e.cls)},
                           {"label", e.label},
                           {"mu_ground", e.mu_ground},
                           {"dipole_strength", e.F},
                           {"photon_weight", e.photon_weight},
                           {"degeneracy", e.degeneracy},
                           {"width", r.Gamma(e.index) * s}});
    }
    out.document("dark_states.json", {{"fingerprint", fingerprint(c.params)}, {"counts", counts}, {"states", entries}});
    return {{"counts", counts}};
}

}  // namespace

json run_validation(const RunConfig& c, bool& all_passed)
{
    const json& v = c.validate;
    const double l2_max = v.value("lpl_threshold", 0.05);
    const double pop_max = v.value("population_threshold", 0.01);
    json cases = v.contains("cases") ? v.at("cases") : json::array({json::object()});
    all_passed = true;
    json report = json::array();
    for (const auto& cs : cases) {
        ModelParams p = c.params;
        p.n_molecules = cs.value("n_molecules", 1);
        p.nu_max = cs.value("nu_max", p.n_molecules == 1 ? 4 : 2);
        p.kappa = cs.value("kappa", 0.05);
        p.gamma_e = cs.value("gamma_e", 0.05);
        p.gamma_nr = 0.0;
        p.particle_level = ParticleLevel::full;
        p.ground_nu_total_max = p.n_molecules * p.nu_max;
        const json rabi = cs.value("rabi_collective", json("critical"));
        if (rabi.is_string()) {
            if (rabi.get<std::string>() != "critical")
                throw std::invalid_argument("validate.cases.rabi_collective: expected a number or \"critical\"");
            p.rabi_single = find_critical_rabi(p).rabi_single;
        } else {
            p.rabi_single = rabi.get<double>() / std::sqrt(double(p.n_molecules));
        }
        const std::string dip = cs.value("dipole", std::string("local"));
        if (dip != "local" && dip != "collective")
            throw std::invalid_argument("validate.cases.dipole: expected local or collective");
        const DipoleDissipator dd = dip == "local" ? DipoleDissipator::local : DipoleDissipator::collective;
        const std::vector<double> grid =
            cs.contains("omega_grid") ? read_grid(cs.at("omega_grid"), "validate.cases.omega_grid") : linspace(-4, 3, 701);

        const SpectralModel m = build_spectral_model(p);
        const RateSet r = transition_rates(m, p);
        const SpectrumSeries nqj = lpl_spectrum(m, r, resolve_population(m, PopulationModel{}, p), grid);
        const LindbladSpec spec = make_lindblad_spec(p, 0.0, dd);
        const Eigen::MatrixXcd rho = uniform_polariton_state(spec, p);
        const double residual = nqj_residual(spec, rho);
        const SpectrumSeries orc = regression_spectrum(spec, SparseOp(spec.a.adjoint()), spec.a, rho, grid);
        const double l2 = compare_spectra(orc, nqj);

        PropagateOptions po;
        const Trajectory tr = lindblad_propagate(spec, rho, linspace(0.0, 20.0, 21), po);
        double trace_err = 0.0, min_eig = 0.0;
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            trace_err = std::max(trace_err, std::abs(tr.trace[i] - 1.0));
            min_eig = std::min(min_eig, tr.min_eigenvalue[i]);
        }

        const int lp = find_lower_polariton(m);
        const double wp = m.eig.values(lp), amp = cs.value("drive_amplitude", 1e-3);
        const double closed = weak_drive_population(m, r, wp, amp)(lp);
        const DrivenPopulation dp = driven_steady_population(spec, p, wp, amp);
        Eigen::Index k = 0;
        (dp.omega.array() - wp).abs().minCoeff(&k);
        const double rel = dp.population(k) / closed - 1.0;

        const bool ok = l2 < l2_max && std::abs(rel) < pop_max && residual == 0.0;
        all_passed = all_passed && ok;
        report.push_back({{"n_molecules", p.n_molecules},
                          {"rabi_collective", p.collective_rabi()},
                          {"nu_max", p.nu_max},
                          {"kappa", p.kappa},
                          {"gamma_e", p.gamma_e},
                          {"dipole", dip},
                          {"dimension", spec.dimension()},
                          {"nqj_residual", residual},
                          {"lpl_relative_l2", l2},
                          {"lpl_threshold", l2_max},
                          {"trace_error", trace_err},
                          {"min_eigenvalue", min_eig},
                          {"drive",
                           {{"omega_p", wp},
                            {"amplitude", amp},
                            {"closed_form", closed},
                            {"oracle", dp.population(k)},
                            {"relative_error", rel},
                            {"threshold", pop_max}}},
                          {"pass", ok}});
    }
    return report;
}

RunConfig parse_config(const std::string& text, Task task)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        throw std::invalid_argument("config parse error at line " + std::to_string(line) + ", column " +
                                    std::to_string(col) + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    RunConfig c;
    c.task = task;
    static const std::vector<std::string> known{"params",   "k_grid",        "omega_grid",  "omega_p_grid",
                                                "drive_amplitude", "k_par",  "population",  "critical_scan",
                                                "validate", "omega_v_ev",    "task"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("config: unknown field '" + it.key() + "'");
    if (j.contains("task") && task_from_string(j.at("task").get<std::string>()) != task)
        throw std::invalid_argument("config field 'task': '" + j.at("task").get<std::string>() +
                                    "' does not match the subcommand '" + to_string(task) + "'");
    try {
        c.params = params_from_json(j.value("params", json::object()));
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config field 'params': ") + e.what());
    }
    auto number = [&](const char* key, double& out) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number()) throw std::invalid_argument(std::string("config field '") + key + "': expected a number");
        out = j.at(key).get<double>();
    };
    if (j.contains("k_grid")) c.k_grid = read_grid(j.at("k_grid"), "k_grid");
    if (j.contains("omega_grid")) c.omega_grid = read_grid(j.at("omega_grid"), "omega_grid");
    if (j.contains("omega_p_grid")) c.omega_p_grid = read_grid(j.at("omega_p_grid"), "omega_p_grid");
    require_increasing(c.k_grid, "k_grid");
    require_increasing(c.omega_grid, "omega_grid");
    require_increasing(c.omega_p_grid, "omega_p_grid");
    number("drive_amplitude", c.drive_amplitude);
    number("k_par", c.k_par);
    number("omega_v_ev", c.omega_v_ev);
    if (c.k_par < 0) throw std::invalid_argument("config field 'k_par': must be >= 0");
    if (j.contains("population")) {
        const json& pj = j.at("population");
        const std::string mode = pj.value("mode", std::string("uniform_window"));
        if (mode == "uniform_window") c.population.mode = PopulationMode::uniform_window;
        else if (mode == "ground_only") c.population.mode = PopulationMode::ground_only;
        else throw std::invalid_argument("config field 'population.mode': expected uniform_window or ground_only");
        c.population.window_above_up = pj.value("window_above_up", 0.5);
    }
    if (j.contains("critical_scan")) {
        const json& s = j.at("critical_scan");
        try {
            if (s.contains("n_molecules")) c.scan_n = s.at("n_molecules").get<std::vector<int>>();
            if (s.contains("huang_rhys")) c.scan_huang_rhys = read_grid(s.at("huang_rhys"), "critical_scan.huang_rhys");
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("config field 'critical_scan': ") + e.what());
        }
    }
    if (j.contains("validate")) c.validate = j.at("validate");
    return c;
}

RunConfig load_config(const std::filesystem::path& path, Task task)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), task);
}

int run(const RunConfig& c, std::ostream& log)
{
    std::filesystem::create_directories(c.out_dir);
    Emitter out{c, {}};
    json results;
    int status = 0;
    switch (c.task) {
    case Task::dispersion: results = run_dispersion(c, out); break;
    case Task::spectra: results = run_spectra(c, out); break;
    case Task::find_critical: results = run_find_critical(c, out); break;
    case Task::dark_report: results = run_dark_report(c, out); break;
    case Task::validate: {
        bool ok = true;
        const json rep = run_validation(c, ok);
        out.document("validation.json", {{"pass", ok}, {"cases", rep}});
        results = {{"pass", ok}};
        status = ok ? 0 : 1;
        break;
    }
    }
    json manifest{{"program", "htc-cli"},
                  {"version", program_version},
                  {"task", to_string(c.task)},
                  {"fingerprint", fingerprint(c.params)},
                  {"params", to_json(c.params)},
                  {"units", c.omega_v_ev > 0 ? "eV" : "omega_v"},
                  {"outputs", out.files},
                  {"results", results}};
    write_json(c.out_dir / "manifest.json", manifest);
    log << to_string(c.task) << ": wrote " << out.files.size() + 1 << " file(s) to " << c.out_dir.string() << '\n';
    return status;
}

int cli_main(int argc, char** argv)
{
    CLI::App app{"Holstein-Tavis-Cummings polariton spectra"};
    app.require_subcommand(1);
    std::string config, out_dir = ".", format = "csv";
    int threads = 0;
    double omega_v_ev = 0.0;
    std::vector<CLI::App*> subs;
    for (Task t : {Task::dispersion, Task::spectra, Task::find_critical, Task::dark_report, Task::validate}) {
        CLI::App* s = app.add_subcommand(to_string(t));
        s->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
        s->add_option("--out", out_dir, "output directory");
        s->add_option("--threads", threads, "worker threads (default: HTC_THREADS or 1)")->check(CLI::PositiveNumber);
        s->add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--omega-v-ev", omega_v_ev, "report frequencies in eV for this omega_v")->check(CLI::PositiveNumber);
        subs.push_back(s);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    Task task = Task::find_critical;
    for (auto* s : subs)
        if (s->parsed()) task = task_from_string(s->get_name());

    RunConfig c;
    try {
        c = config.empty() ? parse_config("{}", task) : load_config(config, task);
    } catch (const std::exception& e) {
        std::cerr << "htc-cli: " << e.what() << '\n';
        return 2;
    }
    c.out_dir = out_dir;
    c.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    if (omega_v_ev > 0) c.omega_v_ev = omega_v_ev;
    c.threads = 1;
    if (const char* env = std::getenv("HTC_THREADS")) c.threads = std::max(1, std::atoi(env));
    if (threads > 0) c.threads = threads;
    try {
        return run(c, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "htc-cli: " << e.what() << '\n';
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "htc-cli: basis too large: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "htc-cli: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace htc
