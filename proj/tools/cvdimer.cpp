// cvdimer: exact vs continuous-variable spectra of the two-species boson dimer.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "cvdimer/cv.hpp"
#include "cvdimer/exact.hpp"
#include "cvdimer/format.hpp"
#include "cvdimer/harness.hpp"
#include "cvdimer/semiclassical.hpp"

namespace fs = std::filesystem;
using namespace cvdimer;

namespace {

struct Flags {
    std::string config;
    std::optional<double> W, U, J;
    std::optional<int> Na, Nb;
    std::optional<std::size_t> levels;
    std::optional<std::string> sweep, out, format, solver;
};

RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    bool nb_given = false;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw std::runtime_error("cannot open config " + f.config);
        const auto j = nlohmann::json::parse(in);
        cfg = config_from_json(j);
        nb_given = j.contains("N_b");
    }
    auto& p = cfg.params;
    if (f.J) p.J_a = p.J_b = *f.J;
    if (f.U) p.U_a = p.U_b = *f.U;
    if (f.W) p.W = *f.W;
    if (f.Na) p.N_a = *f.Na;
    if (f.Nb) p.N_b = *f.Nb;
    else if (f.Na && !nb_given) p.N_b = *f.Na;
    if (f.levels) cfg.levels = *f.levels;
    if (f.sweep) cfg.sweep = parse_sweep(*f.sweep);
    if (f.out) cfg.out = *f.out;
    if (f.format) cfg.format = *f.format;
    if (f.solver) cfg.solver.kind = solver_kind_from_string(*f.solver);
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out);
    const fs::path path = fs::path(cfg.out) / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    std::cout << path.string() << '\n';
    return os;
}

nlohmann::json params_json(const ModelParams& p) {
    return {{"J_a", round15(p.J_a)}, {"J_b", round15(p.J_b)}, {"U_a", round15(p.U_a)}, {"U_b", round15(p.U_b)},
            {"W", round15(p.W)},     {"N_a", p.N_a},          {"N_b", p.N_b}};
}

void write_levels(const RunConfig& cfg, const std::vector<SweepRecord>& recs) {
    if (cfg.format == "json") {
        nlohmann::json j{{"params", params_json(cfg.params)}, {"points", levels_json(recs)}};
        open_out(cfg, "levels.json") << j.dump(2) << '\n';
    } else {
        auto os = open_out(cfg, "levels.csv");
        write_levels_csv(os, recs);
    }
}

int cmd_spectrum(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto basis = build_basis(p.N_a, p.N_b);
    const auto k = std::min(cfg.levels, basis.dim());
    SolverOptions so = cfg.solver;
    so.vectors = false;
    const auto s = lowest_eigenpairs(build_hamiltonian(p, basis, so.dense_threshold), k, so);
    {
        auto os = open_out(cfg, "spectrum.csv");
        os << "index,energy,relative\n";
        for (std::size_t l = 0; l < s.count(); ++l)
            os << l << ',' << fmt15(s.eigenvalues[l]) << ',' << fmt15(s.eigenvalues[l] - s.eigenvalues[0]) << '\n';
    }
    write_levels(cfg, {sweep_point(cfg, p.W)});
    const auto e = effective_params(p);
    if (is_symmetric_case(e) && classify_regime(e).strength != Strength::critical) {
        auto os = open_out(cfg, "cv_levels.csv");
        write_cv_levels_csv(os, cv_levels(e, cfg.n_max, cfg.m_max));
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    const auto recs = sweep_coupling(cfg);
    write_levels(cfg, recs);
    int failed = 0;
    for (const auto& r : recs) failed += !r.error.empty();
    if (failed) std::cerr << failed << " sweep point(s) failed, see the error rows\n";
    return failed ? 2 : 0;
}

int cmd_collapse(RunConfig cfg) {
    if (!cfg.sweep) {
        // default window: 0 .. 2 W_c in 81 steps, on the side of the sign of W
        const double wc = critical_coupling(cfg.params);
        const double sgn = cfg.params.W < 0.0 ? -1.0 : 1.0;
        cfg.sweep = SweepSpec{"W", 0.0, sgn * 2.0 * wc, 81};
    }
    cfg.levels = std::max<std::size_t>(cfg.levels, 3);
    const auto recs = sweep_coupling(cfg);
    auto c = locate_collapse(recs);
    auto j = collapse_json(c);
    j["params"] = params_json(cfg.params);
    if (cfg.params.is_twin()) j["critical_coupling_cv"] = round15(critical_coupling(cfg.params));
    open_out(cfg, "collapse.json") << j.dump(2) << '\n';
    if (c.at_boundary) std::cerr << "gap minimum sits at the sweep boundary; widen the window\n";
    return 0;
}

void write_grid(const RunConfig& cfg, const std::string& label, const AmplitudeGrid& g, nlohmann::json meta) {
    {
        auto os = open_out(cfg, "grid_" + label + ".csv");
        write_grid_csv(os, g);
    }
    meta["params"] = params_json(cfg.params);
    meta["rows"] = "n_L = 0..N_a";
    meta["columns"] = "m_L = 0..N_b";
    meta["width_underflow"] = g.width_underflow;
    open_out(cfg, "grid_" + label + ".json") << meta.dump(2) << '\n';
}

int cmd_state(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto basis = build_basis(p.N_a, p.N_b);
    const auto k = std::min(cfg.levels, basis.dim());
    const auto s = lowest_eigenpairs(build_hamiltonian(p, basis, cfg.solver.dense_threshold), k, cfg.solver);
    const auto e = effective_params(p);
    const bool cv_ok = is_symmetric_case(e) && classify_regime(e).strength != Strength::critical;
    const auto levels = cv_ok ? cv_levels(e, static_cast<int>(k), static_cast<int>(k)) : std::vector<CVLevel>{};
    nlohmann::json states = nlohmann::json::array();
    for (std::size_t l = 0; l < k; ++l) {
        const auto ex = cluster_grid(s, l, basis);
        write_grid(cfg, "exact_" + std::to_string(l), ex,
                   {{"source", "exact"}, {"level", l}, {"energy", round15(s.eigenvalues[l])}});
        nlohmann::json sj{{"level", l}, {"energy", round15(s.eigenvalues[l])}};
        if (cv_ok) {
            const auto [n, m] = cv_label_at_rank(levels, l);
            const auto cv = eigenfunction_density(e, cv_eigenstate(e, n, m, 1), basis);
            const std::string label = "cv_" + std::to_string(n) + "_" + std::to_string(m);
            write_grid(cfg, label, cv, {{"source", "cv"}, {"n", n}, {"m", m}, {"parity", 1}});
            const double ov = density_overlap(ex, cv);
            sj["cv"] = {{"n", n}, {"m", m}, {"overlap", round15(ov)}, {"width_underflow", cv.width_underflow}};
            if (cv.width_underflow) std::cerr << "warning: CV width below lattice spacing for " << label << '\n';
        }
        states.push_back(sj);
    }
    nlohmann::json j{{"params", params_json(p)}, {"states", states}};
    open_out(cfg, "grids.json") << j.dump(2) << '\n';
    return 0;
}

struct DynFlags {
    double x{0.1}, y{0.0}, tx{0.0}, ty{0.0};
    double t_end{100.0}, dt{1e-3};
    int stride{100};
};

int cmd_dynamics(const RunConfig& cfg, const DynFlags& d) {
    const auto e = effective_params(cfg.params);
    const auto tr = integrate(e, {d.x, d.y, d.tx, d.ty}, d.t_end, d.dt, d.stride);
    auto os = open_out(cfg, "trajectory.csv");
    write_trajectory_csv(os, tr);
    std::cerr << "max relative energy drift " << fmt15(tr.max_relative_drift) << (tr.hit_boundary ? " (stopped at |x|=1)" : "")
              << '\n';
    return 0;
}

struct CompareFlags {
    std::vector<int> sizes;
    std::string family{"fixed-effective"};
};

// Parameters at total size N. "fixed-effective" keeps u = N^2 U/4 and w = N^2 W/4 of the
// reference point; "fixed-mean-field" keeps N U and N W.
ModelParams scaled(const ModelParams& ref, int N, const std::string& family) {
    const double N0 = ref.N_a + ref.N_b;
    const double r = N0 / N;
    const double f = family == "fixed-effective" ? r * r : r;
    if (family != "fixed-effective" && family != "fixed-mean-field")
        throw std::invalid_argument("unknown scaling family " + family);
    return ModelParams::twin(N, ref.U_a * f, ref.W * f, ref.J_a);
}

int cmd_compare(const RunConfig& cfg, const CompareFlags& c) {
    const auto pc = compare_point(cfg.params, cfg.levels, cfg.solver);
    ComparisonReport rep = pc.report;
    {
        // ground-state density overlap (degenerate exact doublets summed)
        const auto& p = cfg.params;
        const auto basis = build_basis(p.N_a, p.N_b);
        const auto s = lowest_eigenpairs(build_hamiltonian(p, basis, cfg.solver.dense_threshold),
                                         std::min<std::size_t>(2, basis.dim()), cfg.solver);
        const auto e = effective_params(p);
        const auto cv = eigenfunction_density(e, cv_eigenstate(e, 0, 0, 1), basis);
        rep.overlaps.emplace_back("ground", density_overlap(cluster_grid(s, 0, basis), cv));
    }
    nlohmann::json scaling = nlohmann::json::array();
    if (!c.sizes.empty()) {
        std::vector<double> Ns, devs;
        for (int N : c.sizes) {
            const auto q = compare_point(scaled(cfg.params, N, c.family), 6, cfg.solver);
            double dev = 0.0;
            for (std::size_t l = 1; l < 6; ++l) dev = std::max(dev, q.report.abs_dev[l]);
            Ns.push_back(N);
            devs.push_back(dev);
            scaling.push_back({{"N", N}, {"max_abs_dev", round15(dev)}});
        }
        if (Ns.size() >= 2) rep.fit_exponent = fit_power_law_exponent(Ns, devs);
    }
    auto j = report_json(rep);
    j["params"] = params_json(cfg.params);
    j["exact_rel"] = nlohmann::json::array();
    j["cv_rel"] = nlohmann::json::array();
    for (double v : pc.exact_rel) j["exact_rel"].push_back(round15(v));
    for (double v : pc.cv_rel) j["cv_rel"].push_back(round15(v));
    if (!scaling.empty()) {
        j["scaling"] = scaling;
        j["scaling_family"] = c.family;
    }
    open_out(cfg, "report.json") << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and continuous-variable spectra of the two-species Bose-Hubbard dimer"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config, "JSON config; flags override its values")->check(CLI::ExistingFile);
    app.add_option("--W", f.W, "interspecies coupling W/J");
    app.add_option("--U", f.U, "intraspecies coupling U/J (both species)");
    app.add_option("--J", f.J, "hopping (both species)");
    app.add_option("--Na", f.Na, "bosons of species a");
    app.add_option("--Nb", f.Nb, "bosons of species b (defaults to Na)");
    app.add_option("--levels", f.levels, "number of low-lying levels");
    app.add_option("--sweep", f.sweep, "W sweep start:stop:count");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--format", f.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--solver", f.solver, "dense|lanczos|auto")->check(CLI::IsMember({"dense", "lanczos", "auto"}));

    auto* spectrum = app.add_subcommand("spectrum", "exact and CV levels at one point");
    auto* sweep = app.add_subcommand("sweep", "relative levels over a W range");
    auto* state = app.add_subcommand("state", "exact and CV probability grids");
    auto* collapse = app.add_subcommand("collapse", "locate the spectral collapse");
    auto* dynamics = app.add_subcommand("dynamics", "semiclassical trajectory");
    auto* compare = app.add_subcommand("compare", "exact vs CV deviation report");

    DynFlags d;
    dynamics->add_option("--x", d.x, "initial imbalance x");
    dynamics->add_option("--y", d.y, "initial imbalance y");
    dynamics->add_option("--theta-x", d.tx, "initial phase theta_x");
    dynamics->add_option("--theta-y", d.ty, "initial phase theta_y");
    dynamics->add_option("--t-end", d.t_end, "integration time");
    dynamics->add_option("--dt", d.dt, "RK4 step");
    dynamics->add_option("--stride", d.stride, "steps between samples");

    CompareFlags c;
    compare->add_option("--sizes", c.sizes, "total sizes N for the scaling fit")->delimiter(',');
    compare->add_option("--family", c.family, "fixed-effective|fixed-mean-field")
        ->check(CLI::IsMember({"fixed-effective", "fixed-mean-field"}));

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = resolve(f);
        if (*spectrum) return cmd_spectrum(cfg);
        if (*sweep) {
            if (!cfg.sweep) throw std::invalid_argument("sweep needs --sweep start:stop:count or a config sweep");
            return cmd_sweep(cfg);
        }
        if (*state) return cmd_state(cfg);
        if (*collapse) return cmd_collapse(cfg);
        if (*dynamics) return cmd_dynamics(cfg, d);
        if (*compare) return cmd_compare(cfg, c);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
