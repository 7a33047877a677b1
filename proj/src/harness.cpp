#include "cvdimer/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "cvdimer/format.hpp"

namespace cvdimer {

std::vector<double> SweepSpec::values() const {
    if (count < 1) throw std::invalid_argument("sweep count must be >= 1");
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1));
    return v;
}

SweepSpec parse_sweep(const std::string& s) {
    std::stringstream ss(s);
    std::string a;
    std::string b;
    std::string c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
        throw std::invalid_argument("sweep must be start:stop:count, got '" + s + "'");
    SweepSpec spec;
    try {
        spec.start = std::stod(a);
        spec.stop = std::stod(b);
        spec.count = std::stoi(c);
    } catch (const std::exception&) {
        throw std::invalid_argument("sweep must be start:stop:count, got '" + s + "'");
    }
    if (spec.count < 1) throw std::invalid_argument("sweep count must be >= 1");
    return spec;
}

void RunConfig::validate() const {
    params.validate();
    if (levels < 1) throw std::invalid_argument("levels must be >= 1");
    if (n_max < 0 || m_max < 0) throw std::invalid_argument("n_max/m_max must be >= 0");
    if (sweep && sweep->count < 1) throw std::invalid_argument("sweep count must be >= 1");
    if (sweep && sweep->parameter != "W") throw std::invalid_argument("only W sweeps are supported");
    if (format != "csv" && format != "json") throw std::invalid_argument("format must be csv or json");
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.params = params_from_json(j);
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        if (s.is_string()) {
            cfg.sweep = parse_sweep(s.get<std::string>());
        } else {
            SweepSpec spec;
            spec.parameter = s.value("parameter", std::string("W"));
            spec.start = s.at("start").get<double>();
            spec.stop = s.at("stop").get<double>();
            spec.count = s.at("count").get<int>();
            cfg.sweep = spec;
        }
    }
    cfg.levels = j.value("levels", cfg.levels);
    cfg.n_max = j.value("n_max", cfg.n_max);
    cfg.m_max = j.value("m_max", cfg.m_max);
    if (j.contains("solver")) cfg.solver.kind = solver_kind_from_string(j.at("solver").get<std::string>());
    cfg.out = j.value("out", cfg.out);
    cfg.format = j.value("format", cfg.format);
    return cfg;
}

SweepRecord sweep_point(const RunConfig& cfg, double W) {
    SweepRecord rec;
    rec.W = W;
    try {
        ModelParams p = cfg.params;
        p.W = W;
        const FockBasis basis = build_basis(p.N_a, p.N_b);
        const std::size_t k = std::min(cfg.levels, basis.dim());
        SolverOptions so = cfg.solver;
        so.vectors = false;
        const Spectrum s = lowest_eigenpairs(build_hamiltonian(p, basis, so.dense_threshold), k, so);
        rec.exact_rel = relative_levels(s);
        rec.gap = rec.exact_rel.size() > 2 ? rec.exact_rel[2] : rec.exact_rel.back();

        const EffectiveParams e = effective_params(p);
        if (!is_symmetric_case(e)) {
            rec.regime = "asymmetric";
            return rec;
        }
        const Regime r = classify_regime(e);
        rec.regime = to_string(r);
        if (r.strength != Strength::critical) {
            const int cap = std::max({cfg.n_max, cfg.m_max, static_cast<int>(k)});
            rec.cv_rel = expanded_relative_levels(cv_levels(e, cap, cap), k);
        }
    } catch (const std::exception& ex) {
        rec.error = ex.what();
    }
    return rec;
}

std::vector<SweepRecord> sweep_coupling(const RunConfig& cfg) {
    cfg.validate();
    const std::vector<double> Ws = cfg.sweep ? cfg.sweep->values() : std::vector<double>{cfg.params.W};
    std::vector<SweepRecord> out(Ws.size());
    unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(Ws.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < Ws.size(); i = next++) out[i] = sweep_point(cfg, Ws[i]);
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }
    return out;
}

CollapseEstimate locate_collapse(const std::vector<SweepRecord>& records) {
    CollapseEstimate c;
    for (const auto& r : records)
        if (r.error.empty()) c.curve.emplace_back(r.W, r.gap);
    if (c.curve.size() < 3) throw std::invalid_argument("locate_collapse: need at least three valid records");
    std::sort(c.curve.begin(), c.curve.end());
    const auto it = std::min_element(c.curve.begin(), c.curve.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
    const auto i = static_cast<std::size_t>(it - c.curve.begin());
    c.W = it->first;
    if (i == 0 || i + 1 == c.curve.size()) {
        c.at_boundary = true;
        return c;
    }
    const auto [x0, y0] = c.curve[i - 1];
    const auto [x1, y1] = c.curve[i];
    const auto [x2, y2] = c.curve[i + 1];
    // vertex of the interpolating parabola
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if (den != 0.0) {
        const double v = x1 - 0.5 * num / den;
        if (v >= x0 && v <= x2) c.W = v;
    }
    return c;
}

ComparisonReport compare_spectra(const std::vector<double>& exact_rel, const std::vector<double>& cv_rel,
                                 std::size_t count) {
    if (exact_rel.size() < count || cv_rel.size() < count)
        throw std::invalid_argument("compare_spectra: sequences shorter than count");
    ComparisonReport r;
    for (std::size_t l = 0; l < count; ++l) {
        const double d = std::abs(cv_rel[l] - exact_rel[l]);
        r.abs_dev.push_back(d);
        const double rel = exact_rel[l] != 0.0 ? d / std::abs(exact_rel[l]) : (d == 0.0 ? 0.0 : d);
        r.rel_dev.push_back(rel);
        r.max_abs = std::max(r.max_abs, d);
        if (l > 0) r.max_rel = std::max(r.max_rel, rel);
    }
    r.mean_abs = count ? std::accumulate(r.abs_dev.begin(), r.abs_dev.end(), 0.0) / count : 0.0;
    return r;
}

double density_overlap(const AmplitudeGrid& a, const AmplitudeGrid& b) {
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
        throw std::invalid_argument("density_overlap: grid shapes differ");
    const double bc = (a.values.cwiseMax(0.0).cwiseProduct(b.values.cwiseMax(0.0))).cwiseSqrt().sum();
    return std::clamp(bc, 0.0, 1.0);
}

double fit_power_law_exponent(const std::vector<double>& N, const std::vector<double>& dev) {
    if (N.size() != dev.size() || N.size() < 2) throw std::invalid_argument("fit_power_law_exponent: need >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(N.size());
    for (std::size_t i = 0; i < N.size(); ++i) {
        if (!(N[i] > 0.0) || !(dev[i] > 0.0)) throw std::domain_error("fit_power_law_exponent: non-positive data");
        const double x = std::log(N[i]);
        const double y = std::log(dev[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

PointComparison compare_point(const ModelParams& p, std::size_t count, const SolverOptions& solver) {
    const FockBasis basis = build_basis(p.N_a, p.N_b);
    SolverOptions so = solver;
    so.vectors = false;
    const Spectrum s = lowest_eigenpairs(build_hamiltonian(p, basis, so.dense_threshold), count, so);
    PointComparison pc;
    pc.exact_rel = relative_levels(s);
    const EffectiveParams e = effective_params(p);
    const int cap = static_cast<int>(count);
    pc.cv_rel = expanded_relative_levels(cv_levels(e, cap, cap), count);
    pc.report = compare_spectra(pc.exact_rel, pc.cv_rel, count);
    return pc;
}

std::pair<int, int> cv_label_at_rank(const std::vector<CVLevel>& levels, std::size_t rank) {
    std::size_t pos = 0;
    for (const auto& l : levels) {
        const auto next = pos + static_cast<std::size_t>(l.degeneracy);
        if (rank < next) return {l.n, l.m};
        pos = next;
    }
    throw std::out_of_range("cv_label_at_rank: rank beyond the computed levels");
}

std::vector<std::pair<int, int>> find_peaks(const AmplitudeGrid& g, double frac) {
    std::vector<std::pair<int, int>> out;
    const auto& v = g.values;
    const double cut = frac * v.maxCoeff();
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            const double c = v(i, j);
            if (c < cut || c <= 0.0) continue;
            bool peak = true;
            for (int di = -1; di <= 1 && peak; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const Eigen::Index a = i + di;
                    const Eigen::Index b = j + dj;
                    if (a < 0 || b < 0 || a >= v.rows() || b >= v.cols()) continue;
                    if (v(a, b) > c) {
                        peak = false;
                        break;
                    }
                }
            if (peak) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    return out;
}

bool peaks_match(const std::vector<std::pair<int, int>>& a, const std::vector<std::pair<int, int>>& b, int tol) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& [ai, aj] : a) {
        int best = -1;
        int best_d = tol + 1;
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (used[k]) continue;
            const int d = std::max(std::abs(ai - b[k].first), std::abs(aj - b[k].second));
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(k);
            }
        }
        if (best < 0) return false;
        used[static_cast<std::size_t>(best)] = true;
    }
    return true;
}

double round15(double v) { return std::stod(fmt15(v)); }

void write_levels_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
    os << "W,index,exact_rel,cv_rel,regime\n";
    for (const auto& r : records) {
        if (!r.error.empty()) {
            os << fmt15(r.W) << ",,,,error: " << r.error << '\n';
            continue;
        }
        for (std::size_t l = 0; l < r.exact_rel.size(); ++l) {
            os << fmt15(r.W) << ',' << l << ',' << fmt15(r.exact_rel[l]) << ',';
            if (l < r.cv_rel.size()) os << fmt15(r.cv_rel[l]);
            os << ',' << r.regime << '\n';
        }
    }
}

nlohmann::json levels_json(const std::vector<SweepRecord>& records) {
    auto arr = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json j;
        j["W"] = round15(r.W);
        if (!r.error.empty()) {
            j["error"] = r.error;
        } else {
            auto ex = nlohmann::json::array();
            for (double v : r.exact_rel) ex.push_back(round15(v));
            auto cv = nlohmann::json::array();
            for (double v : r.cv_rel) cv.push_back(round15(v));
            j["exact_rel"] = ex;
            j["cv_rel"] = cv;
            j["gap"] = round15(r.gap);
            j["regime"] = r.regime;
        }
        arr.push_back(j);
    }
    return arr;
}

void write_cv_levels_csv(std::ostream& os, const std::vector<CVLevel>& levels) {
    os << "n,m,energy,degeneracy,regime\n";
    for (const auto& l : levels)
        os << l.n << ',' << l.m << ',' << fmt15(l.energy) << ',' << l.degeneracy << ',' << to_string(l.regime) << '\n';
}

nlohmann::json collapse_json(const CollapseEstimate& c) {
    nlohmann::json j;
    j["estimate"] = round15(c.W);
    j["at_boundary"] = c.at_boundary;
    auto curve = nlohmann::json::array();
    for (const auto& [w, g] : c.curve) curve.push_back({{"W", round15(w)}, {"gap", round15(g)}});
    j["gap_curve"] = curve;
    return j;
}

nlohmann::json report_json(const ComparisonReport& r) {
    nlohmann::json j;
    auto ad = nlohmann::json::array();
    for (double v : r.abs_dev) ad.push_back(round15(v));
    auto rd = nlohmann::json::array();
    for (double v : r.rel_dev) rd.push_back(round15(v));
    j["abs_dev"] = ad;
    j["rel_dev"] = rd;
    j["max_abs"] = round15(r.max_abs);
    j["mean_abs"] = round15(r.mean_abs);
    j["max_rel"] = round15(r.max_rel);
    auto ov = nlohmann::json::object();
    for (const auto& [name, v] : r.overlaps) ov[name] = round15(v);
    j["overlaps"] = ov;
    if (r.fit_exponent) j["fit_exponent"] = round15(*r.fit_exponent);
    return j;
}

}  // namespace cvdimer
