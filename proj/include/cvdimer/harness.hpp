// harness.hpp: parameter sweeps, exact-vs-CV comparisons and collapse location.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cvdimer/cv.hpp"
#include "cvdimer/exact.hpp"
#include "cvdimer/model.hpp"

namespace cvdimer {

struct SweepSpec {
    std::string parameter{"W"};
    double start{0.0};
    double stop{0.0};
    int count{1};

    std::vector<double> values() const;
};

/// Parses "start:stop:count".
SweepSpec parse_sweep(const std::string& s);

struct RunConfig {
    ModelParams params;
    std::optional<SweepSpec> sweep;
    std::size_t levels{15};
    int n_max{8};
    int m_max{8};
    std::string out{"."};
    std::string format{"csv"};
    SolverOptions solver;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads{0};

    void validate() const;
};

/// Model keys plus "sweep", "levels", "n_max", "m_max", "solver", "out", "format".
RunConfig config_from_json(const nlohmann::json& j);

struct SweepRecord {
    double W{0.0};
    std::vector<double> exact_rel;
    std::vector<double> cv_rel;  // empty at criticality
    /// E_2 - E_0: the gap above the lowest pair of levels. It tends to 2 omega_p on the
    /// weak side and to the doublet spacing omega_m on the strong side, so it is the
    /// exact-spectrum counterpart of the collapsing CV ladder.
    double gap{0.0};
    std::string regime;
    std::string error;  // non-empty when the point failed
};

/// One record per sweep value, in sweep order. Points run concurrently.
std::vector<SweepRecord> sweep_coupling(const RunConfig& cfg);

/// Single point of a sweep, at the parameters of cfg with W replaced.
SweepRecord sweep_point(const RunConfig& cfg, double W);

struct CollapseEstimate {
    double W{0.0};
    bool at_boundary{false};
    std::vector<std::pair<double, double>> curve;  // (W, gap)
};

/// W minimizing the gap, refined by a parabola through the three points around the
/// discrete minimum. Records carrying an error are skipped.
CollapseEstimate locate_collapse(const std::vector<SweepRecord>& records);

struct ComparisonReport {
    std::vector<double> abs_dev;
    std::vector<double> rel_dev;
    double max_abs{0.0};
    double mean_abs{0.0};
    double max_rel{0.0};
    std::vector<std::pair<std::string, double>> overlaps;
    std::optional<double> fit_exponent;
};

/// Deviations between relative levels matched by sorted position (index 0 is skipped
/// in the relative deviation since both sides are 0 there).
ComparisonReport compare_spectra(const std::vector<double>& exact_rel, const std::vector<double>& cv_rel,
                                 std::size_t count);

/// Bhattacharyya coefficient sum sqrt(a_ij b_ij), clamped to [0, 1].
double density_overlap(const AmplitudeGrid& a, const AmplitudeGrid& b);

/// Exponent s of dev ~ N^-s by least squares in log-log.
double fit_power_law_exponent(const std::vector<double>& N, const std::vector<double>& dev);

/// Relative exact and CV levels at one parameter point plus their comparison.
struct PointComparison {
    std::vector<double> exact_rel;
    std::vector<double> cv_rel;
    ComparisonReport report;
};

PointComparison compare_point(const ModelParams& p, std::size_t count, const SolverOptions& solver = {});

/// (n, m) of the CV level sitting at `rank` of the doublet-expanded sorted spectrum.
std::pair<int, int> cv_label_at_rank(const std::vector<CVLevel>& levels, std::size_t rank);

/// Local maxima over the 8-neighbourhood with value >= frac * max, row-major order.
std::vector<std::pair<int, int>> find_peaks(const AmplitudeGrid& g, double frac = 0.1);

/// Same peak count and a one-to-one matching within `tol` lattice sites (Chebyshev).
bool peaks_match(const std::vector<std::pair<int, int>>& a, const std::vector<std::pair<int, int>>& b, int tol);

void write_levels_csv(std::ostream& os, const std::vector<SweepRecord>& records);
nlohmann::json levels_json(const std::vector<SweepRecord>& records);
void write_cv_levels_csv(std::ostream& os, const std::vector<CVLevel>& levels);
nlohmann::json collapse_json(const CollapseEstimate& c);
nlohmann::json report_json(const ComparisonReport& r);

/// Value rounded to 15 significant digits for JSON output.
double round15(double v);

}  // namespace cvdimer
