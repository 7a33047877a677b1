// model.hpp: microscopic and effective couplings of the two-species dimer,
// regime classification and the twin-species critical coupling.

#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace cvdimer {

/// Microscopic couplings. Energies in units of J_a unless stated otherwise.
struct ModelParams {
    double J_a{1.0};
    double J_b{1.0};
    double U_a{0.0};
    double U_b{0.0};
    double W{0.0};
    int N_a{1};
    int N_b{1};

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    /// Equal J, U and N for both species.
    bool is_twin() const noexcept;

    /// Twin parameters with N/2 bosons per species (N even).
    static ModelParams twin(int N, double U, double W, double J = 1.0);
};

/// Couplings rescaled by the boson numbers:
/// u_k = N_k^2 U_k, tau_k = J_k N_k, w = W N_a N_b, gamma = (U_a N_a + U_b N_b)/2, eps_k = 1/N_k.
struct EffectiveParams {
    double u_a{0.0};
    double u_b{0.0};
    double tau_a{1.0};
    double tau_b{1.0};
    double w{0.0};
    double gamma{0.0};
    double eps_a{1.0};
    double eps_b{1.0};
};

enum class InteractionSign { repulsive, attractive };
enum class Strength { weak, strong, critical };

struct Regime {
    InteractionSign sign{InteractionSign::repulsive};
    Strength strength{Strength::weak};

    bool operator==(const Regime&) const = default;
};

std::string to_string(const Regime& r);

inline constexpr double kSymmetryRelTol = 1e-12;
inline constexpr double kCriticalRelTol = 1e-9;

EffectiveParams effective_params(const ModelParams& p);

bool is_symmetric_case(const EffectiveParams& e) noexcept;

/// W_c = 4J/N + U for twin species (N = N_a + N_b). Throws for non-twin input.
double critical_coupling(const ModelParams& p);

/// Requires the symmetric case; throws std::invalid_argument otherwise.
Regime classify_regime(const EffectiveParams& e);

/// Reads "J_a","J_b","U_a","U_b","W","N_a","N_b"; J_b/U_b default to J_a/U_a,
/// N_b defaults to N_a.
ModelParams params_from_json(const nlohmann::json& j);

}  // namespace cvdimer
