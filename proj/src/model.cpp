#include "cvdimer/model.hpp"

#include <cmath>
#include <string>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cvdimer {

namespace {

bool rel_equal(double a, double b, double rel) noexcept {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * scale;
}

}  // namespace

void ModelParams::validate() const {
    if (N_a < 1 || N_b < 1) throw std::invalid_argument("boson numbers must be >= 1");
    if (!(J_a > 0.0) || !(J_b > 0.0)) throw std::invalid_argument("hopping amplitudes must be positive");
    if (U_a < 0.0 || U_b < 0.0) throw std::invalid_argument("intraspecies interactions must be non-negative");
    if (!std::isfinite(W) || !std::isfinite(U_a) || !std::isfinite(U_b))
        throw std::invalid_argument("couplings must be finite");
}

bool ModelParams::is_twin() const noexcept {
    return J_a == J_b && U_a == U_b && N_a == N_b;
}

ModelParams ModelParams::twin(int N, double U, double W, double J) {
    if (N % 2 != 0) throw std::invalid_argument("twin species need an even total boson number");
    ModelParams p;
    p.J_a = p.J_b = J;
    p.U_a = p.U_b = U;
    p.W = W;
    p.N_a = p.N_b = N / 2;
    return p;
}

std::string to_string(const Regime& r) {
    std::string s = r.sign == InteractionSign::repulsive ? "repulsive" : "attractive";
    switch (r.strength) {
        case Strength::weak: return s + "-weak";
        case Strength::strong: return s + "-strong";
        case Strength::critical: return s + "-critical";
    }
    return s;
}

EffectiveParams effective_params(const ModelParams& p) {
    p.validate();
    const double Na = p.N_a;
    const double Nb = p.N_b;
    EffectiveParams e;
    e.u_a = Na * Na * p.U_a;
    e.u_b = Nb * Nb * p.U_b;
    e.tau_a = p.J_a * Na;
    e.tau_b = p.J_b * Nb;
    e.w = p.W * Na * Nb;
    e.gamma = 0.5 * (p.U_a * Na + p.U_b * Nb);
    e.eps_a = 1.0 / Na;
    e.eps_b = 1.0 / Nb;
    return e;
}

bool is_symmetric_case(const EffectiveParams& e) noexcept {
    return rel_equal(e.u_a, e.u_b, kSymmetryRelTol) && rel_equal(e.tau_a, e.tau_b, kSymmetryRelTol);
}

double critical_coupling(const ModelParams& p) {
    p.validate();
    if (!p.is_twin()) throw std::invalid_argument("critical_coupling: closed form holds for twin species only");
    const double N = p.N_a + p.N_b;
    return 4.0 * p.J_a / N + p.U_a;
}

Regime classify_regime(const EffectiveParams& e) {
    if (!is_symmetric_case(e)) throw std::invalid_argument("classify_regime: asymmetric parameters");
    const double bound = e.u_a + 2.0 * e.tau_a;
    Regime r;
    r.sign = e.w < 0.0 ? InteractionSign::attractive : InteractionSign::repulsive;
    const double diff = std::abs(e.w) - bound;
    if (std::abs(diff) <= kCriticalRelTol * bound)
        r.strength = Strength::critical;
    else
        r.strength = diff < 0.0 ? Strength::weak : Strength::strong;
    return r;
}

namespace {

int read_count(const nlohmann::json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw std::invalid_argument(std::string(key) + " must be an integer");
    return v.get<int>();
}

}  // namespace

ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    p.J_a = j.value("J_a", 1.0);
    p.J_b = j.value("J_b", p.J_a);
    p.U_a = j.value("U_a", 0.0);
    p.U_b = j.value("U_b", p.U_a);
    p.W = j.value("W", 0.0);
    p.N_a = read_count(j, "N_a", 1);
    p.N_b = read_count(j, "N_b", p.N_a);
    return p;
}

}  // namespace cvdimer
