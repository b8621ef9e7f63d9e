#include "vep/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vep {

double PhaseCoefficient::operator()(double phi) const {
    const double v = 0.5 * (1.0 - phi) * phase1 + 0.5 * (1.0 + phi) * phase2;
    return std::clamp(v, lower(), upper());
}

void MaterialParams::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("coefficient bounds violated: " + m); };
    if (!(rho1 > 0.0) || !(rho2 > 0.0)) fail("densities rho1, rho2 must be > 0");
    if (!(nu.lower() > 0.0)) fail("viscosity lower bound nu1 must be > 0");
    if (!(eta.lower() >= 0.0)) fail("elastic modulus lower bound eta1 must be >= 0");
    if (!(lambda >= 0.0)) fail("lambda must be >= 0");
    if (!(kappa > 0.0)) fail("kappa must be > 0");
    if (kappa < lambda - 1.0) fail("kappa must satisfy W'' + kappa >= 0, i.e. kappa >= lambda - 1");
    if (!(epsilon > 0.0)) fail("epsilon must be > 0");
    if (!(gamma >= 0.0)) fail("gamma must be >= 0");
    const auto& q = plastic;
    if (!(q.a1 > 0.0 && q.a2 > 0.0)) fail("plastic a1, a2 must be > 0");
    if (!(q.b1 > 0.0 && q.b2 > 0.0)) fail("plastic b1, b2 must be > 0");
    if (!(q.sigma1 > 0.0 && q.sigma2 > 0.0)) fail("yield radii sigma1, sigma2 must be > 0");
}

double density_of_phi(const MaterialParams& p, double phi) {
    return 0.5 * (p.rho1 + p.rho2) + 0.5 * (p.rho2 - p.rho1) * phi;
}

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void require_open(double phi, const char* what) {
    if (!(std::abs(phi) < 1.0))
        throw DomainError(std::string(what) + ": phase field outside (-1,1), phi=" + std::to_string(phi));
}

}  // namespace

double w_eval(double phi, double lambda) {
    if (std::abs(phi) > 1.0) return std::numeric_limits<double>::infinity();
    return 0.5 * (xlogx(1.0 + phi) + xlogx(1.0 - phi)) - 0.5 * lambda * phi * phi;
}

double w_prime(double phi, double lambda) {
    require_open(phi, "w_prime");
    return std::atanh(phi) - lambda * phi;
}

double w_second(double phi, double lambda) {
    require_open(phi, "w_second");
    return 1.0 / ((1.0 - phi) * (1.0 + phi)) - lambda;
}

double w_kappa_eval(double phi, double lambda, double kappa) { return w_eval(phi, lambda) + 0.5 * kappa * phi * phi; }
double w_kappa_prime(double phi, double lambda, double kappa) { return w_prime(phi, lambda) + kappa * phi; }
double w_kappa_second(double phi, double lambda, double kappa) { return w_second(phi, lambda) + kappa; }

double blend_G(double phi) { return std::clamp(0.5 * (1.0 - phi), 0.0, 1.0); }

PlasticEffective plastic_effective(const PlasticParams& p, double phi) {
    const double G = blend_G(phi);
    PlasticEffective e;
    e.a = G * p.a1 + (1.0 - G) * p.a2;
    e.b = G * p.b1 + (1.0 - G) * p.b2;
    if (G == 1.0) e.sigma = p.sigma1;
    else if (G == 0.0) e.sigma = p.sigma2;
    else e.sigma = std::min(p.sigma1, p.sigma2);
    return e;
}

double stf_norm(const StfValue& s, int ncomp) {
    double q = 0.0;
    for (int i = 0; i < ncomp; ++i) q += s[i] * s[i];
    return std::sqrt(q);
}

double plastic_eval(const PlasticParams& p, double phi, const StfValue& S, int ncomp) {
    const auto e = plastic_effective(p, phi);
    const double r = stf_norm(S, ncomp);
    if (r > e.sigma * (1.0 + kYieldSlack)) return std::numeric_limits<double>::infinity();
    return 0.5 * e.a * r * r + e.b * r;
}

StfValue plastic_prox(const PlasticParams& p, double phi, const StfValue& Z, int ncomp, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("plastic_prox: h must be > 0");
    const auto e = plastic_effective(p, phi);
    const double r = stf_norm(Z, ncomp);
    StfValue S{};
    if (r <= h * e.b) return S;
    const double t = std::clamp((r - h * e.b) / (1.0 + h * e.a), 0.0, e.sigma);
    for (int i = 0; i < ncomp; ++i) S[i] = t * Z[i] / r;
    return S;
}

StfValue plastic_subgradient_residual(const StfValue& S_new, const StfValue& Z, int ncomp, double h) {
    StfValue xi{};
    for (int i = 0; i < ncomp; ++i) xi[i] = (Z[i] - S_new[i]) / h;
    return xi;
}

}  // namespace vep
