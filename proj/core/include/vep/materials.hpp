#pragma once

#include <array>
#include <stdexcept>

#include "vep/errors.hpp"

namespace vep {

// Affine in phi between the pure-phase values (phase 1 at phi=-1), clamped to
// the bounds spanned by them.
struct PhaseCoefficient {
    double phase1 = 1.0;
    double phase2 = 1.0;

    double operator()(double phi) const;
    double lower() const { return phase1 < phase2 ? phase1 : phase2; }
    double upper() const { return phase1 < phase2 ? phase2 : phase1; }
    double lipschitz() const { return 0.5 * (phase2 > phase1 ? phase2 - phase1 : phase1 - phase2); }
};

struct PlasticParams {
    double a1 = 1.0, a2 = 1.0;
    double b1 = 0.1, b2 = 0.1;
    double sigma1 = 1.0, sigma2 = 1.0;
};

struct MaterialParams {
    double rho1 = 1.0, rho2 = 1.0;
    PhaseCoefficient nu{1.0, 1.0};
    PhaseCoefficient eta{1.0, 1.0};
    double lambda = 2.0;
    double kappa = 2.0;
    double epsilon = 1.0;
    double gamma = 0.0;
    PlasticParams plastic;

    // Throws std::invalid_argument naming the violated bound.
    void validate() const;
};

double density_of_phi(const MaterialParams& p, double phi);

// Singular potential W(phi) = ((1+phi)ln(1+phi) + (1-phi)ln(1-phi))/2 - lambda phi^2/2.
double w_eval(double phi, double lambda);
double w_prime(double phi, double lambda);
double w_second(double phi, double lambda);
// Convexified W_kappa = W + kappa phi^2/2.
double w_kappa_eval(double phi, double lambda, double kappa);
double w_kappa_prime(double phi, double lambda, double kappa);
double w_kappa_second(double phi, double lambda, double kappa);

// Blend G(phi) = (1-phi)/2 clamped to [0,1]; G=1 is pure phase 1.
double blend_G(double phi);

struct PlasticEffective {
    double a = 0.0, b = 0.0, sigma = 0.0;
};
PlasticEffective plastic_effective(const PlasticParams& p, double phi);

// Relative slack on the yield ball used when testing membership of rounded values.
inline constexpr double kYieldSlack = 1e-12;

using StfValue = std::array<double, 5>;

double stf_norm(const StfValue& s, int ncomp);
double plastic_eval(const PlasticParams& p, double phi, const StfValue& S, int ncomp);
StfValue plastic_prox(const PlasticParams& p, double phi, const StfValue& Z, int ncomp, double h);
StfValue plastic_subgradient_residual(const StfValue& S_new, const StfValue& Z, int ncomp, double h);

}  // namespace vep
