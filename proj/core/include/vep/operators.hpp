#pragma once

#include <Eigen/SparseCore>

#include "vep/fields.hpp"

namespace vep {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SymGrad {
    StfField dev;
    ScalarField trace;
};

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
ScalarField laplacian_neumann(const ScalarField& f);
SymGrad sym_grad(const VectorField& u);
AntisymField skw_grad(const VectorField& u);
VectorField tensor_divergence(const StfField& T);
ScalarField advect_scalar(const VectorField& u, const ScalarField& f);
StfField advect_tensor(const VectorField& u, const StfField& T);
StfField jaumann_commutator(const StfField& T, const AntisymField& W);
StfField laplacian_neumann(const StfField& T);

// Adjoint of f -> advect_scalar(u, f) with respect to u: the face field F with
// <mu, advect_scalar(u, phi)> = <F, u> for every u.
VectorField advect_adjoint_velocity(const ScalarField& mu, const ScalarField& phi);

// Discrete curl of an edge potential (EdgeIndexing layout; in 2D a stream
// function on grid nodes). Boundary edge values are ignored, so the result is
// no-slip and divergence-free to round-off.
VectorField curl_edge_potential(const Grid& g, std::vector<double> A);

// Cell-to-face and face-to-cell averages.
VectorField face_average(const ScalarField& f);
std::array<ScalarField, 3> center_average(const VectorField& u);

double inner_l2(const ScalarField& a, const ScalarField& b);
double inner_l2(const VectorField& a, const VectorField& b);
double inner_l2(const StfField& a, const StfField& b);
double norm_l2(const ScalarField& a);
double norm_l2(const VectorField& a);
double norm_l2(const StfField& a);
double norm_linf(const ScalarField& a);
double norm_linf(const VectorField& a);
// Max pointwise Frobenius norm.
double norm_linf(const StfField& a);
// Face quadrature weight (cell volume, halved per boundary-normal position).
double face_weight(const Grid& g, int axis, const std::array<int, 3>& m);

// Gradient-energy quadratic form sum_{interior faces} |df|^2 vol, i.e. -<lap f, f>.
double gradient_energy(const ScalarField& f);
double gradient_energy(const StfField& T);
double gradient_inner(const ScalarField& f, const ScalarField& q);

// Matrices in the global index spaces of stencil.hpp.
SpMat gradient_matrix(const Grid& g);
SpMat divergence_matrix(const Grid& g);
SpMat laplacian_matrix(const Grid& g);
SpMat strain_matrix(const Grid& g, BoundaryTag tag = BoundaryTag::NoSlip);
// Rows: STF coefficient i of cell c at i*N + c (deviatoric symmetric gradient).
SpMat stf_symgrad_matrix(const Grid& g, BoundaryTag tag = BoundaryTag::NoSlip);
SpMat skw_matrix(const Grid& g, BoundaryTag tag = BoundaryTag::NoSlip);
SpMat advect_matrix(const VectorField& u);
SpMat skew_convection_matrix(const VectorField& mflux);

}  // namespace vep
