#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "vep/grid.hpp"

namespace vep {

using Mat3 = std::array<std::array<double, 3>, 3>;

// How tangential velocity is continued across a wall by the difference stencils.
// NoSlip reflects (wall value zero); Extrapolate continues linearly (used for
// operator checks on fields that do not vanish at the boundary).
enum class BoundaryTag { NoSlip, Extrapolate };

struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double value = 0.0) : grid(g), v(g.cell_count(), value) {}

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

// MAC velocity: component a lives on faces normal to axis a, boundary faces included.
struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 3> c;
    BoundaryTag tag = BoundaryTag::NoSlip;

    VectorField() = default;
    explicit VectorField(const Grid& g, BoundaryTag t = BoundaryTag::NoSlip);

    // Zero the boundary-normal components.
    void enforce_no_slip();
};

// Symmetric trace-free tensor per cell, stored as coefficients in an orthonormal
// basis of the symmetric trace-free matrices (Frobenius product = Euclidean dot).
// Component-major: value i of cell c at v[i * cells + c].
struct StfField {
    Grid grid;
    int ncomp = 0;
    std::vector<double> v;

    StfField() = default;
    explicit StfField(const Grid& g) : grid(g), ncomp(g.stf_components()), v(ncomp * g.cell_count(), 0.0) {}

    std::size_t cells() const { return grid.cell_count(); }
    double* comp(int i) { return v.data() + i * cells(); }
    const double* comp(int i) const { return v.data() + i * cells(); }
    std::array<double, 5> at(std::size_t cell) const;
    void set(std::size_t cell, const std::array<double, 5>& s);
};

// Antisymmetric tensor per cell; entry (a,b) with a<b for each axis pair.
struct AntisymField {
    Grid grid;
    int npair = 0;
    std::vector<double> v;

    AntisymField() = default;
    explicit AntisymField(const Grid& g) : grid(g), npair(g.pair_count()), v(npair * g.cell_count(), 0.0) {}
    double* pair(int p) { return v.data() + p * grid.cell_count(); }
    const double* pair(int p) const { return v.data() + p * grid.cell_count(); }
};

// Orthonormal basis of symmetric trace-free d x d matrices.
const std::vector<Mat3>& stf_basis(int dim);
Mat3 stf_to_matrix(int dim, const double* coeff);
void matrix_to_stf(int dim, const Mat3& m, double* coeff);
double frob(const Mat3& a, const Mat3& b);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
StfField operator+(const StfField& a, const StfField& b);
StfField operator-(const StfField& a, const StfField& b);
StfField operator*(double s, const StfField& a);

// Flat views across all components, used for update norms and serialization.
std::vector<double> flatten(const VectorField& u);
void unflatten(const std::vector<double>& flat, VectorField& u);

}  // namespace vep
