#include "vep/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vep {

VectorField::VectorField(const Grid& g, BoundaryTag t) : grid(g), tag(t) {
    for (int a = 0; a < g.dim; ++a) c[a].assign(face_layout(g, a).size, 0.0);
}

void VectorField::enforce_no_slip() {
    for (int a = 0; a < grid.dim; ++a) {
        const Layout L = face_layout(grid, a);
        for_each_index(L, [&](const std::array<int, 3>& m, std::size_t i) {
            if (m[a] == 0 || m[a] == grid.n[a]) c[a][i] = 0.0;
        });
    }
}

std::array<double, 5> StfField::at(std::size_t cell) const {
    std::array<double, 5> s{};
    for (int i = 0; i < ncomp; ++i) s[i] = v[i * cells() + cell];
    return s;
}

void StfField::set(std::size_t cell, const std::array<double, 5>& s) {
    for (int i = 0; i < ncomp; ++i) v[i * cells() + cell] = s[i];
}

namespace {

std::vector<Mat3> build_basis(int dim) {
    const double r2 = 1.0 / std::sqrt(2.0);
    std::vector<Mat3> b;
    Mat3 e{};
    e = Mat3{};
    e[0][0] = r2;
    e[1][1] = -r2;
    b.push_back(e);
    if (dim == 3) {
        const double r6 = 1.0 / std::sqrt(6.0);
        e = Mat3{};
        e[0][0] = r6;
        e[1][1] = r6;
        e[2][2] = -2.0 * r6;
        b.push_back(e);
    }
    for (int p = 0; p < (dim == 2 ? 1 : 3); ++p) {
        e = Mat3{};
        e[kPairs[p][0]][kPairs[p][1]] = r2;
        e[kPairs[p][1]][kPairs[p][0]] = r2;
        b.push_back(e);
    }
    return b;
}

}  // namespace

const std::vector<Mat3>& stf_basis(int dim) {
    static const std::vector<Mat3> b2 = build_basis(2);
    static const std::vector<Mat3> b3 = build_basis(3);
    if (dim == 2) return b2;
    if (dim == 3) return b3;
    throw std::invalid_argument("stf_basis: dim must be 2 or 3");
}

Mat3 stf_to_matrix(int dim, const double* coeff) {
    const auto& B = stf_basis(dim);
    Mat3 m{};
    for (std::size_t i = 0; i < B.size(); ++i)
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) m[r][s] += coeff[i] * B[i][r][s];
    return m;
}

void matrix_to_stf(int dim, const Mat3& m, double* coeff) {
    const auto& B = stf_basis(dim);
    for (std::size_t i = 0; i < B.size(); ++i) coeff[i] = frob(m, B[i]);
}

double frob(const Mat3& a, const Mat3& b) {
    double s = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s += a[r][c] * b[r][c];
    return s;
}

namespace {

template <class F>
std::vector<double> zip(const std::vector<double>& a, const std::vector<double>& b, F f) {
    if (a.size() != b.size()) throw std::invalid_argument("field size mismatch");
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = f(a[i], b[i]);
    return r;
}

std::vector<double> scaled(double s, const std::vector<double>& a) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

const auto plus = [](double x, double y) { return x + y; };
const auto minus = [](double x, double y) { return x - y; };

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    ScalarField r(a.grid);
    r.v = zip(a.v, b.v, plus);
    return r;
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    ScalarField r(a.grid);
    r.v = zip(a.v, b.v, minus);
    return r;
}
ScalarField operator*(double s, const ScalarField& a) {
    ScalarField r(a.grid);
    r.v = scaled(s, a.v);
    return r;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    VectorField r(a.grid, a.tag);
    for (int k = 0; k < a.grid.dim; ++k) r.c[k] = zip(a.c[k], b.c[k], plus);
    return r;
}
VectorField operator-(const VectorField& a, const VectorField& b) {
    VectorField r(a.grid, a.tag);
    for (int k = 0; k < a.grid.dim; ++k) r.c[k] = zip(a.c[k], b.c[k], minus);
    return r;
}
VectorField operator*(double s, const VectorField& a) {
    VectorField r(a.grid, a.tag);
    for (int k = 0; k < a.grid.dim; ++k) r.c[k] = scaled(s, a.c[k]);
    return r;
}

StfField operator+(const StfField& a, const StfField& b) {
    StfField r(a.grid);
    r.v = zip(a.v, b.v, plus);
    return r;
}
StfField operator-(const StfField& a, const StfField& b) {
    StfField r(a.grid);
    r.v = zip(a.v, b.v, minus);
    return r;
}
StfField operator*(double s, const StfField& a) {
    StfField r(a.grid);
    r.v = scaled(s, a.v);
    return r;
}

std::vector<double> flatten(const VectorField& u) {
    std::vector<double> out;
    for (int a = 0; a < u.grid.dim; ++a) out.insert(out.end(), u.c[a].begin(), u.c[a].end());
    return out;
}

void unflatten(const std::vector<double>& flat, VectorField& u) {
    std::size_t off = 0;
    for (int a = 0; a < u.grid.dim; ++a) {
        if (off + u.c[a].size() > flat.size()) throw std::invalid_argument("unflatten: size mismatch");
        std::copy(flat.begin() + off, flat.begin() + off + u.c[a].size(), u.c[a].begin());
        off += u.c[a].size();
    }
}

}  // namespace vep
