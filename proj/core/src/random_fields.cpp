#include "vep/random_fields.hpp"

namespace vep {

namespace {

template <class V>
void fill(V& values, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> U(-amp, amp);
    for (auto& x : values) x = U(rng);
}

}  // namespace

ScalarField random_scalar(const Grid& g, std::mt19937_64& rng, double amp) {
    ScalarField f(g);
    fill(f.v, rng, amp);
    return f;
}

VectorField random_noslip(const Grid& g, std::mt19937_64& rng, double amp) {
    VectorField u(g);
    for (int a = 0; a < g.dim; ++a) fill(u.c[a], rng, amp);
    u.enforce_no_slip();
    return u;
}

VectorField random_divfree(const Grid& g, std::mt19937_64& rng, double amp) {
    std::vector<double> A(EdgeIndexing(g).total);
    fill(A, rng, amp * g.spacing(0));
    return curl_edge_potential(g, A);
}

StfField random_stf(const Grid& g, std::mt19937_64& rng, double amp) {
    StfField s(g);
    fill(s.v, rng, amp);
    return s;
}

AntisymField random_antisym(const Grid& g, std::mt19937_64& rng, double amp) {
    AntisymField w(g);
    fill(w.v, rng, amp);
    return w;
}

}  // namespace vep
