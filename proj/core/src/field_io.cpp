#include "vep/field_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vep {

static_assert(std::endian::native == std::endian::little, "payload is written in native little-endian order");

const FieldArray& FieldBundle::find(const std::string& name) const {
    for (const auto& a : arrays)
        if (a.name == name) return a;
    throw std::runtime_error("field bundle has no array '" + name + "'");
}

void FieldBundle::add(const std::string& name, const ScalarField& f) { arrays.push_back({name, "cell", f.v}); }
void FieldBundle::add(const std::string& name, const VectorField& u) { arrays.push_back({name, "face", flatten(u)}); }
void FieldBundle::add(const std::string& name, const StfField& s) { arrays.push_back({name, "stf", s.v}); }

ScalarField FieldBundle::scalar(const std::string& name) const {
    ScalarField f(grid);
    const auto& a = find(name);
    if (a.kind != "cell" || a.values.size() != f.v.size()) throw std::runtime_error("array '" + name + "' is not a cell field");
    f.v = a.values;
    return f;
}

VectorField FieldBundle::vector(const std::string& name) const {
    VectorField u(grid);
    const auto& a = find(name);
    if (a.kind != "face" || a.values.size() != FaceIndexing(grid).total)
        throw std::runtime_error("array '" + name + "' is not a face field");
    unflatten(a.values, u);
    return u;
}

StfField FieldBundle::stf(const std::string& name) const {
    StfField s(grid);
    const auto& a = find(name);
    if (a.kind != "stf" || a.values.size() != s.v.size()) throw std::runtime_error("array '" + name + "' is not a stf field");
    s.v = a.values;
    return s;
}

void write_bundle(const std::string& path, const FieldBundle& b) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    const Grid& g = b.grid;
    char buf[64];
    os << "VEPF 1\n";
    os << "dim " << g.dim << "\n";
    os << "n " << g.n[0] << " " << g.n[1] << " " << g.n[2] << "\n";
    os << "length";
    for (int a = 0; a < 3; ++a) {
        std::snprintf(buf, sizeof buf, " %.17g", g.length[a]);
        os << buf;
    }
    os << "\n";
    for (const auto& [k, v] : b.meta) os << "meta " << k << " " << v << "\n";
    for (const auto& a : b.arrays) os << "array " << a.name << " " << a.kind << " " << a.values.size() << "\n";
    os << "end\n";
    for (const auto& a : b.arrays)
        os.write(reinterpret_cast<const char*>(a.values.data()), static_cast<std::streamsize>(a.values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + path);
}

FieldBundle read_bundle(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    FieldBundle b;
    std::string line;
    std::getline(is, line);
    if (line != "VEPF 1") throw std::runtime_error(path + ": not a VEPF 1 container");
    int dim = 2;
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> len{1, 1, 1};
    std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> table;
    while (std::getline(is, line)) {
        if (line == "end") break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "dim") ls >> dim;
        else if (key == "n") ls >> n[0] >> n[1] >> n[2];
        else if (key == "length") ls >> len[0] >> len[1] >> len[2];
        else if (key == "meta") {
            std::string k, v;
            ls >> k;
            std::getline(ls >> std::ws, v);
            b.meta[k] = v;
        } else if (key == "array") {
            std::string name, kind;
            std::size_t count = 0;
            ls >> name >> kind >> count;
            table.push_back({name, {kind, count}});
        } else {
            throw std::runtime_error(path + ": unknown header key '" + key + "'");
        }
    }
    if (line != "end") throw std::runtime_error(path + ": truncated header");
    b.grid = Grid::make(dim, n, len);
    for (const auto& [name, spec] : table) {
        FieldArray a{name, spec.first, std::vector<double>(spec.second)};
        is.read(reinterpret_cast<char*>(a.values.data()), static_cast<std::streamsize>(spec.second * sizeof(double)));
        if (!is) throw std::runtime_error(path + ": truncated payload for '" + name + "'");
        b.arrays.push_back(std::move(a));
    }
    return b;
}

void write_columns(const std::string& path, const Grid& g, const std::vector<std::string>& names,
                   const std::vector<const ScalarField*>& fields) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "#";
    for (int a = 0; a < g.dim; ++a) os << " x" << a;
    for (const auto& nm : names) os << " " << nm;
    os << "\n";
    const Layout C = cell_layout(g);
    char buf[64];
    for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
        if (g.dim >= 2 && m[0] == 0 && m[1] > 0) os << "\n";
        for (int a = 0; a < g.dim; ++a) {
            std::snprintf(buf, sizeof buf, "%.10g ", node_coord(g, a, m[a], false));
            os << buf;
        }
        for (const auto* f : fields) {
            std::snprintf(buf, sizeof buf, "%.17g ", f->v[c]);
            os << buf;
        }
        os << "\n";
    });
}

}  // namespace vep
