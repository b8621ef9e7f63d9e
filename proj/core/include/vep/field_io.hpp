#pragma once

#include <map>
#include <string>
#include <vector>

#include "vep/fields.hpp"

namespace vep {

// Self-describing container: ASCII header (grid metadata, key/value metadata,
// array table) terminated by a line "end", followed by the little-endian
// float64 payload of every array in table order. Layout documented in
// docs/field_format.md.
struct FieldArray {
    std::string name;
    std::string kind;  // cell | face | stf
    std::vector<double> values;
};

struct FieldBundle {
    Grid grid;
    std::map<std::string, std::string> meta;
    std::vector<FieldArray> arrays;

    const FieldArray& find(const std::string& name) const;
    void add(const std::string& name, const ScalarField& f);
    void add(const std::string& name, const VectorField& u);
    void add(const std::string& name, const StfField& s);
    ScalarField scalar(const std::string& name) const;
    VectorField vector(const std::string& name) const;
    StfField stf(const std::string& name) const;
};

void write_bundle(const std::string& path, const FieldBundle& b);
FieldBundle read_bundle(const std::string& path);

// Plain-text columns (cell-center coordinates then one value column per scalar)
// for gnuplot.
void write_columns(const std::string& path, const Grid& g, const std::vector<std::string>& names,
                   const std::vector<const ScalarField*>& fields);

}  // namespace vep
