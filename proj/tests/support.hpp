#pragma once

#include "sparsedep/parser.hpp"

#include <string>

#ifndef SPARSEDEP_SOURCE_DIR
#define SPARSEDEP_SOURCE_DIR "."
#endif

namespace sparsedep::testing {

inline std::string source_path(const std::string& rel) { return std::string(SPARSEDEP_SOURCE_DIR) + "/" + rel; }
inline std::string corpus_path(const std::string& file = "") { return source_path("corpus/" + file); }
inline std::string fixture_path(const std::string& file) { return source_path("fixtures/" + file); }

inline const Relation& find_relation(const Problem& p, const std::string& name) {
    for (const auto& r : p.relations)
        if (r.name == name) return r;
    throw std::runtime_error("no relation " + name);
}

}  // namespace sparsedep::testing
