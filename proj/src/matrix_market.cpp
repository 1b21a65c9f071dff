#include "sparsedep/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace sparsedep {

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

Pattern read_matrix_market(std::istream& in, const std::string& name) {
    auto fail = [&](size_t line, const std::string& msg) -> void {
        throw MatrixMarketError(name + ":" + std::to_string(line) + ": " + msg);
    };
    std::string line;
    size_t lineno = 0;
    if (!std::getline(in, line)) fail(1, "empty file");
    ++lineno;
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket") fail(lineno, "missing %%MatrixMarket banner");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") fail(lineno, "unsupported object '" + object + "'");
    if (format != "coordinate") fail(lineno, "only coordinate format is supported");
    if (field != "real" && field != "integer" && field != "pattern" && field != "complex")
        fail(lineno, "unknown field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" && symmetry != "hermitian")
        fail(lineno, "unknown symmetry '" + symmetry + "'");

    // comments, then the size line
    long long rows = -1, cols = -1, entries = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream sz(line);
        if (!(sz >> rows >> cols >> entries)) fail(lineno, "bad size line");
        break;
    }
    if (rows < 0) fail(lineno, "missing size line");
    if (rows != cols) fail(lineno, "matrix is not square");
    if (rows <= 0) fail(lineno, "empty matrix");
    if (rows > kMaxInstanceSize) fail(lineno, "matrix larger than " + std::to_string(kMaxInstanceSize));

    std::vector<std::set<Int>> pattern(static_cast<size_t>(rows));
    long long seen = 0;
    while (seen < entries && std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream e(line);
        long long i, j;
        if (!(e >> i >> j)) fail(lineno, "bad entry");
        if (i < 1 || i > rows || j < 1 || j > cols) fail(lineno, "index out of range");
        pattern[static_cast<size_t>(i - 1)].insert(j - 1);
        if (symmetry != "general") pattern[static_cast<size_t>(j - 1)].insert(i - 1);
        ++seen;
    }
    if (seen < entries) fail(lineno, "expected " + std::to_string(entries) + " entries, found " + std::to_string(seen));
    Pattern p;
    p.n = rows;
    for (const auto& r : pattern) p.rows.emplace_back(r.begin(), r.end());
    return p;
}

Pattern read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MatrixMarketError("cannot open '" + path + "'");
    return read_matrix_market(in, path);
}

std::string resolve_matrix_path(const std::string& path) {
    if (std::filesystem::is_regular_file(path)) return path;
    if (std::filesystem::is_regular_file(path + ".mtx")) return path + ".mtx";
    return path;
}

}  // namespace sparsedep
