#include "scv/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "scv/errors.hpp"

namespace scv {

const std::vector<double>& CheckReport::histogram_edges() {
    static const std::vector<double> edges = [] {
        std::vector<double> e;
        e.push_back(0.0);
        for (int k = -16; k <= 4; ++k) e.push_back(std::pow(10.0, k));
        e.push_back(std::numeric_limits<double>::infinity());
        return e;
    }();
    return edges;
}

std::size_t CheckReport::histogram_bin(double magnitude) {
    const auto& edges = histogram_edges();
    const double m = std::abs(magnitude);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (m < edges[i + 1]) return i;
    }
    return edges.size() - 2;
}

nlohmann::json CheckReport::to_json(bool include_timing) const {
    nlohmann::json j;
    j["name"] = name;
    j["passed"] = passed;
    j["worst_residual"] = worst_residual;
    j["witness"] = witness.is_null() ? nlohmann::json() : witness;
    j["samples"] = samples;
    j["seed"] = seed;
    j["elapsed_s"] = include_timing ? elapsed_s : 0.0;
    return j;
}

std::string CheckReport::to_csv() const {
    const auto& edges = histogram_edges();
    std::ostringstream out;
    out << "name,bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < residual_histogram.size(); ++i) {
        out << name << ',' << edges[i] << ',' << edges[i + 1] << ','
            << residual_histogram[i] << '\n';
    }
    return out.str();
}

nlohmann::json matrix_to_json(const SquareMatrix& A) {
    nlohmann::json j;
    j["n"] = A.n;
    j["entries"] = A.a;
    return j;
}

SquareMatrix matrix_from_json(const nlohmann::json& j) {
    const int n = j.at("n").get<int>();
    auto entries = j.at("entries").get<std::vector<double>>();
    if (entries.size() != static_cast<std::size_t>(n) * n) {
        throw ParseError("matrix_from_json: entry count does not match dimension");
    }
    return SquareMatrix(n, std::move(entries));
}

}  // namespace scv
