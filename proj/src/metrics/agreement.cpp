// SPDX-License-Identifier: Apache-2.0
#include "tactix/metrics/agreement.hpp"

#include <map>
#include <stdexcept>

namespace tactix {

double krippendorff_alpha(const AnnotationMatrix& data) {
    std::map<std::string, std::map<std::string, double>> o;
    int pairable_units = 0;
    for (const auto& unit : data) {
        std::vector<const std::string*> vals;
        for (const auto& v : unit)
            if (v) vals.push_back(&*v);
        if (vals.size() < 2) continue;
        ++pairable_units;
        double w = 1.0 / static_cast<double>(vals.size() - 1);
        for (std::size_t i = 0; i < vals.size(); ++i)
            for (std::size_t j = 0; j < vals.size(); ++j)
                if (i != j) o[*vals[i]][*vals[j]] += w;
    }
    if (pairable_units < 2) throw std::invalid_argument("krippendorff_alpha: need at least two units with two labels");

    std::map<std::string, double> n_c;
    double n = 0.0;
    for (const auto& [c, row] : o)
        for (const auto& [k, v] : row) {
            n_c[c] += v;
            n += v;
        }
    double d_o = 0.0;
    for (const auto& [c, row] : o)
        for (const auto& [k, v] : row)
            if (c != k) d_o += v;
    double e = 0.0;
    for (const auto& [c, nc] : n_c)
        for (const auto& [k, nk] : n_c)
            if (c != k) e += nc * nk;
    if (e == 0.0) return 1.0;
    return 1.0 - (n - 1.0) * d_o / e;
}

}  // namespace tactix
