#include "invcorr/factor.hpp"
#include "invcorr/stats.hpp"

#include <algorithm>

namespace invcorr {

namespace {

void check_shapes(const Matrix& V, const Vector& u1, std::span<const InvestorType> types) {
    if (u1.size() != V.cols()) throw Error(ErrorKind::misaligned, "eigenvector length differs from panel width");
    if (!types.empty() && types.size() != static_cast<std::size_t>(V.cols()))
        throw Error(ErrorKind::misaligned, "type list length differs from panel width");
}

bool selected(FactorSubset subset, InvestorType type) {
    switch (subset) {
        case FactorSubset::all: return true;
        case FactorSubset::individuals: return type == InvestorType::individual;
        case FactorSubset::institutions: return type == InvestorType::institution;
    }
    return false;
}

}  // namespace

FactorSeries project_factor(const Matrix& V, const Vector& u1, std::span<const InvestorType> types,
                            FactorSubset subset, int orientation_sign) {
    check_shapes(V, u1, types);
    if (subset != FactorSubset::all && types.empty())
        throw Error(ErrorKind::invalid_argument, "type subsets need investor types");
    Vector w = Vector::Zero(u1.size());
    bool any = false;
    for (Eigen::Index i = 0; i < u1.size(); ++i) {
        if (subset == FactorSubset::all || selected(subset, types[static_cast<std::size_t>(i)])) {
            w(i) = u1(i);
            any = true;
        }
    }
    if (!any) throw Error(ErrorKind::invalid_argument, "factor subset is empty");
    const Vector g = (V * w) * static_cast<double>(orientation_sign);
    return {std::vector<double>(g.data(), g.data() + g.size()), subset, orientation_sign};
}

int factor_orientation(const Matrix& V, const Vector& u1, std::span<const double> R) {
    const auto g = project_factor(V, u1, {}, FactorSubset::all).G;
    if (g.size() != R.size()) throw Error(ErrorKind::misaligned, "factor and return lengths differ");
    return stats::pearson(g, R) >= 0.0 ? 1 : -1;
}

SlopeFit regress_factor_return(std::span<const double> G, std::span<const double> R) {
    if (G.size() != R.size()) throw Error(ErrorKind::misaligned, "factor and return lengths differ");
    if (stats::is_degenerate(G)) throw Error(ErrorKind::degenerate, "factor series has zero variance");
    const auto line = stats::ols_line(R, G);
    return {line.slope, line.slope_se, line.r2, line.intercept};
}

TypeSlopes type_slopes(const Matrix& V, const Vector& u1, std::span<const InvestorType> types,
                       std::span<const double> R) {
    check_shapes(V, u1, types);
    if (static_cast<std::size_t>(V.rows()) != R.size()) throw Error(ErrorKind::misaligned, "panel and return lengths differ");
    const auto r = stats::standardize(R);
    TypeSlopes out;
    out.orientation_sign = factor_orientation(V, u1, R);
    auto fit = [&](FactorSubset subset) {
        const auto f = project_factor(V, u1, types, subset, out.orientation_sign);
        return regress_factor_return(stats::standardize(f.G), r);
    };
    out.all = fit(FactorSubset::all);
    const bool has_ind = std::find(types.begin(), types.end(), InvestorType::individual) != types.end();
    const bool has_ins = std::find(types.begin(), types.end(), InvestorType::institution) != types.end();
    if (has_ind) out.individuals = fit(FactorSubset::individuals);
    if (has_ins) out.institutions = fit(FactorSubset::institutions);
    return out;
}

}  // namespace invcorr
