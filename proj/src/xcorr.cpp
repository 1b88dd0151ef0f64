#include "invcorr/xcorr.hpp"
#include "invcorr/report.hpp"
#include "invcorr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace invcorr {

Matrix correlation_of_columns(const Matrix& X) {
    const Eigen::Index T = X.rows();
    const Eigen::Index N = X.cols();
    if (T < 2) throw Error(ErrorKind::insufficient_data, "correlation needs at least two time records");
    Matrix Z(T, N);
    for (Eigen::Index j = 0; j < N; ++j) {
        const auto col = std::span<const double>(X.col(j).data(), static_cast<std::size_t>(T));
        if (stats::is_degenerate(col))
            throw Error(ErrorKind::degenerate, "column " + std::to_string(j) + " has zero variance");
        const double m = stats::mean(col);
        const double s = stats::stddev(col);
        Z.col(j) = (X.col(j).array() - m) / s;
    }
    Matrix C = (Z.transpose() * Z) / static_cast<double>(T);
    for (Eigen::Index i = 0; i < N; ++i) {
        C(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < N; ++j) {
            const double c = std::clamp(C(i, j), -1.0, 1.0);
            C(i, j) = c;
            C(j, i) = c;
        }
    }
    return C;
}

CorrelationMatrix correlation_matrix(std::span<const InventorySeries> panel) {
    if (panel.size() < 2) throw Error(ErrorKind::insufficient_data, "correlation matrix needs N >= 2 series");
    const std::size_t T = panel.front().size();
    if (T < 3) throw Error(ErrorKind::insufficient_data, "correlation matrix needs T >= 3 records");
    CorrelationMatrix out;
    out.T = T;
    Matrix X(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(panel.size()));
    for (std::size_t j = 0; j < panel.size(); ++j) {
        const auto& s = panel[j];
        if (s.size() != T || s.times != panel.front().times)
            throw Error(ErrorKind::misaligned, "series " + s.investor_id + " is on a different time index");
        if (s.degenerate || stats::is_degenerate(s.v))
            throw Error(ErrorKind::degenerate, "series " + s.investor_id + " is degenerate");
        for (std::size_t t = 0; t < T; ++t) X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = s.v[t];
        out.labels.push_back(s.investor_id);
        out.types.push_back(s.investor_type);
    }
    out.values = correlation_of_columns(X);
    return out;
}

PooledCoefficients pooled_coefficients(std::span<const CorrelationMatrix> matrices) {
    PooledCoefficients out;
    for (const auto& m : matrices) {
        const auto n = static_cast<Eigen::Index>(m.size());
        if (m.types.size() != m.size() || m.values.rows() != n || m.values.cols() != n)
            throw Error(ErrorKind::invalid_argument, "correlation matrix lacks type metadata");
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double c = m.values(i, j);
                const auto a = m.types[static_cast<std::size_t>(i)];
                const auto b = m.types[static_cast<std::size_t>(j)];
                if (a != b) out.ind_ins.push_back(c);
                else if (a == InvestorType::individual) out.ind_ind.push_back(c);
                else out.ins_ins.push_back(c);
                out.all.push_back(c);
            }
        }
    }
    return out;
}

double sample_mean(std::span<const double> sample) {
    return sample.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::mean(sample);
}

double mean_off_diagonal(const Matrix& C) {
    const Eigen::Index n = C.rows();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) sum += C(i, j);
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

std::vector<RollingPoint> rolling_mean_correlation(const Matrix& X, std::size_t window) {
    if (window < 3) throw Error(ErrorKind::invalid_argument, "rolling window must be at least 3", "xcorr.rolling_window");
    const auto T = static_cast<std::size_t>(X.rows());
    if (T < window) throw Error(ErrorKind::insufficient_data, "series shorter than the rolling window");
    std::vector<RollingPoint> out;
    out.reserve(T - window + 1);
    std::vector<Eigen::Index> keep;
    for (std::size_t end = window - 1; end < T; ++end) {
        const auto block = X.middleRows(static_cast<Eigen::Index>(end + 1 - window), static_cast<Eigen::Index>(window));
        keep.clear();
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const Vector col = block.col(j);
            if (!stats::is_degenerate(std::span<const double>(col.data(), window))) keep.push_back(j);
        }
        RollingPoint p;
        p.end_index = end;
        p.series_used = keep.size();
        p.series_dropped = static_cast<std::size_t>(X.cols()) - keep.size();
        if (keep.size() < 2) {
            p.mean = std::numeric_limits<double>::quiet_NaN();
        } else {
            Matrix sub(static_cast<Eigen::Index>(window), static_cast<Eigen::Index>(keep.size()));
            for (std::size_t k = 0; k < keep.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = block.col(keep[k]);
            p.mean = mean_off_diagonal(correlation_of_columns(sub));
        }
        out.push_back(p);
    }
    return out;
}

std::vector<RollingPoint> rolling_mean_correlation(std::span<const InventorySeries> panel, std::size_t window) {
    if (panel.empty()) return {};
    const std::size_t T = panel.front().size();
    Matrix X(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(panel.size()));
    for (std::size_t j = 0; j < panel.size(); ++j) {
        if (panel[j].size() != T) throw Error(ErrorKind::misaligned, "series lengths differ");
        for (std::size_t t = 0; t < T; ++t)
            X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = panel[j].v[t];
    }
    return rolling_mean_correlation(X, window);
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& labels, const Matrix& values) {
    out << "investor_id";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << labels.at(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << format_number(values(i, j));
        out << '\n';
    }
}

}  // namespace invcorr
