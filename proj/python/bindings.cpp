#include "invcorr/classify.hpp"
#include "invcorr/distfit.hpp"
#include "invcorr/factor.hpp"
#include "invcorr/herding.hpp"
#include "invcorr/leadlag.hpp"
#include "invcorr/pipeline.hpp"
#include "invcorr/spectra.hpp"
#include "invcorr/synth.hpp"
#include "invcorr/xcorr.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace invcorr;
using namespace pybind11::literals;

namespace {

PyObject* error_type = nullptr;

py::dict panel_dict(const SynthPanel& p) {
    return py::dict("V"_a = p.V, "R"_a = p.R, "ids"_a = p.ids);
}

py::dict fit_dict(const FitResult& f) {
    return py::dict("model"_a = to_string(f.model), "estimate"_a = f.estimate, "stderr"_a = f.stderr_,
                    "range"_a = py::make_tuple(f.range.lo, f.range.hi), "r2"_a = f.r2, "n"_a = f.n,
                    "bins_used"_a = f.bins_used, "iterations"_a = f.iterations);
}

py::dict granger_dict(const GrangerResult& g) {
    return py::dict("horizon"_a = g.horizon, "lag_order"_a = g.lag_order, "f_statistic"_a = g.f_statistic,
                    "p_value"_a = g.p_value, "df1"_a = g.df1, "df2"_a = g.df2, "indicator"_a = g.indicator);
}

Side side_of(const std::string& s) {
    if (s == "positive") return Side::positive;
    if (s == "negative") return Side::negative;
    throw Error(ErrorKind::invalid_argument, "side must be 'positive' or 'negative'", "side");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = std::string(kVersion);

    error_type = PyErr_NewException("invcorr.InvcorrError", PyExc_ValueError, nullptr);
    m.attr("InvcorrError") = py::handle(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
            err.attr("kind") = std::string(to_string(e.kind()));
            err.attr("field") = e.field();
            PyErr_SetObject(error_type, err.ptr());
        }
    });

    m.def("mp_bounds", [](double Q, double sigma2) {
        const auto b = mp_bounds(Q, sigma2);
        return py::make_tuple(b.lower, b.upper);
    }, "Q"_a, "sigma2"_a = 1.0);
    m.def("mp_density", &mp_density, "lam"_a, "Q"_a, "sigma2"_a = 1.0);
    m.def("correlation_of_columns", &correlation_of_columns, "X"_a);
    m.def("eigenvalues_descending", &eigenvalues_descending, "C"_a);

    m.def("gen_iid_panel", [](std::size_t n, std::size_t t, std::uint64_t seed) { return panel_dict(gen_iid_panel(n, t, seed)); },
          "n"_a, "t"_a, "seed"_a = 0);
    m.def("gen_factor_panel", [](const std::vector<double>& g, std::size_t t, std::uint64_t seed) {
        return panel_dict(gen_factor_panel(g, t, seed));
    }, "gammas"_a, "t"_a, "seed"_a = 0);
    m.def("gen_leadlag_panel", [](double beta, std::size_t lag, std::size_t n, std::size_t t, std::uint64_t seed) {
        return panel_dict(gen_leadlag_panel(beta, lag, n, t, seed));
    }, "beta"_a, "lag"_a, "n"_a, "t"_a, "seed"_a = 0);

    m.def("corr_with_return", [](const std::vector<double>& V, const std::vector<double>& R) {
        return corr_with_return(V, R);
    }, "V"_a, "R"_a);
    m.def("significance_band", &significance_band, "n_t"_a);
    m.def("threshold_categorize", [](double cvr, std::size_t n_t) {
        return std::string(to_string(threshold_categorize(cvr, n_t)));
    }, "cvr"_a, "n_t"_a);
    m.def("bootstrap_categorize", [](const std::vector<double>& V, const std::vector<double>& R, std::size_t replicas,
                                     std::size_t block_length, std::uint64_t seed) {
        BootstrapOptions o;
        o.replicas = replicas;
        o.block_length = block_length;
        o.seed = seed;
        const auto b = bootstrap_categorize(V, R, o);
        return py::dict("label"_a = std::string(to_string(b.label)), "cvr"_a = b.cvr, "lower"_a = b.lower,
                        "upper"_a = b.upper);
    }, "V"_a, "R"_a, "replicas"_a = 1000, "block_length"_a = 20, "seed"_a = 0);

    m.def("granger_test", [](const std::vector<double>& cause, const std::vector<double>& effect,
                             std::size_t max_lag_order, double alpha) {
        return granger_dict(granger_test(cause, effect, GrangerOptions{max_lag_order, alpha}));
    }, "cause"_a, "effect"_a, "max_lag_order"_a = 4, "alpha"_a = 0.05);
    m.def("granger_indicator", [](const std::vector<double>& cause, const std::vector<double>& effect,
                                  std::size_t delta_t, std::size_t max_lag_order, double alpha) {
        return granger_dict(granger_indicator(cause, effect, delta_t, GrangerOptions{max_lag_order, alpha}));
    }, "cause"_a, "effect"_a, "delta_t"_a, "max_lag_order"_a = 4, "alpha"_a = 0.05);

    m.def("herding_index", &herding_index, "n_plus"_a, "n_minus"_a);
    m.def("binomial_upper_tail", &binomial_upper_tail, "n"_a, "k"_a);
    m.def("binomial_lower_tail", &binomial_lower_tail, "n"_a, "k"_a);
    m.def("binomial_herding_test", [](std::uint64_t n_plus, std::uint64_t n_minus, double alpha) {
        const auto t = binomial_herding_test(n_plus, n_minus, alpha);
        return py::dict("direction"_a = std::string(to_string(t.direction)), "p_value"_a = t.p_value,
                        "p_buy"_a = t.p_buy, "p_sell"_a = t.p_sell);
    }, "n_plus"_a, "n_minus"_a, "alpha"_a = 0.05);

    m.def("fit_exponential_tail", [](const std::vector<double>& x, const std::string& side, double lo, double hi,
                                     std::size_t bins) {
        return fit_dict(fit_exponential_tail(x, side_of(side), FitRange{lo, hi}, bins));
    }, "sample"_a, "side"_a = "positive", "lo"_a = kExpTailRange.lo, "hi"_a = kExpTailRange.hi, "bins"_a = 25);
    m.def("fit_power_bulk", [](const std::vector<double>& x, const std::string& side, double lo, double hi,
                               std::size_t bins) {
        return fit_dict(fit_power_bulk(x, side_of(side), FitRange{lo, hi}, bins));
    }, "sample"_a, "side"_a = "positive", "lo"_a = kPowerBulkRange.lo, "hi"_a = kPowerBulkRange.hi, "bins"_a = 20);
    m.def("fit_shuffled_exponential", [](const std::vector<double>& x, bool robust) {
        return fit_dict(fit_shuffled_exponential(x, std::nullopt, 25,
                                                 robust ? RegressionMethod::huber : RegressionMethod::ordinary));
    }, "sample"_a, "robust"_a = true);

    m.def("regress_factor_return", [](const std::vector<double>& G, const std::vector<double>& R) {
        const auto s = regress_factor_return(G, R);
        return py::dict("k"_a = s.k, "stderr"_a = s.stderr_, "r2"_a = s.r2, "intercept"_a = s.intercept);
    }, "G"_a, "R"_a);

    m.def("_run", [](const std::string& sub, const std::string& config_json) {
        const auto cfg = config_from_json(nlohmann::json::parse(config_json));
        RunSummary s;
        {
            py::gil_scoped_release release;
            s = run(sub, cfg);
        }
        std::vector<std::string> outputs;
        for (const auto& p : s.outputs) outputs.push_back(p.generic_string());
        return py::dict("stocks"_a = s.stocks, "skipped"_a = s.skipped, "outputs"_a = outputs,
                        "output_dir"_a = cfg.output_dir);
    }, "subcommand"_a, "config_json"_a);
}
