// Python surface: numpy in, numpy out. Validated wrapper types stay internal;
// every entry point takes or returns plain Eigen matrices.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "causalattn/confidence.hpp"
#include "causalattn/discovery.hpp"
#include "causalattn/harness.hpp"
#include "causalattn/scmsim.hpp"

namespace py = pybind11;
using namespace causalattn;

namespace {

DiscoveryConfig make_config(double alpha, int n_eff, bool exact_ci) {
    DiscoveryConfig cfg;
    cfg.ci.alpha = alpha;
    cfg.ci.n_eff = n_eff;
    cfg.ci.mode = exact_ci ? CiMode::Exact : CiMode::Statistical;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_causalattn, m) {
    m.doc() = "Causal structure discovery from masked attention matrices";

    // Translators run newest-first, so the base class goes in before the
    // derived one that should win.
    py::register_exception<Error>(m, "CausalAttnError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    m.def("validate_attention",
          [](const Eigen::MatrixXd& a) { return AttentionMatrix::validate(a).entries(); },
          py::arg("a"));
    m.def("to_uni_triangular",
          [](const Eigen::MatrixXd& a) {
              return to_uni_triangular(AttentionMatrix::validate(a)).entries();
          },
          py::arg("a"));
    m.def("covariance",
          [](const Eigen::MatrixXd& m_) {
              return covariance(EffectMatrix::from_matrix(m_)).entries();
          },
          py::arg("m"));
    m.def("correlation",
          [](const Eigen::MatrixXd& c) {
              return correlation(CovarianceMatrix::from_matrix(c)).entries();
          },
          py::arg("c"));
    m.def("synthesize_attention",
          [](const Eigen::MatrixXd& m_) {
              return synthesize_attention(EffectMatrix::from_matrix(m_)).entries();
          },
          py::arg("m"));

    m.def("partial_correlation",
          [](const Eigen::MatrixXd& r, int i, int j, const std::vector<int>& cond) {
              return partial_correlation(CorrelationMatrix::from_matrix(r), i, j, cond);
          },
          py::arg("r"), py::arg("i"), py::arg("j"), py::arg("cond") = std::vector<int>{});
    m.def("fisher_z_pvalue", &fisher_z_pvalue, py::arg("r"), py::arg("n_eff"),
          py::arg("cond_size"));

    py::class_<WelchResult>(m, "WelchResult")
        .def_readonly("mean_diff", &WelchResult::mean_diff)
        .def_readonly("t", &WelchResult::t)
        .def_readonly("dof", &WelchResult::dof)
        .def_readonly("ci_low", &WelchResult::ci_low)
        .def_readonly("ci_high", &WelchResult::ci_high)
        .def_readonly("degenerate", &WelchResult::degenerate);
    m.def("welch_t_interval",
          [](const std::vector<double>& a, const std::vector<double>& b, double confidence,
             bool pooled) { return welch_t_interval(a, b, confidence, pooled); },
          py::arg("a"), py::arg("b"), py::arg("confidence") = 0.95, py::arg("pooled") = false);

    py::enum_<Mark>(m, "Mark")
        .value("CIRCLE", Mark::Circle)
        .value("ARROW", Mark::Arrow)
        .value("TAIL", Mark::Tail);

    py::class_<Pag>(m, "Pag")
        .def(py::init<int>(), py::arg("n"))
        .def_static("complete_over", &Pag::complete_over, py::arg("n"))
        .def_property_readonly("node_count", &Pag::node_count)
        .def_property_readonly("edge_count", &Pag::edge_count)
        .def("has_edge", &Pag::has_edge, py::arg("i"), py::arg("j"))
        .def("add_edge", &Pag::add_edge, py::arg("i"), py::arg("j"),
             py::arg("at_i") = Mark::Circle, py::arg("at_j") = Mark::Circle)
        .def("mark_at", &Pag::mark_at, py::arg("node"), py::arg("other"))
        .def("set_mark", &Pag::set_mark, py::arg("node"), py::arg("other"), py::arg("m"))
        .def("edges", &Pag::edges)
        .def("neighbors", &Pag::neighbors, py::arg("i"))
        .def("sepset",
             [](const Pag& g, int i, int j) -> std::optional<std::vector<int>> {
                 const auto* s = g.sepset(i, j);
                 if (!s) return std::nullopt;
                 return *s;
             },
             py::arg("i"), py::arg("j"))
        .def("__eq__", [](const Pag& a, const Pag& b) { return pag_equal(a, b); });

    py::class_<CiRecord>(m, "CiRecord")
        .def_readonly("i", &CiRecord::i)
        .def_readonly("j", &CiRecord::j)
        .def_readonly("cond", &CiRecord::cond)
        .def_readonly("p_value", &CiRecord::p_value)
        .def_readonly("independent", &CiRecord::independent);

    py::class_<DiscoveryResult>(m, "DiscoveryResult")
        .def_readonly("pag", &DiscoveryResult::pag)
        .def_property_readonly("records",
                               [](const DiscoveryResult& r) { return r.trace.records; })
        .def_property_readonly("tests_performed", [](const DiscoveryResult& r) {
            return r.trace.tests_performed();
        });

    m.def("discover",
          [](const Eigen::MatrixXd& a, double alpha, int n_eff, bool exact_ci) {
              return learn_structure(AttentionMatrix::validate(a),
                                     make_config(alpha, n_eff, exact_ci));
          },
          py::arg("a"), py::arg("alpha") = 0.01, py::arg("n_eff") = 0,
          py::arg("exact_ci") = false);
    m.def("discover_from_correlation",
          [](const Eigen::MatrixXd& r, double alpha, int n_eff, bool exact_ci) {
              return learn_structure_from_correlation(CorrelationMatrix::from_matrix(r),
                                                      make_config(alpha, n_eff, exact_ci));
          },
          py::arg("r"), py::arg("alpha") = 0.01, py::arg("n_eff") = 0,
          py::arg("exact_ci") = false);
    m.def("fci_reference",
          [](const Eigen::MatrixXd& r, double alpha, int n_eff, bool exact_ci) {
              return fci_reference(CorrelationMatrix::from_matrix(r),
                                   make_config(alpha, n_eff, exact_ci));
          },
          py::arg("r"), py::arg("alpha") = 0.01, py::arg("n_eff") = 0,
          py::arg("exact_ci") = false);

    py::enum_<CondFilter>(m, "CondFilter")
        .value("COND0", CondFilter::Cond0)
        .value("COND1", CondFilter::Cond1)
        .value("COND01", CondFilter::Cond01)
        .value("ALL", CondFilter::All);

    py::class_<ConfidenceReport>(m, "ConfidenceReport")
        .def_readonly("alpha", &ConfidenceReport::alpha)
        .def_readonly("p_ind", &ConfidenceReport::p_ind)
        .def_readonly("p_dep", &ConfidenceReport::p_dep)
        .def_readonly("h_ind", &ConfidenceReport::h_ind)
        .def_readonly("h_dep", &ConfidenceReport::h_dep)
        .def_readonly("r_score", &ConfidenceReport::r_score)
        .def_readonly("degenerate", &ConfidenceReport::degenerate);

    m.def("confidence_score",
          [](const DiscoveryResult& result, double alpha, CondFilter filter, int bins) {
              return confidence_score(result.trace, alpha, filter, bins);
          },
          py::arg("result"), py::arg("alpha") = 0.01, py::arg("filter") = CondFilter::All,
          py::arg("bins") = 10);
    m.def("pvalue_entropy",
          [](const std::vector<double>& pvals, int bins) { return pvalue_entropy(pvals, bins); },
          py::arg("pvals"), py::arg("bins") = 10);
    m.def("sequence_score",
          [](const std::vector<Eigen::MatrixXd>& heads, double alpha, CondFilter filter, int bins,
             int n_eff, bool exact_ci) {
              std::vector<AttentionMatrix> mats;
              mats.reserve(heads.size());
              for (const auto& h : heads) mats.push_back(AttentionMatrix::validate(h));
              const auto results = learn_all_heads(mats, make_config(alpha, n_eff, exact_ci));
              const auto s = sequence_score(results, alpha, filter, bins);
              return py::make_tuple(s.mean_r, s.degenerate_heads);
          },
          py::arg("heads"), py::arg("alpha") = 0.01, py::arg("filter") = CondFilter::All,
          py::arg("bins") = 10, py::arg("n_eff") = 0, py::arg("exact_ci") = false);

    py::class_<Scm>(m, "Scm")
        .def_readonly("n", &Scm::n)
        .def_readonly("g", &Scm::g)
        .def_property_readonly("latents",
                               [](const Scm& s) {
                                   return std::vector<int>(s.latents.begin(), s.latents.end());
                               })
        .def("parents", &Scm::parents, py::arg("node"))
        .def("children", &Scm::children, py::arg("node"))
        .def("observed_nodes", &Scm::observed_nodes);

    m.def("random_scm",
          [](int n, double edge_density, double weight_min, double weight_max, int latent_count,
             std::uint64_t seed, bool signed_weights) {
              ScmOptions opts;
              opts.n = n;
              opts.edge_density = edge_density;
              opts.weight_min = weight_min;
              opts.weight_max = weight_max;
              opts.latent_count = latent_count;
              opts.seed = seed;
              opts.signed_weights = signed_weights;
              return random_scm(opts);
          },
          py::arg("n"), py::arg("edge_density") = 0.3, py::arg("weight_min") = 0.5,
          py::arg("weight_max") = 1.5, py::arg("latent_count") = 0, py::arg("seed") = 0,
          py::arg("signed_weights") = false);
    m.def("chain_scm", &chain_scm, py::arg("n"), py::arg("weight") = 1.0);
    m.def("effect_matrix", [](const Scm& s) { return effect_matrix(s).entries(); },
          py::arg("scm"));
    m.def("observed_correlation",
          [](const Scm& s) { return observed_correlation(s).entries(); }, py::arg("scm"));
    m.def("attention_from_scm",
          [](const Scm& s) { return attention_from_scm(s).entries(); }, py::arg("scm"));
    m.def("random_attention",
          [](int n, std::uint64_t seed) { return random_attention(n, seed).entries(); },
          py::arg("n"), py::arg("seed") = 0);
    m.def("sample_data", &sample_data, py::arg("scm"), py::arg("m"), py::arg("seed") = 0);
    m.def("d_separated",
          [](const Scm& s, int i, int j, const std::vector<int>& z) {
              return d_separated(s, i, j, z);
          },
          py::arg("scm"), py::arg("i"), py::arg("j"), py::arg("z") = std::vector<int>{});
    m.def("oracle_fci", [](const Scm& s) { return oracle_fci(s); }, py::arg("scm"));

    m.def("ngram_occurrence_mean",
          [](const std::vector<std::vector<int>>& train, const std::vector<std::vector<int>>& probe,
             int ell, int n_gram, bool anchor_end, bool exclude_self) {
              SequenceDataset tr{train}, pr{probe};
              NgramOptions opts;
              opts.anchor_end = anchor_end;
              opts.exclude_self = exclude_self;
              const auto res = ngram_occurrence_mean(tr, pr, ell, n_gram, opts);
              return py::make_tuple(res.mu, res.probe_used, res.train_used);
          },
          py::arg("train"), py::arg("probe"), py::arg("ell"), py::arg("n_gram"),
          py::arg("anchor_end") = false, py::arg("exclude_self") = false);
}
