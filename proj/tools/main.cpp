// Batch front-end: ingest attention bundles and datasets, run discovery /
// scoring / harness pipelines, emit PAGs, reports and plot-ready tables.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "causalattn/confidence.hpp"
#include "causalattn/discovery.hpp"
#include "causalattn/harness.hpp"
#include "causalattn/io.hpp"
#include "causalattn/scmsim.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace causalattn;

namespace {

struct GlobalOptions {
    double alpha = 0.01;
    int n_eff = 0;  // 0: use the token count
    int bins = 10;
    std::string filter = "all";
    std::uint64_t seed = 0;
    bool exact_ci = false;
    double exact_threshold = 1e-7;
    bool anchor_end = false;
    bool ablation = false;
    std::string order = "asc";
    std::string out_dir = ".";
};

DiscoveryConfig discovery_config(const GlobalOptions& opts) {
    DiscoveryConfig cfg;
    cfg.ci.alpha = opts.alpha;
    cfg.ci.n_eff = opts.n_eff;
    cfg.ci.mode = opts.exact_ci ? CiMode::Exact : CiMode::Statistical;
    cfg.ci.exact_threshold = opts.exact_threshold;
    return cfg;
}

std::vector<double> parse_number_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

int run_discover(const std::vector<std::string>& inputs, const GlobalOptions& opts) {
    const auto cfg = discovery_config(opts);
    fs::create_directories(opts.out_dir);
    int failures = 0;
    for (const auto& input : inputs) {
        try {
            const auto bundle = read_bundle(input);
            for (size_t h = 0; h < bundle.heads.size(); ++h) {
                const int head = bundle.head_indices[h];
                try {
                    auto result = learn_structure(bundle.heads[h], cfg);
                    result.head_index = head;
                    const std::string stem =
                        bundle.sequence_id + "_head" + std::to_string(head);
                    write_pag_json(fs::path(opts.out_dir) / (stem + ".pag.json"), result.pag);
                    write_text_atomic(fs::path(opts.out_dir) / (stem + ".dot"),
                                      pag_to_dot(result.pag, "head" + std::to_string(head)));
                    write_json_atomic(fs::path(opts.out_dir) / (stem + ".trace.json"),
                                      trace_to_json(result.trace));
                } catch (const Error& e) {
                    std::cerr << input << " head " << head << ": " << e.what() << "\n";
                    ++failures;
                }
            }
        } catch (const Error& e) {
            std::cerr << input << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int run_score(const std::vector<std::string>& inputs, const GlobalOptions& opts) {
    const auto cfg = discovery_config(opts);
    fs::create_directories(opts.out_dir);
    std::vector<CondFilter> filters;
    if (opts.ablation) {
        filters = {CondFilter::Cond0, CondFilter::Cond1, CondFilter::Cond01, CondFilter::All};
    } else {
        filters = {cond_filter_from_string(opts.filter)};
    }
    int failures = 0;
    for (const auto& input : inputs) {
        try {
            const auto bundle = read_bundle(input);
            const auto results = learn_all_heads(bundle.heads, cfg);
            ordered_json j;
            j["sequence_id"] = bundle.sequence_id;
            j["alpha"] = opts.alpha;
            j["bins"] = opts.bins;
            if (bundle.outcome) j["outcome"] = *bundle.outcome;
            j["heads"] = ordered_json::array();
            for (size_t h = 0; h < results.size(); ++h) {
                ordered_json head;
                head["head_index"] = bundle.head_indices[h];
                head["filters"] = ordered_json::array();
                for (auto filter : filters) {
                    head["filters"].push_back(confidence_report_to_json(
                        confidence_score(results[h].trace, opts.alpha, filter, opts.bins)));
                }
                j["heads"].push_back(std::move(head));
            }
            j["sequence_scores"] = ordered_json::array();
            for (auto filter : filters) {
                const auto score = sequence_score(results, opts.alpha, filter, opts.bins);
                ordered_json s;
                s["filter"] = to_string(filter);
                s["mean_r"] = score.mean_r;
                s["degenerate_heads"] = score.degenerate_heads;
                j["sequence_scores"].push_back(std::move(s));
            }
            write_json_atomic(fs::path(opts.out_dir) / (bundle.sequence_id + ".score.json"), j);
        } catch (const Error& e) {
            std::cerr << input << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

struct SynthOptions {
    int count = 1;
    int n = 8;
    int heads = 1;
    double density = 0.4;
    int latents = 0;
    std::string preset;
};

int run_synth(const SynthOptions& synth, const GlobalOptions& opts) {
    fs::create_directories(opts.out_dir);
    const auto out = fs::path(opts.out_dir);
    if (synth.preset == "chain3") {
        const auto scm = chain_scm(3);
        AttentionBundle bundle;
        bundle.sequence_id = "chain3";
        bundle.n = 3;
        bundle.head_indices = {0};
        bundle.heads.push_back(attention_from_scm(scm));
        write_bundle(out / "chain3.json", bundle);
        write_json_atomic(out / "chain3.scm.json", scm_to_json(scm));
        write_pag_json(out / "chain3.truth.pag.json", oracle_fci(scm));
        return 0;
    }
    if (!synth.preset.empty()) {
        std::cerr << "unknown preset '" << synth.preset << "'\n";
        return 1;
    }
    int failures = 0;
    for (int i = 0; i < synth.count; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "synth_%04d", i);
        try {
            AttentionBundle bundle;
            bundle.sequence_id = name;
            bundle.n = synth.n - synth.latents;
            for (int h = 0; h < synth.heads; ++h) {
                // One SCM per head: each sequence is modeled by an ensemble.
                ScmOptions scm_opts;
                scm_opts.n = synth.n;
                scm_opts.edge_density = synth.density;
                scm_opts.latent_count = synth.latents;
                scm_opts.seed = opts.seed + static_cast<std::uint64_t>(i) * synth.heads + h;
                const auto scm = random_scm(scm_opts);
                bundle.head_indices.push_back(h);
                bundle.heads.push_back(attention_from_scm(scm));
                const std::string stem = std::string(name) + "_head" + std::to_string(h);
                write_json_atomic(out / (stem + ".scm.json"), scm_to_json(scm));
                write_pag_json(out / (stem + ".truth.pag.json"), oracle_fci(scm));
            }
            write_bundle(out / (std::string(name) + ".json"), bundle);
        } catch (const Error& e) {
            std::cerr << name << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int run_prune(const std::string& scores_file, const std::string& outcomes_file,
              const std::string& percentile_csv, const GlobalOptions& opts) {
    fs::create_directories(opts.out_dir);
    const auto out = fs::path(opts.out_dir);
    try {
        const auto table = read_score_table_csv(scores_file);
        const auto percentiles = parse_number_list(percentile_csv);
        const auto thresholds = percentile_thresholds(table, percentiles);
        const auto order = opts.order == "desc" ? PruneOrder::Descending : PruneOrder::Ascending;

        ordered_json masks_json;
        masks_json["order"] = opts.order == "desc" ? "desc" : "asc";
        masks_json["thresholds"] = ordered_json::array();
        for (size_t t = 0; t < thresholds.size(); ++t) {
            const auto masks = prune_masks(table, thresholds[t], order);
            ordered_json entry;
            entry["percentile"] = percentiles[t];
            entry["threshold"] = thresholds[t];
            entry["pruned"] = ordered_json::object();
            for (const auto& [seq, heads] : masks.pruned) {
                entry["pruned"][seq] = std::vector<int>(heads.begin(), heads.end());
            }
            masks_json["thresholds"].push_back(std::move(entry));
        }
        write_json_atomic(out / "prune_masks.json", masks_json);

        if (!outcomes_file.empty()) {
            const auto outcomes = read_outcomes_csv(outcomes_file);
            const auto curve = accuracy_curve(outcomes);
            std::ostringstream csv;
            csv.precision(17);
            csv << "percentile,accuracy,normalized_accuracy\n";
            for (const auto& p : curve.points) {
                csv << p.percentile << "," << p.accuracy << "," << p.normalized_accuracy << "\n";
            }
            csv << "# auc," << curve.auc << "\n";
            write_text_atomic(out / "accuracy_curve.csv", csv.str());
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

int run_ngram(const std::string& train_file, const std::string& probe_file,
              const std::string& ell_csv, const std::string& n_csv, bool exclude_self,
              const GlobalOptions& opts) {
    fs::create_directories(opts.out_dir);
    try {
        const auto train = read_sequence_dataset(train_file);
        const auto probe = read_sequence_dataset(probe_file);
        NgramOptions ngram_opts;
        ngram_opts.anchor_end = opts.anchor_end;
        ngram_opts.exclude_self = exclude_self;
        std::ostringstream csv;
        csv.precision(17);
        csv << "ell,n,mu,probe_used,probe_skipped,train_used,train_skipped\n";
        for (double ell : parse_number_list(ell_csv)) {
            for (double n : parse_number_list(n_csv)) {
                const auto res = ngram_occurrence_mean(train, probe, static_cast<int>(ell),
                                                       static_cast<int>(n), ngram_opts);
                csv << static_cast<int>(ell) << "," << static_cast<int>(n) << "," << res.mu << ","
                    << res.probe_used << "," << res.probe_skipped << "," << res.train_used << ","
                    << res.train_skipped << "\n";
            }
        }
        write_text_atomic(fs::path(opts.out_dir) / "ngram_stats.csv", csv.str());
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal structure discovery and confidence scoring for masked attention"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--alpha", opts.alpha, "CI significance level");
    app.add_option("--n-eff", opts.n_eff, "effective sample size (0: token count)");
    app.add_option("--bins", opts.bins, "entropy histogram bins");
    app.add_option("--filter", opts.filter, "p-value filter: cond0, cond1, cond01, all");
    app.add_option("--seed", opts.seed, "random seed");
    app.add_flag("--exact-ci", opts.exact_ci, "threshold |partial correlation| instead of p-values");
    app.add_option("--exact-threshold", opts.exact_threshold, "exact-CI correlation threshold");
    app.add_flag("--anchor-end", opts.anchor_end, "match n-grams only at sequence ends");
    app.add_flag("--ablation", opts.ablation, "report all four p-value filters");
    app.add_option("--order", opts.order, "prune order: asc or desc")
        ->check(CLI::IsMember({"asc", "desc"}));
    app.add_option("--out", opts.out_dir, "output directory");

    std::vector<std::string> inputs;
    auto* discover = app.add_subcommand("discover", "learn one PAG per head per bundle");
    discover->add_option("bundles", inputs, "attention bundle JSON files")->required();

    auto* score = app.add_subcommand("score", "structural confidence reports");
    score->add_option("bundles", inputs, "attention bundle JSON files")->required();

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic bundles with ground truth");
    synth_cmd->add_option("--count", synth.count, "number of bundles");
    synth_cmd->add_option("--n", synth.n, "nodes per SCM (observed + latent)");
    synth_cmd->add_option("--heads", synth.heads, "heads per bundle");
    synth_cmd->add_option("--density", synth.density, "edge density");
    synth_cmd->add_option("--latents", synth.latents, "latent confounders per SCM");
    synth_cmd->add_option("--preset", synth.preset, "named fixture (chain3)");

    std::string scores_file, outcomes_file, percentile_csv = "10,20,30,40,50,60,70,80,90";
    auto* prune = app.add_subcommand("prune", "percentile prune masks and accuracy curve");
    prune->add_option("--scores", scores_file, "head score CSV")->required();
    prune->add_option("--outcomes", outcomes_file, "legality outcomes CSV");
    prune->add_option("--percentiles", percentile_csv, "comma-separated percentiles");

    std::string train_file, probe_file, ell_csv = "15", n_csv = "2";
    bool exclude_self = false;
    auto* ngram = app.add_subcommand("ngram", "n-gram occurrence statistics");
    ngram->add_option("--train", train_file, "training dataset JSON")->required();
    ngram->add_option("--probe", probe_file, "probe dataset JSON")->required();
    ngram->add_option("--ell", ell_csv, "comma-separated trim lengths");
    ngram->add_option("--n", n_csv, "comma-separated n-gram sizes");
    ngram->add_flag("--exclude-self", exclude_self, "skip train sequences identical to the probe");

    CLI11_PARSE(app, argc, argv);

    if (discover->parsed()) return run_discover(inputs, opts);
    if (score->parsed()) return run_score(inputs, opts);
    if (synth_cmd->parsed()) return run_synth(synth, opts);
    if (prune->parsed()) return run_prune(scores_file, outcomes_file, percentile_csv, opts);
    if (ngram->parsed()) return run_ngram(train_file, probe_file, ell_csv, n_csv, exclude_self, opts);
    return 1;
}
