#include "causalattn/io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace causalattn {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

std::string mark_to_string(Mark m) {
    switch (m) {
        case Mark::Circle: return "circle";
        case Mark::Arrow: return "arrow";
        case Mark::Tail: return "tail";
    }
    return "circle";
}

Mark mark_from_string(const std::string& s) {
    if (s == "circle") return Mark::Circle;
    if (s == "arrow") return Mark::Arrow;
    if (s == "tail") return Mark::Tail;
    throw SchemaError("unknown mark '" + s + "'");
}

const char* dot_style(Mark m) {
    switch (m) {
        case Mark::Circle: return "odot";
        case Mark::Arrow: return "normal";
        case Mark::Tail: return "none";
    }
    return "odot";
}

}  // namespace

AttentionBundle read_bundle(const std::filesystem::path& path) {
    const json j = load_json(path);
    try {
        AttentionBundle bundle;
        if (j.at("format_version").get<int>() != AttentionBundle::kFormatVersion) {
            throw SchemaError("unsupported bundle format_version");
        }
        bundle.sequence_id = j.at("sequence_id").get<std::string>();
        bundle.n = j.at("n").get<int>();
        if (j.contains("outcome") && !j["outcome"].is_null()) {
            bundle.outcome = j["outcome"].get<std::string>();
        }
        for (const auto& head : j.at("heads")) {
            bundle.head_indices.push_back(head.at("head_index").get<int>());
            const auto& rows = head.at("matrix");
            if (static_cast<int>(rows.size()) != bundle.n) {
                throw SchemaError("head matrix row count does not match n");
            }
            Eigen::MatrixXd m(bundle.n, bundle.n);
            for (int r = 0; r < bundle.n; ++r) {
                const auto& row = rows.at(r);
                if (static_cast<int>(row.size()) != bundle.n) {
                    throw SchemaError("head matrix is not square");
                }
                for (int c = 0; c < bundle.n; ++c) m(r, c) = row.at(c).get<double>();
            }
            bundle.heads.push_back(AttentionMatrix::validate(m));
        }
        return bundle;
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void write_bundle(const std::filesystem::path& path, const AttentionBundle& bundle) {
    ordered_json j;
    j["format_version"] = AttentionBundle::kFormatVersion;
    j["sequence_id"] = bundle.sequence_id;
    j["n"] = bundle.n;
    if (bundle.outcome) j["outcome"] = *bundle.outcome;
    j["heads"] = ordered_json::array();
    for (size_t h = 0; h < bundle.heads.size(); ++h) {
        ordered_json head;
        head["head_index"] = bundle.head_indices[h];
        ordered_json rows = ordered_json::array();
        const auto& m = bundle.heads[h].entries();
        for (int r = 0; r < bundle.n; ++r) {
            ordered_json row = ordered_json::array();
            for (int c = 0; c < bundle.n; ++c) row.push_back(m(r, c));
            rows.push_back(std::move(row));
        }
        head["matrix"] = std::move(rows);
        j["heads"].push_back(std::move(head));
    }
    write_json_atomic(path, j);
}

ordered_json pag_to_json(const Pag& g) {
    ordered_json j;
    j["format_version"] = 1;
    j["n"] = g.node_count();
    j["edges"] = ordered_json::array();
    for (const auto& [i, k] : g.edges()) {
        ordered_json edge;
        edge["i"] = i;
        edge["j"] = k;
        edge["mark_at_i"] = mark_to_string(g.mark_at(i, k));
        edge["mark_at_j"] = mark_to_string(g.mark_at(k, i));
        j["edges"].push_back(std::move(edge));
    }
    j["sepsets"] = ordered_json::array();
    for (int i = 0; i < g.node_count(); ++i) {
        for (int k = i + 1; k < g.node_count(); ++k) {
            const auto* sep = g.sepset(i, k);
            if (sep == nullptr) continue;
            ordered_json entry;
            entry["i"] = i;
            entry["j"] = k;
            entry["sepset"] = *sep;
            j["sepsets"].push_back(std::move(entry));
        }
    }
    return j;
}

Pag pag_from_json(const json& j) {
    try {
        Pag g(j.at("n").get<int>());
        for (const auto& edge : j.at("edges")) {
            g.add_edge(edge.at("i").get<int>(), edge.at("j").get<int>(),
                       mark_from_string(edge.at("mark_at_i").get<std::string>()),
                       mark_from_string(edge.at("mark_at_j").get<std::string>()));
        }
        for (const auto& entry : j.at("sepsets")) {
            const int i = entry.at("i").get<int>();
            const int k = entry.at("j").get<int>();
            // Reuse the removal path to record the set without an edge.
            g.add_edge(i, k);
            g.remove_edge_with_sepset(i, k, entry.at("sepset").get<std::vector<int>>());
        }
        return g;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("pag json: ") + e.what());
    }
}

void write_pag_json(const std::filesystem::path& path, const Pag& g) {
    write_json_atomic(path, pag_to_json(g));
}

Pag read_pag_json(const std::filesystem::path& path) {
    return pag_from_json(load_json(path));
}

std::string pag_to_dot(const Pag& g, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << name << " {\n";
    for (int i = 0; i < g.node_count(); ++i) out << "  n" << i << " [label=\"" << i << "\"];\n";
    for (const auto& [i, k] : g.edges()) {
        out << "  n" << i << " -> n" << k << " [dir=both, arrowtail="
            << dot_style(g.mark_at(i, k)) << ", arrowhead=" << dot_style(g.mark_at(k, i))
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

ordered_json trace_to_json(const DiscoveryTrace& trace) {
    ordered_json j;
    j["tests_performed"] = trace.tests_performed();
    j["records"] = ordered_json::array();
    for (const auto& rec : trace.records) {
        ordered_json r;
        r["i"] = rec.i;
        r["j"] = rec.j;
        r["cond"] = rec.cond;
        r["p_value"] = rec.p_value;
        r["independent"] = rec.independent;
        j["records"].push_back(std::move(r));
    }
    return j;
}

DiscoveryTrace trace_from_json(const json& j) {
    try {
        DiscoveryTrace trace;
        for (const auto& r : j.at("records")) {
            CiRecord rec;
            rec.i = r.at("i").get<int>();
            rec.j = r.at("j").get<int>();
            rec.cond = r.at("cond").get<std::vector<int>>();
            rec.p_value = r.at("p_value").get<double>();
            rec.independent = r.at("independent").get<bool>();
            trace.records.push_back(std::move(rec));
        }
        return trace;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("trace json: ") + e.what());
    }
}

ordered_json confidence_report_to_json(const ConfidenceReport& report) {
    ordered_json j;
    j["alpha"] = report.alpha;
    j["filter"] = to_string(report.filter);
    j["n_ind"] = report.p_ind.size();
    j["n_dep"] = report.p_dep.size();
    j["h_ind"] = report.h_ind;
    j["h_dep"] = report.h_dep;
    j["r_score"] = report.r_score;
    j["degenerate"] = report.degenerate;
    return j;
}

ordered_json scm_to_json(const Scm& scm) {
    ordered_json j;
    j["format_version"] = 1;
    j["n"] = scm.n;
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < scm.n; ++i) {
        ordered_json row = ordered_json::array();
        for (int k = 0; k < scm.n; ++k) row.push_back(scm.g(i, k));
        rows.push_back(std::move(row));
    }
    j["g"] = std::move(rows);
    j["latents"] = std::vector<int>(scm.latents.begin(), scm.latents.end());
    j["exo_cov"] = std::vector<double>(scm.exo_cov.data(), scm.exo_cov.data() + scm.n);
    return j;
}

Scm scm_from_json(const json& j) {
    try {
        Scm scm;
        scm.n = j.at("n").get<int>();
        scm.g = Eigen::MatrixXd::Zero(scm.n, scm.n);
        const auto& rows = j.at("g");
        for (int i = 0; i < scm.n; ++i)
            for (int k = 0; k < scm.n; ++k) scm.g(i, k) = rows.at(i).at(k).get<double>();
        for (int l : j.at("latents").get<std::vector<int>>()) scm.latents.insert(l);
        const auto exo = j.at("exo_cov").get<std::vector<double>>();
        scm.exo_cov = Eigen::Map<const Eigen::VectorXd>(exo.data(), scm.n);
        return scm;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("scm json: ") + e.what());
    }
}

SequenceDataset read_sequence_dataset(const std::filesystem::path& path) {
    const json j = load_json(path);
    try {
        SequenceDataset dataset;
        for (const auto& seq : j.at("sequences")) {
            dataset.sequences.push_back(seq.get<std::vector<int>>());
        }
        return dataset;
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void write_sequence_dataset(const std::filesystem::path& path, const SequenceDataset& dataset) {
    ordered_json j;
    j["sequences"] = dataset.sequences;
    write_json_atomic(path, j);
}

HeadScoreTable read_score_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    HeadScoreTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("sequence_id", 0) == 0) continue;  // header
        std::istringstream row(line);
        HeadScoreTable::Row r;
        std::string field;
        if (!std::getline(row, r.sequence_id, ',') || !std::getline(row, field, ',')) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        r.head_index = std::stoi(field);
        if (!std::getline(row, field, ',')) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        r.r_score = std::stod(field);
        table.rows.push_back(std::move(r));
    }
    return table;
}

void write_score_table_csv(const std::filesystem::path& path, const HeadScoreTable& table) {
    std::ostringstream out;
    out << "sequence_id,head_index,r_score\n";
    out.precision(17);
    for (const auto& row : table.rows) {
        out << row.sequence_id << "," << row.head_index << "," << row.r_score << "\n";
    }
    write_text_atomic(path, out.str());
}

std::vector<PruneOutcome> read_outcomes_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    std::vector<PruneOutcome> outcomes;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("percentile", 0) == 0) continue;
        std::istringstream row(line);
        PruneOutcome o;
        std::string field;
        if (!std::getline(row, field, ',')) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        o.percentile = std::stod(field);
        if (!std::getline(row, o.sequence_id, ',') || !std::getline(row, field, ',')) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        o.legal = field == "1" || field == "true" || field == "legal";
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const ordered_json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace causalattn
