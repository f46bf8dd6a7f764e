#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causalattn/confidence.hpp"
#include "causalattn/discovery.hpp"
#include "causalattn/harness.hpp"
#include "causalattn/scmsim.hpp"

namespace causalattn {

// File carrier for one sequence's attention heads plus an optional legality
// label from outside.
struct AttentionBundle {
    static constexpr int kFormatVersion = 1;

    std::string sequence_id;
    int n = 0;
    std::vector<int> head_indices;
    std::vector<AttentionMatrix> heads;
    std::optional<std::string> outcome;  // "legal" / "illegal"
};

AttentionBundle read_bundle(const std::filesystem::path& path);
void write_bundle(const std::filesystem::path& path, const AttentionBundle& bundle);

nlohmann::ordered_json pag_to_json(const Pag& g);
Pag pag_from_json(const nlohmann::json& j);
void write_pag_json(const std::filesystem::path& path, const Pag& g);
Pag read_pag_json(const std::filesystem::path& path);

// DOT rendering: circle marks as `odot` arrow styles, arrows as `normal`,
// tails as `none`.
std::string pag_to_dot(const Pag& g, const std::string& name = "pag");

nlohmann::ordered_json trace_to_json(const DiscoveryTrace& trace);
DiscoveryTrace trace_from_json(const nlohmann::json& j);

nlohmann::ordered_json confidence_report_to_json(const ConfidenceReport& report);

nlohmann::ordered_json scm_to_json(const Scm& scm);
Scm scm_from_json(const nlohmann::json& j);

SequenceDataset read_sequence_dataset(const std::filesystem::path& path);
void write_sequence_dataset(const std::filesystem::path& path, const SequenceDataset& dataset);

HeadScoreTable read_score_table_csv(const std::filesystem::path& path);
void write_score_table_csv(const std::filesystem::path& path, const HeadScoreTable& table);

std::vector<PruneOutcome> read_outcomes_csv(const std::filesystem::path& path);

// Writes content to path atomically (temp file + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::ordered_json& j);

}  // namespace causalattn
