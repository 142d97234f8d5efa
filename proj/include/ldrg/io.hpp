#pragma once

#include <json.hpp>
#include <memory>
#include <optional>
#include <string>

#include "ldrg/diagnostics.hpp"
#include "ldrg/inference.hpp"
#include "ldrg/mcmle.hpp"
#include "ldrg/model.hpp"
#include "ldrg/studies.hpp"

namespace ldrg {

inline constexpr const char* kToolVersion = "0.1.0";

/// Execution details recorded in a run manifest next to the config echo.
/// Empty timestamps are filled with the current UTC time at write.
struct RunMeta {
    std::string started;
    std::string finished;
    int thread_count = 1;
};

/// Current UTC time, ISO 8601.
std::string iso_timestamp_now();

/// Blocks file: header node_id, block_id and optional columns node_group
/// and block_group; fields separated by tabs, spaces, or commas. Node ids
/// must cover 1..N exactly; blocks are numbered 1..K in ascending order of
/// their file labels; node groups must cover 1..M; block groups must be
/// constant within a block and cover 1..L.
std::shared_ptr<const BlockPartition> read_blocks_tsv(const std::string& path);

/// Edges file: header i, j; one undirected edge per row, same separators
/// as the blocks file. Self-loops, out-of-range ids, and duplicate edges
/// (in either order) are rejected.
LocalGraph read_edges_tsv(const std::string& path,
                          std::shared_ptr<const BlockPartition> partition);

struct ParsedModel {
    ModelSpec spec;
    std::optional<ParamVector> theta;
};

/// Model config: {"within": [descriptor...], "between": [descriptor...]}
/// with descriptors {"term": name, "group"/"block"/"pair" as the term
/// requires}, or {"preset": "sbm"} which expands to one WithinEdgesPerBlock
/// term per block plus one BetweenEdgesPerPair term per pair. Optional
/// {"theta": {"within": [...], "between": [...]}}. Indices are 1-based.
ParsedModel parse_model_config(const nlohmann::json& config,
                               std::shared_ptr<const BlockPartition> partition);

ParsedModel load_model_config(const std::string& path,
                              std::shared_ptr<const BlockPartition> partition);

/// Canonical config echo of a term list (inverse of parse_model_config).
nlohmann::json model_config_echo(const ModelSpec& spec, const std::optional<ParamVector>& theta);

/// FNV-1a over the canonical (sorted-key) dump.
std::uint64_t canonical_json_hash(const nlohmann::json& j);

nlohmann::json study_config_to_json(const StudyConfig& cfg);
StudyConfig study_config_from_json(const nlohmann::json& j);

nlohmann::json fit_result_to_json(const FitResult& fit, const ModelSpec& spec);

/// Study output bundles. Data files carry no timestamps, so reruns are
/// byte-identical; the manifest records config echo, hash, root seed, and
/// the run metadata.
void write_study1_outputs(const std::string& dir, const StudyConfig& cfg,
                          const Study1Result& result, const RunMeta& meta = {});
void write_study2_outputs(const std::string& dir, const StudyConfig& cfg,
                          const Study2Result& result, const RunMeta& meta = {});

/// Generic run manifest for non-study commands: config echo plus hash,
/// root seed, tool version, timestamps, thread count, output list.
void write_run_manifest(const std::string& dir, const nlohmann::json& config,
                        std::uint64_t root_seed, const std::string& command,
                        const std::vector<std::string>& outputs, const RunMeta& meta = {});

std::string format_csv_double(double v);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace ldrg
