#pragma once

#include "polref/knowledge_base.hpp"
#include "polref/verifier.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

// End-to-end orchestration: extract -> refine -> convert -> translate.
//
// Each stage computes every output in memory first; nothing is written until the whole
// stage has succeeded, and each file is written through a temp file and a rename.
namespace polref::pipeline {

namespace fs = std::filesystem;

struct Config {
    fs::path out = ".";
    std::optional<fs::path> cti;
    std::optional<fs::path> hspl;
    std::optional<fs::path> topology;
    std::optional<fs::path> knowledge;  // default: <out>/knowledge.json for refine
    std::optional<fs::path> catalog;    // default: built-in catalog
    std::optional<fs::path> kb;         // default: <out>/kb.json
    std::optional<fs::path> artifacts;  // default: <out>/artifacts.json for convert
    std::vector<fs::path> mspl;         // default: every *.mspl.xml in <out> for translate
    bool use_kb = true;
    bool strict_schema = false;         // refuse to extend the entity template
    bool greedy = false;
};

inline constexpr const char* kKnowledgeFile = "knowledge.json";
inline constexpr const char* kArtifactsFile = "artifacts.json";
inline constexpr const char* kPathsFile = "paths.json";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kDefaultKbFile = "kb.json";

struct StageResult {
    std::map<std::string, std::string> files;  // file name inside <out> -> exact bytes
    std::optional<KnowledgeBase> kb;           // to persist, when the stage updates it
    std::optional<ReuseReport> reuse;
};

fs::path kb_path(const Config& config);

StageResult extract_stage(const Config& config);
StageResult refine_stage(const Config& config);
StageResult convert_stage(const Config& config);
StageResult translate_stage(const Config& config);

/// All four stages chained through their serialized intermediate files.
StageResult run_all(const Config& config);

/// Writes the stage outputs (and the kb, if any). With `with_manifest`, also writes
/// manifest.json listing every written file with its SHA-256.
void commit(const Config& config, const StageResult& result, bool with_manifest);

/// Human-readable reuse summary, one line per entry.
std::string describe(const ReuseReport& report);

struct VerifyRequest {
    std::string subject;
    std::string object;
    FlowSpec flow;
};

VerificationReport verify_stage(const Config& config, const VerifyRequest& request);

}  // namespace polref::pipeline
