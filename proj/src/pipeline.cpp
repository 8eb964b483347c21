#include "polref/pipeline.hpp"

#include "polref/converter.hpp"
#include "polref/extractor.hpp"
#include "polref/io.hpp"
#include "polref/log.hpp"
#include "polref/refiner.hpp"
#include "polref/translator.hpp"

#include <json.hpp>

#include <algorithm>

namespace polref::pipeline {
namespace {

const fs::path& required(const std::optional<fs::path>& path, const char* flag) {
    if (!path) throw Error(Errc::IoError, std::string("missing required input --") + flag);
    return *path;
}

Catalog catalog_for(const Config& config) {
    Catalog catalog = config.catalog ? load_catalog(io::read_file(*config.catalog)) : default_catalog();
    default_registry().check_catalog(catalog);
    return catalog;
}

std::string paths_json(const PathsByIntent& paths) {
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    for (const auto& [id, list] : paths) {
        auto& entry = root[id] = nlohmann::ordered_json::array();
        for (const auto& path : list) entry.push_back(path.hops);
    }
    return root.dump(2) + "\n";
}

StageResult refine_with(const Config& config, const Knowledge& knowledge) {
    const auto topology = parse_topology(io::read_file(required(config.topology, "topology")));
    const auto intents = parse_hspl(io::read_file(required(config.hspl, "hspl")));
    const auto catalog = catalog_for(config);
    log::event("refiner", "inputs_loaded",
               {{"step", "3"}, {"intents", std::to_string(intents.size())},
                {"facts", std::to_string(knowledge.facts().size())},
                {"nodes", std::to_string(topology.nodes().size())}});

    std::optional<KnowledgeBase> kb;
    if (config.use_kb) kb = load_kb(kb_path(config));

    RefineOptions options;
    options.select.greedy = config.greedy;
    auto refined = refine(topology, intents, knowledge, catalog, kb, options);

    StageResult result;
    result.files[kArtifactsFile] = artifacts_to_json(refined.artifacts);
    result.files[kPathsFile] = paths_json(refined.reconciled.paths);
    if (config.use_kb) result.kb = std::move(refined.kb);
    result.reuse = refined.reconciled.report;
    return result;
}

StageResult convert_with(const Config& config, std::string_view artifacts_document) {
    const auto catalog = catalog_for(config);
    const auto artifacts = artifacts_from_json(artifacts_document);
    log::event("converter", "artifacts_received", {{"step", "8"}, {"count", std::to_string(artifacts.size())}});
    StageResult result;
    for (const auto& [device, policy] : build_mspl(artifacts)) {
        validate_policy(policy, catalog);
        result.files[mspl_file_name(device)] = serialize_mspl(policy);
        log::event("converter", "mspl_built",
                   {{"step", "9"}, {"device", device}, {"nsf", policy.nsf_name}, {"rules", std::to_string(policy.rules.size())}});
    }
    return result;
}

StageResult translate_with(const std::map<std::string, std::string>& mspl_by_device) {
    StageResult result;
    for (const auto& [device, document] : mspl_by_device) {
        const auto policy = parse_mspl(document);
        log::event("translator", "policy_received", {{"step", "10"}, {"device", device}, {"nsf", policy.nsf_name}});
        const auto rules = translate_policy(policy);
        result.files[rules_file_name(device)] = render_rules_file(rules);
        log::event("translator", "rules_rendered", {{"step", "11"}, {"device", device}, {"count", std::to_string(rules.size())}});
    }
    return result;
}

constexpr std::string_view kMsplSuffix = ".mspl.xml";

std::string device_of(const fs::path& file) {
    auto name = file.filename().string();
    if (name.size() <= kMsplSuffix.size() || !name.ends_with(kMsplSuffix))
        throw Error(Errc::IoError, "MSPL file name must end in .mspl.xml: " + name);
    return name.substr(0, name.size() - kMsplSuffix.size());
}

void merge(StageResult& into, StageResult&& from) {
    for (auto& [name, bytes] : from.files) into.files[name] = std::move(bytes);
    if (from.kb) into.kb = std::move(from.kb);
    if (from.reuse) into.reuse = std::move(from.reuse);
}

}  // namespace

fs::path kb_path(const Config& config) { return config.kb ? *config.kb : config.out / kDefaultKbFile; }

StageResult extract_stage(const Config& config) {
    const auto text = io::read_file(required(config.cti, "cti"));
    log::event("extractor", "report_received", {{"step", "1"}, {"bytes", std::to_string(text.size())}});
    Knowledge base;
    if (config.knowledge) base = parse_knowledge(io::read_file(*config.knowledge));
    const auto indicators = extract_indicators(text);
    log::event("extractor", "indicators_extracted", {{"step", "2"}, {"count", std::to_string(indicators.size())}});
    StageResult result;
    result.files[kKnowledgeFile] =
        serialize_knowledge(indicators_to_knowledge(indicators, base, !config.strict_schema));
    return result;
}

StageResult refine_stage(const Config& config) {
    const auto path = config.knowledge ? *config.knowledge : config.out / kKnowledgeFile;
    return refine_with(config, parse_knowledge(io::read_file(path)));
}

StageResult convert_stage(const Config& config) {
    const auto path = config.artifacts ? *config.artifacts : config.out / kArtifactsFile;
    return convert_with(config, io::read_file(path));
}

StageResult translate_stage(const Config& config) {
    std::vector<fs::path> files = config.mspl;
    if (files.empty() && fs::is_directory(config.out)) {
        for (const auto& entry : fs::directory_iterator(config.out)) {
            if (entry.is_regular_file() && entry.path().filename().string().ends_with(kMsplSuffix))
                files.push_back(entry.path());
        }
    }
    std::map<std::string, std::string> documents;
    for (const auto& file : files) documents[device_of(file)] = io::read_file(file);
    return translate_with(documents);
}

StageResult run_all(const Config& config) {
    StageResult result;
    Knowledge knowledge;
    if (config.cti) {
        merge(result, extract_stage(config));
        knowledge = parse_knowledge(result.files.at(kKnowledgeFile));
    } else {
        knowledge = parse_knowledge(io::read_file(required(config.knowledge, "knowledge or --cti")));
        result.files[kKnowledgeFile] = serialize_knowledge(knowledge);
    }
    merge(result, refine_with(config, knowledge));
    auto converted = convert_with(config, result.files.at(kArtifactsFile));

    std::map<std::string, std::string> documents;
    for (const auto& [name, bytes] : converted.files) documents[device_of(name)] = bytes;
    merge(result, std::move(converted));
    merge(result, translate_with(documents));
    return result;
}

void commit(const Config& config, const StageResult& result, bool with_manifest) {
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec) throw Error(Errc::PersistError, "cannot create output directory " + config.out.string());

    std::map<std::string, std::string> digests;
    for (const auto& [name, bytes] : result.files) {
        io::write_file_atomic(config.out / name, bytes);
        digests[name] = io::sha256_hex(bytes);
        log::event("pipeline", "file_written", {{"file", name}});
    }
    if (result.kb) {
        const auto path = kb_path(config);
        const auto bytes = serialize_kb(*result.kb);
        io::write_file_atomic(path, bytes);
        auto name = path.parent_path() == config.out ? path.filename().string() : path.string();
        digests[name] = io::sha256_hex(bytes);
        log::event("refiner", "kb_updated", {{"path", path.string()}, {"intents", std::to_string(result.kb->intents.size())}});
    }
    if (with_manifest) {
        nlohmann::ordered_json manifest;
        manifest["files"] = nlohmann::ordered_json::array();
        for (const auto& [name, digest] : digests) manifest["files"].push_back({{"name", name}, {"sha256", digest}});
        io::write_file_atomic(config.out / kManifestFile, manifest.dump(2) + "\n");
    }
}

std::string describe(const ReuseReport& report) {
    std::string out;
    out += std::string("reuse topology=") + (report.topology_match ? "match" : "changed") + "\n";
    out += std::string("reuse inventory=") + (report.inventory_hit ? "hit" : "miss") + "\n";
    std::vector<std::pair<std::string, bool>> entries;
    for (const auto& id : report.path_hits) entries.emplace_back(id, true);
    for (const auto& id : report.path_misses) entries.emplace_back(id, false);
    std::sort(entries.begin(), entries.end());
    for (const auto& [id, hit] : entries) out += "reuse hsplid=" + id + " paths=" + (hit ? "hit" : "miss") + "\n";
    return out;
}

VerificationReport verify_stage(const Config& config, const VerifyRequest& request) {
    const auto topology = parse_topology(io::read_file(required(config.topology, "topology")));
    const auto artifacts = artifacts_from_json(io::read_file(config.artifacts ? *config.artifacts : config.out / kArtifactsFile));
    const auto catalog = catalog_for(config);
    return verify_deployment(topology, artifacts, catalog, request.flow, request.subject, request.object);
}

}  // namespace polref::pipeline
