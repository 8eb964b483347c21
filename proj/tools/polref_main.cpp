// polref: refine security intents and threat indicators into deployable filtering rules.

#include "polref/common.hpp"
#include "polref/io.hpp"
#include "polref/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using polref::pipeline::Config;

constexpr int kExitInternal = 1;
constexpr int kExitBypass = 3;

std::string exit_code_table() {
    std::string out = "Exit codes:\n  0  success\n  1  internal error\n  2  usage error\n"
                      "  3  verify: flow not blocked on every path\n";
    for (int i = 0; i <= static_cast<int>(polref::Errc::ConfigError); ++i) {
        auto code = static_cast<polref::Errc>(i);
        out += "  " + std::to_string(polref::exit_code(code)) + " " + std::string(polref::errc_name(code)) + "\n";
    }
    return out;
}

struct Flags {
    std::string out = ".";
    std::string cti, hspl, topology, knowledge, catalog, kb, artifacts;
    std::vector<std::string> mspl;
    bool no_kb = false;
    bool strict_schema = false;
    bool greedy = false;

    Config config() const {
        Config c;
        c.out = out;
        auto opt = [](const std::string& s) -> std::optional<std::filesystem::path> {
            if (s.empty()) return std::nullopt;
            return std::filesystem::path(s);
        };
        c.cti = opt(cti);
        c.hspl = opt(hspl);
        c.topology = opt(topology);
        c.knowledge = opt(knowledge);
        c.catalog = opt(catalog);
        c.kb = opt(kb);
        c.artifacts = opt(artifacts);
        for (const auto& m : mspl) c.mspl.emplace_back(m);
        c.use_kb = !no_kb;
        c.strict_schema = strict_schema;
        c.greedy = greedy;
        return c;
    }
};

void add_shared(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--out", flags.out, "Output directory")->capture_default_str();
    cmd->add_option("--topology", flags.topology, "Topology document (YAML)");
    cmd->add_option("--hspl", flags.hspl, "HSPL intents (XML)");
    cmd->add_option("--cti", flags.cti, "CTI report (plain text)");
    cmd->add_option("--knowledge", flags.knowledge, "Knowledge envelope (JSON)");
    cmd->add_option("--catalog", flags.catalog, "Control catalog (JSON); built-in catalog when omitted");
    cmd->add_option("--kb", flags.kb, "Knowledge base file; default <out>/kb.json");
    cmd->add_flag("--no-kb", flags.no_kb, "Neither read nor update the knowledge base");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Refine security intents and threat indicators into per-device filtering rules"};
    app.footer(exit_code_table());
    app.require_subcommand(1);

    Flags flags;
    std::string subject, object, src, dst, host;

    auto* extract = app.add_subcommand("extract", "Extract indicators from a CTI report into knowledge.json");
    add_shared(extract, flags);
    extract->add_flag("--strict-schema", flags.strict_schema, "Fail instead of extending the entity template");

    auto* refine = app.add_subcommand("refine", "Select enforcement devices and write artifacts.json");
    add_shared(refine, flags);
    refine->add_flag("--greedy", flags.greedy, "Greedy device selection (not guaranteed minimal)");

    auto* convert = app.add_subcommand("convert", "Build one MSPL policy per device from artifacts.json");
    add_shared(convert, flags);
    convert->add_option("--artifacts", flags.artifacts, "Artifacts file; default <out>/artifacts.json");

    auto* translate = app.add_subcommand("translate", "Render MSPL policies into native rules");
    add_shared(translate, flags);
    translate->add_option("--mspl", flags.mspl, "MSPL files; default every *.mspl.xml in <out>");

    auto* verify = app.add_subcommand("verify", "Check that a flow is blocked on every path");
    add_shared(verify, flags);
    verify->add_option("--artifacts", flags.artifacts, "Artifacts file; default <out>/artifacts.json");
    verify->add_option("--subject", subject, "Subject endpoint")->required();
    verify->add_option("--object", object, "Object endpoint")->required();
    verify->add_option("--src", src, "Flow source IPv4")->required();
    verify->add_option("--dst", dst, "Flow destination IPv4")->required();
    verify->add_option("--host", host, "HTTP Host of the flow");

    auto* run = app.add_subcommand("run", "Run extract, refine, convert and translate end to end");
    add_shared(run, flags);
    run->add_flag("--strict-schema", flags.strict_schema, "Fail instead of extending the entity template");
    run->add_flag("--greedy", flags.greedy, "Greedy device selection (not guaranteed minimal)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const Config config = flags.config();
        std::optional<polref::io::FileLock> kb_lock;
        bool touches_kb = (refine->parsed() || run->parsed()) && config.use_kb;
        if (touches_kb) {
            const auto kb = std::filesystem::absolute(polref::pipeline::kb_path(config));
            std::filesystem::create_directories(kb.parent_path());
            kb_lock.emplace(kb);
        }

        if (extract->parsed()) {
            polref::pipeline::commit(config, polref::pipeline::extract_stage(config), false);
        } else if (refine->parsed()) {
            auto result = polref::pipeline::refine_stage(config);
            polref::pipeline::commit(config, result, false);
            if (result.reuse) std::cout << polref::pipeline::describe(*result.reuse);
        } else if (convert->parsed()) {
            polref::pipeline::commit(config, polref::pipeline::convert_stage(config), false);
        } else if (translate->parsed()) {
            polref::pipeline::commit(config, polref::pipeline::translate_stage(config), false);
        } else if (verify->parsed()) {
            auto src_ip = polref::Ipv4Address::parse(src);
            auto dst_ip = polref::Ipv4Address::parse(dst);
            if (!src_ip || !dst_ip) throw polref::Error(polref::Errc::ValidationError, "--src/--dst must be IPv4 addresses");
            polref::pipeline::VerifyRequest request{subject, object, {*src_ip, *dst_ip, std::nullopt}};
            if (!host.empty()) request.flow.l7_host = host;
            auto report = polref::pipeline::verify_stage(config, request);
            std::cout << report.text();
            return report.fully_blocked ? 0 : kExitBypass;
        } else if (run->parsed()) {
            auto result = polref::pipeline::run_all(config);
            polref::pipeline::commit(config, result, true);
            if (result.reuse) std::cout << polref::pipeline::describe(*result.reuse);
        }
    } catch (const polref::Error& e) {
        std::cerr << "polref: error=" << polref::errc_name(e.code()) << " " << e.what() << "\n";
        return polref::exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "polref: error=Internal " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
