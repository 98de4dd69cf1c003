#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "seqeff/cli.hpp"

using namespace seqeff::cli;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential effects for delimited continuations: check, expand, run, audit, derive, laws"};
    app.require_subcommand(1);

    Config cfg;
    std::string alphabet, labels, format = "text", file;
    std::vector<std::string> binds, assumes;

    auto common = [&](CLI::App* sub, bool takes_file) {
        sub->add_option("--quantale", cfg.quantale, "Underlying effect quantale")
            ->check(CLI::IsMember({"trace", "labels"}));
        sub->add_option("--alphabet", alphabet, "Comma-separated event symbols (trace quantale)");
        sub->add_option("--labels", labels, "Comma-separated label universe (labels quantale)");
        sub->add_option("--fuel", cfg.fuel, "Step budget for run and audit")->capture_default_str();
        sub->add_option("--iter-bound", cfg.iter_bound, "Unrolling bound for the iteration audit")
            ->capture_default_str();
        sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--bind", binds, "Free variable binding NAME=VALUE, e.g. c=true")
            ->allow_extra_args(false);
        sub->add_option("--assume", assumes, "Free variable type NAME=TYPE, e.g. k=(cont t unit {| | h} unit)")
            ->allow_extra_args(false);
        if (takes_file) sub->add_option("file", file, "Source file, or - for standard input");
    };

    auto* check = app.add_subcommand("check", "Expand and infer the type and effect of a program");
    auto* expand = app.add_subcommand("expand", "Print the macro-free expansion");
    auto* run = app.add_subcommand("run", "Evaluate and print the event trace");
    auto* audit = app.add_subcommand("audit", "Run with per-step effect re-checking");
    auto* derive = app.add_subcommand("derive", "Compare a derived rule against inference on the expansion");
    auto* laws = app.add_subcommand("laws", "Property-test the algebraic laws");
    for (auto* sub : {check, expand, run, audit, derive}) common(sub, true);
    common(laws, false);
    audit->add_flag("--manifest", cfg.manifest, "The file lists program paths, one per line");
    audit->add_option("--fuzz", cfg.fuzz, "Audit this many generated programs instead of a file");
    audit->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
    audit->add_option("--write-corpus", cfg.write_corpus, "Also write the generated programs and a manifest here");
    audit->add_option("--threads", cfg.threads, "Worker threads (0: one per core)");
    laws->add_option("--samples", cfg.samples, "Random samples for the quantale laws")->capture_default_str();
    laws->add_option("--ce-samples", cfg.ce_samples, "Random triples for the continuation-effect laws")
        ->capture_default_str();
    laws->add_option("--iter-samples", cfg.iter_samples, "Effects for the iteration audit")->capture_default_str();
    laws->add_option("--seed", cfg.seed, "Sampling seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    cfg.json = format == "json";
    cfg.alphabet = split_list(alphabet);
    cfg.labels = split_list(labels);
    for (auto [list, into, flag] : {std::tuple{&binds, &cfg.binds, "--bind"}, std::tuple{&assumes, &cfg.assumes, "--assume"}})
        for (auto& b : *list) {
            auto eq = b.find('=');
            if (eq == std::string::npos || eq == 0) {
                std::cerr << flag << " expects NAME=VALUE, got " << b << "\n";
                return kUsage;
            }
            (*into)[b.substr(0, eq)] = b.substr(eq + 1);
        }

    if (laws->parsed()) return cmd_laws(cfg, std::cout);

    std::string source, base = ".";
    bool need_file = !(audit->parsed() && cfg.fuzz > 0);
    if (need_file) {
        std::ostringstream ss;
        if (file.empty() || file == "-") {
            ss << std::cin.rdbuf();
        } else {
            std::ifstream in(file, std::ios::binary);
            if (!in) {
                std::cerr << "cannot read " << file << "\n";
                return kUsage;
            }
            ss << in.rdbuf();
            base = std::filesystem::path(file).parent_path().string();
            if (base.empty()) base = ".";
        }
        source = ss.str();
    }

    if (check->parsed()) return cmd_check(source, cfg, std::cout);
    if (expand->parsed()) return cmd_expand(source, cfg, std::cout);
    if (run->parsed()) return cmd_run(source, cfg, std::cout);
    if (audit->parsed()) return cmd_audit(source, cfg, std::cout, base);
    return cmd_derive(source, cfg, std::cout);
}
