#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqeff/interpreter.hpp"

namespace seqeff::cli {

using nlohmann::json;

// Exit codes. Stable; documented in the README.
enum Exit : int {
    kOk = 0,
    kTypeError = 1,   // type or effect error, stuck run, failed audit, law or derivation
    kParseError = 2,  // source, type or effect syntax
    kUsage = 3,       // bad flags or unreadable input
};

struct Config {
    std::string quantale = "trace";
    std::vector<std::string> alphabet;  // trace quantale
    std::vector<std::string> labels;    // label-set quantale
    size_t fuel = 10000;
    int iter_bound = 16;
    bool json = false;
    std::map<std::string, std::string> binds;    // free variable -> literal source
    std::map<std::string, std::string> assumes;  // free variable -> type source, for checking only

    // audit
    bool manifest = false;
    size_t fuzz = 0;
    uint32_t seed = 7;
    std::string write_corpus;
    unsigned threads = 0;  // 0: hardware concurrency

    // laws
    int samples = 500;
    int ce_samples = 300;
    int iter_samples = 100;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws UsageError when the alphabet/labels flags do not fit the quantale name.
quantale::QuantaleP make_quantale(const Config& cfg);

// Effects as JSON. Field names follow the textual grammar: P, C and U, with U a
// string in the quantale's syntax or null for _|_.
json effect_json(const ce::CE& x);
ce::CE effect_from_json(const json& j, const quantale::Quantale& q);

// Each command writes its report to out and returns an exit code. `source` is the
// program text; commands without input ignore it.
int cmd_check(const std::string& source, const Config& cfg, std::ostream& out);
int cmd_expand(const std::string& source, const Config& cfg, std::ostream& out);
int cmd_run(const std::string& source, const Config& cfg, std::ostream& out);
// With cfg.manifest, source lists program paths (one per line, relative to base).
// With cfg.fuzz > 0, source is ignored and a generated corpus is audited.
int cmd_audit(const std::string& source, const Config& cfg, std::ostream& out, const std::string& base = ".");
int cmd_derive(const std::string& source, const Config& cfg, std::ostream& out);
int cmd_laws(const Config& cfg, std::ostream& out);

}  // namespace seqeff::cli
