// Copyright 2026 The cabench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// cabench: command-line front end. One subcommand per experiment kind, each
// reading a JSON configuration and writing result.json plus CSVs.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cabench/config.hpp"
#include "cabench/experiments.hpp"
#include "cabench/parallel.hpp"
#include "cabench/runner.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfigInvalid = 2, kResource = 3, kUsage = 64 };

struct Overrides {
    std::string config;
    std::string device;
    uint64_t seed = 0;
    std::string out;
    unsigned threads = 0;
    std::string backend;
};

cabench::json build_document(const std::string &kind, const Overrides &o, std::filesystem::path &base) {
    using namespace cabench;
    json doc;
    if (!o.config.empty()) {
        doc = parse_document(read_text_file(o.config), o.config);
        base = std::filesystem::path(o.config).parent_path();
        if (!doc.is_object()) throw ConfigError(o.config, "top level must be an object");
    } else {
        doc = json::object();
        doc["schema_version"] = kSchemaVersion;
    }
    if (auto it = doc.find("kind"); it != doc.end() && *it != kind)
        throw ConfigError("kind", "config is for '" + it->dump() + "' but the subcommand is '" + kind + "'");
    doc["kind"] = kind;
    if (!o.device.empty()) doc["device"] = std::filesystem::absolute(o.device).string();
    return doc;
}

int run(const std::string &kind, const Overrides &o, const CLI::App &sub) {
    using namespace cabench;
    std::filesystem::path base;
    auto doc = build_document(kind, o, base);
    auto cfg = config_from_json(doc, base);
    if (sub.count("--seed")) cfg.seed = o.seed;
    if (sub.count("--out")) cfg.output = o.out;
    if (sub.count("--threads")) cfg.cab.threads = o.threads;
    if (sub.count("--backend")) cfg.cab.backend = backend_from_string(o.backend, "--backend");
    cfg.validate();
    auto art = run_experiment(cfg);
    write_artifacts(art, cfg.output);
    std::cout << "wrote " << art.files.size() + 1 << " files to " << cfg.output << "\n";
    return kOk;
}

int export_device(const std::string &name) {
    using namespace cabench;
    DeviceModel d;
    if (name == "4q")
        d = example_device_4q();
    else if (name == "6q")
        d = example_device_6q();
    else if (name == "ring44")
        d = example_ring_44q();
    else
        throw ConfigError("device", "unknown example '" + name + "' (4q, 6q, ring44)");
    std::cout << device_to_json(d).dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Character-average benchmarking on a simulated noisy device"};
    app.require_subcommand(1);
    Overrides o;
    o.threads = cabench::default_threads();
    std::string example;

    std::vector<std::pair<CLI::App *, std::string>> subs;
    for (const auto &[name, kind] : cabench::kExperimentKinds) {
        auto *sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
        sub->add_option("--config,-c", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
        sub->add_option("--device", o.device, "JSON device file (overrides the config's device)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Master seed");
        sub->add_option("--out,-o", o.out, "Output directory");
        sub->add_option("--threads,-j", o.threads, "Worker threads (default $CABENCH_THREADS or 1)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--backend", o.backend, "Simulator backend")->check(CLI::IsMember({"dm", "stab"}));
        subs.emplace_back(sub, name);
    }
    auto *exp = app.add_subcommand("export-device", "Print a built-in example device as JSON");
    exp->add_option("name", example, "4q, 6q or ring44")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (exp->parsed()) return export_device(example);
        for (auto &[sub, name] : subs)
            if (sub->parsed()) return run(name, o, *sub);
    } catch (const cabench::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigInvalid;
    } catch (const cabench::ResourceError &e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResource;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
