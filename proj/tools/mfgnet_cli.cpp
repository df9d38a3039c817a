#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "mfgnet/mfgnet.h"

namespace {

struct Args {
    std::string net;
    std::string config;
    std::string out;
    uint64_t seed = 0;
    int threads = 1;
    int k = 0;
    int verbose = 0;
    bool json = false;
};

int report_error(mfgnet_status s) {
    std::fprintf(stderr, "error (%s): %s\n", mfgnet_status_name(s), mfgnet_last_error());
    return static_cast<int>(s);
}

int execute(const std::string& command, const Args& a, const CLI::App& sub) {
    if (a.verbose > 0) mfgnet_set_log_level(a.verbose > 1 ? 3 : 2);

    mfgnet_network* net = nullptr;
    mfgnet_status s = mfgnet_network_load(a.net.c_str(), &net);
    if (s != MFGNET_OK) return report_error(s);

    mfgnet_config* cfg = nullptr;
    if (!a.config.empty()) {
        s = mfgnet_config_load(a.config.c_str(), &cfg);
        if (s != MFGNET_OK) {
            mfgnet_network_free(net);
            return report_error(s);
        }
    }

    mfgnet_run_options opts{};
    opts.out_dir = a.out.empty() ? nullptr : a.out.c_str();
    if (sub.count("--seed")) {
        opts.has_seed = 1;
        opts.seed = a.seed;
    }
    if (sub.count("--threads")) {
        opts.has_threads = 1;
        opts.threads = a.threads;
    }
    if (sub.count("--k")) {
        opts.has_k = 1;
        opts.k = a.k;
    }

    mfgnet_report* report = nullptr;
    s = mfgnet_run(command.c_str(), net, cfg, &opts, &report);
    if (report) {
        std::fputs(a.json ? mfgnet_report_json(report) : mfgnet_report_text(report), stdout);
        if (a.json) std::fputc('\n', stdout);
    }
    mfgnet_report_free(report);
    mfgnet_config_free(cfg);
    mfgnet_network_free(net);
    if (s != MFGNET_OK) return report_error(s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean field games on metric networks"};
    app.set_version_flag("--version", std::string(mfgnet_version()));
    app.require_subcommand(1);

    Args args;
    const std::pair<const char*, const char*> commands[] = {
        {"validate", "check a network file and list its vertices and edges"},
        {"solve-fp", "solve the Fokker-Planck equation with the configured drift"},
        {"solve-hjb", "solve the Hamilton-Jacobi-Bellman equation"},
        {"solve-mfg", "solve the coupled system by damped Picard iteration"},
        {"eig", "smallest eigenpairs of the weighted network Laplacian"},
        {"simulate", "Monte Carlo paths of the diffusion, compared with the FP solution"},
        {"check", "run the invariant suite on a configuration"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--net", args.net, "network JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--config", args.config, "run configuration JSON file")->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "output directory for CSV files and the manifest");
        sub->add_option("--seed", args.seed, "random seed (simulate)");
        sub->add_option("--threads", args.threads, "worker threads (simulate)")->check(CLI::PositiveNumber);
        sub->add_option("--k", args.k, "number of eigenpairs (eig)")->check(CLI::PositiveNumber);
        sub->add_flag("-v,--verbose", args.verbose, "more log output on stderr (repeat for debug)");
        sub->add_flag("--json", args.json, "print the report as JSON");
    }

    CLI11_PARSE(app, argc, argv);
    for (CLI::App* sub : app.get_subcommands()) return execute(sub->get_name(), args, *sub);
    return 1;
}
