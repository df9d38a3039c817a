#include "mfgnet/mfgnet.h"

#include <new>
#include <string>

#include "mfgnet/log.hpp"
#include "mfgnet/run.hpp"

struct mfgnet_network {
    std::shared_ptr<const mfgnet::MetricNetwork> net;
    std::string path;
    std::string source;
};

struct mfgnet_config {
    mfgnet::RunConfig cfg;
    std::string path;
    std::string source;
};

struct mfgnet_report {
    bool passed = false;
    std::string text;
    std::string json;
};

namespace {

thread_local std::string last_error;

mfgnet_status code_of(mfgnet::ErrorCode c) {
    using mfgnet::ErrorCode;
    switch (c) {
        case ErrorCode::invalid_argument: return MFGNET_INVALID_ARGUMENT;
        case ErrorCode::parse: return MFGNET_PARSE;
        case ErrorCode::validation: return MFGNET_VALIDATION;
        case ErrorCode::solve: return MFGNET_SOLVE;
        case ErrorCode::io: return MFGNET_IO;
        case ErrorCode::not_converged: return MFGNET_NOT_CONVERGED;
    }
    return MFGNET_INTERNAL;
}

template <class F>
mfgnet_status guarded(F&& f) {
    last_error.clear();
    try {
        return f();
    } catch (const mfgnet::Error& e) {
        last_error = e.what();
        return code_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return MFGNET_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return MFGNET_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return MFGNET_INTERNAL;
    }
}

mfgnet_status missing(const char* what) {
    last_error = std::string(what) + " is NULL";
    return MFGNET_INVALID_ARGUMENT;
}

mfgnet_status make_network(std::string source, std::string path, mfgnet_network** out) {
    auto* h = new mfgnet_network;
    try {
        h->net = std::make_shared<const mfgnet::MetricNetwork>(mfgnet::parse_network_text(source));
    } catch (...) {
        delete h;
        throw;
    }
    h->path = std::move(path);
    h->source = std::move(source);
    *out = h;
    return MFGNET_OK;
}

mfgnet_status make_config(std::string source, std::string path, mfgnet_config** out) {
    auto* h = new mfgnet_config;
    try {
        h->cfg = mfgnet::parse_config_text(source);
    } catch (...) {
        delete h;
        throw;
    }
    h->path = std::move(path);
    h->source = std::move(source);
    *out = h;
    return MFGNET_OK;
}

}  // namespace

extern "C" {

const char* mfgnet_version(void) { return mfgnet::library_version(); }

const char* mfgnet_status_name(mfgnet_status s) {
    switch (s) {
        case MFGNET_OK: return "ok";
        case MFGNET_INVALID_ARGUMENT: return "invalid argument";
        case MFGNET_PARSE: return "parse error";
        case MFGNET_VALIDATION: return "validation failed";
        case MFGNET_SOLVE: return "solve failed";
        case MFGNET_IO: return "i/o error";
        case MFGNET_NOT_CONVERGED: return "not converged";
        case MFGNET_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* mfgnet_last_error(void) { return last_error.c_str(); }

void mfgnet_set_log_level(int level) {
    if (level < 0) level = 0;
    if (level > 3) level = 3;
    mfgnet::set_log_level(static_cast<mfgnet::LogLevel>(level));
}

mfgnet_status mfgnet_network_load(const char* path, mfgnet_network** out) {
    if (!path) return missing("path");
    if (!out) return missing("out");
    *out = nullptr;
    return guarded([&] { return make_network(mfgnet::read_file(path), path, out); });
}

mfgnet_status mfgnet_network_parse(const char* json, mfgnet_network** out) {
    if (!json) return missing("json");
    if (!out) return missing("out");
    *out = nullptr;
    return guarded([&] { return make_network(json, "", out); });
}

void mfgnet_network_free(mfgnet_network* net) { delete net; }

int mfgnet_network_vertex_count(const mfgnet_network* net) { return net ? net->net->vertex_count() : -1; }

int mfgnet_network_edge_count(const mfgnet_network* net) { return net ? net->net->edge_count() : -1; }

mfgnet_status mfgnet_network_validate(const mfgnet_network* net) {
    if (!net) return missing("net");
    return guarded([&] {
        const mfgnet::ValidationReport r = mfgnet::validate(*net->net);
        if (r.ok()) return MFGNET_OK;
        std::string msg;
        for (const auto& v : r.violations) msg += (msg.empty() ? "" : "; ") + v;
        last_error = msg;
        return MFGNET_VALIDATION;
    });
}

mfgnet_status mfgnet_network_normalize(const mfgnet_network* net, mfgnet_network** out) {
    if (!net) return missing("net");
    if (!out) return missing("out");
    *out = nullptr;
    return guarded([&] {
        auto norm = mfgnet::normalize_orientation(*net->net);
        auto* h = new mfgnet_network;
        h->net = std::make_shared<const mfgnet::MetricNetwork>(std::move(norm.network));
        h->source = mfgnet::network_to_json(*h->net).dump();
        *out = h;
        return MFGNET_OK;
    });
}

mfgnet_status mfgnet_config_load(const char* path, mfgnet_config** out) {
    if (!path) return missing("path");
    if (!out) return missing("out");
    *out = nullptr;
    return guarded([&] { return make_config(mfgnet::read_file(path), path, out); });
}

mfgnet_status mfgnet_config_parse(const char* json, mfgnet_config** out) {
    if (!json) return missing("json");
    if (!out) return missing("out");
    *out = nullptr;
    return guarded([&] { return make_config(json, "", out); });
}

void mfgnet_config_free(mfgnet_config* cfg) { delete cfg; }

mfgnet_status mfgnet_run(const char* command, const mfgnet_network* net, const mfgnet_config* cfg,
                         const mfgnet_run_options* opts, mfgnet_report** out) {
    if (!command) return missing("command");
    if (!net) return missing("net");
    if (!out) return missing("out");
    *out = nullptr;
    return guarded([&] {
        mfgnet::RunInputs in;
        in.command = command;
        in.network = net->net;
        in.network_path = net->path;
        in.network_source = net->source;
        if (cfg) {
            in.config = cfg->cfg;
            in.config_path = cfg->path;
            in.config_source = cfg->source;
        }
        if (opts) {
            if (opts->out_dir) in.out_dir = opts->out_dir;
            if (opts->has_seed) in.seed = opts->seed;
            if (opts->has_threads) in.threads = opts->threads;
            if (opts->has_k) in.k = opts->k;
        }
        const mfgnet::RunReport r = mfgnet::run(in);
        auto* h = new mfgnet_report;
        h->passed = r.passed;
        h->text = r.text;
        mfgnet::Json j = {{"command", r.command}, {"passed", r.passed}, {"summary", r.summary}, {"files", r.files}};
        h->json = j.dump(2);
        *out = h;
        if (r.passed) return MFGNET_OK;
        const mfgnet_status s = code_of(r.failure.value_or(mfgnet::ErrorCode::validation));
        last_error = r.command + " did not pass";
        return s;
    });
}

int mfgnet_report_passed(const mfgnet_report* report) { return report && report->passed ? 1 : 0; }

const char* mfgnet_report_text(const mfgnet_report* report) { return report ? report->text.c_str() : ""; }

const char* mfgnet_report_json(const mfgnet_report* report) { return report ? report->json.c_str() : ""; }

void mfgnet_report_free(mfgnet_report* report) { delete report; }

}  // extern "C"
