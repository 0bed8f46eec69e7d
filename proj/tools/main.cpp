// SPDX-License-Identifier: Apache-2.0
//
// csiauth: synthesize correlated-fading CSI pair datasets, train the
// Siamese similarity models, and evaluate detectors with ROC/AUC reports.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csiauth/dataset.hpp"
#include "csiauth/errors.hpp"
#include "csiauth/eval.hpp"
#include "csiauth/models.hpp"
#include "csiauth/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace csiauth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// ---- config files ----------------------------------------------------------

// Plain key=value lines or a JSON object; keys mirror the pair-generation
// and training configuration fields.
std::map<std::string, std::string> load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open config file '" + path.string() + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::map<std::string, std::string> kv;

    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw DataError("config file '" + path.string() + "': " + e.what());
        }
        for (const auto& [key, value] : doc.items()) {
            kv[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
        return kv;
    }

    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("config file '" + path.string() + "' line " +
                            std::to_string(lineno) + ": expected key=value");
        }
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': bad number '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': bad integer '" + value + "'");
    }
}

std::uint64_t string_digest(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ull;
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char out[19];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(v));
    return out;
}

// ---- manifests -------------------------------------------------------------

struct ManifestBuilder {
    json doc;

    ManifestBuilder(const std::string& command_line, std::uint64_t seed,
                    std::uint64_t config_digest) {
        doc["toolkit_version"] = kToolkitVersion;
        doc["command"] = command_line;
        doc["master_seed"] = seed;
        doc["config_digest"] = hex64(config_digest);
        doc["inputs"] = json::array();
        doc["artifacts"] = json::array();
    }
    void add_input(const fs::path& path, const std::string& kind) {
        doc["inputs"].push_back(
            {{"path", path.string()}, {"kind", kind}, {"digest", hex64(data::file_digest(path))}});
    }
    void add_artifact(const fs::path& path, const std::string& kind) {
        doc["artifacts"].push_back(
            {{"path", path.string()}, {"kind", kind}, {"digest", hex64(data::file_digest(path))}});
    }
    void set(const std::string& key, const json& value) { doc[key] = value; }
    void write(const fs::path& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) {
            throw DataError("cannot write manifest '" + path.string() + "'");
        }
        out << doc.dump(2) << "\n";
    }
};

std::string join_args(int argc, char** argv) {
    std::string joined;
    for (int i = 0; i < argc; ++i) {
        if (i) {
            joined += ' ';
        }
        joined += argv[i];
    }
    return joined;
}

std::vector<chan::TgnModelId> parse_models(const std::vector<std::string>& names) {
    std::vector<chan::TgnModelId> models;
    for (const auto& name : names) {
        models.push_back(chan::parse_tgn_model(name));
    }
    return models;
}

std::string sanitize_tag(std::string tag) {
    for (char& c : tag) {
        if (c == '=') {
            c = '_';
        } else if (c == '.') {
            c = 'p';
        }
    }
    return tag;
}

// ---- shared scoring --------------------------------------------------------

struct DatasetScores {
    std::vector<eval::ScoredSample> samples;
    std::string tag;
};

DatasetScores score_dataset(const data::Dataset& ds, const nn::SiameseWeights* weights) {
    if (ds.pairs.empty()) {
        throw DataError("dataset is empty");
    }
    DatasetScores out;
    out.tag = ds.tag;
    out.samples.resize(ds.pairs.size());
    if (weights) {
        const nn::PairBatch batch = nn::PairBatch::from_dataset(ds, weights->arch.input_len);
        const std::vector<double> scores = nn::score_batch(*weights, batch);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            out.samples[i] = {scores[i], ds.pairs[i].label};
        }
    } else {
        for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
            out.samples[i] = {eval::correlation_score(ds.pairs[i].csi_a, ds.pairs[i].csi_b),
                              ds.pairs[i].label};
        }
    }
    return out;
}

// ---- subcommands -----------------------------------------------------------

struct GenOptions {
    std::string grid;
    std::vector<std::string> axes;
    std::vector<std::string> models;
    std::uint64_t seed = 0;
    int pairs_per_cell = -1;  // -1: per-grid default
    std::string out;
    std::string out_dir;
    std::string config_path;
};

int run_gen(const GenOptions& opt, const std::string& command_line) {
    std::map<std::string, std::string> config;
    std::uint64_t config_digest = 0;
    if (!opt.config_path.empty()) {
        config = load_config(opt.config_path);
        std::string canon;
        for (const auto& [k, v] : config) {
            canon += k + "=" + v + "\n";
        }
        config_digest = string_digest(canon);
    }
    auto config_double = [&](const char* key, double fallback) {
        const auto it = config.find(key);
        return it == config.end() ? fallback : to_double(key, it->second);
    };

    if (opt.grid == "train") {
        if (!opt.axes.empty()) {
            throw UsageError("--axis applies only to --grid test");
        }
        if (opt.out.empty()) {
            throw UsageError("--grid train requires --out");
        }
        data::TrainGridConfig cfg;
        cfg.seed = opt.seed;
        if (opt.pairs_per_cell > 0) {
            cfg.pairs_per_cell = opt.pairs_per_cell;
        }
        if (!opt.models.empty()) {
            cfg.models = parse_models(opt.models);
        }
        cfg.dt_s = config_double("dt_s", cfg.dt_s);
        cfg.v0_mps = config_double("v0", cfg.v0_mps);
        cfg.wavelength_m = config_double("wavelength", cfg.wavelength_m);
        cfg.theta = config_double("theta", cfg.theta);

        const data::Dataset ds = data::generate_training_grid(cfg);
        data::write_dataset(ds, opt.out);
        std::printf("wrote %s: %zu pairs, digest %s\n", opt.out.c_str(), ds.pairs.size(),
                    hex64(data::file_digest(opt.out)).c_str());

        ManifestBuilder manifest(command_line, opt.seed, config_digest);
        manifest.set("grid", "train");
        manifest.set("pairs_per_cell", cfg.pairs_per_cell);
        manifest.add_artifact(opt.out, "dataset");
        manifest.write(opt.out + ".manifest.json");
        return kExitOk;
    }

    if (opt.grid == "test") {
        if (opt.axes.size() != 1) {
            throw UsageError("--grid test requires exactly one --axis (snr, dt or d)");
        }
        if (opt.out_dir.empty()) {
            throw UsageError("--grid test requires --out-dir");
        }
        const data::TestAxis axis = data::parse_test_axis(opt.axes.front());
        data::TestGridConfig cfg;
        cfg.seed = opt.seed;
        if (opt.pairs_per_cell > 0) {
            cfg.pairs_per_cell = opt.pairs_per_cell;
        }
        if (!opt.models.empty()) {
            cfg.models = parse_models(opt.models);
        }
        cfg.snr_db = config_double("snr_db", cfg.snr_db);
        cfg.dt_s = config_double("dt_s", cfg.dt_s);
        cfg.d_bm_wavelengths = config_double("d_bm_wavelengths", cfg.d_bm_wavelengths);
        cfg.v0_mps = config_double("v0", cfg.v0_mps);
        cfg.wavelength_m = config_double("wavelength", cfg.wavelength_m);
        cfg.theta = config_double("theta", cfg.theta);

        fs::create_directories(opt.out_dir);
        const std::vector<data::Dataset> sets = data::generate_test_grid(axis, cfg);
        ManifestBuilder manifest(command_line, opt.seed, config_digest);
        manifest.set("grid", "test");
        manifest.set("axis", data::to_string(axis));
        manifest.set("pairs_per_cell", cfg.pairs_per_cell);
        for (std::size_t i = 0; i < sets.size(); ++i) {
            char name[96];
            std::snprintf(name, sizeof name, "test_%02zu_%s.ds", i,
                          sanitize_tag(sets[i].tag).c_str());
            const fs::path path = fs::path(opt.out_dir) / name;
            data::write_dataset(sets[i], path);
            std::printf("wrote %s: %zu pairs [%s]\n", path.string().c_str(),
                        sets[i].pairs.size(), sets[i].tag.c_str());
            manifest.add_artifact(path, "dataset");
        }
        manifest.write(fs::path(opt.out_dir) / "manifest.json");
        return kExitOk;
    }

    throw UsageError("--grid must be 'train' or 'test'");
}

struct TrainOptions {
    std::string arch = "cnn";
    std::string data_path;
    std::string out;
    std::string trace_path;
    std::string config_path;
    int epochs = 20;
    std::uint64_t seed = 1;
    double learning_rate = 0.001;
    int batch_size = 32;
};

int run_train(const TrainOptions& opt, const std::string& command_line) {
    std::map<std::string, std::string> config;
    std::uint64_t config_digest = 0;
    if (!opt.config_path.empty()) {
        config = load_config(opt.config_path);
        std::string canon;
        for (const auto& [k, v] : config) {
            canon += k + "=" + v + "\n";
        }
        config_digest = string_digest(canon);
    }

    nn::ArchSpec arch;
    if (opt.arch == "cnn") {
        arch = nn::ArchSpec::cnn();
    } else if (opt.arch == "fcn") {
        arch = nn::ArchSpec::fcn();
    } else {
        throw UsageError("--arch must be 'cnn' or 'fcn'");
    }

    nn::TrainConfig cfg;
    cfg.epochs = opt.epochs;
    cfg.seed = opt.seed;
    cfg.learning_rate = opt.learning_rate;
    cfg.batch_size = opt.batch_size;
    if (auto it = config.find("margin_eta"); it != config.end()) {
        cfg.margin_eta = to_double("margin_eta", it->second);
    }
    if (auto it = config.find("rmsprop_decay"); it != config.end()) {
        cfg.rmsprop_decay = to_double("rmsprop_decay", it->second);
    }
    if (auto it = config.find("rmsprop_epsilon"); it != config.end()) {
        cfg.rmsprop_epsilon = to_double("rmsprop_epsilon", it->second);
    }
    if (auto it = config.find("epochs"); it != config.end()) {
        cfg.epochs = static_cast<int>(to_u64("epochs", it->second));
    }

    const data::Dataset ds = data::read_dataset(opt.data_path);
    const nn::TrainResult result = nn::train(ds, arch, cfg);
    nn::write_weights(result.weights, opt.out);
    std::printf("trained %s on %zu pairs, %d epochs; weights digest %s\n", opt.arch.c_str(),
                ds.pairs.size(), cfg.epochs, hex64(data::file_digest(opt.out)).c_str());
    if (!result.epoch_loss.empty()) {
        std::printf("first-epoch loss %.6f, final-epoch loss %.6f\n", result.epoch_loss.front(),
                    result.epoch_loss.back());
    }

    if (!opt.trace_path.empty()) {
        std::ofstream trace(opt.trace_path, std::ios::trunc);
        if (!trace) {
            throw DataError("cannot write '" + opt.trace_path + "'");
        }
        trace << "epoch,mean_loss\n";
        char row[64];
        for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
            std::snprintf(row, sizeof row, "%zu,%.17g\n", e, result.epoch_loss[e]);
            trace << row;
        }
    }

    ManifestBuilder manifest(command_line, opt.seed, config_digest);
    manifest.set("arch", opt.arch);
    manifest.set("epochs", cfg.epochs);
    manifest.add_input(opt.data_path, "dataset");
    manifest.add_artifact(opt.out, "weights");
    if (!opt.trace_path.empty()) {
        manifest.add_artifact(opt.trace_path, "loss_trace");
    }
    manifest.write(opt.out + ".manifest.json");
    return kExitOk;
}

struct EvalOptions {
    std::string weights_path;
    std::string baseline;
    std::string data_path;
    std::string sweep_dir;
    std::string report_path;
    std::optional<double> target_tpr;
    std::optional<double> target_fpr;
};

void print_targets(const EvalOptions& opt, const std::vector<eval::ScoredSample>& samples) {
    if (opt.target_tpr) {
        const auto res = eval::threshold_for_target(
            samples, {eval::ThresholdTarget::Kind::Tpr, *opt.target_tpr});
        std::printf("target tpr=%.4f -> threshold=%.6f (tpr=%.4f fpr=%.4f)\n", *opt.target_tpr,
                    res.threshold, res.achieved_tpr, res.achieved_fpr);
    }
    if (opt.target_fpr) {
        const auto res = eval::threshold_for_target(
            samples, {eval::ThresholdTarget::Kind::Fpr, *opt.target_fpr});
        std::printf("target fpr=%.4f -> threshold=%.6f (tpr=%.4f fpr=%.4f)\n", *opt.target_fpr,
                    res.threshold, res.achieved_tpr, res.achieved_fpr);
    }
}

int run_eval(const EvalOptions& opt, const std::string& command_line) {
    const bool has_weights = !opt.weights_path.empty();
    const bool has_baseline = !opt.baseline.empty();
    if (has_weights == has_baseline) {
        throw UsageError("exactly one of --model or --baseline is required");
    }
    if (has_baseline && opt.baseline != "correlation") {
        throw UsageError("the only supported baseline is 'correlation'");
    }
    if (opt.data_path.empty() == opt.sweep_dir.empty()) {
        throw UsageError("exactly one of --data or --sweep is required");
    }

    std::optional<nn::SiameseWeights> weights;
    if (has_weights) {
        weights = nn::read_weights(opt.weights_path);
    }
    const nn::SiameseWeights* weights_ptr = weights ? &*weights : nullptr;
    const std::string detector = has_weights ? "siamese" : "correlation";

    ManifestBuilder manifest(command_line, 0, 0);
    manifest.set("detector", detector);
    if (has_weights) {
        manifest.add_input(opt.weights_path, "weights");
    }

    if (!opt.data_path.empty()) {
        const data::Dataset ds = data::read_dataset(opt.data_path);
        const DatasetScores scored = score_dataset(ds, weights_ptr);
        const eval::RocCurve curve = eval::roc_curve(scored.samples);
        std::printf("%s tag=%s detector=%s auc=%.6f positives=%zu negatives=%zu\n",
                    opt.data_path.c_str(), scored.tag.c_str(), detector.c_str(),
                    eval::auc(curve), curve.positives, curve.negatives);
        print_targets(opt, scored.samples);
        manifest.add_input(opt.data_path, "dataset");
        if (!opt.report_path.empty()) {
            eval::write_roc_csv(curve, opt.report_path);
            manifest.add_artifact(opt.report_path, "roc_csv");
            manifest.write(opt.report_path + ".manifest.json");
        }
        return kExitOk;
    }

    // Sweep: one summary row per dataset file in the directory.
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(opt.sweep_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ds") {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw DataError("no .ds files in '" + opt.sweep_dir + "'");
    }
    std::sort(files.begin(), files.end());

    std::string report = "file,tag,detector,auc,positives,negatives\n";
    for (const fs::path& file : files) {
        const data::Dataset ds = data::read_dataset(file);
        const DatasetScores scored = score_dataset(ds, weights_ptr);
        const eval::RocCurve curve = eval::roc_curve(scored.samples);
        const double area = eval::auc(curve);
        std::printf("%s tag=%s detector=%s auc=%.6f positives=%zu negatives=%zu\n",
                    file.string().c_str(), scored.tag.c_str(), detector.c_str(), area,
                    curve.positives, curve.negatives);
        char row[256];
        std::snprintf(row, sizeof row, "%s,%s,%s,%.6f,%zu,%zu\n",
                      file.filename().string().c_str(), scored.tag.c_str(), detector.c_str(),
                      area, curve.positives, curve.negatives);
        report += row;
        manifest.add_input(file, "dataset");
    }
    if (!opt.report_path.empty()) {
        std::ofstream out(opt.report_path, std::ios::trunc);
        if (!out) {
            throw DataError("cannot write '" + opt.report_path + "'");
        }
        out << report;
        manifest.add_artifact(opt.report_path, "sweep_csv");
        manifest.write(opt.report_path + ".manifest.json");
    }
    return kExitOk;
}

struct IngestOptions {
    std::string format = "esp32-csv";
    std::string in_path;
    std::string mac;
    std::string out;
    int delta_k_same = 1;
    int delta_k_diff = 100;
};

int run_ingest(const IngestOptions& opt, const std::string& command_line) {
    if (opt.format != "esp32-csv") {
        throw UsageError("unsupported --format '" + opt.format + "' (expected esp32-csv)");
    }
    data::IngestReport report;
    std::vector<data::RawCsiRecord> records = data::ingest_raw_csv(opt.in_path, &report);
    if (report.empty_input) {
        std::fprintf(stderr, "warning: '%s' has no data rows\n", opt.in_path.c_str());
    }
    if (report.malformed_rows > 0) {
        std::fprintf(stderr, "warning: %zu of %zu rows malformed; first bad lines:",
                     report.malformed_rows, report.total_rows);
        for (std::size_t n : report.bad_line_numbers) {
            std::fprintf(stderr, " %zu", n);
        }
        std::fprintf(stderr, "\n");
    }

    if (!opt.mac.empty()) {
        const auto wanted = data::parse_mac(opt.mac);
        std::erase_if(records, [&](const data::RawCsiRecord& r) { return r.mac != wanted; });
        if (records.empty()) {
            throw DataError("no records with MAC " + opt.mac + " in '" + opt.in_path + "'");
        }
    } else {
        for (const auto& rec : records) {
            if (rec.mac != records.front().mac) {
                throw DataError("'" + opt.in_path +
                                "' contains multiple transmitters; pick one with --mac (saw " +
                                data::format_mac(records.front().mac) + " and " +
                                data::format_mac(rec.mac) + ")");
            }
        }
    }

    std::string warning;
    const data::Dataset ds =
        data::build_experimental_pairs(records, opt.delta_k_same, opt.delta_k_diff, &warning);
    if (!warning.empty()) {
        std::fprintf(stderr, "warning: %s\n", warning.c_str());
    }
    data::write_dataset(ds, opt.out);
    std::printf("ingested %zu records -> %zu pairs (%zu same, %zu rogue); digest %s\n",
                records.size(), ds.pairs.size(), ds.count_label(0), ds.count_label(1),
                hex64(data::file_digest(opt.out)).c_str());

    ManifestBuilder manifest(command_line, 0, 0);
    manifest.set("delta_k_same", opt.delta_k_same);
    manifest.set("delta_k_diff", opt.delta_k_diff);
    manifest.set("records", records.size());
    manifest.add_input(opt.in_path, "raw_csv");
    manifest.add_artifact(opt.out, "dataset");
    manifest.write(opt.out + ".manifest.json");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSI-pair physical-layer authentication toolkit"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("--workers", workers, "worker threads (0 = library default)");

    GenOptions gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "generate synthetic datasets");
    cmd_gen->add_option("--grid", gen.grid, "train or test")->required();
    cmd_gen->add_option("--axis", gen.axes, "swept axis for test grids: snr, dt or d");
    cmd_gen->add_option("--model", gen.models, "restrict TGn models (repeatable, B..F)");
    cmd_gen->add_option("--seed", gen.seed, "master seed");
    cmd_gen->add_option("--pairs-per-cell", gen.pairs_per_cell, "pairs per label per cell");
    cmd_gen->add_option("--out", gen.out, "output dataset file (train grid)");
    cmd_gen->add_option("--out-dir", gen.out_dir, "output directory (test grids)");
    cmd_gen->add_option("--config", gen.config_path, "key=value or JSON config file");

    TrainOptions train;
    CLI::App* cmd_train = app.add_subcommand("train", "train a Siamese model");
    cmd_train->add_option("--arch", train.arch, "cnn or fcn");
    cmd_train->add_option("--data", train.data_path, "training dataset")->required();
    cmd_train->add_option("--epochs", train.epochs, "training epochs");
    cmd_train->add_option("--seed", train.seed, "training seed");
    cmd_train->add_option("--lr", train.learning_rate, "learning rate");
    cmd_train->add_option("--batch", train.batch_size, "batch size");
    cmd_train->add_option("--out", train.out, "output weights file")->required();
    cmd_train->add_option("--trace", train.trace_path, "per-epoch loss CSV");
    cmd_train->add_option("--config", train.config_path, "key=value or JSON config file");

    EvalOptions eval_opt;
    CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a detector on datasets");
    cmd_eval->add_option("--model", eval_opt.weights_path, "weights file");
    cmd_eval->add_option("--baseline", eval_opt.baseline, "baseline detector: correlation");
    cmd_eval->add_option("--data", eval_opt.data_path, "one dataset file");
    cmd_eval->add_option("--sweep", eval_opt.sweep_dir, "directory of dataset files");
    cmd_eval->add_option("--report", eval_opt.report_path, "CSV report path");
    double tgt_tpr = 0.0, tgt_fpr = 0.0;
    CLI::Option* opt_tpr =
        cmd_eval->add_option("--target-tpr", tgt_tpr, "report threshold for a TPR target");
    CLI::Option* opt_fpr =
        cmd_eval->add_option("--target-fpr", tgt_fpr, "report threshold for an FPR target");

    IngestOptions ingest;
    CLI::App* cmd_ingest = app.add_subcommand("ingest", "build a dataset from captured CSI");
    cmd_ingest->add_option("--format", ingest.format, "input format (esp32-csv)");
    cmd_ingest->add_option("--in", ingest.in_path, "raw capture CSV")->required();
    cmd_ingest->add_option("--mac", ingest.mac, "transmitter MAC to select");
    cmd_ingest->add_option("--out", ingest.out, "output dataset file")->required();
    cmd_ingest->add_option("--delta-k-same", ingest.delta_k_same, "packet offset for V=0");
    cmd_ingest->add_option("--delta-k-diff", ingest.delta_k_diff, "packet offset for V=1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

#ifdef _OPENMP
    if (workers > 0) {
        omp_set_num_threads(workers);
    }
#endif
    if (opt_tpr->count() > 0) {
        eval_opt.target_tpr = tgt_tpr;
    }
    if (opt_fpr->count() > 0) {
        eval_opt.target_fpr = tgt_fpr;
    }

    const std::string command_line = join_args(argc, argv);
    try {
        if (cmd_gen->parsed()) {
            return run_gen(gen, command_line);
        }
        if (cmd_train->parsed()) {
            return run_train(train, command_line);
        }
        if (cmd_eval->parsed()) {
            return run_eval(eval_opt, command_line);
        }
        if (cmd_ingest->parsed()) {
            return run_ingest(ingest, command_line);
        }
        throw UsageError("no subcommand");
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
