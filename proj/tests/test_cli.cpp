// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "csiauth/dataset.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "cli_output.log";
    const std::string command = std::string(CSIAUTH_CLI_PATH) + " " + args + " > " +
                                log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("csiauth_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string csi_ints() {
    std::string out;
    for (int sc = 0; sc < 64; ++sc) {
        out += "3 -7";
        if (sc != 63) {
            out += " ";
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen/train/eval round trip with stable digests") {
    TempDir tmp;
    const std::string ds = (tmp.path / "train.ds").string();
    const std::string ds2 = (tmp.path / "train2.ds").string();

    // Small grid: one model, two SNRs, two distances.
    const std::string gen_flags =
        "gen --grid train --model B --pairs-per-cell 2 --seed 7 --out ";
    REQUIRE(run_cli(gen_flags + ds, tmp.path).exit_code == 0);
    REQUIRE(run_cli(gen_flags + ds2, tmp.path).exit_code == 0);
    CHECK(csiauth::data::file_digest(ds) == csiauth::data::file_digest(ds2));
    CHECK(fs::exists(ds + ".manifest.json"));

    const std::string weights = (tmp.path / "m.w").string();
    const std::string weights2 = (tmp.path / "m2.w").string();
    const std::string train_flags =
        "train --arch cnn --epochs 1 --seed 1 --data " + ds + " --out ";
    REQUIRE(run_cli(train_flags + weights + " --trace " + (tmp.path / "loss.csv").string(),
                    tmp.path)
                .exit_code == 0);
    REQUIRE(run_cli(train_flags + weights2, tmp.path).exit_code == 0);
    CHECK(csiauth::data::file_digest(weights) == csiauth::data::file_digest(weights2));
    CHECK(fs::exists(tmp.path / "loss.csv"));

    const std::string report = (tmp.path / "roc.csv").string();
    const RunResult eval_run = run_cli(
        "eval --model " + weights + " --data " + ds + " --report " + report, tmp.path);
    CHECK(eval_run.exit_code == 0);
    CHECK(eval_run.output.find("auc=") != std::string::npos);
    CHECK(fs::exists(report));

    const RunResult baseline = run_cli("eval --baseline correlation --data " + ds, tmp.path);
    CHECK(baseline.exit_code == 0);
    CHECK(baseline.output.find("detector=correlation") != std::string::npos);
}

TEST_CASE("test grids project one file per axis value and sweep-evaluate") {
    TempDir tmp;
    const std::string dir = (tmp.path / "sweep").string();
    const RunResult gen = run_cli(
        "gen --grid test --axis d --model B --pairs-per-cell 3 --seed 3 --out-dir " + dir,
        tmp.path);
    REQUIRE(gen.exit_code == 0);
    int count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        count += entry.path().extension() == ".ds";
    }
    CHECK(count == 7);
    CHECK(fs::exists(fs::path(dir) / "manifest.json"));

    const RunResult sweep = run_cli("eval --baseline correlation --sweep " + dir +
                                        " --report " + (tmp.path / "sweep.csv").string(),
                                    tmp.path);
    CHECK(sweep.exit_code == 0);
    std::ifstream in(tmp.path / "sweep.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 8);  // header + 7 datasets
}

TEST_CASE("usage errors exit with code 2") {
    TempDir tmp;
    CHECK(run_cli("gen --grid test --axis snr --axis dt --out-dir " + tmp.path.string(),
                  tmp.path)
              .exit_code == 2);
    CHECK(run_cli("gen --grid neither --out x.ds", tmp.path).exit_code == 2);
    CHECK(run_cli("frobnicate", tmp.path).exit_code == 2);
    CHECK(run_cli("eval --data missing.ds", tmp.path).exit_code == 2);  // no detector picked
}

TEST_CASE("data errors exit with code 3, distinct from usage errors") {
    TempDir tmp;
    const RunResult missing = run_cli(
        "train --arch cnn --data " + (tmp.path / "absent.ds").string() + " --out " +
            (tmp.path / "w.w").string(),
        tmp.path);
    CHECK(missing.exit_code == 3);
}

TEST_CASE("ingest applies the packet-offset rule and records overrides") {
    TempDir tmp;
    const fs::path csv = tmp.path / "raw.csv";
    std::ofstream out(csv);
    out << "mac,rssi,noise_floor,timestamp,csi\n";
    for (int i = 0; i < 120; ++i) {
        out << "aa:bb:cc:dd:ee:ff,-40,-95," << i * 0.01 << "," << csi_ints() << "\n";
    }
    out.close();

    const std::string ds = (tmp.path / "exp.ds").string();
    const RunResult ok = run_cli("ingest --format esp32-csv --in " + csv.string() +
                                     " --mac aa:bb:cc:dd:ee:ff --delta-k-diff 50 --out " + ds,
                                 tmp.path);
    REQUIRE(ok.exit_code == 0);
    const auto loaded = csiauth::data::read_dataset(ds);
    CHECK(loaded.count_label(0) == 119);
    CHECK(loaded.count_label(1) == 70);

    std::ifstream manifest(ds + ".manifest.json");
    std::ostringstream ss;
    ss << manifest.rdbuf();
    CHECK(ss.str().find("\"delta_k_diff\": 50") != std::string::npos);
}

TEST_CASE("ingest reports malformed lines and fails above the threshold") {
    TempDir tmp;
    const fs::path csv = tmp.path / "bad.csv";
    std::ofstream out(csv);
    out << "mac,rssi,noise_floor,timestamp,csi\n";
    out << "aa:bb:cc:dd:ee:ff,-40,-95,0.1," << csi_ints() << "\n";
    out << "not a record\n";
    out << "also not a record\n";
    out.close();
    const RunResult bad = run_cli(
        "ingest --in " + csv.string() + " --out " + (tmp.path / "x.ds").string(), tmp.path);
    CHECK(bad.exit_code == 3);
    CHECK(bad.output.find("3") != std::string::npos);  // offending line numbers listed
}

}  // TEST_SUITE
