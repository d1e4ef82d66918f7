#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string err;
};

// Runs the CLI with stderr captured to a file next to the outputs.
Result run(const std::string& args, const std::string& tag) {
  const std::string err = tag + ".stderr";
  const std::string cmd = std::string("\"") + FERMIBATH_CLI + "\" " + args + " > " + tag + ".stdout 2> " + err;
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Csv {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    REQUIRE(it != columns.end());
    return static_cast<std::size_t>(it - columns.begin());
  }
};

Csv read_csv(const fs::path& p) {
  Csv out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon != std::string::npos && line.rfind("#   ", 0) != 0)
        out.meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (out.columns.empty()) {
      out.columns = fields;
      continue;
    }
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(std::strtod(f.c_str(), nullptr));
    REQUIRE(row.size() == out.columns.size());
    out.rows.push_back(row);
  }
  return out;
}

std::string configs(const char* name) { return std::string(FERMIBATH_CONFIGS) + "/" + name; }
std::string data(const char* name) { return std::string(FERMIBATH_TEST_DATA) + "/" + name; }

}  // namespace

TEST_SUITE("evolve") {
  TEST_CASE("coupling and temperature grid gives eight trajectories, Bose above Fermi") {
    fs::remove_all("fermi_bose");
    const Result r = run("evolve " + configs("evolve_fermi_bose.yaml") + " --output fermi_bose", "fermi_bose");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator("fermi_bose")) files.push_back(e.path());
    REQUIRE(files.size() == 8);
    for (const char* g0 : {"0.05", "0.1"})
      for (const char* T : {"0.1", "1"}) {
        const std::string stem = std::string("fermi_bose/evolve_g0-") + g0 + "_T-" + T + "_statistics-";
        const Csv f = read_csv(stem + "fermi.csv");
        const Csv b = read_csv(stem + "bose.csv");
        CAPTURE(stem);
        CHECK(f.columns == std::vector<std::string>{"time", "n_exact", "n_weak_coupling", "lambda", "D_plus",
                                                    "D_minus", "transport_flag"});
        CHECK(std::abs(f.rows.front()[f.col("n_exact")]) < 1e-12);
        CHECK(std::stod(b.meta.at("n_infinity")) > std::stod(f.meta.at("n_infinity")));
        CHECK(b.rows.back()[b.col("n_exact")] > f.rows.back()[f.col("n_exact")]);
        CHECK(f.meta.count("version") == 1);
        CHECK(f.meta.count("params") == 1);
      }
  }

  TEST_CASE("decoupled occupied mode stays occupied") {
    const Result r = run("evolve " + data("decoupled.yaml") + " --output decoupled.csv", "decoupled");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const Csv c = read_csv("decoupled.csv");
    REQUIRE(c.rows.size() == 41);
    for (const auto& row : c.rows) {
      CHECK(row[c.col("n_exact")] == 1.0);
      CHECK(row[c.col("n_weak_coupling")] == 1.0);
    }
  }

  TEST_CASE("repeated runs are byte-identical") {
    const std::string args = "evolve " + configs("evolve_chemical_potential.yaml") +
                             " --set grid.t_max=10 --set grid.points=60 --output det";
    auto snapshot = [] {
      std::map<std::string, std::string> files;
      for (const auto& e : fs::directory_iterator("det")) files[e.path().filename().string()] = slurp(e.path());
      return files;
    };
    fs::remove_all("det");
    REQUIRE(run(args + " --jobs 3", "det_1").code == 0);
    const auto first = snapshot();
    REQUIRE(first.size() == 4);
    fs::remove_all("det");
    REQUIRE(run(args + " --jobs 3", "det_2").code == 0);
    CHECK(snapshot() == first);

    // the job count changes only the echoed configuration
    fs::remove_all("det");
    REQUIRE(run(args + " --jobs 1", "det_3").code == 0);
    for (const auto& [name, text] : snapshot()) {
      const Csv serial = read_csv(fs::path("det") / name);
      std::ofstream("det_parallel.csv", std::ios::binary) << first.at(name);
      const Csv parallel = read_csv("det_parallel.csv");
      CHECK(serial.rows == parallel.rows);
    }
  }

  TEST_CASE("json output carries rows and meta") {
    const Result r = run("evolve --set model.g0=0.1 --set grid.t_max=5 --set grid.points=11 --format json "
                         "--with-oracle N=400 --output evolve.json",
                         "json");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto doc = nlohmann::json::parse(slurp("evolve.json"));
    CHECK(doc["meta"]["command"] == "evolve");
    CHECK(doc["meta"]["config"].get<std::string>().find("modes: 400") != std::string::npos);
    REQUIRE(doc["rows"].size() == 11);
    CHECK(doc["columns"][3] == "n_oracle");
    for (const auto& row : doc["rows"])
      CHECK(std::abs(row["n_exact"].get<double>() - row["n_oracle"].get<double>()) < 0.02);
  }

  TEST_CASE("oracle comparison and kernel dump") {
    Result r = run("oracle-compare --set model.T=1 --set grid.t_max=10 --set grid.points=21 --with-oracle N=800 "
                   "--output compare.csv",
                   "compare");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const Csv c = read_csv("compare.csv");
    CHECK(std::stod(c.meta.at("max_abs_diff")) < 0.02);

    r = run("kernel-dump --set grid.t_max=2 --set grid.points=5 --with-oracle N=800 --output kernel.csv", "kernel");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const Csv k = read_csv("kernel.csv");
    CHECK(k.columns == std::vector<std::string>{"time", "kernel", "kernel_integral", "kernel_discrete"});
    CHECK(k.rows[0][k.col("kernel")] == doctest::Approx(1.2));
  }
}

TEST_SUITE("scan") {
  TEST_CASE("temperature scan ratio tends to one half") {
    const Result r = run("scan " + configs("scan_ratio.yaml") +
                             " --set grid.count=3 --set grid.from=0.01 --set grid.to=1 --output ratio",
                         "ratio");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    for (const char* g0 : {"0.001", "0.1"}) {
      const Csv c = read_csv(std::string("ratio/scan_g0-") + g0 + ".csv");
      CAPTURE(g0);
      REQUIRE(c.rows.size() == 3);
      CHECK(c.rows.front()[c.col("ratio_fb")] == doctest::Approx(0.5).epsilon(0.02));
      CHECK(c.rows.back()[c.col("ratio_fb")] < 0.5);
    }
  }

  TEST_CASE("coupling scan: diffusion grows with g0") {
    const Result r = run("scan " + configs("scan_coupling.yaml") + " --set grid.count=8 --output coupling", "coupling");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    for (const char* T : {"0.1", "1"}) {
      const Csv c = read_csv(std::string("coupling/scan_T-") + T + ".csv");
      const std::size_t d = c.col("D_plus_fermi");
      for (std::size_t i = 1; i < c.rows.size(); ++i) CHECK(c.rows[i][d] > c.rows[i - 1][d]);
    }
  }
}

TEST_SUITE("errors") {
  TEST_CASE("unknown key exits with 2 and names line and key") {
    const Result r = run("evolve " + data("bad_key.yaml"), "bad_key");
    CHECK(r.code == 2);
    CHECK(r.err.find(":4") != std::string::npos);
    CHECK(r.err.find("model.temprature") != std::string::npos);
  }

  TEST_CASE("bad override and mismatched command exit with 2") {
    CHECK(run("evolve --set model.gamma=fast", "bad_set").code == 2);
    CHECK(run("scan " + configs("evolve_fermi_bose.yaml"), "mismatch").code == 2);
    CHECK(run("evolve --set model.statistics=maxwell", "bad_stats").code == 2);
  }

  TEST_CASE("numerical failure exits with 3 and names the operation") {
    const Result r = run("evolve " + data("degenerate.yaml"), "degenerate");
    CHECK(r.code == 3);
    CHECK(r.err.find("model setup") != std::string::npos);
  }
}
