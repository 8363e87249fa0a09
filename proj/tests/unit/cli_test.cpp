#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include <hbdiag/features.hpp>
#include <hbdiag/manifest.hpp>
#include <hbdiag_cli/cli.hpp>

#include "test_support.hpp"

using namespace hbdiag;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hbdiag");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testutil::TempDir("cli");
    const auto r = run_cli({"simulate", "--out", (dir() / "corpus").string(), "--runs", "90"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = run_cli({"train", "--manifest", manifest().string(), "--out",
                            (dir() / "ranges.json").string()});
    ASSERT_EQ(t.code, 0) << t.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static const std::filesystem::path& dir() { return dir_->path(); }
  static std::filesystem::path manifest() { return dir() / "corpus" / "manifest.json"; }
  static std::filesystem::path ranges() { return dir() / "ranges.json"; }

  static Manifest corpus() { return read_manifest(manifest()); }

  static std::string first_run(DiagnosisStatus label, Split split) {
    for (const auto& [name, e] : corpus()) {
      if (e.label == label && e.split == split) return name;
    }
    return {};
  }

  static inline testutil::TempDir* dir_ = nullptr;
};

}  // namespace

TEST_F(Cli, SimulateWritesCorpusDeterministically) {
  EXPECT_EQ(corpus().size(), 90u);
  const auto again = dir() / "again";
  auto r = run_cli({"simulate", "--out", again.string(), "--runs", "90"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(again / "manifest.json"), slurp(manifest()));
  EXPECT_EQ(slurp(again / "run_0042.csv"), slurp(dir() / "corpus" / "run_0042.csv"));
  EXPECT_NE(r.out.find("runs: 90"), std::string::npos) << r.out;
}

TEST_F(Cli, SimulateSmallCorpus) {
  const auto out = dir() / "small";
  auto r = run_cli({"simulate", "--out", out.string(), "--runs", "30", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t logs = 0;
  for (const auto& e : std::filesystem::directory_iterator(out)) {
    logs += e.path().extension() == ".csv";
  }
  EXPECT_EQ(logs, 30u);
}

TEST_F(Cli, SimulateProfileList) {
  const auto out = dir() / "two_profiles";
  auto r = run_cli({"simulate", "--out", out.string(), "--runs", "12", "--profiles", "NPB-cg,Jacobi"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::map<std::string, int> per_profile;
  int train = 0;
  for (const auto& [name, e] : read_manifest(out / "manifest.json")) {
    ++per_profile[e.profile];
    train += e.split == Split::train;
  }
  EXPECT_EQ(per_profile["NPB-cg"], 6);
  EXPECT_EQ(per_profile["Jacobi"], 6);
  // Six (profile, label) groups of two, one training run each.
  EXPECT_EQ(train, 6);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({"simulate", "--out", (dir() / "bad").string(), "--mix", "0.3,0.3,0.3"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
  EXPECT_EQ(run_cli({"train", "--manifest", (dir() / "missing.json").string()}).code, 2);
  EXPECT_EQ(run_cli({"overhead"}).code, 2);
}

TEST_F(Cli, TrainWritesSixFiniteIntervals) {
  const auto doc = read_json(ranges());
  const auto& prof = doc.at("profiles").at("NPB-cg");
  const auto& r = prof.at("ranges");
  EXPECT_EQ(r.size(), 6u);
  for (const auto& name : {"dtw", "lb", "gtr", "ltr", "ghr", "lhr"}) {
    const double lo = r.at(name).at(0), hi = r.at(name).at(1);
    EXPECT_TRUE(std::isfinite(lo) && std::isfinite(hi));
    EXPECT_LE(lo, hi);
  }
}

TEST_F(Cli, FullConfidenceContainsTrainingFeatures) {
  const auto out = dir() / "ranges_full.json";
  const auto csv = dir() / "train_features.csv";
  auto r = run_cli({"train", "--manifest", manifest().string(), "--out", out.string(),
                    "--confidence", "1.0", "--features-csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ranges = read_json(out).at("profiles").at("NPB-cg").at("ranges");
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kFeatureCsvHeader);
  const char* names[] = {"gtr", "ltr", "ghr", "lhr", "dtw", "lb"};
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    for (const char* n : names) {
      std::getline(row, cell, ',');
      const double v = std::stod(cell);
      EXPECT_GE(v, ranges.at(n).at(0).get<double>()) << n;
      EXPECT_LE(v, ranges.at(n).at(1).get<double>()) << n;
    }
  }
  EXPECT_EQ(rows, 36u);

  // A training run diagnosed against full-coverage ranges is normal.
  const auto run = first_run(DiagnosisStatus::normal, Split::train);
  auto d = run_cli({"diagnose", "--ranges", out.string(), "--log",
                    (dir() / "corpus" / (run + ".csv")).string(), "--out",
                    (dir() / "train_status.json").string()});
  EXPECT_EQ(d.code, 0) << d.out << d.err;
}

TEST_F(Cli, DiagnoseLeakRun) {
  const auto run = first_run(DiagnosisStatus::memoryleak, Split::test);
  const auto status = dir() / "leak_status.json";
  auto r = run_cli({"diagnose", "--ranges", ranges().string(), "--log",
                    (dir() / "corpus" / (run + ".csv")).string(), "--out", status.string()});
  EXPECT_EQ(r.code, 3) << r.err;
  const auto doc = read_json(status);
  EXPECT_TRUE(doc.at("anomalous").get<bool>());
  for (const auto& t : doc.at("threads")) EXPECT_EQ(t.at("status"), "memoryleak");
  EXPECT_NE(r.out.find("memoryleak"), std::string::npos);
}

TEST_F(Cli, DiagnoseReferenceRunIsNormal) {
  const auto doc = read_json(ranges());
  const std::string log = doc.at("profiles").at("NPB-cg").at("reference_log");
  const auto status = dir() / "ref_status.json";
  auto r = run_cli({"diagnose", "--ranges", ranges().string(), "--log", (dir() / log).string(),
                    "--out", status.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  for (const auto& t : read_json(status).at("threads")) EXPECT_EQ(t.at("status"), "normal");
}

TEST_F(Cli, DiagnoseCorruptLog) {
  const auto bad = dir() / "corrupt.csv";
  spit(bad, "thread_id,seq,timestamp_ns\n0,0,0\n0,1,oops\n");
  auto r = run_cli({"diagnose", "--ranges", ranges().string(), "--log", bad.string(), "--out",
                    (dir() / "x.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":3:"), std::string::npos) << r.err;
}

TEST_F(Cli, DiagnoseEmitterStyleLog) {
  // Emitted logs may carry comment lines and interleave threads.
  const auto log = dir() / "emitted.csv";
  std::ostringstream text;
  text << "# heartbeat log\n" << kLogHeader << '\n';
  const auto src = ingest_log(dir() / "corpus" / (first_run(DiagnosisStatus::normal, Split::train) + ".csv"));
  for (std::size_t i = 0; i < src[0].size(); ++i) {
    for (const auto& s : src) {
      const auto& rec = s.records()[i];
      text << rec.thread_id << ',' << rec.seq << ',' << rec.timestamp_ns << '\n';
    }
  }
  spit(log, text.str());
  auto r = run_cli({"diagnose", "--ranges", ranges().string(), "--log", log.string(), "--out",
                    (dir() / "emitted.json").string()});
  EXPECT_TRUE(r.code == 0 || r.code == 3) << r.err;
  EXPECT_EQ(read_json(dir() / "emitted.json").at("threads").size(), 4u);
}

TEST_F(Cli, EvaluatePerfectPredictions) {
  json preds = json::object();
  for (const auto& [name, e] : corpus()) {
    json threads = json::array();
    for (ThreadId t = 0; t < 4; ++t) {
      threads.push_back({{"thread_id", t}, {"status", std::string(to_string(thread_label(e, t)))}});
    }
    preds[name] = threads;
  }
  const auto file = dir() / "perfect.json";
  spit(file, preds.dump());
  const auto out = dir() / "perfect_eval.json";
  auto r = run_cli({"evaluate", "--manifest", manifest().string(), "--predictions", file.string(),
                    "--json", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(read_json(out).at("macro_f").get<double>(), 1.0);
}

TEST_F(Cli, EvaluateMeanIsAverageOfRepeats) {
  double hand = 0;
  for (int s = 1; s <= 3; ++s) {
    const auto out = dir() / ("eval_" + std::to_string(s) + ".json");
    auto r = run_cli({"evaluate", "--manifest", manifest().string(), "--repeats", "1",
                      "--split-seed", std::to_string(s), "--json", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    hand += read_json(out).at("mean_macro_f").get<double>();
  }
  const auto out = dir() / "eval_all.json";
  auto r = run_cli({"evaluate", "--manifest", manifest().string(), "--repeats", "3", "--json",
                    out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(read_json(out).at("mean_macro_f").get<double>(), hand / 3, 1e-12);
  EXPECT_NE(r.out.find("mean macro F1 over 3 repeats"), std::string::npos);
}

TEST_F(Cli, EvaluateWarnsOnMissingClass) {
  const auto out = dir() / "two_class";
  auto r = run_cli({"simulate", "--out", out.string(), "--runs", "60", "--mix", "0.5,0.5,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto e = run_cli({"evaluate", "--manifest", (out / "manifest.json").string(), "--repeats", "1"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.err.find("shutdown"), std::string::npos) << e.err;
}

TEST_F(Cli, Overhead) {
  auto r = run_cli({"overhead", "--with", "1.025", "--without", "1.0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("2.50%"), std::string::npos) << r.out;
  auto same = run_cli({"overhead", "--with", "1", "--without", "1"});
  EXPECT_NE(same.out.find("0.00%"), std::string::npos) << same.out;
  EXPECT_EQ(run_cli({"overhead", "--with", "1", "--without", "0"}).code, 1);

  const auto m = dir() / "measurements.json";
  spit(m, R"({"e_alpha": 1.05, "e_beta": 1.0})");
  const auto out = dir() / "overhead.json";
  auto f = run_cli({"overhead", "--measurements", m.string(), "--json", out.string()});
  EXPECT_EQ(f.code, 0) << f.err;
  EXPECT_NE(f.out.find("5.00%"), std::string::npos) << f.out;
  EXPECT_NEAR(read_json(out).at("overhead").get<double>(), 0.05, 1e-15);
}

TEST_F(Cli, ConfigFile) {
  const auto cfg = dir() / "sim.toml";
  spit(cfg, "[simulate]\nruns = 12\nseed = 3\n");
  const auto out = dir() / "from_config";
  auto r = run_cli({"--config", cfg.string(), "simulate", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_manifest(out / "manifest.json").size(), 12u);

  const auto out2 = dir() / "override";
  auto o = run_cli({"--config", cfg.string(), "simulate", "--out", out2.string(), "--runs", "15"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_manifest(out2 / "manifest.json").size(), 15u);

  const auto bad = dir() / "bad.toml";
  spit(bad, "[simulate]\nrunz = 12\n");
  EXPECT_EQ(run_cli({"--config", bad.string(), "simulate", "--out", (dir() / "z").string()}).code, 2);
}

TEST_F(Cli, ExportRates) {
  const auto out = dir() / "rates.csv";
  auto r = run_cli({"export-rates", "--log", (dir() / "corpus" / "run_0000.csv").string(), "--out",
                    out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "thread_id,t_s,rate");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4u * 1999u);
}
