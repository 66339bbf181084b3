#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "oclmine/bench.hpp"
#include "support.hpp"

using namespace oclmine;
using namespace oclmine::bench;

namespace {

// Wraps the single-threaded reference and optionally misbehaves.
class FakeBackend : public Backend {
 public:
  enum class Mode { Honest, Throw, Corrupt, Truncate, Slow };

  FakeBackend(std::string name, Mode mode = Mode::Honest) : name_(std::move(name)), mode_(mode) {}

  std::string name() const override { return name_; }

  Timed<std::vector<Label>> dbscan(const Dataset& ds, const DbscanParams& p, const CancellationToken& t) override {
    calls.push_back({name_, Algorithm::Dbscan, fingerprint(ds)});
    misbehave(t);
    auto r = SingleBackend().dbscan(ds, p, t);
    tamper(r.value);
    return r;
  }

  Timed<KmeansResult> kmeans(const Dataset& ds, const KmeansParams& p, std::uint64_t seed,
                             const CancellationToken& t) override {
    calls.push_back({name_, Algorithm::Kmeans, fingerprint(ds)});
    misbehave(t);
    auto r = SingleBackend().kmeans(ds, p, seed, t);
    tamper(r.value.labels);
    return r;
  }

  struct Call {
    std::string backend;
    Algorithm algo;
    std::uint64_t data;
  };
  static inline std::vector<Call> calls;

 private:
  static std::uint64_t fingerprint(const Dataset& ds) {
    std::uint64_t h = ds.size();
    for (float v : ds.values()) h = mix_seed(h ^ std::bit_cast<std::uint32_t>(v));
    return h;
  }

  void misbehave(const CancellationToken& t) const {
    if (mode_ == Mode::Throw) throw std::runtime_error("backend exploded");
    if (mode_ == Mode::Slow) {
      for (int i = 0; i < 200; ++i) {
        if (t.is_cancelled()) throw Aborted();
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
      }
    }
  }

  void tamper(std::vector<Label>& labels) const {
    if (mode_ == Mode::Corrupt && !labels.empty()) labels[labels.size() / 2] ^= 1;
    if (mode_ == Mode::Truncate && !labels.empty()) labels.pop_back();
  }

  std::string name_;
  Mode mode_;
};

GridSpec tiny_grid(std::size_t passes = 1) {
  GridSpec g;
  g.features = {2};
  g.clusters = {2};
  g.sizes = {128};
  g.passes = passes;
  g.master_seed = 7;
  return g;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Grid, DefaultHasSixtyTuples) {
  const GridSpec g;
  const auto tuples = g.tuples();
  EXPECT_EQ(tuples.size(), 60u);
  EXPECT_EQ(g.passes, 70u);
  std::set<std::string> labels;
  for (const auto& t : tuples) labels.insert(t.label());
  EXPECT_EQ(labels.size(), 60u);
  EXPECT_EQ(tuples.front().label(), "f1-c2-s128");
  EXPECT_EQ(tuples.back().label(), "f4-c8-s2048");
  EXPECT_EQ(tuples.back().points(), 8u * 2048u);
}

TEST(Grid, Validation) {
  GridSpec g;
  g.passes = 0;
  EXPECT_THROW(g.validate(), ValidationError);
  g = GridSpec{};
  g.features = {65};
  EXPECT_THROW(g.validate(), ValidationError);
  g = GridSpec{};
  g.sizes = {};
  EXPECT_THROW(g.validate(), ValidationError);
}

TEST(Grid, ParseAxis) {
  EXPECT_EQ(parse_axis("128..2048"), (std::vector<std::size_t>{128, 256, 512, 1024, 2048}));
  EXPECT_EQ(parse_axis("1,2,4"), (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(parse_axis("3"), (std::vector<std::size_t>{3}));
  EXPECT_EQ(parse_axis("2,8..32"), (std::vector<std::size_t>{2, 8, 16, 32}));
  EXPECT_EQ(parse_axis("100..300"), (std::vector<std::size_t>{100, 200}));
  for (const char* bad : {"", "a", "0", "1,,2", "5..2", "1..", "-1", "2.5"}) {
    EXPECT_THROW(parse_axis(bad), ValidationError) << bad;
  }
}

TEST(Verify, Dbscan) {
  const std::vector<Label> a{0, 1, 1, 2};
  std::vector<Label> b = a;
  EXPECT_TRUE(verify_dbscan(a, b));
  b[2] = 2;
  EXPECT_FALSE(verify_dbscan(a, b));
  b.pop_back();
  EXPECT_THROW(verify_dbscan(a, b), ValidationError);
}

TEST(RunGrid, SingleBackendOneTuple) {
  SingleBackend single;
  Backend* backends[] = {&single};
  const auto records = run_grid(tiny_grid(), backends);
  ASSERT_EQ(records.size(), 2u);
  std::set<Algorithm> algos;
  for (const auto& r : records) {
    EXPECT_EQ(r.status, RunStatus::Completed);
    EXPECT_TRUE(r.verify_ok());
    EXPECT_EQ(r.tuple.label(), "f2-c2-s128");
    EXPECT_TRUE(r.accounting_holds());
    algos.insert(r.algo);
  }
  EXPECT_EQ(algos.size(), 2u);
}

TEST(RunGrid, NeedsABackend) {
  EXPECT_THROW(run_grid(tiny_grid(), std::span<Backend* const>{}), ValidationError);
}

TEST(RunGrid, EveryMethodSeesThePassDatasetInShuffledOrder) {
  FakeBackend::calls.clear();
  FakeBackend a("single"), b("multi"), c("gpu");
  Backend* backends[] = {&a, &b, &c};
  const std::size_t passes = 8;
  const auto records = run_grid(tiny_grid(passes), backends);
  ASSERT_EQ(records.size(), passes * 6);
  ASSERT_EQ(FakeBackend::calls.size(), passes * 6);

  std::set<std::string> orders;
  std::set<std::uint64_t> datasets;
  for (std::size_t p = 0; p < passes; ++p) {
    std::string order;
    for (std::size_t m = 0; m < 6; ++m) {
      const auto& call = FakeBackend::calls[p * 6 + m];
      EXPECT_EQ(call.data, FakeBackend::calls[p * 6].data) << "pass " << p;
      order += call.backend + to_string(call.algo) + ";";
      EXPECT_EQ(records[p * 6 + m].order, m);
    }
    orders.insert(order);
    datasets.insert(FakeBackend::calls[p * 6].data);
  }
  EXPECT_GT(orders.size(), 1u);
  EXPECT_EQ(datasets.size(), passes);
}

TEST(RunGrid, FailuresBecomeRecords) {
  FakeBackend single("single"), boom("boom", FakeBackend::Mode::Throw), bad("bad", FakeBackend::Mode::Corrupt),
      short_("short", FakeBackend::Mode::Truncate);
  Backend* backends[] = {&single, &boom, &bad, &short_};
  const auto records = run_grid(tiny_grid(2), backends);
  ASSERT_EQ(records.size(), 16u);
  for (const auto& r : records) {
    if (r.backend == "single") {
      EXPECT_EQ(r.status, RunStatus::Completed);
      EXPECT_EQ(r.verify, Verify::Ok);
    } else if (r.backend == "boom") {
      EXPECT_EQ(r.status, RunStatus::Error);
      EXPECT_EQ(r.message, "backend exploded");
    } else if (r.backend == "bad") {
      EXPECT_EQ(r.status, RunStatus::Completed);
      EXPECT_EQ(r.verify, Verify::Mismatch);
    } else {
      EXPECT_EQ(r.status, RunStatus::Error);
      EXPECT_NE(r.message.find("length"), std::string::npos);
    }
    EXPECT_TRUE(r.accounting_holds());
  }
}

TEST(RunGrid, VerificationSkippedWithoutReference) {
  MultiBackend multi(2);
  Backend* backends[] = {&multi};
  for (const auto& r : run_grid(tiny_grid(), backends)) EXPECT_EQ(r.verify, Verify::Skipped);
}

TEST(RunGrid, CancelAfterAbortsCurrentPassOnly) {
  FakeBackend single("single"), slow("slow", FakeBackend::Mode::Slow);
  Backend* backends[] = {&single, &slow};
  RunOptions options;
  options.cancel_after = std::chrono::milliseconds(20);
  const auto records = run_grid(tiny_grid(2), backends, options);
  std::size_t aborted_pass0 = 0, completed_pass1 = 0;
  for (const auto& r : records) {
    if (r.pass == 0 && r.status == RunStatus::Aborted) ++aborted_pass0;
    if (r.pass == 1 && r.status == RunStatus::Completed) ++completed_pass1;
  }
  EXPECT_GE(aborted_pass0, 1u);
  EXPECT_EQ(completed_pass1, 4u);
}

TEST(RunGrid, ReproducibleModuloTimings) {
  auto run = [] {
    SingleBackend single;
    MultiBackend multi(3);
    Backend* backends[] = {&single, &multi};
    GridSpec g = tiny_grid(3);
    g.features = {1, 2};
    std::ostringstream out;
    write_raw_csv(out, run_grid(g, backends));
    auto rows = csv_rows(out.str());
    for (auto& row : rows) {
      row[4].clear();
      row[5].clear();
    }
    return rows;
  };
  const auto first = run();
  EXPECT_EQ(first.size(), 1u + 2 * 3 * 4);
  EXPECT_EQ(first, run());
}

TEST(RunGrid, GpuBackendOnStub) {
  support::Stub::get().reset();
  ocl::Loader loader;
  ASSERT_EQ(loader.load(support::kStubPath), ocl::LoadStatus::Ok);
  SingleBackend single;
  GpuBackend gpu(loader, gpu::KernelSourceBundle::from_directory(gpu::KernelSourceBundle::default_directory()));
  Backend* backends[] = {&single, &gpu};
  const auto records = run_grid(tiny_grid(2), backends);
  ASSERT_EQ(records.size(), 8u);
  for (const auto& r : records) {
    EXPECT_EQ(r.status, RunStatus::Completed) << r.message;
    EXPECT_EQ(r.verify, Verify::Ok);
    EXPECT_TRUE(r.accounting_holds());
    if (r.backend == "gpu") EXPECT_GT(r.setup_ns, 0);
  }
  EXPECT_EQ(support::Stub::get().live_total(), 0);
  // One context per run; Kmeans runs compile one program, DBSCAN runs two.
  EXPECT_EQ(support::Stub::get().created(STUB_CONTEXT), 4u);
  EXPECT_EQ(support::Stub::get().created(STUB_PROGRAM), 6u);
}

TEST(RunGrid, GpuBackendWithoutLibraryRecordsErrors) {
  ocl::Loader loader;
  SingleBackend single;
  GpuBackend gpu(loader, gpu::KernelSourceBundle::from_directory(gpu::KernelSourceBundle::default_directory()));
  Backend* backends[] = {&single, &gpu};
  for (const auto& r : run_grid(tiny_grid(), backends)) {
    if (r.backend == "gpu") {
      EXPECT_EQ(r.status, RunStatus::Error);
      EXPECT_NE(r.message.find("-1001"), std::string::npos);
    } else {
      EXPECT_EQ(r.status, RunStatus::Completed);
    }
  }
}

// ---------------------------------------------------------------------------
// Statistics

TEST(Stats, MedianRules) {
  EXPECT_DOUBLE_EQ(describe({1, 2, 3, 4, 5}).median, 3.0);
  EXPECT_DOUBLE_EQ(describe({4, 1, 3, 2}).median, 2.5);
  EXPECT_THROW(describe({}), ValidationError);
}

TEST(Stats, MatchesSpreadsheetFixture) {
  std::ifstream in(std::string(support::kFixtureDir) + "/quartiles.csv");
  ASSERT_TRUE(in);
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("values", 0) == 0) continue;
    std::istringstream ls(line);
    std::string values_text, cell;
    std::getline(ls, values_text, ',');
    std::vector<double> expected;
    while (std::getline(ls, cell, ',')) expected.push_back(std::stod(cell));
    ASSERT_EQ(expected.size(), 5u);
    std::vector<double> values;
    std::istringstream vs(values_text);
    while (std::getline(vs, cell, ';')) values.push_back(std::stod(cell));

    const Stats s = describe(values);
    EXPECT_EQ(s.count, values.size());
    EXPECT_EQ(s.min, expected[0]) << line;
    EXPECT_EQ(s.q1, expected[1]) << line;
    EXPECT_EQ(s.median, expected[2]) << line;
    EXPECT_EQ(s.q3, expected[3]) << line;
    EXPECT_EQ(s.max, expected[4]) << line;
    ++cases;
  }
  EXPECT_GE(cases, 15);
}

TEST(Stats, SummarizeUsesCompletedRecordsOnly) {
  std::vector<TimingRecord> records;
  const GridTuple t{2, 2, 128};
  for (std::int64_t v : {1, 2, 3, 4, 5}) {
    TimingRecord r;
    r.tuple = t;
    r.backend = "single";
    r.wall_ns = v;
    r.setup_ns = 10 * v;
    r.total_ns = r.wall_ns + r.setup_ns;
    records.push_back(r);
  }
  TimingRecord aborted = records.front();
  aborted.wall_ns = 1000000;
  aborted.status = RunStatus::Aborted;
  records.push_back(aborted);

  const auto rows = summarize(records);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].interval, Interval::Wall);
  EXPECT_EQ(rows[0].stats.count, 5u);
  EXPECT_DOUBLE_EQ(rows[0].stats.median, 3.0);
  EXPECT_DOUBLE_EQ(rows[0].stats.max, 5.0);
  EXPECT_DOUBLE_EQ(rows[1].stats.median, 30.0);
  EXPECT_THROW(summarize(std::span<const TimingRecord>{}), ValidationError);
}

TEST(Reports, CsvLayouts) {
  std::vector<TimingRecord> records;
  for (std::int64_t v : {10, 11, 12, 13, 100}) {
    TimingRecord r;
    r.tuple = {1, 2, 128};
    r.backend = "multi";
    r.algo = Algorithm::Kmeans;
    r.wall_ns = v;
    r.total_ns = v;
    r.verify = Verify::Ok;
    records.push_back(r);
  }
  std::ostringstream raw;
  write_raw_csv(raw, records);
  const auto raw_rows = csv_rows(raw.str());
  ASSERT_EQ(raw_rows.size(), 6u);
  EXPECT_EQ(raw.str().substr(0, raw.str().find('\n')), kRawHeader);
  EXPECT_EQ(raw_rows[1], (std::vector<std::string>{"f1-c2-s128", "0", "multi", "kmeans", "10", "0", "completed",
                                                   "ok"}));

  const auto rows = summarize(records);
  std::ostringstream summary;
  write_summary_csv(summary, rows);
  const auto sum_rows = csv_rows(summary.str());
  ASSERT_EQ(sum_rows.size(), 3u);
  EXPECT_EQ(sum_rows[1][8], "10");   // min
  EXPECT_EQ(sum_rows[1][10], "12");  // median

  std::ostringstream box;
  write_boxplot_csv(box, records, rows);
  const auto box_rows = csv_rows(box.str());
  ASSERT_EQ(box_rows.size(), 3u);
  // q1 = 11, q3 = 13, IQR = 2: 100 is an outlier, whiskers at 10 and 13.
  EXPECT_EQ(box_rows[1][4], "10");
  EXPECT_EQ(box_rows[1][8], "13");
  EXPECT_EQ(box_rows[1][9], "1");
}
