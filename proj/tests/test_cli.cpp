#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace structseg;
namespace fs = std::filesystem;

namespace {

const std::string kData = STRUCTSEG_TEST_DATA;
const std::string kCli = STRUCTSEG_CLI;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("structseg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static void write(const std::string& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
  }

  static std::vector<ordered_json> lines(const std::string& content) {
    std::vector<ordered_json> out;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) out.push_back(ordered_json::parse(line));
    return out;
  }

  // Runs the installed binary; returns its exit status.
  int run(const std::string& args) const {
    const std::string cmd = kCli + " " + args + " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  fs::path dir_;
};

std::string ingest_fixture(const std::string& output) {
  std::ostringstream out, err;
  cli::IngestArgs args;
  args.input = kData + "/sectioned";
  args.format = "sectioned_text";
  args.output = output;
  EXPECT_EQ(cli::cmd_ingest(args, out, err), 0) << err.str();
  return out.str();
}

}  // namespace

TEST_F(CliTest, IngestSectionedFixture) {
  const auto stats = ordered_json::parse(ingest_fixture(path("corpus.jsonl")));
  EXPECT_EQ(stats["documents"], 2);
  const auto records = lines(read(path("corpus.jsonl")));
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0]["id"], "aarhus");
  EXPECT_EQ(records[0]["boundaries"], ordered_json::parse("[1,4,6,7]"));
  EXPECT_EQ(records[1]["labels"], ordered_json::parse(R"(["preface","Signs and symptoms","Cause","Prevention"])"));
}

TEST_F(CliTest, IngestOfCanonicalJsonlIsIdempotent) {
  ingest_fixture(path("corpus.jsonl"));
  std::ostringstream out, err;
  cli::IngestArgs args;
  args.input = path("corpus.jsonl");
  args.format = "jsonl";
  args.output = path("again.jsonl");
  ASSERT_EQ(cli::cmd_ingest(args, out, err), 0);
  EXPECT_EQ(read(path("again.jsonl")), read(path("corpus.jsonl")));
}

TEST_F(CliTest, IngestErrors) {
  fs::create_directories(path("empty"));
  EXPECT_EQ(run("ingest " + path("empty") + " --format sectioned_text"), 1);
  EXPECT_EQ(run("ingest " + path("missing") + " --format jsonl"), 2);
  EXPECT_EQ(run("ingest " + kData + "/sectioned --format xml"), 2);
  EXPECT_EQ(run("ingest"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  // The file without sentences is rejected with a diagnostic, the other one kept.
  EXPECT_EQ(run("ingest " + kData + "/misc --format sectioned_text -o " + path("misc.jsonl")), 0);
  EXPECT_NE(read(path("stderr.txt")).find("no sentences under any header"), std::string::npos);
  EXPECT_EQ(lines(read(path("misc.jsonl"))).size(), 1u);
}

TEST_F(CliTest, EncodeDecodeRoundTrip) {
  ingest_fixture(path("corpus.jsonl"));
  for (const char* mode : {"seg_only", "combined"}) {
    std::ostringstream out, err;
    ASSERT_EQ(cli::cmd_encode({path("corpus.jsonl"), mode, path("targets.jsonl")}, out, err), 0);
    ASSERT_EQ(cli::cmd_decode({path("targets.jsonl"), mode, "", path("decoded.jsonl")}, out, err), 0);
    const auto corpus = lines(read(path("corpus.jsonl")));
    const auto decoded = lines(read(path("decoded.jsonl")));
    ASSERT_EQ(decoded.size(), corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      EXPECT_EQ(decoded[i]["boundaries"], corpus[i]["boundaries"]);
      EXPECT_EQ(decoded[i]["dropped_parts"], 0);
      if (std::string(mode) == "combined") {
        EXPECT_EQ(decoded[i]["labels"], corpus[i]["labels"]);
      }
    }
  }
  const auto targets = lines(read(path("targets.jsonl")));
  EXPECT_EQ(targets[0]["target"], "1 := preface | 4 := History | 6 := Geography | 7 := Economy");
}

TEST_F(CliTest, DecodeCorruptedFixture) {
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_decode({kData + "/misc/corrupted_targets.jsonl", "seg_only", "", ""}, out, err), 0);
  const auto decoded = lines(out.str());
  ASSERT_EQ(decoded.size(), 3u);
  EXPECT_EQ(decoded[0]["dropped_parts"], 0);
  EXPECT_EQ(decoded[1]["boundaries"], ordered_json::parse("[10,299]"));
  EXPECT_EQ(decoded[1]["dropped_parts"], 1);
  EXPECT_EQ(decoded[2]["boundaries"], ordered_json::parse("[10,31,299]"));
  EXPECT_EQ(decoded[2]["dropped_parts"], 1);
  EXPECT_NE(err.str().find("non_integer"), std::string::npos);
}

TEST_F(CliTest, DecodeModeMismatchAndJoin) {
  ingest_fixture(path("corpus.jsonl"));
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_encode({path("corpus.jsonl"), "combined", path("targets.jsonl")}, out, err), 0);
  // Drop num_sentences so decode has to join against the corpus.
  std::string stripped;
  for (auto j : lines(read(path("targets.jsonl")))) {
    j.erase("num_sentences");
    stripped += j.dump() + "\n";
  }
  write(path("stripped.jsonl"), stripped);
  std::ostringstream o2, e2;
  ASSERT_EQ(cli::cmd_decode({path("stripped.jsonl"), "seg_only", path("corpus.jsonl"), ""}, o2, e2), 0);
  for (const auto& j : lines(o2.str())) EXPECT_GT(j["dropped_parts"].get<int>(), 0);
  EXPECT_NE(e2.str().find("unusable"), std::string::npos);

  std::ostringstream o3, e3;
  EXPECT_EQ(cli::cmd_decode({path("stripped.jsonl"), "seg_only", "", ""}, o3, e3), 1);
}

TEST_F(CliTest, SegmentTexttileAndThreshold) {
  write(path("blocks.jsonl"),
        R"({"id":"b","sentences":["a b a b","b a a","a b b","x y y x","y x x","x y"],"boundaries":[2,5]})"
        "\n");
  std::ostringstream out, err;
  cli::SegmentArgs args;
  args.corpus = path("blocks.jsonl");
  ASSERT_EQ(cli::cmd_segment(args, out, err), 0);
  EXPECT_EQ(lines(out.str())[0]["boundaries"], ordered_json::parse("[2,5]"));

  write(path("probs.jsonl"), R"({"id":"b","probs":[0.1,0.2,0.9,0.1,0.7,0.0]})" "\n");
  args.method = "threshold";
  args.probs = path("probs.jsonl");
  std::ostringstream o2, e2;
  ASSERT_EQ(cli::cmd_segment(args, o2, e2), 0);
  EXPECT_EQ(lines(o2.str())[0]["boundaries"], ordered_json::parse("[2,4,5]"));

  EXPECT_EQ(run("segment " + path("blocks.jsonl") + " --method threshold"), 2);
  EXPECT_EQ(run("segment " + path("blocks.jsonl") + " --method threshold --probs " + path("nope.jsonl")), 2);
}

TEST_F(CliTest, EvalPerfectAndPercent) {
  ingest_fixture(path("corpus.jsonl"));
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_encode({path("corpus.jsonl"), "combined", path("targets.jsonl")}, out, err), 0);

  cli::EvalArgs args;
  args.reference = path("corpus.jsonl");
  args.hypothesis = path("targets.jsonl");
  std::ostringstream o1, e1;
  ASSERT_EQ(cli::cmd_eval(args, o1, e1), 0) << e1.str();
  const auto r = ordered_json::parse(o1.str());
  EXPECT_EQ(r["pk"], 0.0);
  EXPECT_EQ(r["rouge1"]["f"], 1.0);
  EXPECT_EQ(r["rougeL"]["f"], 1.0);
  EXPECT_EQ(r["label_f1"], 1.0);
  EXPECT_EQ(r["erroneous_fraction"], 0.0);
  EXPECT_EQ(r["documents_evaluated"], 2);

  // Decoded records evaluate the same as raw targets.
  ASSERT_EQ(cli::cmd_decode({path("targets.jsonl"), "combined", "", path("decoded.jsonl")}, out, err), 0);
  args.hypothesis = path("decoded.jsonl");
  std::ostringstream o2, e2;
  ASSERT_EQ(cli::cmd_eval(args, o2, e2), 0);
  EXPECT_EQ(o2.str(), o1.str());

  EXPECT_EQ(run("eval " + path("corpus.jsonl") + " " + path("decoded.jsonl") + " --percent --k 2"), 0);
  const auto pr = ordered_json::parse(read(path("stdout.txt")));
  EXPECT_EQ(pr["rouge2"]["f"], 100.0);
  EXPECT_EQ(pr["k_values"], ordered_json::parse("[2,2]"));
}

TEST_F(CliTest, EvalMatchesLibraryOnImperfectHypotheses) {
  write(path("ref.jsonl"),
        R"({"id":"a","sentences":["1","2","3","4","5","6","7","8"],"boundaries":[2,7],"labels":["Intro","Body"]})"
        "\n"
        R"({"id":"b","sentences":["1","2","3","4"],"boundaries":[0,3],"labels":["X","Y"]})"
        "\n");
  write(path("hyp.jsonl"), R"({"id":"b","target":"1 := X | 3 := Z | junk"})" "\n"
                           R"({"id":"a","target":"4 := intro | 7 := body"})" "\n");
  cli::EvalArgs args;
  args.reference = path("ref.jsonl");
  args.hypothesis = path("hyp.jsonl");
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_eval(args, out, err), 0) << err.str();
  const auto r = ordered_json::parse(out.str());

  const Segmentation ra({2, 7}, 8), ha({4, 7}, 8), rb({0, 3}, 4), hb({1, 3}, 4);
  EXPECT_DOUBLE_EQ(r["pk"].get<double>(), (pk(ra, ha) + pk(rb, hb)) / 2);
  auto f1 = label_agreement(LabeledSegmentation(ha, {"intro", "body"}), LabeledSegmentation(ra, {"Intro", "Body"}));
  f1 += label_agreement(LabeledSegmentation(hb, {"X", "Z"}), LabeledSegmentation(rb, {"X", "Y"}));
  EXPECT_DOUBLE_EQ(r["label_f1"].get<double>(), f1.f1());
  EXPECT_DOUBLE_EQ(r["erroneous_fraction"].get<double>(), 0.5);
  auto c = rouge_n_counts("intro | body", "Intro | Body", 1);
  c += rouge_n_counts("X | Z", "X | Y", 1);
  EXPECT_DOUBLE_EQ(r["rouge1"]["r"].get<double>(), c.score().recall);
}

TEST_F(CliTest, EvalRejectsMismatchedCorpora) {
  ingest_fixture(path("corpus.jsonl"));
  write(path("hyp.jsonl"), R"({"id":"aarhus","boundaries":[7],"labels":["x"]})" "\n");
  EXPECT_EQ(run("eval " + path("corpus.jsonl") + " " + path("hyp.jsonl")), 1);
  EXPECT_NE(read(path("stderr.txt")).find("no hypothesis for reference 'measles'"), std::string::npos);
  EXPECT_EQ(run("eval " + path("corpus.jsonl") + " " + path("hyp.jsonl") + " --mode nope"), 2);
}

TEST_F(CliTest, AugmentIsDeterministicAndBounded) {
  write(path("conv.jsonl"),
        R"({"id":"m1","modality":"conversation","sentences":["hello everyone","let us start with the budget today"],"boundaries":[0,1],"labels":["greeting","budget"]})"
        "\n"
        R"({"id":"d1","modality":"document","sentences":["one","two"],"boundaries":[1]})"
        "\n");
  EXPECT_EQ(run("augment " + path("conv.jsonl") + " --seed 7 -o " + path("a1.jsonl")), 0);
  EXPECT_EQ(run("augment " + path("conv.jsonl") + " --seed 7 -o " + path("a2.jsonl")), 0);
  EXPECT_EQ(read(path("a1.jsonl")), read(path("a2.jsonl")));
  EXPECT_EQ(run("augment " + path("conv.jsonl") + " --seed 8 -o " + path("a3.jsonl")), 0);
  EXPECT_NE(read(path("a1.jsonl")), read(path("a3.jsonl")));

  const auto out = lines(read(path("a1.jsonl")));
  ASSERT_EQ(out.size(), 5u);  // 1 + 3 replicas for the conversation, the document passes through
  for (const auto& j : out) {
    const auto ex = example_from_json(j);
    const auto& src_len = ex.document.id().rfind("d1", 0) == 0 ? 2u : 2u;
    EXPECT_LE(ex.document.size() - src_len, 1000u);
  }

  std::ostringstream o, e;
  cli::AugmentArgs args;
  args.corpus = path("conv.jsonl");
  args.ops = {"truncate_replicas"};
  args.limits = {1};
  ASSERT_EQ(cli::cmd_augment(args, o, e), 0);
  const auto reps = lines(o.str());
  ASSERT_EQ(reps.size(), 3u);
  EXPECT_EQ(reps[1]["id"], "m1_trunc1");
  EXPECT_EQ(reps[1]["sentences"], ordered_json::parse(R"(["hello","let"])"));

  EXPECT_EQ(run("augment " + path("conv.jsonl") + " --ops shuffle"), 2);
}

TEST_F(CliTest, DedupFindsPlantedDuplicate) {
  write(path("a.jsonl"), R"({"id":"a1","sentences":["the river flows north through the valley"]})" "\n"
                         R"({"id":"a2","sentences":["completely different content here"]})" "\n");
  write(path("b.jsonl"), R"({"id":"b1","sentences":["the river flows north through the valley"]})" "\n"
                         R"({"id":"b2","sentences":["nothing alike at all"]})" "\n");
  EXPECT_EQ(run("dedup " + path("a.jsonl") + " " + path("b.jsonl") + " --threshold 0.9"), 0);
  const auto pairs = lines(read(path("stdout.txt")));
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0]["id_a"], "a1");
  EXPECT_EQ(pairs[0]["id_b"], "b1");
  EXPECT_NEAR(pairs[0]["similarity"].get<double>(), 1.0, 1e-9);

  write(path("c.jsonl"), R"({"id":"c1","sentences":["zebra quagga okapi"]})" "\n");
  EXPECT_EQ(run("dedup " + path("a.jsonl") + " " + path("c.jsonl")), 0);
  EXPECT_TRUE(read(path("stdout.txt")).empty());
  EXPECT_NE(read(path("stderr.txt")).find("0 pair(s)"), std::string::npos);
}

TEST_F(CliTest, StatsReport) {
  ingest_fixture(path("corpus.jsonl"));
  EXPECT_EQ(run("stats " + path("corpus.jsonl")), 0);
  const auto s = ordered_json::parse(read(path("stdout.txt")));
  EXPECT_EQ(s["num_docs"], 2);
  EXPECT_EQ(s["max_sentences"], 8);
  EXPECT_EQ(s["segment_count_histogram"]["4"], 2);
}
