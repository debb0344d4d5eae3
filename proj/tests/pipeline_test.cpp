#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "semcom/metrics.hpp"
#include "semcom/pipeline.hpp"
#include "semcom/rng.hpp"

#include <json.hpp>

using namespace semcom;

namespace {

Corpus small_corpus() {
  Corpus c;
  c.sentences = {
      {"The rain falls over the cold valley.", "weather"},
      {"The striker kicks the ball into the net.", "sports"},
      {"A dark cloud covers the quiet town.", "weather"},
      {"The keeper blocks the fast shot.", "sports"},
  };
  return c;
}

struct Rig {
  Corpus corpus = small_corpus();
  Vocab vocab = build_vocab(corpus, 1);
  MockKb kb = MockKb::with_bundled_lists(corpus);
  Stack stack;

  Rig() {
    SemCodecConfig sc;
    sc.d = 12;
    sc.layers = 1;
    sc.heads = 3;
    sc.d_ff = 24;
    sc.max_len = 16;
    sc.vocab = vocab.size();
    ChanCodecConfig cc;
    cc.d = 12;
    cc.hidden = 8;
    cc.k = 4;
    Rng rng(321);
    stack.kb = &kb;
    stack.vocab = vocab;
    stack.max_len = sc.max_len;
    stack.sem = SemCodecParams::init(sc, rng);
    stack.chan = ChanCodecParams::init(cc, rng);
  }
};

struct ThrowingKb : KbBackend {
  std::string id() const override { return "throwing"; }
  KbResult disambiguate(const std::string& text, const Background&) override {
    return {text};
  }
  KbResult correct(const std::string& text, const Background&) override {
    return {text};
  }
  KbResult encode(const std::string& text, const PromptDirective&) override {
    if (text.find("boom") != std::string::npos)
      throw RuntimeFailure("backend exploded");
    return {text};
  }
  KbResult decode(const std::string& text, const std::string&) override {
    return {text};
  }
};

}  // namespace

TEST_CASE("transcript adapters resolve media references") {
  PassThroughText pass;
  CHECK(pass.extract("hello world") == "hello world");

  CHECK(transcript_path_for("video.mp4") == "video.txt");
  CHECK(transcript_path_for("dir/clip.mov") == "dir/clip.txt");
  CHECK(transcript_path_for("noext") == "noext.txt");
  CHECK(transcript_path_for("a.b/file") == "a.b/file.txt");

  auto dir = std::filesystem::temp_directory_path() / "semcom_gse";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "clip.txt");
    out << "hello world\n";
  }
  FileTranscriptGse gse;
  CHECK(gse.extract((dir / "clip.mp4").string()) == "hello world");

  const std::string missing = (dir / "absent.mp4").string();
  try {
    gse.extract(missing);
    FAIL("expected an error for the missing transcript");
  } catch (const RuntimeFailure& e) {
    CHECK(std::string(e.what()).find((dir / "absent.txt").string()) !=
          std::string::npos);
  }
}

TEST_CASE("transmit runs the stages in order") {
  Rig rig;
  auto tx = transmit("The rain falls over the cold valley.", rig.stack, 10.0);
  const std::vector<std::string> want{"directive",       "kb_disambiguate",
                                      "kb_encode",       "tokenize",
                                      "semantic_encode", "channel_encode"};
  CHECK(tx.trace.stage_names() == want);

  rig.stack.kb_enabled = false;
  auto plain = transmit("The rain falls.", rig.stack, 10.0);
  const std::vector<std::string> bare{"directive", "tokenize",
                                      "semantic_encode", "channel_encode"};
  CHECK(plain.trace.stage_names() == bare);
  CHECK(plain.wire_text == "The rain falls.");
}

TEST_CASE("receive runs the inverse stages in order") {
  Rig rig;
  auto tx = transmit("A dark cloud covers the quiet town.", rig.stack, 10.0);
  auto rx = receive(tx.symbols.symbols, rig.stack, 10.0);
  const std::vector<std::string> want{"channel_decode", "semantic_decode",
                                      "detokenize", "kb_correct", "kb_decode"};
  CHECK(rx.trace.stage_names() == want);

  ChannelRealization realization;
  realization.h = Complex(0.8, -0.6);
  auto faded = receive(tx.symbols.symbols, rig.stack, 10.0, &realization);
  REQUIRE(!faded.trace.stages.empty());
  CHECK(faded.trace.stages.front().stage == "equalize");
}

TEST_CASE("empty text still frames bos and eos onto the wire") {
  Rig rig;
  auto tx = transmit("", rig.stack, 10.0);
  CHECK(tx.tokens.ids == std::vector<int>{kBosId, kEosId});
  // 2 positions x k/2 complex symbols each
  CHECK(tx.symbols.symbols.size() == 4);
}

TEST_CASE("wire symbols carry unit average power") {
  Rig rig;
  for (const auto& sentence : rig.corpus.sentences) {
    auto tx = transmit(sentence.text, rig.stack, 0.0);
    REQUIRE(!tx.symbols.degenerate);
    double power = 0.0;
    for (Index i = 0; i < tx.symbols.symbols.size(); ++i)
      power += std::norm(tx.symbols.symbols[i]);
    power /= static_cast<double>(tx.symbols.symbols.size());
    CHECK(power == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("the directive tracks the channel snr") {
  Rig rig;
  CHECK(transmit("x y", rig.stack, 0.0).trace.directive.snr_class ==
        SnrClass::Low);
  CHECK(transmit("x y", rig.stack, 10.0).trace.directive.snr_class ==
        SnrClass::Mid);
  CHECK(transmit("x y", rig.stack, 25.0).trace.directive.snr_class ==
        SnrClass::High);

  // High class: the knowledge base leaves the text alone
  auto tx = transmit("The keeper blocks the fast shot.", rig.stack, 25.0);
  CHECK(tx.wire_text == "The keeper blocks the fast shot.");
  // Low class: words were dropped
  auto low = transmit("The keeper blocks the fast shot.", rig.stack, 0.0);
  CHECK(low.wire_text.size() < tx.wire_text.size());
}

TEST_CASE("identity channel codec reduces to the semantic round trip") {
  Rig rig;
  rig.stack.kb_enabled = false;
  rig.stack.identity_chancodec = true;

  const std::string text = "The striker kicks the ball into the net.";
  auto tx = transmit(text, rig.stack, 25.0);
  auto rx = receive(tx.symbols.symbols, rig.stack, 25.0);

  const Matrix features = semantic_encode(tx.tokens.ids, rig.stack.sem);
  const auto direct = greedy_decode(semantic_decode(features, rig.stack.sem));
  CHECK(rx.tokens.ids == direct);
}

TEST_CASE("noiseless transmission is deterministic through the channel") {
  Rig rig;
  auto tx = transmit("The rain falls over the cold valley.", rig.stack, 10.0);
  const CVector wire =
      awgn(tx.symbols.symbols, kNoiselessSnrDb, 7);
  for (Index i = 0; i < wire.size(); ++i)
    CHECK(wire[i] == tx.symbols.symbols[i]);
  auto a = receive(wire, rig.stack, kNoiselessSnrDb);
  auto b = receive(wire, rig.stack, kNoiselessSnrDb);
  CHECK(a.tokens.ids == b.tokens.ids);
  CHECK(a.text == b.text);
}

TEST_CASE("deep fades mark the trial failed without text") {
  Rig rig;
  auto tx = transmit("A dark cloud covers the quiet town.", rig.stack, 5.0);
  ChannelRealization realization;
  realization.h = Complex(5e-13, 0.0);
  auto rx = receive(tx.symbols.symbols, rig.stack, 5.0, &realization);
  CHECK(rx.failed);
  CHECK(rx.text.empty());
  CHECK(rx.trace.failed);
  CHECK(rx.trace.failure == "deep fade");
}

TEST_CASE("round trips yield one record per sentence deterministically") {
  Rig rig;
  auto first = run_round_trip(rig.corpus, rig.stack, ChannelType::Awgn, 5.0, 99);
  REQUIRE(first.size() == rig.corpus.sentences.size());
  auto second = run_round_trip(rig.corpus, rig.stack, ChannelType::Awgn, 5.0, 99);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].sent_text == rig.corpus.sentences[i].text);
    CHECK(first[i].received_text == second[i].received_text);
    CHECK(first[i].received_tokens.ids == second[i].received_tokens.ids);
  }

  auto rayleigh =
      run_round_trip(rig.corpus, rig.stack, ChannelType::Rayleigh, 5.0, 99);
  auto rayleigh2 =
      run_round_trip(rig.corpus, rig.stack, ChannelType::Rayleigh, 5.0, 99);
  for (std::size_t i = 0; i < rayleigh.size(); ++i) {
    CHECK(rayleigh[i].failed == rayleigh2[i].failed);
    CHECK(rayleigh[i].received_text == rayleigh2[i].received_text);
  }
}

TEST_CASE("a failing backend spoils only its own sentence") {
  Rig rig;
  ThrowingKb kb;
  rig.stack.kb = &kb;
  Corpus corpus;
  corpus.sentences = {{"fine sentence one", std::nullopt},
                      {"boom goes this one", std::nullopt},
                      {"fine sentence two", std::nullopt}};
  auto records = run_round_trip(corpus, rig.stack, ChannelType::Awgn, 25.0, 1);
  REQUIRE(records.size() == 3);
  CHECK(!records[0].failed);
  CHECK(records[1].failed);
  CHECK(records[1].rx_trace.failure.find("backend exploded") !=
        std::string::npos);
  CHECK(!records[2].failed);
}

TEST_CASE("manifests reference the registered public record") {
  Rig rig;
  auto tx = transmit("The rain falls over the cold valley.", rig.stack, 10.0);
  auto bare = receive(tx.symbols.symbols, rig.stack, 10.0);
  CHECK(bare.manifest_json.empty());

  rig.stack.public_record =
      PublicKbRecord{"user7", "faces/user7.png", {0.1, -0.2, 0.3}};
  auto rx = receive(tx.symbols.symbols, rig.stack, 10.0);
  REQUIRE(!rx.manifest_json.empty());
  auto j = nlohmann::json::parse(rx.manifest_json);
  CHECK(j.at("user_id") == "user7");
  CHECK(j.at("face_image_path") == "faces/user7.png");
  CHECK(j.at("vocal_dim") == 3);
  CHECK(j.at("text") == rx.text);
  CHECK(j.at("channel") == "awgn");
  CHECK(j.at("snr_db") == 10.0);
  CHECK(j.at("flags").is_array());
  CHECK(rx.trace.stage_names().back() == "manifest");
}

TEST_CASE("stack validation rejects inconsistent wiring") {
  Rig rig;
  Stack broken = rig.stack;
  broken.kb = nullptr;
  CHECK_THROWS_AS(transmit("x", broken, 10.0), InvalidArgument);

  broken = rig.stack;
  broken.chan.config.d = 24;  // no longer matches the semantic width
  CHECK_THROWS_AS(transmit("x", broken, 10.0), InvalidArgument);

  broken = rig.stack;
  broken.max_len = 64;  // beyond the codec's positional table
  CHECK_THROWS_AS(transmit("x", broken, 10.0), InvalidArgument);

  // a wire that lost symbols no longer divides into code rows
  auto tx = transmit("x y z", rig.stack, 10.0);
  CVector truncated = tx.symbols.symbols.head(tx.symbols.symbols.size() - 1);
  CHECK_THROWS_AS(receive(truncated, rig.stack, 10.0), InvalidArgument);
}

TEST_CASE("snr sweeps emit bounded records and stable csv") {
  Rig rig;
  auto classifier = TinyClassifier::fit(rig.corpus);
  const std::vector<double> snrs{-5.0, 20.0};
  auto sweep = snr_sweep(rig.corpus, rig.stack, ChannelType::Awgn, snrs, 2, 42,
                         &classifier);
  REQUIRE(sweep.records.size() == 4);
  REQUIRE(sweep.summaries.size() == 2);
  for (const auto& row : sweep.records) {
    CHECK(row.token_accuracy >= 0.0);
    CHECK(row.token_accuracy <= 1.0);
    CHECK(row.bleu2 >= 0.0);
    CHECK(row.bleu2 <= 1.0);
    CHECK(row.cosine >= -1.0);
    CHECK(row.cosine <= 1.0);
    CHECK(row.downstream_accuracy >= 0.0);
    CHECK(row.downstream_accuracy <= 1.0);
    CHECK(row.compression_ratio >= 0.0);
    CHECK(row.compression_ratio < 1.0);
    CHECK(row.failed_trials == 0);  // awgn never fades
  }
  // low snr directive shortens the wire text
  CHECK(sweep.records[0].compression_ratio > 0.0);

  const std::string csv = sweep_csv(sweep);
  CHECK(csv.rfind("snr_db,seed,channel,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 + 2);
  CHECK(csv.find(",-1,") != std::string::npos);

  auto again = snr_sweep(rig.corpus, rig.stack, ChannelType::Awgn, snrs, 2, 42,
                         &classifier);
  CHECK(sweep_csv(again) == csv);
  CHECK(again.cliff == sweep.cliff);

  auto faded = snr_sweep(rig.corpus, rig.stack, ChannelType::Rayleigh, snrs, 2,
                         42, &classifier);
  for (const auto& row : faded.records) {
    CHECK(row.failed_trials >= 0);
    CHECK(row.token_accuracy >= 0.0);
    CHECK(row.token_accuracy <= 1.0);
  }

  CHECK_THROWS_AS(
      snr_sweep(Corpus{}, rig.stack, ChannelType::Awgn, snrs, 2, 42, nullptr),
      InvalidArgument);
  CHECK_THROWS_AS(snr_sweep(rig.corpus, rig.stack, ChannelType::Awgn, {}, 2, 42,
                            nullptr),
                  InvalidArgument);
  CHECK_THROWS_AS(snr_sweep(rig.corpus, rig.stack, ChannelType::Awgn, snrs, 0,
                            42, nullptr),
                  InvalidArgument);
}
