#include "semcom/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "semcom/rng.hpp"

namespace semcom {

std::string transcript_path_for(const std::string& media_ref) {
  const auto slash = media_ref.find_last_of("/\\");
  const auto dot = media_ref.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return media_ref + ".txt";
  return media_ref.substr(0, dot) + ".txt";
}

std::string FileTranscriptGse::extract(const std::string& media_ref) {
  const std::string path = transcript_path_for(media_ref);
  std::ifstream in(path);
  if (!in) throw RuntimeFailure("transcript not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
    text.pop_back();
  return text;
}

std::vector<std::string> StageTrace::stage_names() const {
  std::vector<std::string> names;
  names.reserve(stages.size());
  for (const auto& s : stages) names.push_back(s.stage);
  return names;
}

void StageTrace::add_text(const std::string& stage, const std::string& text,
                          bool flagged) {
  StageRecord r;
  r.stage = stage;
  r.text = text;
  r.flagged = flagged;
  stages.push_back(std::move(r));
}

void StageTrace::add_shape(const std::string& stage, Index rows, Index cols) {
  StageRecord r;
  r.stage = stage;
  r.rows = rows;
  r.cols = cols;
  stages.push_back(std::move(r));
}

void StageTrace::add_symbols(const std::string& stage, long symbols,
                             bool flagged) {
  StageRecord r;
  r.stage = stage;
  r.symbols = symbols;
  r.flagged = flagged;
  stages.push_back(std::move(r));
}

void Stack::validate() const {
  if (!kb) throw InvalidArgument("stack: null kb backend");
  fuzzy.validate();
  sem.config.validate();
  chan.config.validate();
  if (vocab.size() != sem.config.vocab)
    throw InvalidArgument("stack: vocab size does not match codec config");
  if (sem.config.d != chan.config.d)
    throw InvalidArgument("stack: semantic width does not match channel codec");
  if (max_len < 2 || max_len > sem.config.max_len)
    throw InvalidArgument("stack: max_len outside codec range");
}

namespace {

Vector flatten_rows(const Matrix& features) {
  Vector flat(features.rows() * features.cols());
  for (Index t = 0; t < features.rows(); ++t)
    for (Index j = 0; j < features.cols(); ++j)
      flat[t * features.cols() + j] = features(t, j);
  return flat;
}

Matrix unflatten_rows(const Vector& flat, Index cols) {
  if (cols <= 0 || flat.size() % cols != 0)
    throw InvalidArgument("pipeline: wire length not divisible by width");
  Matrix out(flat.size() / cols, cols);
  for (Index t = 0; t < out.rows(); ++t)
    for (Index j = 0; j < cols; ++j) out(t, j) = flat[t * cols + j];
  return out;
}

std::vector<std::string> flagged_stages(const StageTrace& trace) {
  std::vector<std::string> flags;
  for (const auto& s : trace.stages)
    if (s.flagged) flags.push_back(s.stage);
  return flags;
}

}  // namespace

TransmitResult transmit(const std::string& text, Stack& stack, double snr_db) {
  stack.validate();
  TransmitResult result;
  StageTrace& trace = result.trace;
  trace.directive = directive_for(snr_db, stack.fuzzy);
  trace.add_text("directive", snr_class_name(trace.directive.snr_class));

  std::string current = text;
  if (stack.kb_enabled) {
    const KbResult dis = stack.kb->disambiguate(current, stack.background);
    current = dis.text;
    trace.add_text("kb_disambiguate", current, dis.pass_through || dis.flagged);
    const KbResult enc = stack.kb->encode(current, trace.directive);
    current = enc.text;
    trace.add_text("kb_encode", current, enc.pass_through || enc.flagged);
  }
  result.wire_text = current;

  result.tokens = tokenize(current, stack.vocab, stack.max_len);
  trace.add_shape("tokenize", static_cast<Index>(result.tokens.ids.size()), 1);

  const Matrix features = semantic_encode(result.tokens.ids, stack.sem);
  trace.add_shape("semantic_encode", features.rows(), features.cols());

  if (stack.identity_chancodec) {
    result.symbols.symbols = pack_complex(flatten_rows(features));
    result.symbols.degenerate = false;
  } else {
    result.symbols = channel_encode(features, stack.chan);
  }
  trace.add_symbols("channel_encode",
                    static_cast<long>(result.symbols.symbols.size()),
                    result.symbols.degenerate);
  return result;
}

std::string synthesis_manifest(const PublicKbRecord& record,
                               const std::string& text, double snr_db,
                               const std::string& channel,
                               const std::vector<std::string>& flags) {
  nlohmann::json j{{"user_id", record.user_id},
                   {"face_image_path", record.face_image_path},
                   {"vocal_dim", record.vocal_features.size()},
                   {"text", text},
                   {"snr_db", snr_db},
                   {"channel", channel},
                   {"flags", flags}};
  return j.dump();
}

ReceiveResult receive(const CVector& symbols, Stack& stack, double snr_db,
                      const ChannelRealization* realization) {
  stack.validate();
  ReceiveResult result;
  StageTrace& trace = result.trace;
  trace.directive = directive_for(snr_db, stack.fuzzy);

  CVector current = symbols;
  if (realization) {
    if (std::abs(realization->h) <= kDeepFadeThreshold) {
      result.failed = true;
      trace.failed = true;
      trace.failure = "deep fade";
      return result;
    }
    current = equalize(current, *realization);
    trace.add_symbols("equalize", static_cast<long>(current.size()));
  }

  Matrix features;
  if (stack.identity_chancodec)
    features = unflatten_rows(unpack_complex(current), stack.sem.config.d);
  else
    features = channel_decode(current, stack.chan);
  trace.add_shape("channel_decode", features.rows(), features.cols());

  const Matrix logits = semantic_decode(features, stack.sem);
  trace.add_shape("semantic_decode", logits.rows(), logits.cols());
  result.tokens.ids = greedy_decode(logits);

  result.text = detokenize(result.tokens, stack.vocab);
  trace.add_text("detokenize", result.text);

  if (stack.kb_enabled) {
    const KbResult corr = stack.kb->correct(result.text, stack.background);
    result.text = corr.text;
    trace.add_text("kb_correct", result.text, corr.pass_through || corr.flagged);
    const KbResult dec = stack.kb->decode(result.text, "");
    result.text = dec.text;
    trace.add_text("kb_decode", result.text, dec.pass_through || dec.flagged);
  }

  if (stack.public_record) {
    result.manifest_json = synthesis_manifest(
        *stack.public_record, result.text, snr_db,
        realization ? "rayleigh" : "awgn", flagged_stages(trace));
    trace.add_text("manifest", result.manifest_json);
  }
  return result;
}

std::vector<RoundTripRecord> run_round_trip(const Corpus& corpus, Stack& stack,
                                            ChannelType channel, double snr_db,
                                            std::uint64_t seed) {
  stack.validate();
  std::vector<RoundTripRecord> records;
  records.reserve(corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    RoundTripRecord rec;
    rec.sent_text = corpus.sentences[i].text;
    try {
      TransmitResult tx = transmit(rec.sent_text, stack, snr_db);
      rec.wire_text = tx.wire_text;
      rec.sent_tokens = tx.tokens;
      rec.tx_trace = std::move(tx.trace);

      const std::uint64_t trial_seed =
          derive_seed(seed, "trial", static_cast<std::uint64_t>(i));
      CVector wire;
      ChannelRealization realization;
      const ChannelRealization* rp = nullptr;
      if (channel == ChannelType::Awgn) {
        wire = awgn(tx.symbols.symbols, snr_db, trial_seed);
      } else {
        wire = rayleigh_fade(tx.symbols.symbols, snr_db, trial_seed,
                             realization);
        rp = &realization;
      }

      ReceiveResult rx = receive(wire, stack, snr_db, rp);
      rec.received_text = rx.text;
      rec.received_tokens = rx.tokens;
      rec.failed = rx.failed;
      rec.rx_trace = std::move(rx.trace);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.rx_trace.failed = true;
      rec.rx_trace.failure = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace semcom
