#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semcom/chancodec.hpp"
#include "semcom/channel.hpp"
#include "semcom/fuzzy.hpp"
#include "semcom/kb.hpp"
#include "semcom/semcodec.hpp"
#include "semcom/text.hpp"

namespace semcom {

// Media front end: turns a media reference into transmittable text.
class GseAdapter {
 public:
  virtual ~GseAdapter() = default;
  virtual std::string extract(const std::string& media_ref) = 0;
};

// The reference is already the text.
class PassThroughText : public GseAdapter {
 public:
  std::string extract(const std::string& media_ref) override {
    return media_ref;
  }
};

// Sidecar transcript path: media extension replaced by .txt.
std::string transcript_path_for(const std::string& media_ref);

// Reads the sidecar transcript of a media file.
class FileTranscriptGse : public GseAdapter {
 public:
  std::string extract(const std::string& media_ref) override;
};

// Pre-registered per-user synthesis assets referenced by manifests.
struct PublicKbRecord {
  std::string user_id;
  std::string face_image_path;
  std::vector<double> vocal_features;
};

struct StageRecord {
  std::string stage;
  std::string text;   // textual stages
  Index rows = 0;     // tensor stages
  Index cols = 0;
  long symbols = 0;   // channel stages
  bool flagged = false;
};

struct StageTrace {
  std::vector<StageRecord> stages;
  PromptDirective directive;
  bool failed = false;
  std::string failure;

  std::vector<std::string> stage_names() const;
  void add_text(const std::string& stage, const std::string& text,
                bool flagged = false);
  void add_shape(const std::string& stage, Index rows, Index cols);
  void add_symbols(const std::string& stage, long symbols,
                   bool flagged = false);
};

// One transmitter/receiver pair. Both directions read the same fuzzy
// parameters, so the directive consumed on the way out matches the SNR
// the channel and receiver see.
struct Stack {
  KbBackend* kb = nullptr;
  Background background;
  FuzzyParams fuzzy;
  SemCodecParams sem;
  ChanCodecParams chan;
  Vocab vocab;
  Index max_len = kDefaultMaxLen;
  bool kb_enabled = true;
  // Bypass the dense channel codec (features packed directly onto the
  // wire); isolates the semantic codec round trip in tests.
  bool identity_chancodec = false;
  std::optional<PublicKbRecord> public_record;

  void validate() const;
};

struct TransmitResult {
  ChannelSymbols symbols;
  TokenSequence tokens;   // framed ids actually placed on the wire
  std::string wire_text;  // text after knowledge-base encoding
  StageTrace trace;
};

// Y = channel_encode(semantic_encode(kb_encode(directive(snr), text))).
TransmitResult transmit(const std::string& text, Stack& stack, double snr_db);

struct ReceiveResult {
  std::string text;
  TokenSequence tokens;
  bool failed = false;         // deep fade: no text was recovered
  std::string manifest_json;   // set when a public record is registered
  StageTrace trace;
};

// Inverse chain; pass the fading realization to equalize first. A deep
// fade marks the trial failed instead of throwing.
ReceiveResult receive(const CVector& symbols, Stack& stack, double snr_db,
                      const ChannelRealization* realization = nullptr);

std::string synthesis_manifest(const PublicKbRecord& record,
                               const std::string& text, double snr_db,
                               const std::string& channel,
                               const std::vector<std::string>& flags);

struct RoundTripRecord {
  std::string sent_text;
  std::string received_text;
  std::string wire_text;
  TokenSequence sent_tokens;
  TokenSequence received_tokens;
  bool failed = false;
  StageTrace tx_trace;
  StageTrace rx_trace;
};

// One record per sentence; per-sentence failures are recorded and the run
// continues. Deterministic given (params, seed).
std::vector<RoundTripRecord> run_round_trip(const Corpus& corpus, Stack& stack,
                                            ChannelType channel, double snr_db,
                                            std::uint64_t seed);

}  // namespace semcom
