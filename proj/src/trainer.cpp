#include "semcom/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <tuple>

#include <json.hpp>

namespace semcom {

void TrainConfig::validate() const {
  if (epochs < 0) throw InvalidArgument("train config: negative epochs");
  if (batch_size < 1) throw InvalidArgument("train config: batch size must be >= 1");
  if (snr_lo_db > snr_hi_db)
    throw InvalidArgument("train config: snr_lo_db above snr_hi_db");
  if (lambda_ce < 0.0 || lambda_mi < 0.0)
    throw InvalidArgument("train config: negative loss weight");
  if (mi_negatives < 1)
    throw InvalidArgument("train config: mi_negatives must be >= 1");
  if (mi_tau <= 0.0) throw InvalidArgument("train config: mi_tau must be positive");
}

double sample_snr(const TrainConfig& config, Rng& rng) {
  return config.snr_lo_db +
         (config.snr_hi_db - config.snr_lo_db) * rng.next_double();
}

namespace {

struct SentenceState {
  SemEncodeCache sem_cache;
  ChanEncodeCache enc_cache;
  ChanDecodeCache dec_cache;
  CVector received;
  Matrix recon;
  Matrix logits;
  Index row_offset = 0;  // first row in the pooled MI sample matrices
};

}  // namespace

JointBatchStats joint_batch(const std::vector<TokenSequence>& batch,
                            const SemCodecParams& sem,
                            const ChanCodecParams& chan,
                            const Matrix& critic_wc, double snr_db,
                            ChannelType channel, std::uint64_t noise_seed,
                            const TrainConfig& config, SemCodecParams* g_sem,
                            ChanCodecParams* g_chan, Matrix* g_wc) {
  config.validate();
  if (batch.empty()) throw InvalidArgument("joint_batch: empty batch");
  const Index k = chan.config.k;
  if (critic_wc.rows() != k || critic_wc.cols() != k)
    throw InvalidArgument("joint_batch: critic projection must be k x k");
  const bool want_grads = g_sem || g_chan || g_wc;
  if (want_grads && !(g_sem && g_chan && g_wc))
    throw InvalidArgument("joint_batch: gradient outputs must be all or none");

  const double sigma2 =
      snr_db >= kNoiselessSnrDb ? 0.0 : noise_power_for(snr_db);
  Rng noise(noise_seed);

  Index total_rows = 0;
  for (const auto& seq : batch) total_rows += static_cast<Index>(seq.ids.size());
  Matrix x_rows(total_rows, k), y_rows(total_rows, k);

  std::vector<SentenceState> states(batch.size());
  JointBatchStats stats;
  double ce_sum = 0.0;
  Index offset = 0;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    SentenceState& st = states[s];
    st.row_offset = offset;
    const Matrix features = semantic_encode(batch[s].ids, sem, st.sem_cache);
    const ChannelSymbols symbols = channel_encode(features, chan, st.enc_cache);

    Complex h{1.0, 0.0};
    if (channel == ChannelType::Rayleigh) {
      do {
        h = noise.next_cgaussian(1.0);
      } while (std::abs(h) <= kDeepFadeThreshold);
    }
    // perfect-CSI equalized form: y = x + n / h; the sample is a pure
    // function of the seed, so parameters never leak into the noise
    st.received = symbols.symbols;
    for (Index j = 0; j < st.received.size(); ++j) {
      if (sigma2 > 0.0) {
        Complex n = noise.next_cgaussian(sigma2);
        if (channel == ChannelType::Rayleigh) n /= h;
        st.received[j] += n;
      }
    }

    const Index rows = features.rows();
    const Vector y_flat = unpack_complex(st.received);
    for (Index t = 0; t < rows; ++t)
      for (Index j = 0; j < k; ++j) {
        x_rows(offset + t, j) = st.enc_cache.normalized[t * k + j];
        y_rows(offset + t, j) = y_flat[t * k + j];
      }
    offset += rows;

    st.recon = channel_decode(st.received, chan, st.dec_cache);
    st.logits = semantic_decode(st.recon, sem);
    ce_sum += sequence_ce(st.logits, batch[s].ids);
    stats.tokens += static_cast<long>(batch[s].ids.size());
  }
  stats.ce = ce_sum / static_cast<double>(stats.tokens);

  const int negatives = static_cast<int>(
      std::min<Index>(config.mi_negatives, total_rows - 1));
  MiEstimate mi;
  if (total_rows >= 2 && negatives >= 1) {
    if (want_grads)
      mi = mi_lower_bound_grad(x_rows, y_rows, critic_wc, negatives,
                               config.mi_tau);
    else
      mi.value =
          mi_lower_bound(x_rows * critic_wc, y_rows, negatives, config.mi_tau);
  }
  stats.mi_lb = mi.value;
  stats.total = config.lambda_ce * stats.ce - config.lambda_mi * stats.mi_lb;
  if (!want_grads) return stats;

  if (mi.d_wc.size() > 0) *g_wc -= config.lambda_mi * mi.d_wc;
  const double ce_scale =
      config.lambda_ce / static_cast<double>(stats.tokens);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    SentenceState& st = states[s];
    const Matrix d_logits =
        sequence_ce_backward(st.logits, batch[s].ids) * ce_scale;
    Matrix d_recon;
    semantic_decode_backward(st.recon, sem, d_logits, d_recon, *g_sem);
    CVector d_received;
    channel_decode_backward(st.dec_cache, chan, d_recon, d_received, *g_chan);

    // received = transmitted + noise, so the decoder path reaches the
    // transmitted symbols unchanged; both MI sides land there too
    Vector d_flat = unpack_complex(d_received);
    const Index rows = st.recon.rows();
    if (mi.d_x.size() > 0) {
      for (Index t = 0; t < rows; ++t)
        for (Index j = 0; j < k; ++j)
          d_flat[t * k + j] -=
              config.lambda_mi *
              (mi.d_x(st.row_offset + t, j) + mi.d_y(st.row_offset + t, j));
    }
    Matrix d_features;
    channel_encode_backward(st.enc_cache, chan, pack_complex(d_flat),
                            d_features, *g_chan);
    semantic_encode_backward(st.sem_cache, sem, d_features, *g_sem);
  }
  return stats;
}

namespace {

template <class Params>
void adam_family(Adam& opt, const std::string& prefix, Params& params,
                 const Params& grads) {
  struct Ref {
    const double* g;
    Index n;
  };
  std::vector<Ref> refs;
  grads.for_each_tensor(
      [&refs](const std::string&, const double* g, Index rows, Index cols) {
        refs.push_back({g, rows * cols});
      });
  std::size_t i = 0;
  params.for_each_tensor(
      [&](const std::string& name, double* w, Index rows, Index cols) {
        if (i >= refs.size() || refs[i].n != rows * cols)
          throw InvalidArgument("train_joint: gradient layout mismatch");
        opt.update(prefix + name, w, refs[i].g, rows * cols);
        ++i;
      });
}

}  // namespace

namespace {

struct TrainState {
  Adam opt;
  Rng order_rng;
  SemCodecParams g_sem;
  ChanCodecParams g_chan;
  Matrix g_wc;
  long step = 0;

  TrainState(const Stack& stack, const TrainConfig& config)
      : opt(config.adam),
        order_rng(derive_seed(config.master_seed, "order", 0)),
        g_sem(SemCodecParams::zeros(stack.sem.config)),
        g_chan(ChanCodecParams::zeros(stack.chan.config)),
        g_wc(Matrix::Zero(stack.chan.config.k, stack.chan.config.k)) {}
};

// One pass of config.epochs epochs. snr_rng selects the per-step snr from
// the configured range; a null snr_rng pins every step to fixed_snr.
// update_sem=false freezes the semantic codec (its gradients are computed
// and discarded), which is what the separate-coding scheme needs.
void run_stage(const Corpus& corpus, Stack& stack, const TrainConfig& config,
               TrainState& ts, TrainResult& result, Rng* snr_rng,
               double fixed_snr, bool update_sem, const char* who) {
  const Index k = stack.chan.config.k;
  const std::size_t n = corpus.sentences.size();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i)
      std::swap(order[i - 1], order[ts.order_rng.next_u64() % i]);

    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(config.batch_size)) {
      const double snr = snr_rng ? sample_snr(config, *snr_rng) : fixed_snr;

      // The knowledge stage runs ahead of tokenization, exactly as it does
      // on the wire, so low-snr steps train on directive-compressed text.
      // Gradients never touch it: it only shapes the batch.
      std::vector<TokenSequence> batch;
      const std::size_t end =
          std::min(n, start + static_cast<std::size_t>(config.batch_size));
      for (std::size_t i = start; i < end; ++i) {
        std::string text = corpus.sentences[order[i]].text;
        if (stack.kb_enabled && stack.kb != nullptr) {
          text = stack.kb->disambiguate(text, stack.background).text;
          text = stack.kb->encode(text, directive_for(snr, stack.fuzzy)).text;
        }
        batch.push_back(tokenize(text, stack.vocab, stack.max_len));
      }
      const std::uint64_t noise_seed = derive_seed(
          config.master_seed, "noise", static_cast<std::uint64_t>(ts.step));
      zero_tensors(ts.g_sem);
      zero_tensors(ts.g_chan);
      ts.g_wc.setZero();
      const JointBatchStats stats =
          joint_batch(batch, stack.sem, stack.chan, result.critic_wc, snr,
                      config.channel, noise_seed, config, &ts.g_sem,
                      &ts.g_chan, &ts.g_wc);
      if (!std::isfinite(stats.total))
        throw RuntimeFailure(std::string(who) + ": non-finite loss at step " +
                             std::to_string(ts.step) + " (ce=" +
                             std::to_string(stats.ce) + ", mi=" +
                             std::to_string(stats.mi_lb) + ")");

      ts.opt.begin_step();
      if (update_sem) adam_family(ts.opt, "sem.", stack.sem, ts.g_sem);
      adam_family(ts.opt, "chan.", stack.chan, ts.g_chan);
      ts.opt.update("critic.wc", result.critic_wc.data(), ts.g_wc.data(),
                    k * k);

      ++ts.step;
      result.history.push_back({ts.step, stats.ce, stats.mi_lb, stats.total});
    }
  }
}

TrainResult init_result(const Stack& stack, const Matrix* critic_wc0,
                        const char* who) {
  const Index k = stack.chan.config.k;
  TrainResult result;
  if (critic_wc0) {
    if (critic_wc0->rows() != k || critic_wc0->cols() != k)
      throw InvalidArgument(std::string(who) +
                            ": critic projection must be k x k");
    result.critic_wc = *critic_wc0;
  } else {
    result.critic_wc = Matrix::Identity(k, k);
  }
  return result;
}

}  // namespace

TrainResult train_joint(const Corpus& corpus, Stack& stack,
                        const TrainConfig& config, const Matrix* critic_wc0) {
  config.validate();
  stack.validate();
  if (corpus.sentences.empty())
    throw InvalidArgument("train_joint: empty corpus");

  TrainResult result = init_result(stack, critic_wc0, "train_joint");
  TrainState ts(stack, config);
  Rng snr_rng(derive_seed(config.master_seed, "snr", 0));
  run_stage(corpus, stack, config, ts, result, &snr_rng, 0.0,
            /*update_sem=*/true, "train_joint");
  if (!result.history.empty()) result.final_loss = result.history.back().total;
  return result;
}

TrainResult train_separate(const Corpus& corpus, Stack& stack,
                           const TrainConfig& config, double design_snr_db,
                           const Matrix* critic_wc0) {
  config.validate();
  stack.validate();
  if (corpus.sentences.empty())
    throw InvalidArgument("train_separate: empty corpus");
  if (!std::isfinite(design_snr_db))
    throw InvalidArgument("train_separate: design snr must be finite");

  TrainResult result = init_result(stack, critic_wc0, "train_separate");
  TrainState ts(stack, config);
  // source code first, with the channel transparent
  run_stage(corpus, stack, config, ts, result, nullptr, kNoiselessSnrDb,
            /*update_sem=*/true, "train_separate");
  // then the channel code alone at the design point
  run_stage(corpus, stack, config, ts, result, nullptr, design_snr_db,
            /*update_sem=*/false, "train_separate");
  if (!result.history.empty()) result.final_loss = result.history.back().total;
  return result;
}

std::string loss_history_csv(const std::vector<TrainStepStats>& history) {
  std::string out = "step,ce,mi_lb,total\n";
  char line[128];
  for (const auto& row : history) {
    std::snprintf(line, sizeof line, "%ld,%.9g,%.9g,%.9g\n", row.step, row.ce,
                  row.mi_lb, row.total);
    out += line;
  }
  return out;
}

double finite_diff_check(const std::function<double()>& loss,
                         const std::vector<GradSlot>& slots, double step) {
  if (step <= 0.0) throw InvalidArgument("finite_diff_check: step must be positive");
  double worst = 0.0;
  for (const GradSlot& slot : slots) {
    const double saved = *slot.value;
    *slot.value = saved + step;
    const double fp = loss();
    *slot.value = saved - step;
    const double fm = loss();
    *slot.value = saved;
    const double numeric = (fp - fm) / (2.0 * step);
    const double denom =
        std::max({std::abs(numeric), std::abs(slot.analytic), 1e-4});
    worst = std::max(worst, std::abs(numeric - slot.analytic) / denom);
  }
  return worst;
}

namespace {

constexpr char kCkptMagic[8] = {'S', 'E', 'M', 'C', 'K', 'P', 'T', '\0'};

void append_rowmajor(std::string& out, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      char buf[sizeof v];
      std::memcpy(buf, &v, sizeof v);
      out.append(buf, sizeof v);
    }
}

nlohmann::json vec3_json(const Eigen::Vector3d& v) {
  return nlohmann::json{v[0], v[1], v[2]};
}

Eigen::Vector3d vec3_from(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

Checkpoint snapshot_stack(const Stack& stack, const Matrix* critic_wc) {
  Checkpoint ckpt;
  ckpt.fuzzy = stack.fuzzy;
  ckpt.sem_config = stack.sem.config;
  ckpt.chan_config = stack.chan.config;
  ckpt.max_len = stack.max_len;
  for (int id = kReservedCount; id < stack.vocab.size(); ++id)
    ckpt.vocab_tokens.push_back(stack.vocab.token_of(id));
  stack.sem.for_each_tensor(
      [&](const std::string& name, const double* d, Index r, Index c) {
        ckpt.tensors.emplace_back("sem." + name,
                                  Matrix(Eigen::Map<const Matrix>(d, r, c)));
      });
  stack.chan.for_each_tensor(
      [&](const std::string& name, const double* d, Index r, Index c) {
        ckpt.tensors.emplace_back("chan." + name,
                                  Matrix(Eigen::Map<const Matrix>(d, r, c)));
      });
  if (critic_wc) ckpt.tensors.emplace_back("critic.wc", *critic_wc);
  return ckpt;
}

void save_checkpoint(const std::string& path, Checkpoint& ckpt) {
  nlohmann::json header;
  header["format"] = ckpt.version;
  header["max_len"] = ckpt.max_len;
  header["sem_config"] = {{"d", ckpt.sem_config.d},
                          {"layers", ckpt.sem_config.layers},
                          {"heads", ckpt.sem_config.heads},
                          {"d_ff", ckpt.sem_config.d_ff},
                          {"max_len", ckpt.sem_config.max_len},
                          {"vocab", ckpt.sem_config.vocab}};
  header["chan_config"] = {{"d", ckpt.chan_config.d},
                           {"hidden", ckpt.chan_config.hidden},
                           {"k", ckpt.chan_config.k}};
  header["fuzzy"] = {{"a", vec3_json(ckpt.fuzzy.a)},
                     {"b", vec3_json(ckpt.fuzzy.b)},
                     {"c", vec3_json(ckpt.fuzzy.c)},
                     {"p", vec3_json(ckpt.fuzzy.p)},
                     {"q", vec3_json(ckpt.fuzzy.q)}};
  header["vocab"] = ckpt.vocab_tokens;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [name, m] : ckpt.tensors)
    table.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  header["tensors"] = table;

  const std::string json = header.dump();
  std::string data;
  for (const auto& [name, m] : ckpt.tensors) append_rowmajor(data, m);

  std::uint64_t hash = fnv1a64(json.data(), json.size());
  hash = fnv1a64(data.data(), data.size(), hash);
  ckpt.content_hash = hash;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("checkpoint: cannot write " + path);
  out.write(kCkptMagic, sizeof kCkptMagic);
  const std::uint32_t version = ckpt.version;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&hash), sizeof hash);
  const std::uint64_t json_len = json.size();
  out.write(reinterpret_cast<const char*>(&json_len), sizeof json_len);
  out.write(json.data(), static_cast<std::streamsize>(json.size()));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw RuntimeFailure("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("checkpoint: cannot open " + path);
  char magic[sizeof kCkptMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCkptMagic, sizeof magic) != 0)
    throw RuntimeFailure("checkpoint: not a checkpoint file: " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in || version != kCheckpointVersion)
    throw RuntimeFailure("checkpoint: unsupported version " +
                         std::to_string(version));
  std::uint64_t stored_hash = 0, json_len = 0;
  in.read(reinterpret_cast<char*>(&stored_hash), sizeof stored_hash);
  in.read(reinterpret_cast<char*>(&json_len), sizeof json_len);
  if (!in) throw RuntimeFailure("checkpoint: truncated header in " + path);

  std::string blob((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (fnv1a64(blob.data(), blob.size()) != stored_hash)
    throw RuntimeFailure("checkpoint: content hash mismatch in " + path);
  if (json_len > blob.size())
    throw RuntimeFailure("checkpoint: corrupt header length in " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(0, json_len));
  } catch (const std::exception& e) {
    throw RuntimeFailure(std::string("checkpoint: corrupt header json: ") +
                         e.what());
  }

  Checkpoint ckpt;
  ckpt.version = version;
  ckpt.content_hash = stored_hash;
  ckpt.max_len = header.at("max_len").get<Index>();
  const auto& sc = header.at("sem_config");
  ckpt.sem_config.d = sc.at("d").get<Index>();
  ckpt.sem_config.layers = sc.at("layers").get<int>();
  ckpt.sem_config.heads = sc.at("heads").get<int>();
  ckpt.sem_config.d_ff = sc.at("d_ff").get<Index>();
  ckpt.sem_config.max_len = sc.at("max_len").get<Index>();
  ckpt.sem_config.vocab = sc.at("vocab").get<Index>();
  const auto& cc = header.at("chan_config");
  ckpt.chan_config.d = cc.at("d").get<Index>();
  ckpt.chan_config.hidden = cc.at("hidden").get<Index>();
  ckpt.chan_config.k = cc.at("k").get<Index>();
  const auto& fz = header.at("fuzzy");
  ckpt.fuzzy.a = vec3_from(fz.at("a"));
  ckpt.fuzzy.b = vec3_from(fz.at("b"));
  ckpt.fuzzy.c = vec3_from(fz.at("c"));
  ckpt.fuzzy.p = vec3_from(fz.at("p"));
  ckpt.fuzzy.q = vec3_from(fz.at("q"));
  ckpt.vocab_tokens = header.at("vocab").get<std::vector<std::string>>();

  std::size_t need = 0;
  for (const auto& row : header.at("tensors"))
    need += row.at("rows").get<std::size_t>() * row.at("cols").get<std::size_t>();
  if (blob.size() - json_len != need * sizeof(double))
    throw RuntimeFailure("checkpoint: tensor data length mismatch in " + path);

  std::size_t pos = json_len;
  for (const auto& row : header.at("tensors")) {
    const Index rows = row.at("rows").get<Index>();
    const Index cols = row.at("cols").get<Index>();
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) {
        double v;
        std::memcpy(&v, blob.data() + pos, sizeof v);
        pos += sizeof v;
        m(r, c) = v;
      }
    ckpt.tensors.emplace_back(row.at("name").get<std::string>(), std::move(m));
  }
  return ckpt;
}

void apply_checkpoint(const Checkpoint& ckpt, Stack& stack, Matrix* critic_wc) {
  ckpt.sem_config.validate();
  ckpt.chan_config.validate();
  stack.sem = SemCodecParams::zeros(ckpt.sem_config);
  stack.chan = ChanCodecParams::zeros(ckpt.chan_config);
  stack.fuzzy = ckpt.fuzzy;
  stack.vocab = Vocab(ckpt.vocab_tokens);
  stack.max_len = ckpt.max_len;

  std::map<std::string, std::tuple<double*, Index, Index>> dest;
  stack.sem.for_each_tensor(
      [&](const std::string& name, double* d, Index r, Index c) {
        dest["sem." + name] = {d, r, c};
      });
  stack.chan.for_each_tensor(
      [&](const std::string& name, double* d, Index r, Index c) {
        dest["chan." + name] = {d, r, c};
      });

  bool critic_seen = false;
  for (const auto& [name, m] : ckpt.tensors) {
    if (name == "critic.wc") {
      if (m.rows() != ckpt.chan_config.k || m.cols() != ckpt.chan_config.k)
        throw RuntimeFailure("checkpoint: critic projection shape mismatch");
      if (critic_wc) *critic_wc = m;
      critic_seen = true;
      continue;
    }
    auto it = dest.find(name);
    if (it == dest.end())
      throw RuntimeFailure("checkpoint: unexpected tensor " + name);
    auto [d, r, c] = it->second;
    if (m.rows() != r || m.cols() != c)
      throw RuntimeFailure("checkpoint: shape mismatch for " + name);
    Eigen::Map<Matrix>(d, r, c) = m;
    dest.erase(it);
  }
  if (!dest.empty())
    throw RuntimeFailure("checkpoint: missing tensor " + dest.begin()->first);
  if (critic_wc && !critic_seen)
    *critic_wc = Matrix::Identity(ckpt.chan_config.k, ckpt.chan_config.k);
}

}  // namespace semcom
