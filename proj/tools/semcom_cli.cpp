#include "semcom/harness.hpp"

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"semantic communication experiment runner"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, baseline, channel, csv, text;
  std::string media, transcript, out_ckpt;
  double snr = 10.0;
  std::uint64_t seed = 1;
  bool kb_off = false;

  CLI::App* train =
      app.add_subcommand("train", "train the joint codec and write a checkpoint");
  train->add_option("config", config_path, "experiment config (ini)")
      ->required();
  double separate_at = 0.0;
  CLI::Option* sep_opt = train->add_option(
      "--separate-at", separate_at,
      "train the separate-coding baseline for this design SNR (dB) instead "
      "of the joint scheme");

  CLI::App* sweep =
      app.add_subcommand("sweep", "run an SNR sweep from a checkpoint");
  sweep->add_option("config", config_path, "experiment config (ini)")
      ->required();
  sweep->add_option("--checkpoint", checkpoint,
                    "checkpoint path (default: from config)");
  sweep->add_option("--baseline", baseline,
                    "baseline checkpoint for a cliff comparison");
  sweep->add_option("--channel", channel,
                    "awgn or rayleigh (default: from config)");
  sweep->add_flag("--no-kb", kb_off, "disable the knowledge-base stage");
  sweep->add_option("--out", csv, "metrics csv path");

  CLI::App* transmit =
      app.add_subcommand("transmit", "send one sentence and show the trace");
  transmit->add_option("config", config_path, "experiment config (ini)")
      ->required();
  transmit->add_option("--checkpoint", checkpoint,
                       "checkpoint path (default: from config)");
  transmit->add_option("--text", text, "sentence to transmit")->required();
  transmit->add_option("--snr", snr, "channel SNR in dB");
  transmit->add_option("--channel", channel,
                       "awgn or rayleigh (default: from config)");
  transmit->add_option("--seed", seed, "channel noise seed");

  CLI::App* tune = app.add_subcommand(
      "tune-fuzzy", "tune controller consequents against the knowledge base");
  tune->add_option("config", config_path, "experiment config (ini)")
      ->required();
  tune->add_option("--checkpoint", checkpoint,
                   "checkpoint path (default: from config)");
  tune->add_option("--out", out_ckpt,
                   "output checkpoint (default: overwrite input)");

  CLI::App* ratio =
      app.add_subcommand("ratio", "compression ratio of media vs transcript");
  ratio->add_option("media", media, "media file")->required();
  ratio->add_option("transcript", transcript, "transcript file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (train->parsed())
    return semcom::cmd_train(config_path, std::cout, std::cerr);
  if (sweep->parsed())
    return semcom::cmd_sweep(config_path, checkpoint, baseline, channel,
                             kb_off, csv, std::cout, std::cerr);
  if (transmit->parsed())
    return semcom::cmd_transmit(config_path, checkpoint, text, snr, channel,
                                seed, std::cout, std::cerr);
  if (tune->parsed())
    return semcom::cmd_tune_fuzzy(config_path, checkpoint, out_ckpt, std::cout,
                                  std::cerr);
  if (ratio->parsed())
    return semcom::cmd_ratio(media, transcript, std::cout, std::cerr);
  return 2;
}
