// neurorad: dataset generation, training, evaluation, benchmarking, encoding
// and the live demo server.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "neurorad/asdm_encoder.hpp"
#include "neurorad/byte_io.hpp"
#include "neurorad/dataset.hpp"
#include "neurorad/demo/server.hpp"
#include "neurorad/demo/session.hpp"
#include "neurorad/harness.hpp"
#include "neurorad/nrad_format.hpp"
#include "neurorad/tiny_classifier.hpp"

namespace {

using namespace neurorad;

EncoderMode parse_mode(const std::string& s) {
  if (s == "sample-and-update") return EncoderMode::SampleAndUpdate;
  if (s == "interpolated") return EncoderMode::InterpolatedCrossing;
  throw ValidationError("unknown encoder mode '" + s + "'");
}

SampledSignal read_csv_signal(const std::string& path, double sample_rate) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open");
  SampledSignal s{sample_rate, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    // Last comma-separated column is the voltage.
    const auto comma = line.rfind(',');
    const auto field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      std::size_t used = 0;
      s.samples.push_back(std::stod(field, &used));
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header row
      throw ValidationError(path + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  return s;
}

struct CommonEncoder {
  double delta = EncoderConfig{}.delta;
  std::string mode = "sample-and-update";

  EncoderConfig build() const {
    EncoderConfig c;
    c.delta = delta;
    c.mode = parse_mode(mode);
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neuromorphic radar gesture toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "synthesize a seeded dataset of NRAD event files");
  std::string gen_out = "data";
  DatasetConfig dcfg;
  int holdout = -1;
  CommonEncoder gen_enc;
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();
  gen->add_option("--per-class", dcfg.per_class, "recordings per class")->capture_default_str();
  gen->add_option("--train-per-class", dcfg.train_per_class, "training recordings per class")
      ->capture_default_str();
  gen->add_option("--seed", dcfg.seed, "dataset seed")->capture_default_str();
  gen->add_option("--duration", dcfg.duration, "recording length, s")->capture_default_str();
  gen->add_option("--holdout-profile", holdout,
                  "use this user profile (0-6) as the test split instead of the index split");
  gen->add_option("--delta", gen_enc.delta, "encoder threshold, V")->capture_default_str();
  gen->add_option("--mode", gen_enc.mode, "sample-and-update | interpolated")
      ->capture_default_str();

  // train
  auto* trn = app.add_subcommand("train", "train, quantize and save a model");
  std::string manifest_path = "data";
  std::string model_out = "model.nrnm";
  RunOptions ropt;
  trn->add_option("--manifest", manifest_path, "manifest file or dataset directory")
      ->capture_default_str();
  trn->add_option("--model-out", model_out, "NRNM output path")->capture_default_str();
  trn->add_option("--epochs", ropt.train.epochs)->capture_default_str();
  trn->add_option("--lr", ropt.train.lr)->capture_default_str();
  trn->add_option("--batch", ropt.train.batch)->capture_default_str();
  trn->add_option("--seed", ropt.train.seed)->capture_default_str();
  trn->add_option("--gate", ropt.gate.min_events, "minimum events for the activity gate")
      ->capture_default_str();

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a model on the test split");
  std::string model_path = "model.nrnm";
  double threshold = 0.85;
  ev->add_option("--manifest", manifest_path)->capture_default_str();
  ev->add_option("--model", model_path)->capture_default_str();
  ev->add_option("--threshold", threshold, "exit nonzero below this accuracy")
      ->capture_default_str();
  ev->add_option("--gate", ropt.gate.min_events)->capture_default_str();

  // bench
  auto* bn = app.add_subcommand("bench", "compare event and dense ADC/FFT pipelines");
  BenchOptions bopt;
  CommonEncoder bench_enc;
  std::string format = "text";
  bool no_dense = false;
  bn->add_option("--manifest", manifest_path)->capture_default_str();
  bn->add_option("--delta", bench_enc.delta)->capture_default_str();
  bn->add_option("--mode", bench_enc.mode)->capture_default_str();
  bn->add_option("--fs", bopt.adc.fs, "ADC rate, Hz")->capture_default_str();
  bn->add_option("--bits", bopt.adc.bits, "ADC resolution")->capture_default_str();
  bn->add_option("--idle-seeds", bopt.idle_seeds)->capture_default_str();
  bn->add_option("--format", format, "text | csv")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  bn->add_flag("--no-dense-accuracy", no_dense, "skip training the dense baseline classifier");

  // encode
  auto* enc = app.add_subcommand("encode", "encode one signal to an NRAD file");
  std::string input, synth_class, enc_out = "events.nrad";
  double input_rate = 8192.0;
  std::uint64_t synth_seed = 1;
  double synth_snr = 20.0;
  CommonEncoder enc_cfg;
  auto* in_opt = enc->add_option("--input", input, "CSV of voltages (last column)");
  auto* synth_opt =
      enc->add_option("--synth", synth_class, "synthesize a gesture class instead of reading CSV");
  in_opt->excludes(synth_opt);
  enc->add_option("--sample-rate", input_rate, "CSV sample rate, Hz")->capture_default_str();
  enc->add_option("--seed", synth_seed)->capture_default_str();
  enc->add_option("--snr", synth_snr, "dB")->capture_default_str();
  enc->add_option("--delta", enc_cfg.delta)->capture_default_str();
  enc->add_option("--mode", enc_cfg.mode)->capture_default_str();
  enc->add_option("--out", enc_out)->capture_default_str();

  // inspect
  auto* ins = app.add_subcommand("inspect", "describe an NRAD or NRNM file");
  std::string inspect_path;
  ins->add_option("file", inspect_path)->required();

  // serve / replay share the session configuration
  demo::ServerConfig scfg;
  CommonEncoder live_enc;
  std::string uart_path;
  double cooldown = scfg.session.debounce.cooldown_seconds;
  std::size_t debounce_k = scfg.session.debounce.run_length;
  std::size_t gate = scfg.session.live.gate.min_events;

  auto* srv = app.add_subcommand("serve", "run the websocket demo server");
  srv->add_option("--port", scfg.port)->envname("NEURORAD_PORT")->capture_default_str();
  srv->add_option("--address", scfg.address)->envname("NEURORAD_ADDRESS")->capture_default_str();
  srv->add_option("--model", model_path)->envname("NEURORAD_MODEL")->capture_default_str();
  srv->add_option("--delta", live_enc.delta)->envname("NEURORAD_DELTA")->capture_default_str();
  srv->add_option("--gate", gate)->envname("NEURORAD_GATE")->capture_default_str();
  srv->add_option("--debounce-k", debounce_k)->envname("NEURORAD_DEBOUNCE_K")->capture_default_str();
  srv->add_option("--cooldown", cooldown, "s")->envname("NEURORAD_COOLDOWN")->capture_default_str();
  srv->add_option("--speed", scfg.speed, "simulated seconds per wall second")
      ->capture_default_str();
  srv->add_option("--max-sessions", scfg.max_sessions)->capture_default_str();
  srv->add_option("--uart-sink", uart_path, "mirror labels as class byte + newline to this file")
      ->envname("NEURORAD_UART_SINK");

  auto* rp = app.add_subcommand("replay", "run one replay session offline and print its frames");
  std::string replay_class = "push-pull";
  std::uint64_t replay_seed = 1;
  double replay_tail = 1.0;
  bool show_events = false;
  rp->add_option("--class", replay_class)->capture_default_str();
  rp->add_option("--seed", replay_seed)->capture_default_str();
  rp->add_option("--model", model_path)->capture_default_str();
  rp->add_option("--duration", scfg.session.replay_duration, "gesture length, s")
      ->capture_default_str();
  rp->add_option("--tail", replay_tail, "idle time after the gesture, s")->capture_default_str();
  rp->add_option("--delta", live_enc.delta)->capture_default_str();
  rp->add_option("--gate", gate)->capture_default_str();
  rp->add_flag("--events", show_events, "include EVTB frames");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (holdout >= 0) dcfg.holdout_profile = holdout;
      dcfg.encoder = gen_enc.build();
      const auto m = gen_dataset(gen_out, dcfg);
      std::cout << "records " << m.records.size() << "\n"
                << "train " << m.split(Split::Train).size() << "\n"
                << "test " << m.split(Split::Test).size() << "\n"
                << "manifest " << (m.root / kManifestName).string() << "\n";
    } else if (trn->parsed()) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto rep = run_train(load_manifest(manifest_path), ropt, model_out);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << "initial_loss " << rep.initial_loss << "\n"
                << "final_loss " << rep.final_loss << "\n"
                << "train_accuracy " << rep.train_accuracy << "\n"
                << "float_test_accuracy " << rep.float_test_accuracy << "\n"
                << "quant_test_accuracy " << rep.test.accuracy << "\n"
                << "model_bytes " << rep.model_bytes << "\n"
                << "seconds " << secs << "\n";
    } else if (ev->parsed()) {
      const auto q = load_model(model_path);
      const auto metrics = run_eval(load_manifest(manifest_path), q, ropt);
      print_metrics(std::cout, metrics);
      std::cout << "model_bytes " << q.serialized_size() << "\n";
      if (metrics.accuracy < threshold) {
        std::cerr << "accuracy " << metrics.accuracy << " below threshold " << threshold << "\n";
        return 2;
      }
    } else if (bn->parsed()) {
      bopt.encoder = bench_enc.build();
      bopt.dense_accuracy = !no_dense;
      const auto rep = run_bench(load_manifest(manifest_path), bopt);
      if (format == "csv")
        print_bench_table(std::cout, rep);
      else
        print_bench_text(std::cout, rep);
    } else if (enc->parsed()) {
      SampledSignal signal;
      if (!input.empty()) {
        signal = read_csv_signal(input, input_rate);
      } else if (!synth_class.empty()) {
        const auto cls = parse_gesture(synth_class);
        signal = demo::replay_signal(cls, synth_seed, 2.0, synth_snr, RadarConfig{});
      } else {
        throw ValidationError("encode needs --input or --synth");
      }
      const auto stream = encode(signal, enc_cfg.build());
      save_event_stream(enc_out, stream);
      const auto st = event_stats(stream);
      std::cout << "samples " << signal.samples.size() << "\n"
                << "events " << stream.events.size() << "\n"
                << "positive " << st.pos_count << "\n"
                << "negative " << st.neg_count << "\n"
                << "bytes " << kNradHeaderBytes + kNradRecordBytes * stream.events.size() << "\n";
    } else if (ins->parsed()) {
      const auto bytes = read_file_bytes(inspect_path);
      if (!magic_mismatch(bytes, "NRAD")) {
        const auto s = parse_event_stream(bytes);
        const auto st = event_stats(s);
        std::cout << "format NRAD\n"
                  << "tick_rate " << s.tick_rate << "\n"
                  << "duration_ticks " << s.duration_ticks << "\n"
                  << "events " << s.events.size() << "\n"
                  << "positive " << st.pos_count << "\n"
                  << "negative " << st.neg_count << "\n";
      } else if (!magic_mismatch(bytes, "NRNM")) {
        const auto q = parse_quant_model(bytes);
        std::cout << "format NRNM\n"
                  << "dims " << q.spec().input << " " << q.spec().hidden << " " << q.spec().output
                  << "\n"
                  << "parameters " << q.spec().parameter_count() << "\n"
                  << "bytes " << q.serialized_size() << "\n"
                  << "hidden_scale " << q.hidden().scale << "\n"
                  << "output_scale " << q.output().scale << "\n";
      } else {
        throw FormatError(0, "unrecognized magic");
      }
    } else if (srv->parsed() || rp->parsed()) {
      auto model = std::make_shared<const QuantModel>(load_model(model_path));
      auto& sc = scfg.session;
      sc.live.encoder = live_enc.build();
      sc.live.gate.min_events = gate;
      sc.debounce.run_length = debounce_k;
      sc.debounce.cooldown_seconds = cooldown;
      std::shared_ptr<demo::UartMirror> uart;
      if (!uart_path.empty()) {
        uart = std::make_shared<demo::UartMirror>(uart_path);
        sc.uart = [uart](GestureClass c) { uart->write(c); };
      }
      if (srv->parsed()) {
        scfg.log = [](const std::string& s) { std::cerr << s << "\n"; };
        demo::Server server(scfg, model);
        std::cerr << "listening on ws://" << scfg.address << ":" << server.port() << "\n";
        server.run(2);
      } else {
        demo::Session session(sc, model, nullptr, replay_seed);
        const auto cls = parse_gesture(replay_class);
        for (const char* line : {"HELLO 1", "MODE replay"})
          for (const auto& f : session.handle(line).frames) std::cout << f << "\n";
        for (const auto& f :
             session.handle("REPLAY " + std::to_string(code(cls)) + " " + std::to_string(replay_seed))
                 .frames)
          std::cout << f << "\n";
        const double step = 0.02;
        const auto steps = static_cast<int>(std::ceil((sc.replay_duration + replay_tail) / step));
        for (int i = 0; i < steps; ++i)
          for (const auto& f : session.tick(step))
            if (show_events || !demo::starts_with(f, "EVTB")) std::cout << f << "\n";
        std::cerr << "classifier_calls " << session.classifier_calls() << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
