// rdars-sim: scenario-driven simulator and control-link tools for the
// dual-mode surface localization testbed. Subcommands:
//
//   run       full two-stage localization experiment, CSV/JSON output
//   sweep     stage 1 only on the scenario's fixed UE, emit the RSSI map
//   estimate  stage 2 from given powers and geometry
//   serve     run the device emulator until interrupted
//   frame     encode/decode control frames to/from hex

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdars/control/client.hpp"
#include "rdars/control/device_server.hpp"
#include "rdars/experiment.hpp"
#include "rdars/link_rate.hpp"
#include "rdars/results_io.hpp"
#include "rdars/rng.hpp"

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void handle_signal(int) { g_interrupted = 1; }

rdars::TransportSpec parse_transport(const std::string& text) {
  rdars::TransportSpec transport;
  if (text == "oracle") {
    transport.kind = rdars::TransportKind::oracle;
    return transport;
  }
  if (text.rfind("udp:", 0) == 0) {
    transport.kind = rdars::TransportKind::udp;
    transport.endpoint = rdars::ctrl::parse_endpoint(text.substr(4));
    return transport;
  }
  throw CLI::ValidationError("--transport", "expected 'oracle' or 'udp:<host:port>'");
}

void emit_or_print(const rdars::ExperimentResult& result,
                   rdars::ResultFormat format, const std::string& out_path) {
  if (out_path.empty()) {
    if (format == rdars::ResultFormat::csv) {
      rdars::write_csv(result, std::cout);
    } else {
      rdars::write_json(result, std::cout);
    }
  } else {
    rdars::write_results(result, format, out_path);
  }
}

int run_command(const std::string& scenario_path, std::optional<int> trials,
                std::optional<std::uint64_t> seed, const std::string& out_path,
                const std::string& format_text, const std::string& transport_text,
                int threads, bool traces) {
  rdars::FileConfig cfg = rdars::load_config(scenario_path);
  if (trials) cfg.experiment.trials = *trials;
  if (seed) cfg.experiment.seed = *seed;

  rdars::ExperimentSpec spec;
  spec.scenario = cfg.scenario;
  spec.grid = cfg.grid;
  spec.params = cfg.experiment;
  spec.transport = parse_transport(transport_text);
  spec.threads = threads;
  spec.keep_traces = traces;

  const auto result = rdars::run_experiment(spec);
  emit_or_print(result, rdars::result_format_from_string(format_text), out_path);

  const rdars::Summary& s = result.summary;
  std::cerr << "trials " << s.trials_ok << "/" << s.trials_total
            << " ok, median angle error "
            << s.median_angle_error_deg << " deg, median range error "
            << s.median_range_error_m << " m\n";
  return 0;
}

int sweep_command(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                  const std::string& out_path, const std::string& format_text) {
  rdars::FileConfig cfg = rdars::load_config(scenario_path);
  if (seed) cfg.experiment.seed = *seed;
  const rdars::Scenario& sc = cfg.scenario;

  auto rng = rdars::make_stream(cfg.experiment.seed, 0);
  rdars::ShadowDraws draws;
  const double sigma = sc.channel.shadowing_sigma_db;
  draws.ue_bs_db = sigma * rdars::normal(rng);
  draws.ue_rdars_db = sigma * rdars::normal(rng);
  draws.rdars_bs_db = sigma * rdars::normal(rng);

  const rdars::UplinkChannel channel(sc, draws);
  const auto result = rdars::sweep(
      [&](const rdars::RdarsConfiguration& config) {
        return channel.rssi_bs_dbm(config);
      },
      cfg.grid, sc.bs_direction_local(), sc.connected_set, sc.geometry,
      rdars::wavelength(sc.channel.carrier_hz));

  const auto format = rdars::result_format_from_string(format_text);
  if (out_path.empty()) {
    if (format == rdars::ResultFormat::csv) {
      rdars::write_sweep_csv(result, std::cout);
    } else {
      rdars::write_sweep_json(result, std::cout);
    }
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
    if (format == rdars::ResultFormat::csv) {
      rdars::write_sweep_csv(result, out);
    } else {
      rdars::write_sweep_json(result, out);
    }
  }
  return 0;
}

int estimate_command(double p_connected, double p_bs, double theta_deg, double d_br,
                     double alpha, double offset_db) {
  rdars::RangeInputs inputs;
  inputs.p_connected_dbm = p_connected;
  inputs.p_bs_dbm = p_bs;
  inputs.theta = rdars::deg2rad(theta_deg);
  inputs.d_br = d_br;
  inputs.alpha = alpha;
  const auto estimate = rdars::estimate_range(inputs, rdars::Calibration{offset_db});

  nlohmann::json j;
  j["d_ur_m"] = estimate.d_ur;
  j["d_ub_m"] = estimate.d_ub;
  j["roots_found"] = estimate.roots_found;
  j["ambiguous"] = estimate.ambiguous;
  std::cout << j.dump() << "\n";
  return 0;
}

int serve_command(const std::string& bind_text, double loss_rx, double loss_tx,
                  std::uint64_t loss_seed) {
  rdars::ctrl::DeviceServerOptions options;
  options.bind = rdars::ctrl::parse_endpoint(bind_text);
  options.loss_rx = loss_rx;
  options.loss_tx = loss_tx;
  options.loss_seed = loss_seed;

  rdars::ctrl::DeviceServer server(options);
  server.start();
  std::cerr << "device emulator listening on " << options.bind.host << ":"
            << server.port() << " (loss rx " << loss_rx << ", tx " << loss_tx
            << ")\n";

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (g_interrupted == 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  const auto snap = server.state();
  server.stop();
  std::cerr << "received " << snap.counters.datagrams_received << ", applied "
            << snap.counters.applied << ", stale "
            << snap.counters.nacked_stale << ", malformed "
            << snap.counters.nacked_malformed << "\n";
  return 0;
}

int frame_command(bool decode, const std::string& hex, const std::string& type_text,
                  std::uint16_t seq, const std::string& payload_hex) {
  using namespace rdars::ctrl;
  if (decode) {
    const auto frame = decode_frame(from_hex(hex));
    nlohmann::json j;
    switch (frame.type) {
      case MsgType::phase_config: j["type"] = "phase_config"; break;
      case MsgType::mode_mask: j["type"] = "mode_mask"; break;
      case MsgType::ack: j["type"] = "ack"; break;
      case MsgType::nack: j["type"] = "nack"; break;
    }
    j["seq"] = frame.seq;
    j["payload_len"] = frame.payload.size();
    j["payload_hex"] = to_hex(frame.payload);
    if (frame.type == MsgType::ack || frame.type == MsgType::nack) {
      const auto info = parse_ack_payload(frame);
      j["echoed_seq"] = info.echoed_seq;
      j["status"] = info.status;
    }
    std::cout << j.dump() << "\n";
    return 0;
  }

  ControlFrame frame;
  if (type_text == "phase_config") frame.type = MsgType::phase_config;
  else if (type_text == "mode_mask") frame.type = MsgType::mode_mask;
  else if (type_text == "ack") frame.type = MsgType::ack;
  else if (type_text == "nack") frame.type = MsgType::nack;
  else throw CLI::ValidationError("--type", "unknown frame type '" + type_text + "'");
  frame.seq = seq;
  frame.payload = from_hex(payload_hex);
  std::cout << to_hex(encode_frame(frame)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and control tools for the dual-mode-surface "
               "localization testbed"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run the two-stage localization experiment");
  std::string scenario_path, out_path, format_text = "csv", transport_text = "oracle";
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool traces = false;
  run->add_option("--scenario", scenario_path, "Configuration file")->required();
  run->add_option("--trials", trials, "Override trial count");
  run->add_option("--seed", seed, "Override experiment seed");
  run->add_option("--out", out_path, "Output path (stdout when omitted)");
  run->add_option("--format", format_text, "csv|json")->default_val("csv");
  run->add_option("--transport", transport_text, "oracle|udp:<host:port>")
      ->default_val("oracle");
  run->add_option("--threads", threads, "Worker threads (oracle transport)")
      ->default_val(1);
  run->add_flag("--traces", traces, "Keep per-trial RSSI sweep traces (json)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Stage 1 only: emit the RSSI map");
  std::string sweep_scenario, sweep_out, sweep_format = "csv";
  std::optional<std::uint64_t> sweep_seed;
  sweep_cmd->add_option("--scenario", sweep_scenario, "Configuration file")->required();
  sweep_cmd->add_option("--seed", sweep_seed, "Override shadowing seed");
  sweep_cmd->add_option("--out", sweep_out, "Output path (stdout when omitted)");
  sweep_cmd->add_option("--format", sweep_format, "csv|json")->default_val("csv");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Stage 2 from measured powers");
  double p_connected = 0.0, p_bs = 0.0, theta_deg = 0.0, d_br = 0.0, alpha = 2.0,
         offset_db = 0.0;
  estimate->add_option("--p-connected", p_connected, "Connected-element RSSI (dBm)")
      ->required();
  estimate->add_option("--p-bs", p_bs, "Direct-path RSSI at the BS (dBm)")->required();
  estimate->add_option("--theta-deg", theta_deg, "Angle UE-RDARS vs BS-RDARS (deg)")
      ->required();
  estimate->add_option("--d-br", d_br, "RDARS-BS distance (m)")->required();
  estimate->add_option("--alpha", alpha, "Assumed path-loss exponent")->default_val(2.0);
  estimate->add_option("--offset-db", offset_db, "Calibration offset (dB)")
      ->default_val(0.0);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the device emulator");
  std::string bind_text = "127.0.0.1:47474";
  double loss_rx = 0.0, loss_tx = 0.0;
  std::uint64_t loss_seed = 0;
  serve->add_option("--bind", bind_text, "host:port")->default_val("127.0.0.1:47474");
  serve->add_option("--loss-rx", loss_rx, "Receive-side drop probability")
      ->default_val(0.0);
  serve->add_option("--loss-tx", loss_tx, "Reply drop probability")->default_val(0.0);
  serve->add_option("--loss-seed", loss_seed, "Loss-injection seed")->default_val(0);

  // frame
  auto* frame = app.add_subcommand("frame", "Encode/decode a control frame");
  bool decode = false;
  std::string hex, type_text, payload_hex;
  std::uint16_t frame_seq = 0;
  frame->add_flag("--decode", decode, "Decode --hex instead of encoding");
  frame->add_option("--hex", hex, "Frame bytes to decode");
  frame->add_option("--type", type_text, "phase_config|mode_mask|ack|nack");
  frame->add_option("--seq", frame_seq, "Sequence number");
  frame->add_option("--payload-hex", payload_hex, "Payload bytes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(scenario_path, trials, seed, out_path, format_text,
                         transport_text, threads, traces);
    }
    if (sweep_cmd->parsed()) {
      return sweep_command(sweep_scenario, sweep_seed, sweep_out, sweep_format);
    }
    if (estimate->parsed()) {
      return estimate_command(p_connected, p_bs, theta_deg, d_br, alpha, offset_db);
    }
    if (serve->parsed()) {
      return serve_command(bind_text, loss_rx, loss_tx, loss_seed);
    }
    if (frame->parsed()) {
      return frame_command(decode, hex, type_text, frame_seq, payload_hex);
    }
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 0;
}
