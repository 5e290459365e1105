#include "wlanloc/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "wlanloc/eval.hpp"
#include "wlanloc/ingest.hpp"
#include "wlanloc/locator.hpp"
#include "wlanloc/radio_sim.hpp"
#include "wlanloc/service.hpp"
#include "wlanloc/text.hpp"

namespace wlanloc::cli {

namespace {

std::atomic<bool> g_shutdown{false};

extern "C" void on_signal(int) { g_shutdown.store(true); }

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SiteOptions {
  std::string preset;
  std::string site_file;

  void attach(CLI::App& cmd) {
    auto* p = cmd.add_option("--preset", preset, "Built-in site")->check(CLI::IsMember({"uq"}));
    auto* s = cmd.add_option("--site", site_file, "Site description file");
    p->excludes(s);
  }

  [[nodiscard]] Site load() const {
    if (!preset.empty()) return uq_centre_preset();
    if (!site_file.empty()) return load_site(site_file);
    throw UsageError("one of --preset or --site is required");
  }
};

PathLossModel model_with_sigma(double sigma) {
  PathLossModel m = uq_centre_model();
  m.shadowing_sigma_db = sigma;
  return m;
}

ScanMode mode_from(const std::string& text) { return *parse_scan_mode(text); }

void emit(const std::string& out_path, const std::string& contents, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << contents;
  } else {
    write_file(out_path, contents);
  }
}

const auto kModes = CLI::IsMember({"passive", "active"});

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wi-Fi RSSI fingerprint localization toolkit", "wlanloc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // build-map
  SiteOptions bm_site;
  double bm_spacing = 5.0;
  std::string bm_out;
  auto* build_map = app.add_subcommand("build-map", "Build a noise-free radio map over a site grid");
  bm_site.attach(*build_map);
  build_map->add_option("--spacing", bm_spacing, "Grid spacing in metres")
      ->check(CLI::PositiveNumber)->capture_default_str();
  build_map->add_option("--out", bm_out, "Output file (default: standard output)");

  // simulate-scan
  SiteOptions ss_site;
  std::vector<double> ss_at;
  std::string ss_mode = "passive";
  double ss_sigma = 4.0;
  std::uint64_t ss_seed = 0;
  std::string ss_out;
  auto* simulate = app.add_subcommand("simulate-scan", "Simulate one scan at a client position");
  ss_site.attach(*simulate);
  simulate->add_option("--at", ss_at, "Client position x,y in metres")
      ->required()->delimiter(',')->expected(2);
  simulate->add_option("--mode", ss_mode, "passive or active")->check(kModes)->capture_default_str();
  simulate->add_option("--sigma", ss_sigma, "Shadowing std dev in dB")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  simulate->add_option("--seed", ss_seed, "Noise seed")->capture_default_str();
  simulate->add_option("--out", ss_out, "Output file (default: standard output)");

  // locate
  std::string lo_map;
  std::string lo_scan;
  std::int64_t lo_k = 3;
  double lo_eps = 0.0;
  std::string lo_mode = "passive";
  auto* locate_cmd = app.add_subcommand("locate", "Estimate the position of one scan");
  locate_cmd->add_option("--map", lo_map, "Radio map file")->required();
  locate_cmd->add_option("--scan", lo_scan, "Scan record file")->required();
  locate_cmd->add_option("--k", lo_k, "Neighbours to average")->check(CLI::PositiveNumber)->capture_default_str();
  locate_cmd->add_option("--epsilon", lo_eps, "Approximation slack")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  locate_cmd->add_option("--mode", lo_mode, "Mode the scan was taken in")->check(kModes)->capture_default_str();

  // serve
  std::string sv_map;
  std::string sv_bind{kDefaultBind};
  double sv_eps = 0.0;
  auto* serve = app.add_subcommand("serve", "Answer LOCATE requests over TCP");
  serve->add_option("--map", sv_map, "Radio map file")->required();
  serve->add_option("--bind", sv_bind, "host:port to listen on")->capture_default_str();
  serve->add_option("--epsilon", sv_eps, "Approximation slack")
      ->check(CLI::NonNegativeNumber)->capture_default_str();

  // eval
  SiteOptions ev_site;
  std::string ev_map;
  std::vector<std::int64_t> ev_k{3};
  double ev_eps = 0.0;
  std::size_t ev_trials = 200;
  std::uint64_t ev_seed = 1;
  double ev_sigma = 4.0;
  std::string ev_mode = "passive";
  std::string ev_out;
  auto* eval_cmd = app.add_subcommand("eval", "Localization error over random test points (CSV)");
  eval_cmd->add_option("--map", ev_map, "Radio map file")->required();
  ev_site.attach(*eval_cmd);
  eval_cmd->add_option("--k", ev_k, "k values, comma separated")
      ->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  eval_cmd->add_option("--epsilon", ev_eps, "Approximation slack")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  eval_cmd->add_option("--trials", ev_trials, "Test points")->check(CLI::PositiveNumber)->capture_default_str();
  eval_cmd->add_option("--seed", ev_seed, "Seed")->capture_default_str();
  eval_cmd->add_option("--sigma", ev_sigma, "Shadowing std dev in dB")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  eval_cmd->add_option("--mode", ev_mode, "passive or active")->check(kModes)->capture_default_str();
  eval_cmd->add_option("--out", ev_out, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help("", CLI::AppFormatMode::Normal);
    for (auto* sub : app.get_subcommands()) out << sub->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (build_map->parsed()) {
      const Site site = bm_site.load();
      const RadioMap map = build_radio_map(site, bm_spacing, uq_centre_model());
      emit(bm_out, serialize_radio_map(map), out);
    } else if (simulate->parsed()) {
      const Site site = ss_site.load();
      const auto obs = simulate_scan(site, Point2{ss_at[0], ss_at[1]}, mode_from(ss_mode),
                                     model_with_sigma(ss_sigma), ss_seed);
      emit(ss_out, serialize_scan(obs), out);
    } else if (locate_cmd->parsed()) {
      const RadioMap map = load_radio_map(lo_map);
      const NNIndex index(map);
      const auto obs = load_scan(lo_scan, mode_from(lo_mode));
      const auto est = locate(map, index, obs, lo_k, lo_eps);
      out << "x=" << text::format_fixed(est.pos.x, 2) << " y=" << text::format_fixed(est.pos.y, 2)
          << " k=" << est.k_used() << '\n';
    } else if (serve->parsed()) {
      Endpoint endpoint;
      try {
        endpoint = Endpoint::parse(sv_bind);
      } catch (const InvariantError& e) {
        throw UsageError(e.what());
      }
      LocationServer server(load_radio_map(sv_map), sv_eps);
      server.bind(endpoint);
      g_shutdown.store(false);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.start();
      err << "listening on " << endpoint.host << ':' << server.port() << std::endl;
      while (!g_shutdown.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
    } else if (eval_cmd->parsed()) {
      const Site site = ev_site.load();
      const RadioMap map = load_radio_map(ev_map);
      const auto reports = k_sweep(map, site, model_with_sigma(ev_sigma), ev_k, ev_eps,
                                   mode_from(ev_mode), ev_trials, ev_seed);
      emit(ev_out, to_csv(reports), out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace wlanloc::cli
