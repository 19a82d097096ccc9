#include "plurikit/commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plurikit/errors.hpp"
#include "plurikit/parallel.hpp"
#include "plurikit/rng.hpp"

namespace plurikit {

namespace fs = std::filesystem;

namespace {

constexpr double kSaturation = 0.5;

std::string profile_csv(const RadialProfile& p) {
  std::ostringstream out;
  write_profile_csv(out, p);
  return out.str();
}

void write_meta(const fs::path& dir, const std::string& command, const RunConfig& config) {
  KeyValues meta;
  meta.set("command", command);
  meta.set("seed", std::to_string(config.mc.seed));
  meta.set("budget", config.mc.budget);
  meta.set("space_n", config.n);
  if (config.m) meta.set("space_m", *config.m);
  if (config.current) meta.set("current", config.current->kind);
  write_text_file(dir / "meta.txt", meta.to_text());
  write_text_file(dir / "config.json", serialize_config(config));
}

RunResult saturation_check(const ExperimentReport& report) {
  if (report.total_frames > 0 && report.degenerate_fraction() > kSaturation) {
    return {ExitCode::degenerate_saturation,
            std::to_string(report.degenerate_frames) + " of " + std::to_string(report.total_frames) +
                " frames are degenerate (slice inside the singular support)"};
  }
  return {};
}

RunResult finish_report(const fs::path& dir, const std::string& command, const RunConfig& config,
                        ExperimentReport report) {
  write_report(dir, report);
  write_text_file(dir / "config.json", serialize_config(config));
  (void)command;
  return saturation_check(report);
}

RunResult cmd_profile(const RunConfig& config, const fs::path& dir) {
  const Current current = build_current(config);
  const auto profile = nu_profile(current, build_grid(config.grid), build_profile_options(config.mc));
  write_text_file(dir / "profile.csv", profile_csv(profile));
  KeyValues summary;
  summary.set("command", "profile");
  summary.set("method", to_string(profile.method));
  summary.set("points", profile.grid.size());
  summary.set("flagged_radii", profile.flagged.size());
  summary.set("value_min", *std::min_element(profile.values.begin(), profile.values.end()));
  summary.set("value_max", *std::max_element(profile.values.begin(), profile.values.end()));
  write_text_file(dir / "summary.txt", summary.to_text());
  write_meta(dir, "profile", config);
  return {};
}

RunResult cmd_slice(const RunConfig& config, const fs::path& dir) {
  const Current current = build_current(config);
  const auto grid = build_grid(config.grid);
  const auto options = build_profile_options(config.mc);
  const int q = config.grassmannian.q;
  require(q >= 1 && q <= current.ambient_dim(), "slice: need 1 <= q <= n");
  require(current.bidimension() + q >= current.ambient_dim(), "slice: need p + q >= n");
  const auto frames = experiment_frames(q, current.ambient_dim(), build_frame_options(config), options.seed);
  std::vector<std::optional<RadialProfile>> slices(frames.size());
  parallel_for(frames.size(), [&](std::size_t f) {
    ProfileOptions sub = options;
    sub.seed = derive_seed(options.seed, f);
    try {
      slices[f] = slice_profile(current, frames[f], grid, sub);
    } catch (const DegenerateSlice&) {
      slices[f].reset();
    }
  });
  std::size_t degenerate = 0;
  std::vector<double> sum(grid.size(), 0.0), sum2(grid.size(), 0.0);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "slice_%04zu.csv", f);
    if (!slices[f]) {
      ++degenerate;
      continue;
    }
    write_text_file(dir / name, profile_csv(*slices[f]));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sum[i] += slices[f]->values[i];
      sum2[i] += slices[f]->values[i] * slices[f]->values[i];
    }
  }
  const std::size_t good = frames.size() - degenerate;
  std::string agg = "r,value,stderr,method\n";
  for (std::size_t i = 0; i < grid.size() && good > 0; ++i) {
    const double k = static_cast<double>(good);
    const double mean = sum[i] / k;
    const double var = good > 1 ? std::max(0.0, (sum2[i] - k * mean * mean) / (k - 1.0)) : 0.0;
    agg += format_number(grid[i]) + "," + format_number(mean) + "," + format_number(std::sqrt(var / k)) + ",frame-average\n";
  }
  write_text_file(dir / "slice_aggregate.csv", agg);
  KeyValues summary;
  summary.set("command", "slice");
  summary.set("q", q);
  summary.set("frames_total", frames.size());
  summary.set("frames_degenerate", degenerate);
  write_text_file(dir / "summary.txt", summary.to_text());
  write_meta(dir, "slice", config);
  if (frames.empty() || static_cast<double>(degenerate) / static_cast<double>(frames.size()) > kSaturation)
    return {ExitCode::degenerate_saturation, std::to_string(degenerate) + " of " + std::to_string(frames.size()) +
                                                 " frames are degenerate (slice inside the singular support)"};
  return {};
}

RunResult cmd_order(const RunConfig& config, const fs::path& dir) {
  const Current current = build_current(config);
  const auto profile = nu_profile(current, build_grid(config.grid), build_profile_options(config.mc));
  const auto order = estimate_order(profile);
  const bool algebraic = is_algebraic(profile, config.order.flatness_tol);
  const double rho0 = config.order.rho0 >= 0.0 ? config.order.rho0 : order.rho;
  const auto type = estimate_type(profile, ProximateOrder::constant(rho0), config.order.type);
  write_text_file(dir / "profile.csv", profile_csv(profile));
  std::string slopes = "r_lo,r_hi,slope,stderr,residual\n";
  for (const auto& w : order.slope_series)
    slopes += format_number(w.r_lo) + "," + format_number(w.r_hi) + "," + format_number(w.slope) + "," +
              format_number(w.standard_error) + "," + format_number(w.residual) + "\n";
  write_text_file(dir / "slopes.csv", slopes);
  std::string probes = "r,ratio\n";
  for (std::size_t i = 0; i < type.probe_radii.size(); ++i)
    probes += format_number(type.probe_radii[i]) + "," + format_number(type.probe_values[i]) + "\n";
  write_text_file(dir / "type_probes.csv", probes);
  KeyValues summary;
  summary.set("command", "order");
  summary.set("empty_current", order.empty);
  summary.set("rho", order.rho);
  summary.set("rho_stderr", order.standard_error);
  summary.set("window_lo", order.r_lo);
  summary.set("window_hi", order.r_hi);
  summary.set("fit_residual", order.fit_residual);
  summary.set("is_algebraic", algebraic);
  summary.set("type_rho", rho0);
  summary.set("sigma", type.sigma);
  summary.set("type_class", to_string(type.type_class));
  summary.set("type_log_slope", type.log_slope);
  write_text_file(dir / "summary.txt", summary.to_text());
  write_meta(dir, "order", config);
  return {};
}

RunResult cmd_chi(const RunConfig& config, const fs::path& dir) {
  const auto rho = ProximateOrder::constant(config.chi.rho0);
  const auto chi = build_chi(rho);
  const auto probe = config.chi.probe_grid.empty() ? default_probe_grid() : config.chi.probe_grid;
  const auto report = check_proximate_order(chi, probe);
  std::vector<double> table = config.chi.table;
  if (table.empty())
    for (int e = -2; e <= 6; ++e)
      for (double m : {1.0, 2.0, 5.0}) table.push_back(m * std::pow(10.0, e));
  std::string csv = "r,rho,chi,r_log_r_dchi\n";
  for (double r : table) {
    require(r > 0.0, "chi: table radii must be positive");
    csv += format_number(r) + "," + format_number(rho(r)) + "," + format_number(chi(r)) + "," +
           format_number(r * std::log(r) * chi.derivative(r)) + "\n";
  }
  write_text_file(dir / "chi.csv", csv);
  std::string probes = "r,gap,drift\n";
  for (const auto& p : report.probes)
    probes += format_number(p.r) + "," + format_number(p.gap) + "," + format_number(p.drift) + "\n";
  write_text_file(dir / "chi_probes.csv", probes);
  KeyValues summary;
  summary.set("command", "chi");
  summary.set("rho0", config.chi.rho0);
  summary.set("proximate_order", report.passed);
  summary.set("final_gap", report.final_gap);
  summary.set("final_drift", report.final_drift);
  summary.set("failing_probes", report.failures.size());
  summary.set("chi_at_1", chi(1.0));
  summary.set("chi_minus_rho_at_e", chi(std::exp(1.0)) - rho(std::exp(1.0)));
  summary.set("r_log_r_dchi_at_1000", 1000.0 * std::log(1000.0) * chi.derivative(1000.0));
  write_text_file(dir / "summary.txt", summary.to_text());
  write_meta(dir, "chi", config);
  return {};
}

RunResult cmd_plot(const RunConfig& config, const fs::path& dir) {
  std::vector<std::string> csvs;
  if (fs::exists(dir))
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".csv") csvs.push_back(entry.path().filename().string());
  std::sort(csvs.begin(), csvs.end());
  std::string script =
      "#!/usr/bin/env python3\n"
      "# Plots every CSV listed below (first column against the others, log-log axes).\n"
      "import csv, os, sys\n"
      "import matplotlib\n"
      "matplotlib.use('Agg')\n"
      "import matplotlib.pyplot as plt\n\n"
      "HERE = os.path.dirname(os.path.abspath(__file__))\n"
      "FILES = [\n";
  for (const auto& c : csvs) script += "    '" + c + "',\n";
  script +=
      "]\n\n"
      "def load(name):\n"
      "    with open(os.path.join(HERE, name)) as fh:\n"
      "        rows = list(csv.reader(fh))\n"
      "    header, body = rows[0], rows[1:]\n"
      "    cols = []\n"
      "    for j in range(len(header)):\n"
      "        try:\n"
      "            cols.append([float(r[j]) for r in body])\n"
      "        except ValueError:\n"
      "            cols.append(None)\n"
      "    return header, cols\n\n"
      "for name in FILES:\n"
      "    header, cols = load(name)\n"
      "    if not cols or cols[0] is None:\n"
      "        continue\n"
      "    fig, ax = plt.subplots()\n"
      "    for j in range(1, len(header)):\n"
      "        if cols[j] is None or header[j] in ('stderr', 'method'):\n"
      "            continue\n"
      "        err = cols[header.index('stderr')] if header[j] == 'value' and 'stderr' in header else None\n"
      "        ax.errorbar(cols[0], cols[j], yerr=err, label=header[j], marker='.')\n"
      "    ax.set_xscale('log')\n"
      "    ax.set_xlabel(header[0])\n"
      "    ax.legend()\n"
      "    ax.set_title(name)\n"
      "    fig.savefig(os.path.join(HERE, name[:-4] + '.png'), dpi=120)\n"
      "    plt.close(fig)\n";
  write_text_file(dir / "plot.py", script);
  KeyValues summary;
  summary.set("command", "plot");
  summary.set("csv_files", csvs.size());
  write_text_file(dir / "summary.txt", summary.to_text());
  (void)config;
  return {};
}

RunResult dispatch(const std::string& command, const RunConfig& config, const fs::path& dir) {
  const auto options = build_profile_options(config.mc);
  if (command == "profile") return cmd_profile(config, dir);
  if (command == "slice") return cmd_slice(config, dir);
  if (command == "order") return cmd_order(config, dir);
  if (command == "chi") return cmd_chi(config, dir);
  if (command == "plot") return cmd_plot(config, dir);
  if (command == "crofton") {
    CroftonOptions crofton;
    crofton.exploratory = config.exploratory;
    return finish_report(dir, command, config,
                         crofton_check(build_current(config), config.grassmannian.q, build_grid(config.grid),
                                       build_frame_options(config), options, crofton));
  }
  if (command == "theorem1")
    return finish_report(dir, command, config,
                         theorem1_check(build_current(config), build_cap(config), build_grid(config.grid),
                                        build_frame_options(config), options));
  if (command == "survey")
    return finish_report(dir, command, config,
                         slice_order_survey(build_current(config), config.grassmannian.q, build_grid(config.grid),
                                            build_frame_options(config), options));
  if (command == "ratios") {
    std::vector<double> seq = config.r_sequence;
    if (seq.empty())
      for (int m = 1; m <= 8; ++m) seq.push_back(std::ldexp(1.0, m));
    return finish_report(dir, command, config,
                         ratio_degeneracy_check(build_current(config), seq, config.alpha_set,
                                                build_frame_options(config), options));
  }
  if (command == "directional") {
    const auto space = build_space(config);
    return finish_report(dir, command, config,
                         directional_order_check(build_current(config), space,
                                                 build_region(config.region_d, space.m),
                                                 build_region(config.region_d_prime, space.n),
                                                 build_grid(config.grid), options));
  }
  throw ConfigError("unknown command '" + command + "'\n" + usage_text());
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"profile", "slice",  "order",       "chi",  "crofton",
                                                 "theorem1", "ratios", "directional", "plot", "survey"};
  return names;
}

std::string usage_text() {
  std::string text =
      "usage: plurikit <command> --config <path> [--seed N] [--budget N] [--frames N] [--threads N] --out <dir>\n"
      "commands:\n"
      "  profile      Lelong function nu_T(r) on the configured grid (profile.csv)\n"
      "  slice        slice profiles on Grassmannian frames (slice_NNNN.csv, slice_aggregate.csv)\n"
      "  order        order of algebraicity, algebraicity and type (summary.txt)\n"
      "  chi          tabulated chi(r) and proximate-order check\n"
      "  crofton      Crofton identity report\n"
      "  theorem1     cap lower-bound report\n"
      "  ratios       slice/ambient ratio degeneracy report\n"
      "  directional  directional orders on a product space\n"
      "  survey       slice order survey\n"
      "  plot         plotting script for the CSVs in the output directory\n"
      "exit codes: 0 ok, 1 configuration error, 2 numeric failure, 3 degenerate-slice saturation\n";
  return text;
}

RunResult run_command(const std::string& command, const RunConfig& input, const RunOverrides& overrides) {
  try {
    if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
      throw ConfigError("unknown command '" + command + "'\n" + usage_text());
    RunConfig config = input;
    if (overrides.seed) config.mc.seed = *overrides.seed;
    if (overrides.budget) {
      require(*overrides.budget >= 1000, "budget must be at least 1000");
      config.mc.budget = *overrides.budget;
    }
    if (overrides.frames) {
      require(*overrides.frames >= 1, "frames must be at least 1");
      config.grassmannian.frames = *overrides.frames;
    }
    set_max_threads(overrides.threads.value_or(0));
    const std::string out = overrides.out_dir.empty() ? config.output : overrides.out_dir;
    require(!out.empty(), "no output directory (use --out or the 'output' key)");
    fs::create_directories(out);
    return dispatch(command, config, out);
  } catch (const ConfigError& e) {
    return {ExitCode::config_error, e.what()};
  } catch (const DomainError& e) {
    return {ExitCode::config_error, e.what()};
  } catch (const DegenerateSlice& e) {
    return {ExitCode::degenerate_saturation, e.what()};
  } catch (const NumericFailure& e) {
    return {ExitCode::numeric_failure, e.what()};
  } catch (const fs::filesystem_error& e) {
    return {ExitCode::config_error, e.what()};
  } catch (const std::exception& e) {
    return {ExitCode::numeric_failure, e.what()};
  }
}

RunResult run_command_file(const std::string& command, const fs::path& config_path, const RunOverrides& overrides) {
  try {
    return run_command(command, load_config(config_path), overrides);
  } catch (const ConfigError& e) {
    return {ExitCode::config_error, e.what()};
  }
}

}  // namespace plurikit
