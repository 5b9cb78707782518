// Copyright 2026 The semiq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end for the semiq engine.
//
//   semiq transfer  one protocol evaluation (text or JSON)
//   semiq sweep     CSV sweep over reflectivity
//   semiq clone     closed-form cloning table, verified against the circuit
//   semiq mc        shot-level estimates compared against closed forms
//   semiq snr       channel signal-to-noise report
//   semiq check     fast self-test battery
//
// Exit codes: 0 success, 1 failed self-check, 2 invalid flags or config,
// 3 domain errors in parameters, 4 unwritable output path, 5 sampling
// disagrees with the closed forms.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semiq/semiq.hpp"

namespace {

using semiq::GainPolicy;
using semiq::MCConfig;
using semiq::ProtocolParams;
using semiq::RunConfig;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string policy_name(GainPolicy policy) {
  switch (policy) {
    case GainPolicy::Cancellation:
      return "cancellation";
    case GainPolicy::LossCompensated:
      return "loss-compensated";
    case GainPolicy::Manual:
      return "manual";
  }
  return "?";
}

/// Runs `body` against stdout or the requested file; returns 4 when the
/// path cannot be written.
int with_output(const std::string& path,
                const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return 0;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot open output path: " << path << "\n";
    return 4;
  }
  body(out);
  out.flush();
  if (!out) {
    std::cerr << "error: write failed: " << path << "\n";
    return 4;
  }
  return 0;
}

/// Shared protocol/sampling flags. Values are only applied to the config
/// when the flag was actually given, so a --config file keeps priority
/// over defaults but not over explicit flags.
struct CommonFlags {
  std::string config_path;
  double reflectivity{0};
  double squeezing{0};
  double squeezing_db{0};
  double transmission{0};
  double gain{0};
  int clones{0};
  std::vector<double> mean;
  std::vector<double> input_variance;
  std::uint64_t shots{0};
  std::uint64_t seed{0};
  std::uint64_t chunk_shots{0};
  unsigned threads{0};
  bool owns_reflectivity{false};
  bool owns_clones{false};

  void add_protocol(CLI::App* cmd, bool with_reflectivity = true,
                    bool with_clones = false) {
    owns_reflectivity = with_reflectivity;
    owns_clones = with_clones;
    cmd->add_option("--config", config_path,
                    "JSON run configuration (flags override it)")
        ->check(CLI::ExistingFile);
    if (with_reflectivity) {
      cmd->add_option("--R", reflectivity,
                      "power reflectivity of the tap splitter, in [0, 1)");
    }
    auto* r_opt =
        cmd->add_option("--r", squeezing, "EPR squeezing factor r >= 0");
    auto* db_opt = cmd->add_option(
        "--sq-db", squeezing_db,
        "EPR squeezing in dB, 10*log10(e^{2r}); alternative to --r");
    r_opt->excludes(db_opt);
    db_opt->excludes(r_opt);
    cmd->add_option("--eta", transmission,
                    "channel amplitude transmission, in (0, 1]");
    cmd->add_option("--gain", gain,
                    "explicit feedforward gain (overrides the automatic "
                    "cancellation / loss-compensated choice)");
    if (with_clones) {
      cmd->add_option("--M", clones, "clone count; engages 1->M cloning")
          ->check(CLI::Range(2, 1000));
    }
    cmd->add_option("--mean", mean,
                    "input coherent amplitude as quadrature means x,y")
        ->delimiter(',')
        ->expected(2);
  }

  void add_input_variance(CLI::App* cmd) {
    cmd->add_option("--vin", input_variance,
                    "input quadrature variances Vx,Vy (vacuum = 1)")
        ->delimiter(',')
        ->expected(2);
  }

  void add_sampling(CLI::App* cmd) {
    cmd->add_option("--shots", shots, "number of sampled shots");
    cmd->add_option("--seed", seed, "random seed (runs are reproducible)");
    cmd->add_option("--chunk", chunk_shots,
                    "shots per independent random substream");
    cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  }

  /// Count of a flag that may not be registered on this subcommand.
  static std::size_t given(const CLI::App& cmd, const std::string& name) {
    const CLI::Option* option = cmd.get_option_no_throw(name);
    return option ? option->count() : 0;
  }

  RunConfig resolve(const CLI::App& cmd) const {
    RunConfig config;
    if (!config_path.empty()) config = semiq::load_run_config(config_path);
    if (owns_reflectivity && given(cmd, "--R")) {
      config.reflectivity = reflectivity;
    }
    if (given(cmd, "--r")) {
      config.squeezing = squeezing;
      config.squeezing_db.reset();
    }
    if (given(cmd, "--sq-db")) {
      config.squeezing_db = squeezing_db;
      config.squeezing.reset();
    }
    if (given(cmd, "--eta")) config.transmission = transmission;
    if (given(cmd, "--gain")) config.manual_gain = gain;
    if (owns_clones && given(cmd, "--M")) config.clone_count = clones;
    if (given(cmd, "--mean")) config.input_mean = {mean[0], mean[1]};
    if (given(cmd, "--vin")) {
      config.input_variance = {input_variance[0], input_variance[1]};
    }
    if (given(cmd, "--shots")) config.shots = shots;
    if (given(cmd, "--seed")) config.seed = seed;
    if (given(cmd, "--chunk")) config.chunk_shots = chunk_shots;
    if (given(cmd, "--threads")) config.threads = threads;
    return config;
  }
};

std::string output_name(const ProtocolParams<double>& params,
                        std::size_t index) {
  if (index == 0) return "out1";
  if (params.clone_count) return "clone" + std::to_string(index);
  return "out2";
}

// ---------------------------------------------------------------------------
// transfer

int cmd_transfer(const RunConfig& config, const std::string& out_path,
                 bool as_json) {
  const ProtocolParams<double> params = config.protocol_params();
  const auto proto = semiq::build_transfer(params);
  const auto reports = semiq::output_fidelities(proto);
  const double boundary =
      semiq::fidelity_bound_transfer(proto.params.reflectivity);
  const double teleport =
      semiq::teleport_limit_fidelity(proto.params.squeezing);

  return with_output(out_path, [&](std::ostream& os) {
    if (as_json) {
      nlohmann::json j;
      j["reflectivity"] = proto.params.reflectivity;
      j["squeezing"] = proto.params.squeezing;
      j["squeezing_db"] = semiq::squeezing_to_db(proto.params.squeezing);
      j["transmission"] = proto.params.transmission;
      j["gain"] = proto.gain;
      j["gain_policy"] = policy_name(proto.params.gain_policy);
      j["input_mean"] = {proto.params.input_mean[0],
                         proto.params.input_mean[1]};
      j["outputs"] = nlohmann::json::array();
      for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& r = reports[k];
        j["outputs"].push_back({{"name", output_name(proto.params, k)},
                                {"mean_x", r.mean[0]},
                                {"mean_y", r.mean[1]},
                                {"var_x", r.var_x},
                                {"var_y", r.var_y},
                                {"fidelity", r.fidelity}});
      }
      j["classical_boundary"] = boundary;
      j["teleport_benchmark"] = teleport;
      os << j.dump(2) << "\n";
      return;
    }
    os << "partial transfer: R=" << fmt(proto.params.reflectivity)
       << " r=" << fmt(proto.params.squeezing) << " ("
       << fmt(semiq::squeezing_to_db(proto.params.squeezing))
       << " dB) eta=" << fmt(proto.params.transmission)
       << " gain=" << fmt(proto.gain) << " ("
       << policy_name(proto.params.gain_policy) << ")\n";
    os << "input mean: (" << fmt(proto.params.input_mean[0]) << ", "
       << fmt(proto.params.input_mean[1]) << ")\n\n";
    os << "output    mean_x  mean_y  var_x  var_y  fidelity\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const auto& r = reports[k];
      os << output_name(proto.params, k) << "  " << fmt(r.mean[0]) << "  "
         << fmt(r.mean[1]) << "  " << fmt(r.var_x) << "  " << fmt(r.var_y)
         << "  " << fmt(r.fidelity) << "\n";
    }
    os << "\nclassical boundary 1/(1+R):  " << fmt(boundary)
       << (reports[0].fidelity > boundary + 1e-15 ? "  (beaten)" : "") << "\n";
    os << "teleportation benchmark:     " << fmt(teleport)
       << (reports[0].fidelity > teleport + 1e-15 ? "  (beaten)" : "")
       << "\n";
  });
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const RunConfig& config, const std::vector<double>& grid,
              const std::string& out_path) {
  if (config.clone_count) {
    throw std::domain_error(
        "sweep covers the two-output transfer; use the clone command for "
        "cloning tables");
  }
  return with_output(out_path, [&](std::ostream& os) {
    os << "R,r,eta,g,F_out1,F_out2,F_boundary,VX_out1,VY_out1\n";
    for (double reflectivity : grid) {
      RunConfig point = config;
      point.reflectivity = reflectivity;
      const auto proto = semiq::build_transfer(point.protocol_params());
      const auto reports = semiq::output_fidelities(proto);
      os << fmt(proto.params.reflectivity) << ','
         << fmt(proto.params.squeezing) << ','
         << fmt(proto.params.transmission) << ',' << fmt(proto.gain) << ','
         << fmt(reports[0].fidelity) << ',' << fmt(reports[1].fidelity)
         << ','
         << fmt(semiq::fidelity_bound_transfer(proto.params.reflectivity))
         << ',' << fmt(reports[0].var_x) << ',' << fmt(reports[0].var_y)
         << "\n";
    }
  });
}

// ---------------------------------------------------------------------------
// clone

int cmd_clone(const RunConfig& config, const std::vector<int>& counts,
              const std::string& out_path) {
  const double squeezing = config.resolved_squeezing();
  return with_output(out_path, [&](std::ostream& os) {
    os << "M,R,r,F_kept,F_clone,F_optimal,circuit_deviation\n";
    for (int m : counts) {
      const auto closed = semiq::clone_fidelities(m, squeezing);

      RunConfig point = config;
      point.clone_count = m;
      const auto proto = semiq::build_transfer(point.protocol_params());
      const auto reports = semiq::output_fidelities(proto);
      double deviation =
          std::abs(reports[0].fidelity - closed.kept_fidelity);
      for (std::size_t k = 1; k < reports.size(); ++k) {
        deviation = std::max(
            deviation,
            std::abs(reports[k].fidelity - closed.clone_fidelity));
      }
      os << m << ',' << fmt(proto.params.reflectivity) << ','
         << fmt(squeezing) << ',' << fmt(closed.kept_fidelity) << ','
         << fmt(closed.clone_fidelity) << ',' << fmt(closed.optimal_bound)
         << ',' << fmt(deviation) << "\n";
    }
  });
}

// ---------------------------------------------------------------------------
// mc

int cmd_mc(const RunConfig& config, double sigmas,
           const std::string& out_path) {
  const ProtocolParams<double> params = config.protocol_params();
  const auto proto = semiq::build_transfer(params);
  const auto reports = semiq::output_fidelities(proto);
  const auto sim = semiq::simulate_protocol_shots(params, config.mc_config());

  struct Row {
    std::string name;
    double analytic;
    semiq::MCEstimate estimate;
  };
  std::vector<Row> rows;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const std::string base = output_name(proto.params, k);
    const auto& mc = sim.outputs[k];
    rows.push_back({base + ".mean_x", reports[k].mean[0], mc.mean_x});
    rows.push_back({base + ".mean_y", reports[k].mean[1], mc.mean_y});
    rows.push_back({base + ".var_x", reports[k].var_x, mc.var_x});
    rows.push_back({base + ".var_y", reports[k].var_y, mc.var_y});
    rows.push_back({base + ".fidelity", reports[k].fidelity, mc.fidelity});
  }

  double worst = 0;
  for (const auto& row : rows) {
    if (row.estimate.std_error > 0) {
      worst = std::max(worst, std::abs(row.estimate.value - row.analytic) /
                                  row.estimate.std_error);
    }
  }
  const bool pass = worst <= sigmas;

  const int rc = with_output(out_path, [&](std::ostream& os) {
    os << "shots=" << sim.shots << " seed=" << sim.seed
       << " sigma-limit=" << fmt(sigmas) << "\n";
    os << "statistic  closed_form  estimate  stderr  sigma\n";
    for (const auto& row : rows) {
      const double sigma =
          row.estimate.std_error > 0
              ? (row.estimate.value - row.analytic) / row.estimate.std_error
              : 0.0;
      os << row.name << "  " << fmt(row.analytic) << "  "
         << fmt(row.estimate.value) << "  " << fmt(row.estimate.std_error)
         << "  " << fmt(sigma) << "\n";
    }
    os << "verdict: " << (pass ? "PASS" : "FAIL")
       << " (worst |sigma| = " << fmt(worst) << ")\n";
  });
  if (rc != 0) return rc;
  return pass ? 0 : 5;
}

// ---------------------------------------------------------------------------
// snr

int cmd_snr(const RunConfig& config, bool with_sampling,
            const std::string& out_path, bool as_json) {
  const ProtocolParams<double> params = config.protocol_params();
  const Eigen::Vector2d vin{config.input_variance[0],
                            config.input_variance[1]};
  const auto report = semiq::channel_snr(params, vin);

  std::optional<semiq::SnrSimulation> sim;
  if (with_sampling) {
    sim = semiq::estimate_channel_snr(params, vin, config.mc_config());
  }

  return with_output(out_path, [&](std::ostream& os) {
    if (as_json) {
      nlohmann::json j;
      j["reflectivity"] = params.reflectivity;
      j["squeezing"] = config.resolved_squeezing();
      j["transmission"] = params.transmission;
      j["input_variance"] = config.input_variance;
      j["snr_x"] = report.snr_x;
      j["snr_y"] = report.snr_y;
      j["signal_gain_x"] = report.signal_gain_x;
      j["signal_gain_y"] = report.signal_gain_y;
      j["noise_referred_x"] = report.noise_referred_x;
      j["noise_referred_y"] = report.noise_referred_y;
      j["reference_formula_value"] = report.reference_formula_value;
      j["reference_valid"] = report.reference_valid;
      if (sim) {
        j["sampled"] = {{"shots", sim->shots},
                        {"seed", sim->seed},
                        {"snr_x", sim->snr_x.value},
                        {"snr_x_stderr", sim->snr_x.std_error},
                        {"snr_y", sim->snr_y.value},
                        {"snr_y_stderr", sim->snr_y.std_error}};
      }
      os << j.dump(2) << "\n";
      return;
    }
    os << "channel homodyne SNR (detector vacuum included)\n";
    os << "R=" << fmt(params.reflectivity) << " r="
       << fmt(config.resolved_squeezing()) << " eta="
       << fmt(params.transmission) << " Vin=(" << fmt(vin[0]) << ", "
       << fmt(vin[1]) << ")\n";
    os << "snr_x=" << fmt(report.snr_x) << "  snr_y=" << fmt(report.snr_y)
       << "\n";
    os << "signal gain: (" << fmt(report.signal_gain_x) << ", "
       << fmt(report.signal_gain_y) << ")  noise referred to input: ("
       << fmt(report.noise_referred_x) << ", "
       << fmt(report.noise_referred_y) << ")\n";
    os << "reference closed form: " << fmt(report.reference_formula_value);
    if (!report.reference_valid) {
      os << "  [denominator not positive here; reported for comparison "
            "only]";
    } else if (std::abs(report.reference_formula_value - report.snr_x) >
               1e-9 * std::max(1.0, std::abs(report.snr_x))) {
      os << "  [differs from first-principles value away from r=0]";
    }
    os << "\n";
    if (sim) {
      os << "sampled: snr_x=" << fmt(sim->snr_x.value) << " +- "
         << fmt(sim->snr_x.std_error) << "  snr_y=" << fmt(sim->snr_y.value)
         << " +- " << fmt(sim->snr_y.std_error) << "  (shots=" << sim->shots
         << ", seed=" << sim->seed << ")\n";
    }
  });
}

// ---------------------------------------------------------------------------
// check

struct CheckContext {
  int index{0};
  int failures{0};

  void report(const std::string& name, bool ok, const std::string& detail) {
    ++index;
    std::cout << "[" << index << "] " << name << " ... "
              << (ok ? "ok" : "FAIL") << "\n";
    if (!ok) {
      ++failures;
      std::cout << "    " << detail << "\n";
    }
  }
};

std::uint64_t check_shots_from_env(std::uint64_t fallback) {
  const char* raw = std::getenv("SEMIQ_CHECK_SHOTS");
  if (!raw || !*raw) return fallback;
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(raw, raw + std::strlen(raw), value);
  if (ec != std::errc() || *ptr != '\0' || value < 2) {
    std::cerr << "warning: ignoring invalid SEMIQ_CHECK_SHOTS='" << raw
              << "'\n";
    return fallback;
  }
  return value;
}

int cmd_check() {
  using namespace semiq;
  CheckContext ctx;
  const double tol = closed_form_tolerance;

  {
    // Squeezed joint quadratures of the EPR resource.
    const double r = 0.7;
    auto [registry, state] = make_registry(detail::protocol_modes(
        ProtocolParams<double>{0.5, r, 1.0, GainPolicy::Cancellation}));
    const auto e1 = ModeExpr<double>::identity(registry, mode_ids::epr_half_1);
    const auto e2 = ModeExpr<double>::identity(registry, mode_ids::epr_half_2);
    const auto diff = variance(e1 - e2, state);
    const auto sum = variance(e1 + e2, state);
    const double squeezed = 2.0 * std::exp(-2.0 * r);
    const double anti = 2.0 * std::exp(2.0 * r);
    const bool ok = std::abs(diff[0] - squeezed) < 1e-9 &&
                    std::abs(sum[1] - squeezed) < 1e-9 &&
                    std::abs(diff[1] - anti) < 1e-9 &&
                    std::abs(sum[0] - anti) < 1e-9;
    ctx.report("EPR joint-quadrature variances", ok,
               "Var(X1-X2)=" + fmt(diff[0]) + " expected " + fmt(squeezed));
  }

  {
    // Canonical commutators across a spread of configurations.
    bool ok = true;
    std::string detail_msg;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 50 && ok; ++i) {
      ProtocolParams<double> params;
      params.reflectivity = 0.98 * uni(rng);
      params.squeezing = 2.0 * uni(rng);
      params.transmission = 0.05 + 0.95 * uni(rng);
      params.gain_policy = GainPolicy::Manual;
      params.manual_gain = 4.0 * uni(rng) - 2.0;
      if (i % 3 == 0) params.clone_count = 2 + int(uni(rng) * 5);
      const auto proto = build_transfer(params);
      if (!check_commutators(proto.outputs)) {
        ok = false;
        detail_msg = "failed at R=" + fmt(params.reflectivity);
      }
    }
    ctx.report("output commutators across random configurations", ok,
               detail_msg);
  }

  {
    // Transfer fidelity closed forms.
    bool ok = true;
    std::string detail_msg;
    for (double R : {0.0, 0.2, 0.5, 0.8, 0.99}) {
      for (double r : {0.0, 0.3, 1.0}) {
        ProtocolParams<double> params;
        params.reflectivity = R;
        params.squeezing = r;
        const auto reports = output_fidelities(build_transfer(params));
        const double expected = 1.0 / (1.0 + R * std::exp(-2.0 * r));
        if (std::abs(reports[0].fidelity - expected) > tol) {
          ok = false;
          detail_msg = "R=" + fmt(R) + " r=" + fmt(r) + ": F=" +
                       fmt(reports[0].fidelity) + " expected " +
                       fmt(expected);
        }
      }
    }
    ctx.report("kept-output fidelity 1/(1 + R e^{-2r})", ok, detail_msg);
  }

  {
    // Lossy-channel coefficients of the kept output.
    bool ok = true;
    std::string detail_msg;
    for (auto [R, eta] : {std::pair{0.3, 0.6}, std::pair{0.8, 0.9}}) {
      ProtocolParams<double> params;
      params.reflectivity = R;
      params.squeezing = 0.4;
      params.transmission = eta;
      params.gain_policy = GainPolicy::LossCompensated;
      const auto proto = build_transfer(params);
      const auto& out1 = proto.out1();
      const double rt = std::sqrt(R);
      const double in_coeff =
          out1.mode_block(mode_ids::input)(0, 0);
      const double epr1_coeff =
          out1.mode_block(mode_ids::epr_half_1)(0, 0);
      const double expected_epr1 = -(rt + (1 - eta) * (1 - R) / rt);
      if (std::abs(in_coeff - 1.0) > tol ||
          std::abs(epr1_coeff - expected_epr1) > tol) {
        ok = false;
        detail_msg = "R=" + fmt(R) + " eta=" + fmt(eta);
      }
    }
    ctx.report("loss-compensated kept-output coefficients", ok, detail_msg);
  }

  {
    // Cloning closed forms against the circuit.
    bool ok = true;
    std::string detail_msg;
    for (int m = 2; m <= 8 && ok; ++m) {
      for (double r : {0.0, 0.5}) {
        const auto closed = clone_fidelities(m, r);
        ProtocolParams<double> params;
        params.squeezing = r;
        params.clone_count = m;
        const auto reports = output_fidelities(build_transfer(params));
        if (std::abs(reports[0].fidelity - closed.kept_fidelity) > tol) {
          ok = false;
          detail_msg = "kept M=" + std::to_string(m);
        }
        for (std::size_t k = 1; k < reports.size(); ++k) {
          if (std::abs(reports[k].fidelity - closed.clone_fidelity) > tol) {
            ok = false;
            detail_msg = "clone M=" + std::to_string(m);
          }
        }
      }
    }
    ctx.report("cloning fidelity table M=2..8", ok, detail_msg);
  }

  {
    // Sampling consistency at reduced shot count.
    MCConfig mc;
    mc.shots = check_shots_from_env(200000);
    mc.seed = 424242;
    ProtocolParams<double> params;
    params.reflectivity = 0.5;
    params.squeezing = 0.5 * std::log(2.0);
    params.input_mean = {2.0, -1.0};
    const auto proto = build_transfer(params);
    const auto reports = output_fidelities(proto);
    const auto sim = simulate_protocol_shots(params, mc);
    double worst = 0;
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const auto& est = sim.outputs[k];
      for (auto [value, ref] :
           {std::pair{est.var_x, reports[k].var_x},
            std::pair{est.var_y, reports[k].var_y},
            std::pair{est.fidelity, reports[k].fidelity}}) {
        if (value.std_error > 0) {
          worst = std::max(worst,
                           std::abs(value.value - ref) / value.std_error);
        }
      }
    }
    ctx.report("sampled moments vs closed forms (" +
                   std::to_string(mc.shots) + " shots)",
               worst <= 4.0, "worst |sigma| = " + fmt(worst));
  }

  {
    // First-principles SNR equals the reference closed form at r = 0.
    bool ok = true;
    std::string detail_msg;
    for (double R : {0.0, 0.2, 0.5, 0.8, 0.95}) {
      ProtocolParams<double> params;
      params.reflectivity = R;
      const auto report = channel_snr(params, {4.0, 4.0});
      if (!report.reference_valid ||
          std::abs(report.snr_x - report.reference_formula_value) > tol) {
        ok = false;
        detail_msg = "R=" + fmt(R);
      }
    }
    ctx.report("SNR reference agreement at r=0", ok, detail_msg);
  }

  std::cout << (ctx.failures == 0 ? "result: all checks passed"
                                  : "result: FAILURES present")
            << "\n";
  return ctx.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "semiq - Gaussian simulation engine for partially disembodied "
      "continuous-variable state transfer"};
  app.require_subcommand(1);

  // transfer
  auto* transfer = app.add_subcommand(
      "transfer", "evaluate one protocol configuration");
  CommonFlags transfer_flags;
  transfer_flags.add_protocol(transfer, true, true);
  std::string transfer_out;
  bool transfer_json = false;
  transfer->add_option("--out", transfer_out, "write to file instead of stdout");
  transfer->add_flag("--json", transfer_json, "emit JSON");

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "CSV sweep of the transfer over reflectivity");
  CommonFlags sweep_flags;
  sweep_flags.add_protocol(sweep, false, false);
  std::vector<double> sweep_values;
  std::vector<double> sweep_range;
  std::string sweep_out;
  auto* values_opt = sweep->add_option(
      "--R", sweep_values, "explicit reflectivity values (comma separated)");
  values_opt->delimiter(',');
  auto* range_opt = sweep->add_option(
      "--R-range", sweep_range,
      "reflectivity range as START STOP COUNT (inclusive)");
  range_opt->expected(3);
  values_opt->excludes(range_opt);
  range_opt->excludes(values_opt);
  sweep->add_option("--out", sweep_out, "CSV output path (default stdout)");

  // clone
  auto* clone = app.add_subcommand(
      "clone", "closed-form cloning fidelities, verified against the circuit");
  CommonFlags clone_flags;
  clone_flags.add_protocol(clone, false, false);
  std::vector<int> clone_counts{2};
  std::string clone_out;
  clone->add_option("--M", clone_counts,
                    "clone counts to tabulate (comma separated)")
      ->delimiter(',');
  clone->add_option("--out", clone_out, "output path (default stdout)");

  // mc
  auto* mc = app.add_subcommand(
      "mc", "sample the protocol and compare against the closed forms");
  CommonFlags mc_flags;
  mc_flags.add_protocol(mc, true, true);
  mc_flags.add_sampling(mc);
  double mc_sigmas = 3.0;
  std::string mc_out;
  mc->add_option("--sigmas", mc_sigmas,
                 "allowed deviation in standard errors")
      ->check(CLI::PositiveNumber);
  mc->add_option("--out", mc_out, "output path (default stdout)");

  // snr
  auto* snr = app.add_subcommand(
      "snr", "channel signal-to-noise report");
  CommonFlags snr_flags;
  snr_flags.add_protocol(snr, true, false);
  snr_flags.add_input_variance(snr);
  snr_flags.add_sampling(snr);
  bool snr_sampled = false;
  bool snr_json = false;
  std::string snr_out;
  snr->add_flag("--sampled", snr_sampled,
                "also estimate the SNR by shot-level sampling");
  snr->add_flag("--json", snr_json, "emit JSON");
  snr->add_option("--out", snr_out, "output path (default stdout)");

  // check
  app.add_subcommand("check",
                     "fast self-test battery (SEMIQ_CHECK_SHOTS overrides "
                     "the sampling depth)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(transfer)) {
      return cmd_transfer(transfer_flags.resolve(*transfer), transfer_out,
                          transfer_json);
    }
    if (app.got_subcommand(sweep)) {
      RunConfig config = sweep_flags.resolve(*sweep);
      std::vector<double> grid;
      if (!sweep_values.empty()) {
        grid = sweep_values;
      } else if (!sweep_range.empty()) {
        const double start = sweep_range[0];
        const double stop = sweep_range[1];
        const int count = static_cast<int>(sweep_range[2]);
        if (count < 1) {
          throw std::domain_error("sweep range needs at least one point");
        }
        for (int i = 0; i < count; ++i) {
          grid.push_back(count == 1 ? start
                                    : start + (stop - start) * i /
                                          (count - 1));
        }
      } else {
        grid.push_back(config.reflectivity);
      }
      return cmd_sweep(config, grid, sweep_out);
    }
    if (app.got_subcommand(clone)) {
      return cmd_clone(clone_flags.resolve(*clone), clone_counts, clone_out);
    }
    if (app.got_subcommand(mc)) {
      return cmd_mc(mc_flags.resolve(*mc), mc_sigmas, mc_out);
    }
    if (app.got_subcommand(snr)) {
      return cmd_snr(snr_flags.resolve(*snr), snr_sampled, snr_out,
                     snr_json);
    }
    return cmd_check();
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
