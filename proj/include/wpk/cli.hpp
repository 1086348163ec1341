#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "wpk/analysis.hpp"
#include "wpk/config.hpp"
#include "wpk/errors.hpp"
#include "wpk/io.hpp"
#include "wpk/observables.hpp"
#include "wpk/propagator.hpp"
#include "wpk/sampler.hpp"
#include "wpk/validation.hpp"
#include "wpk/version.hpp"
#include "wpk/wavefunction.hpp"

namespace wpk::cli {

namespace detail {

inline int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config:
      return 2;
    case ErrorCategory::numeric:
      return 3;
    case ErrorCategory::io:
      return 4;
  }
  return 3;
}

inline std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  }
  return dir;
}

// Coordinate on the axis closest to the origin, preferring the positive one
// when the grid straddles zero symmetrically.
inline double near_origin_coordinate(const AxisSpec& axis) {
  double best = axis.offset;
  for (std::size_t i = 1; i < axis.n_points; ++i) {
    const double x = axis.offset + static_cast<double>(i) * axis.step;
    if (std::abs(x) < std::abs(best) - 1e-12 ||
        (std::abs(std::abs(x) - std::abs(best)) <= 1e-12 && x > best)) {
      best = x;
    }
  }
  return best;
}

inline void write_reduced_observables(const WaveFunction& state, const RunConfig& cfg,
                                      const Metadata& meta, const std::filesystem::path& dir,
                                      std::ostream& out) {
  const MarginalDensity marginal = nuclear_marginal(state);
  const BondLengthStats stats = bond_length_stats(marginal);
  write_marginal_csv((dir / "marginal.csv").string(), marginal, meta);
  write_bond_stats_csv((dir / "bond_stats.csv").string(), {{"exact", stats}}, meta);
  if (state.grid.rank() == 4) {
    const double ex = near_origin_coordinate(state.grid.axes[2]);
    const double ey = near_origin_coordinate(state.grid.axes[3]);
    const SliceField slice = conditional_slice(state, {{2, ex}, {3, ey}});
    write_slice_csv((dir / "slice.csv").string(), slice, meta);
  }
  out << "bond length: mean " << stats.mean << ", std " << stats.std_dev << ", mode "
      << stats.mode << "\n";
  (void)cfg;
}

inline GroundStateResult optimize_and_dump(const RunConfig& cfg, const Metadata& meta,
                                           const std::filesystem::path& dir, std::ostream& out) {
  const HamiltonianModel model = cfg.build_model();
  const WaveFunction psi0 = gaussian_initial(model.grid, cfg.initial_width);
  GroundStateResult result = evolve_to_ground_state(psi0, model, cfg.propagator);
  write_trace_csv((dir / "trace.csv").string(), result.report, cfg.propagator.d_tau, meta);
  const std::string dump = (dir / "state.wpk1").string();
  save_wavefunction(dump, result.state);
  save_metadata_sidecar(dump, meta);
  out << (result.report.converged ? "converged" : "step limit reached") << " after "
      << result.report.steps_taken << " steps, energy " << result.report.final_energy << "\n";
  return result;
}

inline int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
  const Metadata meta = cfg.resolved();
  const auto dir = ensure_out_dir(cfg);
  const GroundStateResult result = optimize_and_dump(cfg, meta, dir, out);
  if (result.state.grid.rank() >= 2 && cfg.kind &&
      *cfg.kind == ModelKind::h2plus_reduced) {
    write_reduced_observables(result.state, cfg, meta, dir, out);
  }
  out << "artifacts written to " << dir.string() << "\n";
  return 0;
}

inline int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const Metadata meta = cfg.resolved();
  const auto dir = ensure_out_dir(cfg);
  WaveFunction state;
  if (!cfg.input_state.empty()) {
    state = load_wavefunction(cfg.input_state);
    out << "loaded state from " << cfg.input_state << "\n";
  } else {
    state = optimize_and_dump(cfg, meta, dir, out).state;
  }
  const MarginalDensity marginal = nuclear_marginal(state);
  const SamplingRun run = sample(marginal, cfg.n_obs, cfg.seed);
  const SampleStats sampled = run_stats(run);
  const BondLengthStats exact = bond_length_stats(marginal);
  write_samples_csv((dir / "samples.csv").string(), run, meta);
  const BondLengthStats sampled_as_stats{sampled.mean, sampled.std_dev, sampled.mode};
  write_bond_stats_csv((dir / "sample_stats.csv").string(),
                       {{"exact", exact}, {"sampled", sampled_as_stats}}, meta);
  out << "sampled " << run.records.size() << " observations with seed " << run.seed << "\n";
  out << "exact:   mean " << exact.mean << ", std " << exact.std_dev << ", mode " << exact.mode
      << "\n";
  out << "sampled: mean " << sampled.mean << ", std " << sampled.std_dev << ", mode "
      << sampled.mode << "\n";
  out << "artifacts written to " << dir.string() << "\n";
  return 0;
}

inline int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  const Metadata meta = cfg.resolved();
  const auto dir = ensure_out_dir(cfg);
  const GridSpec grid = cfg.make_grid(2);
  const std::vector<double> seps = scan_separations(cfg.r_min, cfg.r_max, cfg.r_step);
  const PesScan scan = pes_scan(grid, seps, cfg.resolved_cap(), cfg.initial_width,
                                cfg.propagator);
  write_pes_csv((dir / "pes.csv").string(), scan, meta);
  out << "scanned " << scan.points.size() << " of " << seps.size() << " separations\n";
  if (!scan.completed) {
    out << "scan aborted early; partial curve written to " << dir.string() << "\n";
    return detail::exit_code_for(ErrorCategory::numeric);
  }
  out << "minimum total energy at separation " << scan.equilibrium << "\n";
  out << "artifacts written to " << dir.string() << "\n";
  return 0;
}

inline int cmd_chain(const RunConfig& cfg, std::ostream& out) {
  Metadata meta = cfg.resolved();
  const auto dir = ensure_out_dir(cfg);
  std::vector<std::size_t> sizes;
  const double ln_lo = std::log(static_cast<double>(cfg.chain_n_min));
  const double ln_hi = std::log(static_cast<double>(cfg.chain_n_max));
  for (std::size_t i = 0; i < cfg.chain_n_count; ++i) {
    const double t = cfg.chain_n_count == 1
                         ? 0.0
                         : static_cast<double>(i) / static_cast<double>(cfg.chain_n_count - 1);
    const auto n = static_cast<std::size_t>(std::llround(std::exp(ln_lo + t * (ln_hi - ln_lo))));
    if (sizes.empty() || sizes.back() != n) sizes.push_back(n);
  }
  const std::vector<ChainRow> rows = chain_table(sizes, cfg.chain_mass, cfg.chain_spring_k);
  std::vector<double> ln_n;
  std::vector<double> ln_sigma;
  for (const auto& r : rows) {
    ln_n.push_back(std::log(static_cast<double>(r.n_sites)));
    ln_sigma.push_back(std::log(r.sigma_exact));
  }
  const double slope = fitted_slope(ln_n, ln_sigma);
  std::ostringstream formatted;
  formatted << slope;
  meta.emplace_back("fit.log_log_slope", formatted.str());
  write_chain_csv((dir / "chain.csv").string(), rows, meta);
  out << "lowest-mode width grows with fitted log-log slope " << slope << " over N = "
      << sizes.front() << ".." << sizes.back() << "\n";
  out << "artifacts written to " << dir.string() << "\n";
  return 0;
}

}  // namespace detail

// Entry point shared by the real binary and the tests. Streams are injected
// so test code can capture output without touching global state.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"imaginary-time wavepacket relaxation on dense coordinate grids"};
  app.set_version_flag("--version", std::string(version_string));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;

  const std::vector<std::pair<Command, std::string>> commands = {
      {Command::optimize, "relax a wavepacket to the ground state and dump observables"},
      {Command::sample, "draw bond-length observations from a relaxed state"},
      {Command::scan, "trace the pinned-nuclei energy curve over separations"},
      {Command::chain, "tabulate harmonic-chain mode widths against chain size"},
      {Command::validate, "run the built-in oracle checks on small models"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [cmd, description] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(cmd), description);
    auto* config_opt =
        sub->add_option("--config", config_path, "run configuration file");
    if (cmd != Command::validate) config_opt->required();
    sub->add_option("--out", out_override, "override [output] dir from the config");
    sub->add_option("--seed", seed_override, "override [sampling] seed from the config");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e, out, err);
    }
    err << "error [config]: " << e.what() << "\n";
    return 2;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const Command cmd = commands[i].first;
      if (cmd == Command::validate) {
        const int failures = validation::run_and_report(out);
        out << (failures == 0 ? "all checks passed\n"
                              : std::to_string(failures) + " check(s) failed\n");
        return failures == 0 ? 0 : 1;
      }
      RunConfig cfg = load_run_config(cmd, config_path);
      if (!out_override.empty()) cfg.out_dir = out_override;
      if (subs[i]->count("--seed") > 0) cfg.seed = seed_override;
      switch (cmd) {
        case Command::optimize:
          return detail::cmd_optimize(cfg, out);
        case Command::sample:
          return detail::cmd_sample(cfg, out);
        case Command::scan:
          return detail::cmd_scan(cfg, out);
        case Command::chain:
          return detail::cmd_chain(cfg, out);
        case Command::validate:
          break;
      }
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.category()) << "]: " << e.what() << "\n";
    return detail::exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "error [internal]: " << e.what() << "\n";
    return 3;
  }
  err << "error [config]: no command selected\n";
  return 2;
}

}  // namespace wpk::cli
