#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "wpk/analysis.hpp"
#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/observables.hpp"
#include "wpk/propagator.hpp"
#include "wpk/sampler.hpp"
#include "wpk/wavefunction.hpp"

namespace wpk {

// ordered key/value pairs echoed into every artifact so a run can be
// reconstructed from any of its outputs
using Metadata = std::vector<std::pair<std::string, std::string>>;

namespace detail {

// the dump format below is little-endian on disk; raw writes are only
// correct on little-endian hosts
static_assert(std::endian::native == std::endian::little,
              "state dumps assume a little-endian host");

inline std::ofstream open_for_write(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void write_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_preamble(std::ofstream& out, const Metadata& meta) {
  for (const auto& [key, value] : meta) out << "# " << key << " = " << value << "\n";
}

}  // namespace detail

// --- wavefunction dump -------------------------------------------------------
//
// Layout (all little-endian):
//   "WPK1"
//   u32 axis count
//   per axis: u32 n_points, f64 step, f64 offset
//   amplitudes row-major, interleaved f64 (re, im) pairs
//
// The layout has no free header space, so run metadata goes to a text sidecar
// next to the dump (save_metadata_sidecar).

inline void save_wavefunction(const std::string& path, const WaveFunction& psi) {
  validate_grid(psi.grid);
  if (psi.amplitudes.size() != total_points(psi.grid)) {
    throw IoError("refusing to dump a state whose amplitudes do not match its grid");
  }
  auto out = detail::open_for_write(path, std::ios::binary);
  out.write("WPK1", 4);
  detail::write_u32(out, static_cast<std::uint32_t>(psi.grid.rank()));
  for (const auto& a : psi.grid.axes) {
    detail::write_u32(out, static_cast<std::uint32_t>(a.n_points));
    detail::write_f64(out, a.step);
    detail::write_f64(out, a.offset);
  }
  out.write(reinterpret_cast<const char*>(psi.amplitudes.data()),
            static_cast<std::streamsize>(psi.amplitudes.size() * sizeof(cdouble)));
  if (!out) throw IoError("short write while dumping state to '" + path + "'");
}

inline WaveFunction load_wavefunction(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WPK1", 4) != 0) {
    throw IoError("'" + path + "' is not a wavefunction dump (bad magic)");
  }
  std::uint32_t rank = 0;
  in.read(reinterpret_cast<char*>(&rank), sizeof rank);
  if (!in || rank == 0 || rank > 64) {
    throw IoError("'" + path + "' has an implausible axis count");
  }

  GridSpec grid;
  for (std::uint32_t r = 0; r < rank; ++r) {
    std::uint32_t n = 0;
    double step = 0.0, offset = 0.0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&step), sizeof step);
    in.read(reinterpret_cast<char*>(&offset), sizeof offset);
    if (!in) throw IoError("'" + path + "' ended inside the axis table");
    grid.axes.push_back({n, step, offset});
  }
  try {
    validate_grid(grid);
  } catch (const ConfigError& e) {
    throw IoError("'" + path + "' carries an invalid grid: " + e.what());
  }

  WaveFunction psi = make_zero_state(grid);
  in.read(reinterpret_cast<char*>(psi.amplitudes.data()),
          static_cast<std::streamsize>(psi.amplitudes.size() * sizeof(cdouble)));
  if (!in || in.gcount() !=
                 static_cast<std::streamsize>(psi.amplitudes.size() * sizeof(cdouble))) {
    throw IoError("'" + path + "' ended before all amplitudes were read");
  }
  return psi;
}

inline void save_metadata_sidecar(const std::string& dump_path, const Metadata& meta) {
  auto out = detail::open_for_write(dump_path + ".meta", std::ios::out);
  detail::write_preamble(out, meta);
  if (!out) throw IoError("short write on '" + dump_path + ".meta'");
}

// --- CSV artifacts -----------------------------------------------------------

// step, energy, norm. The extra column turns the norm decay into an energy
// estimate, -log(norm)/d_tau; with per-step renormalization it tracks the
// variational energy and is a useful independent convergence cross-check.
inline void write_trace_csv(const std::string& path, const PropagationReport& report,
                            double d_tau, const Metadata& meta) {
  auto out = detail::open_for_write(path, std::ios::out);
  detail::write_preamble(out, meta);
  out << "step,energy,norm,energy_from_norm\n";
  for (const auto& entry : report.energy_trace) {
    out << entry.step << ',' << detail::format_double(entry.energy) << ','
        << detail::format_double(entry.norm) << ','
        << detail::format_double(-std::log(entry.norm) / d_tau) << "\n";
  }
  if (!out) throw IoError("short write on '" + path + "'");
}

inline void write_marginal_csv(const std::string& path, const MarginalDensity& m,
                               const Metadata& meta) {
  auto out = detail::open_for_write(path, std::ios::out);
  detail::write_preamble(out, meta);
  out << "R_x,R_y,p\n";
  const auto xs = coordinates(m.grid.axes[0]);
  const auto ys = coordinates(m.grid.axes[1]);
  std::size_t flat = 0;
  for (double x : xs) {
    for (double y : ys) {
      out << detail::format_double(x) << ',' << detail::format_double(y) << ','
          << detail::format_double(m.p[flat++]) << "\n";
    }
  }
  if (!out) throw IoError("short write on '" + path + "'");
}

inline void write_slice_csv(const std::string& path, const SliceField& slice,
                            const Metadata& meta) {
  if (slice.grid.rank() != 2) throw IoError("slice CSV expects a two-axis slice");
  auto out = detail::open_for_write(path, std::ios::out);
  detail::write_preamble(out, meta);
  out << "# slice_weight = " << detail::format_double(slice.weight) << "\n";
  const std::string c0 = slice.grid.labels.empty() ? "x0" : slice.grid.labels[0];
  const std::string c1 = slice.grid.labels.empty() ? "x1" : slice.grid.labels[1];
  out << c0 << ',' << c1 << ",density\n";
  const auto xs = coordinates(slice.grid.axes[0]);
  const auto ys = coordinates(slice.grid.axes[1]);
  std::size_t flat = 0;
  for (double x : xs) {
    for (double y : ys) {
      out << detail::format_double(x) << ',' << detail::format_double(y) << ','
          << detail::format_double(slice.values[flat++]) << "\n";
    }
  }
  if (!out) throw IoError("short write on '" + path + "'");
}

inline void write_samples_csv(const std::string& path, const SamplingRun& run,
                              const Metadata& meta) {
  auto out = detail::open_for_write(path, std::ios::out);
  detail::write_preamble(out, meta);
  out << "# seed = " << run.seed << "\n";
  out << "# prng = " << run.prng_id << "\n";
  out << "index,R_x,R_y,bond_length,running_mean\n";
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const auto& r = run.records[i];
    out << r.index << ',' << detail::format_double(r.r_x) << ','
        << detail::format_double(r.r_y) << ',' << detail::format_double(r.bond_length) << ','
        << detail::format_double(run.running_mean[i]) << "\n";
  }
  if (!out) throw IoError("short write on '" + path + "'");
}

inline void write_bond_stats_csv(const std::string& path,
                                 const std::vector<std::pair<std::string, BondLengthStats>>& rows,
                                 const Metadata& meta) {
  auto out = detail::open_for_write(path, std::ios::out);
  detail::write_preamble(out, meta);
  out << "source,mean,std,mode\n";
  for (const auto& [label, s] : rows) {
    out << label << ',' << detail::format_double(s.mean) << ','
        << detail::format_double(s.std_dev) << ',' << detail::format_double(s.mode) << "\n";
  }
  if (!out) throw IoError("short write on '" + path + "'");
}

inline void write_pes_csv(const std::string& path, const PesScan& scan, const Metadata& meta) {
  auto out = detail::open_for_write(path, std::ios::out);
  detail::write_preamble(out, meta);
  out << "# completed = " << (scan.completed ? "true" : "false") << "\n";
  out << "# equilibrium = " << detail::format_double(scan.equilibrium) << "\n";
  out << "R,E_electronic,E_total\n";
  for (const auto& p : scan.points) {
    out << detail::format_double(p.separation) << ',' << detail::format_double(p.e_electronic)
        << ',' << detail::format_double(p.e_total) << "\n";
  }
  if (!out) throw IoError("short write on '" + path + "'");
}

inline void write_chain_csv(const std::string& path, const std::vector<ChainRow>& rows,
                            const Metadata& meta) {
  auto out = detail::open_for_write(path, std::ios::out);
  detail::write_preamble(out, meta);
  out << "N,n,omega,sigma_exact,sigma_approx\n";
  for (const auto& r : rows) {
    out << r.n_sites << ',' << r.mode << ',' << detail::format_double(r.omega) << ','
        << detail::format_double(r.sigma_exact) << ',' << detail::format_double(r.sigma_approx)
        << "\n";
  }
  if (!out) throw IoError("short write on '" + path + "'");
}

}  // namespace wpk
