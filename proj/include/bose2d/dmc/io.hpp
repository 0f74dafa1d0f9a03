#pragma once

// Plain-text persistence: the runs.csv log and walker checkpoints.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bose2d/csv.hpp"
#include "bose2d/dmc/potential.hpp"
#include "bose2d/dmc/sampler.hpp"
#include "bose2d/errors.hpp"

namespace bose2d::dmc {

inline constexpr const char *runs_header = "potential,n_r2,N,timestep,walkers,mean,err,tag,seed";

struct RunRecord {
  PotentialKind potential = PotentialKind::dipolar;
  double n_r2 = 0.0;
  std::size_t n_particles = 0;
  double timestep = 0.0; // 0 for vmc and extrapolated rows
  std::size_t walkers = 0;
  EnergyEstimate energy;
  std::uint64_t seed = 0;
};

inline std::string format_run_record(const RunRecord &r) {
  return std::string(to_string(r.potential)) + "," + csv::format(r.n_r2) + "," +
         std::to_string(r.n_particles) + "," + csv::format(r.timestep) + "," +
         std::to_string(r.walkers) + "," + csv::format(r.energy.mean) + "," +
         csv::format(r.energy.err) + "," + std::string(to_string(r.energy.tag)) + "," +
         std::to_string(r.seed);
}

/// Appends one row, writing the header first when the file is new or empty.
inline void append_run(const std::string &path, const RunRecord &r) {
  namespace fs = std::filesystem;
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out)
    throw parse_error("cannot open " + path + " for appending");
  if (fresh)
    out << runs_header << "\n";
  out << format_run_record(r) << "\n";
}

// Checkpoint layout: one line per particle, "walker,particle,x,y".

inline void write_checkpoint(std::ostream &out, const std::vector<Walker> &walkers) {
  out << "walker,particle,x,y\n";
  for (std::size_t k = 0; k < walkers.size(); ++k)
    for (std::size_t i = 0; i < walkers[k].size(); ++i)
      out << k << "," << i << "," << csv::format(walkers[k].x[i]) << ","
          << csv::format(walkers[k].y[i]) << "\n";
}

inline void save_checkpoint(const std::string &path, const std::vector<Walker> &walkers) {
  std::ofstream out(path);
  if (!out)
    throw parse_error("cannot open " + path + " for writing");
  write_checkpoint(out, walkers);
}

/// Lineages are reassigned from `seed`, so a restart is itself reproducible.
inline std::vector<Walker> read_checkpoint(std::istream &in, std::uint64_t seed) {
  const auto table = csv::read(in);
  if (table.header != std::vector<std::string>{"walker", "particle", "x", "y"})
    throw parse_error("checkpoint: expected header walker,particle,x,y");
  std::vector<Walker> out;
  for (const auto &cells : table.rows) {
    std::size_t k = 0, i = 0;
    for (auto [text, dst] : {std::pair{&cells[0], &k}, std::pair{&cells[1], &i}}) {
      const auto *end = text->data() + text->size();
      auto [ptr, ec] = std::from_chars(text->data(), end, *dst);
      if (ec != std::errc{} || ptr != end)
        throw parse_error("checkpoint: walker and particle indices must be non-negative integers");
    }
    if (k == out.size())
      out.emplace_back();
    else if (k + 1 != out.size())
      throw parse_error("checkpoint: walkers must appear in order");
    auto &w = out.back();
    if (i != w.size())
      throw parse_error("checkpoint: particles must appear in order");
    w.x.push_back(csv::parse_double(cells[2]));
    w.y.push_back(csv::parse_double(cells[3]));
  }
  if (out.empty())
    throw parse_error("checkpoint: no walkers");
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k].size() != out.front().size())
      throw parse_error("checkpoint: walkers have different particle counts");
    out[k].lineage = hash_combine(seed, k + 1);
  }
  return out;
}

inline std::vector<Walker> load_checkpoint(const std::string &path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in)
    throw parse_error("cannot open " + path);
  return read_checkpoint(in, seed);
}

} // namespace bose2d::dmc
