// SPDX-License-Identifier: Apache-2.0
//
// Measured case-study results embedded as reference data.  The numbers are
// hardware measurements transcribed from the published tables; they are
// used only to validate the planner's orderings (rank correlation, best /
// worst membership), never as expected absolute outputs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parashard/config.hpp"

namespace parashard {

struct ReferenceRow {
  std::uint64_t dp = 1, pp = 1, tp = 1, cp = 1;
  double step_time_s = 0.0;
  double throughput_ktok_s = 0.0;
  double mem_gb = 0.0;
  double mfu_pct = 0.0;

  ParallelConfig config() const {
    ParallelConfig c;
    c.dp = dp;
    c.pp = pp;
    c.tp = tp;
    c.cp = cp;
    return c;
  }
};

struct ReferenceTable {
  std::string id;          // matches the shipped config file stem
  std::string description;
  std::vector<ReferenceRow> rows;
};

// All embedded tables: llama7b, llama1b, mamba7b, mamba1b.
const std::vector<ReferenceTable>& reference_tables();

// nullptr when the id is unknown.
const ReferenceTable* find_reference_table(const std::string& id);

// FNV-1a over a canonical rendering of every table, frozen in a test so a
// silent transcription edit cannot slip through.
std::uint64_t reference_tables_checksum();

}  // namespace parashard
