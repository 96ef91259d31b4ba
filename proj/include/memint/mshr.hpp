#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "memint/device.hpp"
#include "memint/error.hpp"

namespace memint {

struct MshrConfig {
  std::size_t global_read_cap = 32;
  std::size_t global_write_cap = 16;
  std::size_t per_core_read_cap = 10;
  // Read entries set aside per core; 0 disables reservations.
  std::size_t reserve_per_core = 0;

  bool operator==(const MshrConfig&) const = default;
};

// Shared miss status holding registers. Reads count against the per-core and
// global read caps; writes only against the global write cap.
//
// With reservations, a read is admitted only if every core could still
// reach its reserved count afterwards, i.e. sum over cores of
// max(outstanding, reserved) stays within the global read cap.
class MshrFile {
 public:
  MshrFile(MshrConfig config, std::size_t num_cores)
      : config_(config), reads_(num_cores, 0), writes_(num_cores, 0) {
    if (num_cores == 0) throw Error("MSHR file needs at least one core");
    if (config_.per_core_read_cap == 0 || config_.global_read_cap == 0) {
      throw Error("MSHR read caps must be >= 1");
    }
    if (config_.reserve_per_core > config_.per_core_read_cap) {
      throw Error("MSHR reservation exceeds the per-core read cap");
    }
    if (config_.reserve_per_core * num_cores > config_.global_read_cap) {
      throw Error("MSHR reservations exceed the global read cap");
    }
  }

  const MshrConfig& config() const { return config_; }
  std::size_t num_cores() const { return reads_.size(); }
  std::size_t reads(CoreId c) const { return reads_.at(c); }
  std::size_t writes(CoreId c) const { return writes_.at(c); }
  std::size_t total_reads() const { return sum(reads_); }
  std::size_t total_writes() const { return sum(writes_); }

  bool can_acquire(CoreId core, bool is_write) const {
    check_core(core);
    if (is_write) return total_writes() < config_.global_write_cap;
    if (reads_[core] >= config_.per_core_read_cap) return false;
    std::size_t committed = 0;
    for (std::size_t c = 0; c < reads_.size(); ++c) {
      const auto out = reads_[c] + (c == core ? 1 : 0);
      committed += std::max(out, config_.reserve_per_core);
    }
    return committed <= config_.global_read_cap;
  }

  bool acquire(CoreId core, bool is_write) {
    if (!can_acquire(core, is_write)) return false;
    ++(is_write ? writes_ : reads_)[core];
    return true;
  }

  void release(CoreId core, bool is_write) {
    check_core(core);
    auto& v = is_write ? writes_ : reads_;
    if (v[core] == 0) {
      throw InternalFault("MSHR release without matching acquire (core " + std::to_string(core) +
                          ")");
    }
    --v[core];
  }

  // How many more reads the core could acquire right now.
  std::size_t read_allowance(CoreId core) const {
    MshrFile probe = *this;
    std::size_t n = 0;
    while (probe.acquire(core, false)) ++n;
    return n;
  }

  std::size_t write_allowance() const { return config_.global_write_cap - total_writes(); }

 private:
  static std::size_t sum(const std::vector<std::size_t>& v) {
    std::size_t s = 0;
    for (auto x : v) s += x;
    return s;
  }
  void check_core(CoreId c) const {
    if (c >= reads_.size()) throw Error("MSHR core index out of range");
  }

  MshrConfig config_;
  std::vector<std::size_t> reads_;
  std::vector<std::size_t> writes_;
};

}  // namespace memint
