#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace branchlab {

enum class Kernel : std::uint8_t { bfs = 0, pr = 1, cc = 2, bc = 3, tc = 4 };

std::string_view kernel_name(Kernel k);
std::optional<Kernel> kernel_from_name(std::string_view name);

// Traces carry synthetic program counters so predictors index the way they
// would on real addresses: kernel ordinal in the high bits, the site's line
// tag shifted past typical instruction alignment bits.
constexpr std::uint64_t synthetic_pc(Kernel k, std::uint16_t line_tag) {
  return (static_cast<std::uint64_t>(k) << 20) | (static_cast<std::uint64_t>(line_tag) << 4);
}

struct BranchSite {
  std::uint16_t site_id = 0;
  Kernel kernel = Kernel::bfs;
  std::uint16_t line_tag = 0;
  std::uint64_t pc = 0;
  std::string name;  // e.g. "bfs_52"
};

struct BranchEvent {
  std::uint16_t site_id;
  std::uint8_t taken;  // 0 or 1
};

struct Trace {
  std::vector<BranchSite> sites;
  std::vector<BranchEvent> events;

  // Internal consistency: unique site ids and pcs, names non-empty and at
  // most 255 bytes, outcomes 0/1, every event referencing a declared site.
  void validate() const;
  const BranchSite* find_site(std::uint16_t site_id) const;
};

// Kernels report branch outcomes through this interface; a sink that stores
// nothing lets the kernels run at full speed when only results matter.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual std::uint16_t declare_site(Kernel k, std::uint16_t line_tag) = 0;
  virtual void emit(std::uint16_t site_id, bool taken) = 0;
};

class TraceBuilder final : public TraceSink {
 public:
  std::uint16_t declare_site(Kernel k, std::uint16_t line_tag) override;
  void emit(std::uint16_t site_id, bool taken) override;
  Trace take();

 private:
  Trace trace_;
};

class NullSink final : public TraceSink {
 public:
  std::uint16_t declare_site(Kernel, std::uint16_t) override { return next_id_++; }
  void emit(std::uint16_t, bool) override {}

 private:
  std::uint16_t next_id_ = 0;
};

// Binary trace format (.gbpt, little-endian):
//   magic "GBPT" | version u16 = 1 | site_count u16 | event_count u64
//   per site:  site_id u16 | kernel u8 | line_tag u16 | pc u64 | name_len u8 | name
//   per event: site_id u16 | taken u8
// Readers reject: bad magic, unsupported version, truncation, events naming
// undeclared sites, and trailing bytes past the declared event count — each
// with its own TraceError kind.
std::uint64_t write_trace(const Trace& t, std::ostream& out);
Trace read_trace(std::istream& in);
void write_trace_file(const Trace& t, const std::string& path);
Trace read_trace_file(const std::string& path);

}  // namespace branchlab
