#include "branchlab/trace.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "branchlab/errors.hpp"

namespace branchlab {

namespace {

constexpr std::array<std::string_view, 5> kKernelNames = {"bfs", "pr", "cc", "bc", "tc"};
constexpr char kMagic[4] = {'G', 'B', 'P', 'T'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xFF));
  buf.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  void read(void* dst, std::size_t len) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in_.gcount()) != len)
      throw TraceError(TraceError::Kind::truncated, "trace: unexpected end of file");
  }

  std::uint8_t u8() {
    std::uint8_t v;
    read(&v, 1);
    return v;
  }

  std::uint16_t u16() {
    std::uint8_t b[2];
    read(b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint64_t u64() {
    std::uint8_t b[8];
    read(b, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

}  // namespace

std::string_view kernel_name(Kernel k) { return kKernelNames[static_cast<std::size_t>(k)]; }

std::optional<Kernel> kernel_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKernelNames.size(); ++i)
    if (kKernelNames[i] == name) return static_cast<Kernel>(i);
  return std::nullopt;
}

const BranchSite* Trace::find_site(std::uint16_t site_id) const {
  for (const BranchSite& s : sites)
    if (s.site_id == site_id) return &s;
  return nullptr;
}

void Trace::validate() const {
  std::unordered_set<std::uint16_t> ids;
  std::unordered_set<std::uint64_t> pcs;
  for (const BranchSite& s : sites) {
    if (!ids.insert(s.site_id).second)
      throw FormatError("trace: duplicate site id " + std::to_string(s.site_id));
    if (!pcs.insert(s.pc).second)
      throw FormatError("trace: duplicate synthetic pc for site " + s.name);
    if (s.name.empty() || s.name.size() > 255)
      throw FormatError("trace: site name must be 1..255 bytes");
    if (static_cast<std::uint8_t>(s.kernel) > 4)
      throw FormatError("trace: unknown kernel ordinal");
  }
  for (const BranchEvent& e : events) {
    if (!ids.contains(e.site_id))
      throw TraceError(TraceError::Kind::unknown_site,
                       "trace: event references undeclared site " + std::to_string(e.site_id));
    if (e.taken > 1) throw FormatError("trace: event outcome must be 0 or 1");
  }
}

std::uint16_t TraceBuilder::declare_site(Kernel k, std::uint16_t line_tag) {
  auto id = static_cast<std::uint16_t>(trace_.sites.size());
  BranchSite s;
  s.site_id = id;
  s.kernel = k;
  s.line_tag = line_tag;
  s.pc = synthetic_pc(k, line_tag);
  s.name = std::string(kernel_name(k)) + "_" + std::to_string(line_tag);
  trace_.sites.push_back(std::move(s));
  return id;
}

void TraceBuilder::emit(std::uint16_t site_id, bool taken) {
  trace_.events.push_back({site_id, static_cast<std::uint8_t>(taken)});
}

Trace TraceBuilder::take() {
  Trace t = std::move(trace_);
  trace_ = Trace{};
  t.validate();
  return t;
}

std::uint64_t write_trace(const Trace& t, std::ostream& out) {
  t.validate();
  if (t.sites.size() > 0xFFFF) throw FormatError("trace: too many sites");
  std::string buf;
  buf.reserve(16 + t.sites.size() * 32 + t.events.size() * 3);
  buf.append(kMagic, 4);
  put_u16(buf, kVersion);
  put_u16(buf, static_cast<std::uint16_t>(t.sites.size()));
  put_u64(buf, t.events.size());
  for (const BranchSite& s : t.sites) {
    put_u16(buf, s.site_id);
    buf.push_back(static_cast<char>(s.kernel));
    put_u16(buf, s.line_tag);
    put_u64(buf, s.pc);
    buf.push_back(static_cast<char>(s.name.size()));
    buf.append(s.name);
  }
  for (const BranchEvent& e : t.events) {
    put_u16(buf, e.site_id);
    buf.push_back(static_cast<char>(e.taken));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("trace: write failed");
  return buf.size();
}

Trace read_trace(std::istream& in) {
  ByteReader r(in);
  char magic[4];
  r.read(magic, 4);
  if (std::string_view(magic, 4) != std::string_view(kMagic, 4))
    throw TraceError(TraceError::Kind::bad_magic, "trace: bad magic");
  std::uint16_t version = r.u16();
  if (version != kVersion)
    throw TraceError(TraceError::Kind::bad_version,
                     "trace: unsupported version " + std::to_string(version));
  std::uint16_t site_count = r.u16();
  std::uint64_t event_count = r.u64();

  Trace t;
  t.sites.resize(site_count);
  for (BranchSite& s : t.sites) {
    s.site_id = r.u16();
    std::uint8_t k = r.u8();
    if (k > 4)
      throw FormatError("trace: unknown kernel ordinal " + std::to_string(k));
    s.kernel = static_cast<Kernel>(k);
    s.line_tag = r.u16();
    s.pc = r.u64();
    std::uint8_t name_len = r.u8();
    s.name.resize(name_len);
    if (name_len) r.read(s.name.data(), name_len);
  }

  t.events.resize(event_count);
  if (event_count) {
    // 3 bytes per record; bulk read then unpack.
    std::string raw(event_count * 3, '\0');
    r.read(raw.data(), raw.size());
    const auto* b = reinterpret_cast<const std::uint8_t*>(raw.data());
    for (std::uint64_t i = 0; i < event_count; ++i) {
      t.events[i].site_id = static_cast<std::uint16_t>(b[3 * i] | (b[3 * i + 1] << 8));
      t.events[i].taken = b[3 * i + 2];
    }
  }
  if (!r.at_eof())
    throw TraceError(TraceError::Kind::count_mismatch,
                     "trace: trailing bytes past declared event count");
  t.validate();
  return t;
}

void write_trace_file(const Trace& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + path);
  write_trace(t, out);
  if (!out.flush()) throw IoError("write failed: " + path);
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file: " + path);
  return read_trace(in);
}

}  // namespace branchlab
