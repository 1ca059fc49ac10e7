#include "branchlab/predictors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "branchlab/errors.hpp"
#include "branchlab/hashes.hpp"

namespace branchlab {

int plbp_default_theta(unsigned h) {
  return static_cast<int>(std::floor(2.14 * (h + 1) + 20.58));
}

// ---------------------------------------------------------------------------
// Config text

namespace {

const std::map<std::string_view, PredictorKind> kKinds = {
    {"perfect", PredictorKind::perfect}, {"one_bit", PredictorKind::one_bit},
    {"gshare", PredictorKind::gshare},   {"local", PredictorKind::local},
    {"loop", PredictorKind::loop},       {"perceptron", PredictorKind::perceptron},
    {"tage", PredictorKind::tage},       {"plbp", PredictorKind::plbp},
};

std::string_view kind_name(PredictorKind k) {
  for (auto [name, kind] : kKinds)
    if (kind == k) return name;
  return "?";
}

std::uint64_t parse_uint(std::string_view key, std::string_view value, std::uint64_t max) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || v > max)
    throw UsageError("predictor config: invalid value '" + std::string(value) + "' for key '" +
                     std::string(key) + "'");
  return v;
}

}  // namespace

PredictorConfig PredictorConfig::parse(std::string_view text) {
  std::vector<std::pair<std::string_view, std::string_view>> pairs;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto start = text.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(start, end - start);
    auto eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq == tok.size() - 1)
      throw UsageError("predictor config: expected key=value, got '" + std::string(tok) + "'");
    pairs.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    pos = end;
  }

  PredictorConfig cfg;
  bool have_kind = false;
  for (auto [key, value] : pairs) {
    if (key == "kind") {
      if (have_kind) throw UsageError("predictor config: duplicate key 'kind'");
      auto it = kKinds.find(value);
      if (it == kKinds.end())
        throw UsageError("predictor config: unknown kind '" + std::string(value) + "'");
      cfg.kind = it->second;
      have_kind = true;
    }
  }
  if (!have_kind) throw UsageError("predictor config: missing required key 'kind'");

  bool theta_set = false, hist_set = false;
  std::vector<std::string_view> seen;
  for (auto [key, value] : pairs) {
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw UsageError("predictor config: duplicate key '" + std::string(key) + "'");
    seen.push_back(key);
    if (key == "kind") continue;

    bool ok = false;
    switch (cfg.kind) {
      case PredictorKind::perfect:
      case PredictorKind::tage:
        break;  // no tunables
      case PredictorKind::one_bit:
        if (key == "entries") {
          cfg.one_bit_entries = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 30));
          ok = true;
        }
        break;
      case PredictorKind::gshare:
        if (key == "entries") {
          cfg.gshare_entries = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 30));
          ok = true;
        } else if (key == "hist") {
          cfg.gshare_hist = static_cast<unsigned>(parse_uint(key, value, 32));
          ok = true;
        }
        break;
      case PredictorKind::local:
        if (key == "hist_entries") {
          cfg.local_hist_entries = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 30));
          ok = true;
        } else if (key == "hist_bits") {
          cfg.local_hist_bits = static_cast<unsigned>(parse_uint(key, value, 16));
          ok = true;
        } else if (key == "pattern_entries") {
          cfg.local_pattern_entries = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 30));
          ok = true;
        }
        break;
      case PredictorKind::loop:
        if (key == "sets") {
          cfg.loop_sets = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 20));
          ok = true;
        } else if (key == "ways") {
          cfg.loop_ways = static_cast<unsigned>(parse_uint(key, value, 16));
          ok = true;
        } else if (key == "tag_bits") {
          cfg.loop_tag_bits = static_cast<unsigned>(parse_uint(key, value, 16));
          ok = true;
        }
        break;
      case PredictorKind::perceptron:
        if (key == "rows") {
          cfg.perc_rows = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 24));
          ok = true;
        } else if (key == "hist") {
          cfg.perc_hist = static_cast<unsigned>(parse_uint(key, value, 64));
          ok = true;
        }
        break;
      case PredictorKind::plbp:
        if (key == "index_scheme") {
          if (value == "modulo")
            cfg.plbp_scheme = PlbpIndexScheme::modulo;
          else if (value == "curr_pc_hash")
            cfg.plbp_scheme = PlbpIndexScheme::curr_pc_hash;
          else if (value == "last_n_pc_hash")
            cfg.plbp_scheme = PlbpIndexScheme::last_n_pc_hash;
          else
            throw UsageError("predictor config: unknown index_scheme '" + std::string(value) +
                             "'");
          ok = true;
        } else if (key == "n") {
          cfg.plbp_last_n = static_cast<unsigned>(parse_uint(key, value, 16));
          ok = true;
        } else if (key == "N") {
          cfg.plbp_rows = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 20));
          ok = true;
        } else if (key == "M") {
          cfg.plbp_cols = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 20));
          ok = true;
        } else if (key == "H") {
          cfg.plbp_hist = static_cast<unsigned>(parse_uint(key, value, 1024));
          hist_set = true;
          ok = true;
        } else if (key == "theta") {
          if (value == "adaptive") {
            cfg.plbp_adaptive_theta = true;
          } else {
            cfg.plbp_theta = static_cast<int>(parse_uint(key, value, 1u << 20));
          }
          theta_set = true;
          ok = true;
        }
        break;
    }
    if (!ok)
      throw UsageError("predictor config: unknown key '" + std::string(key) + "' for kind '" +
                       std::string(kind_name(cfg.kind)) + "'");
  }
  if (cfg.kind == PredictorKind::plbp && (!theta_set || cfg.plbp_adaptive_theta || hist_set)) {
    // theta follows H unless pinned to a number explicitly
    bool numeric_theta = theta_set && !cfg.plbp_adaptive_theta;
    if (!numeric_theta) cfg.plbp_theta = plbp_default_theta(cfg.plbp_hist);
  }
  cfg.validate();
  return cfg;
}

void PredictorConfig::validate() const {
  using hashes::is_pow2;
  auto need = [](bool cond, const char* what) {
    if (!cond) throw UsageError(std::string("predictor config: ") + what);
  };
  switch (kind) {
    case PredictorKind::perfect:
    case PredictorKind::tage:
      break;
    case PredictorKind::one_bit:
      need(is_pow2(one_bit_entries), "entries must be a power of two");
      break;
    case PredictorKind::gshare:
      need(is_pow2(gshare_entries), "entries must be a power of two");
      need(gshare_hist >= 1 && gshare_hist <= 32, "hist must be in [1, 32]");
      break;
    case PredictorKind::local:
      need(is_pow2(local_hist_entries), "hist_entries must be a power of two");
      need(is_pow2(local_pattern_entries), "pattern_entries must be a power of two");
      need(local_hist_bits >= 1 && local_hist_bits <= 16, "hist_bits must be in [1, 16]");
      break;
    case PredictorKind::loop:
      need(is_pow2(loop_sets), "sets must be a power of two");
      need(loop_ways >= 1, "ways must be >= 1");
      need(loop_tag_bits >= 1 && loop_tag_bits <= 16, "tag_bits must be in [1, 16]");
      break;
    case PredictorKind::perceptron:
      need(is_pow2(perc_rows), "rows must be a power of two");
      need(perc_hist >= 1 && perc_hist <= 64, "hist must be in [1, 64]");
      break;
    case PredictorKind::plbp:
      need(is_pow2(plbp_rows), "N must be a power of two");
      need(is_pow2(plbp_cols), "M must be a power of two");
      need(plbp_hist >= 1 && plbp_hist <= 1024, "H must be in [1, 1024]");
      need(plbp_last_n >= 1 && plbp_last_n <= 16, "n must be in [1, 16]");
      need(plbp_theta >= 1, "theta must be >= 1");
      need(plbp_weight_bits == 8, "weight width is fixed at 8 bits");
      break;
  }
}

std::string PredictorConfig::canonical_string() const {
  std::ostringstream os;
  os << "kind=" << kind_name(kind);
  switch (kind) {
    case PredictorKind::perfect:
    case PredictorKind::tage:
      break;
    case PredictorKind::one_bit:
      os << " entries=" << one_bit_entries;
      break;
    case PredictorKind::gshare:
      os << " entries=" << gshare_entries << " hist=" << gshare_hist;
      break;
    case PredictorKind::local:
      os << " hist_entries=" << local_hist_entries << " hist_bits=" << local_hist_bits
         << " pattern_entries=" << local_pattern_entries;
      break;
    case PredictorKind::loop:
      os << " sets=" << loop_sets << " ways=" << loop_ways << " tag_bits=" << loop_tag_bits;
      break;
    case PredictorKind::perceptron:
      os << " rows=" << perc_rows << " hist=" << perc_hist;
      break;
    case PredictorKind::plbp: {
      const char* scheme = plbp_scheme == PlbpIndexScheme::modulo ? "modulo"
                           : plbp_scheme == PlbpIndexScheme::curr_pc_hash ? "curr_pc_hash"
                                                                          : "last_n_pc_hash";
      os << " index_scheme=" << scheme << " n=" << plbp_last_n << " N=" << plbp_rows
         << " M=" << plbp_cols << " H=" << plbp_hist << " theta=";
      if (plbp_adaptive_theta)
        os << "adaptive";
      else
        os << plbp_theta;
      break;
    }
  }
  return os.str();
}

std::string PredictorConfig::short_name() const {
  if (kind != PredictorKind::plbp) return std::string(kind_name(kind));
  switch (plbp_scheme) {
    case PlbpIndexScheme::modulo:
      return "plbp_modulo";
    case PlbpIndexScheme::curr_pc_hash:
      return "plbp_curr_pc_hash";
    case PlbpIndexScheme::last_n_pc_hash:
      return "plbp_last_n_pc_hash";
  }
  return "plbp";
}

std::vector<PredictorConfig> zoo_configs() {
  std::vector<PredictorConfig> zoo;
  auto push = [&zoo](PredictorKind k) {
    PredictorConfig c;
    c.kind = k;
    zoo.push_back(c);
  };
  push(PredictorKind::perfect);
  push(PredictorKind::one_bit);
  push(PredictorKind::gshare);
  push(PredictorKind::local);
  push(PredictorKind::loop);
  push(PredictorKind::perceptron);
  push(PredictorKind::tage);
  for (auto scheme : {PlbpIndexScheme::modulo, PlbpIndexScheme::curr_pc_hash,
                      PlbpIndexScheme::last_n_pc_hash}) {
    PredictorConfig c;
    c.kind = PredictorKind::plbp;
    c.plbp_scheme = scheme;
    zoo.push_back(c);
  }
  return zoo;
}

// ---------------------------------------------------------------------------
// Simple table predictors

namespace {

class OneBit final : public Predictor {
 public:
  explicit OneBit(const PredictorConfig& cfg) : table_(cfg.one_bit_entries, 0) {}

  bool predict(std::uint64_t pc) const override { return table_[pc & (table_.size() - 1)] != 0; }
  void train(std::uint64_t pc, bool outcome) override {
    table_[pc & (table_.size() - 1)] = outcome ? 1 : 0;
  }

 private:
  std::vector<std::uint8_t> table_;
};

inline void sat2(std::uint8_t& ctr, bool up) {
  if (up && ctr < 3) ++ctr;
  if (!up && ctr > 0) --ctr;
}

class Gshare final : public Predictor {
 public:
  explicit Gshare(const PredictorConfig& cfg)
      : table_(cfg.gshare_entries, 1),  // weakly not-taken
        hist_mask_((cfg.gshare_hist >= 32 ? 0xFFFFFFFFu : (1u << cfg.gshare_hist) - 1)) {}

  bool predict(std::uint64_t pc) const override { return table_[index(pc)] >= 2; }
  void train(std::uint64_t pc, bool outcome) override {
    sat2(table_[index(pc)], outcome);
    hist_ = ((hist_ << 1) | (outcome ? 1 : 0)) & hist_mask_;
  }

 private:
  std::size_t index(std::uint64_t pc) const {
    return (static_cast<std::size_t>(pc) ^ hist_) & (table_.size() - 1);
  }

  std::vector<std::uint8_t> table_;
  std::uint32_t hist_ = 0;
  std::uint32_t hist_mask_;
};

class LocalHistory final : public Predictor {
 public:
  explicit LocalHistory(const PredictorConfig& cfg)
      : hist_(cfg.local_hist_entries, 0),
        pattern_(cfg.local_pattern_entries, 1),
        hist_mask_((1u << cfg.local_hist_bits) - 1) {}

  bool predict(std::uint64_t pc) const override {
    return pattern_[hist_[pc & (hist_.size() - 1)] & (pattern_.size() - 1)] >= 2;
  }
  void train(std::uint64_t pc, bool outcome) override {
    std::uint16_t& h = hist_[pc & (hist_.size() - 1)];
    sat2(pattern_[h & (pattern_.size() - 1)], outcome);
    h = static_cast<std::uint16_t>(((h << 1) | (outcome ? 1 : 0)) & hist_mask_);
  }

 private:
  std::vector<std::uint16_t> hist_;
  std::vector<std::uint8_t> pattern_;
  std::uint32_t hist_mask_;
};

// Trip-count predictor: per-entry current/learned iteration counts with a
// confidence counter; below confidence it falls back to the last outcome.
class LoopPredictor final : public Predictor {
 public:
  explicit LoopPredictor(const PredictorConfig& cfg)
      : sets_(cfg.loop_sets),
        ways_(cfg.loop_ways),
        tag_mask_((1u << cfg.loop_tag_bits) - 1),
        entries_(static_cast<std::size_t>(cfg.loop_sets) * cfg.loop_ways) {}

  bool predict(std::uint64_t pc) const override {
    const Entry* e = find(pc);
    if (!e) return false;
    if (e->conf >= 1) return e->cur < e->trip;
    return e->dir;
  }

  void train(std::uint64_t pc, bool outcome) override {
    Entry& e = find_or_alloc(pc);
    e.lru = ++tick_;
    if (outcome) {
      ++e.cur;
      e.dir = true;
    } else {
      if (e.cur == e.trip) {
        e.conf = std::min(e.conf + 1, 3);
      } else {
        e.trip = e.cur;
        e.conf = 0;
      }
      e.cur = 0;
      e.dir = false;
    }
  }

 private:
  struct Entry {
    bool valid = false;
    std::uint32_t tag = 0;
    std::int64_t trip = 0;
    std::int64_t cur = 0;
    int conf = 0;
    bool dir = false;
    std::uint64_t lru = 0;
  };

  std::uint32_t set_of(std::uint64_t pc) const {
    return static_cast<std::uint32_t>(pc >> 4) & (sets_ - 1);
  }
  std::uint32_t tag_of(std::uint64_t pc) const {
    return static_cast<std::uint32_t>(pc >> (4 + std::countr_zero(sets_))) & tag_mask_;
  }

  const Entry* find(std::uint64_t pc) const {
    const std::uint32_t set = set_of(pc), tag = tag_of(pc);
    for (unsigned w = 0; w < ways_; ++w) {
      const Entry& e = entries_[static_cast<std::size_t>(set) * ways_ + w];
      if (e.valid && e.tag == tag) return &e;
    }
    return nullptr;
  }

  Entry& find_or_alloc(std::uint64_t pc) {
    const std::uint32_t set = set_of(pc), tag = tag_of(pc);
    Entry* ways = &entries_[static_cast<std::size_t>(set) * ways_];
    for (unsigned w = 0; w < ways_; ++w)
      if (ways[w].valid && ways[w].tag == tag) return ways[w];
    // miss: take the first invalid way, else evict the least recently used
    Entry* victim = &ways[0];
    for (unsigned w = 0; w < ways_; ++w) {
      if (!ways[w].valid) {
        victim = &ways[w];
        break;
      }
      if (ways[w].lru < victim->lru) victim = &ways[w];
    }
    *victim = Entry{};
    victim->valid = true;
    victim->tag = tag;
    return *victim;
  }

  std::uint32_t sets_;
  unsigned ways_;
  std::uint32_t tag_mask_;
  std::vector<Entry> entries_;
  std::uint64_t tick_ = 0;
};

class PerceptronPredictor final : public Predictor {
 public:
  explicit PerceptronPredictor(const PredictorConfig& cfg)
      : rows_(cfg.perc_rows),
        hist_len_(cfg.perc_hist),
        theta_(static_cast<int>(std::floor(1.93 * cfg.perc_hist + 14))),
        w_(static_cast<std::size_t>(cfg.perc_rows) * (cfg.perc_hist + 1), 0),
        ghr_(cfg.perc_hist, 0) {}

  bool predict(std::uint64_t pc) const override { return output(pc) >= 0; }

  void train(std::uint64_t pc, bool outcome) override {
    const std::int64_t out = output(pc);
    const bool pred = out >= 0;
    if (pred != outcome || std::llabs(out) <= theta_) {
      std::int8_t* row = &w_[(pc % rows_) * (hist_len_ + 1)];
      bump(row[0], outcome);
      for (unsigned j = 0; j < hist_len_; ++j) bump(row[j + 1], (ghr_[j] != 0) == outcome);
    }
    for (unsigned j = hist_len_ - 1; j > 0; --j) ghr_[j] = ghr_[j - 1];
    ghr_[0] = outcome ? 1 : 0;
  }

 private:
  std::int64_t output(std::uint64_t pc) const {
    const std::int8_t* row = &w_[(pc % rows_) * (hist_len_ + 1)];
    std::int64_t out = row[0];
    for (unsigned j = 0; j < hist_len_; ++j) out += ghr_[j] ? row[j + 1] : -row[j + 1];
    return out;
  }

  static void bump(std::int8_t& w, bool up) {
    if (up && w < 127) ++w;
    if (!up && w > -128) --w;
  }

  std::uint32_t rows_;
  unsigned hist_len_;
  int theta_;
  std::vector<std::int8_t> w_;
  std::vector<std::uint8_t> ghr_;
};

// ---------------------------------------------------------------------------
// TAGE: bimodal base plus four partially-tagged tables over a geometric
// series of history lengths, with circular-buffer folded histories.

class Tage final : public Predictor {
 public:
  Tage() {
    bimodal_.assign(kBimodalEntries, 1);  // weakly not-taken
    hist_buf_.assign(kHistBufLen, 0);
    for (int t = 0; t < kTables; ++t) {
      tables_[t].assign(kTableEntries, {});
      fidx_[t].init(kHistLens[t], kIndexBits);
      ftag0_[t].init(kHistLens[t], kTagBits);
      ftag1_[t].init(kHistLens[t], kTagBits - 1);
    }
  }

  bool predict(std::uint64_t pc) const override {
    int provider, alt;
    std::uint32_t idx[kTables], tag[kTables];
    lookup(pc, idx, tag, provider, alt);
    if (provider >= 0) return tables_[provider][idx[provider]].ctr >= 0;
    return bimodal_[bimodal_index(pc)] >= 2;
  }

  void train(std::uint64_t pc, bool outcome) override {
    int provider, alt;
    std::uint32_t idx[kTables], tag[kTables];
    lookup(pc, idx, tag, provider, alt);

    const bool alt_pred =
        alt >= 0 ? tables_[alt][idx[alt]].ctr >= 0 : bimodal_[bimodal_index(pc)] >= 2;
    const bool pred =
        provider >= 0 ? tables_[provider][idx[provider]].ctr >= 0 : alt_pred;

    if (provider >= 0) {
      Entry& e = tables_[provider][idx[provider]];
      sat3(e.ctr, outcome);
      if (pred != alt_pred) {
        if (pred == outcome)
          e.u = static_cast<std::uint8_t>(std::min<int>(e.u + 1, 3));
        else if (e.u > 0)
          --e.u;
      }
    } else {
      sat2(bimodal_[bimodal_index(pc)], outcome);
    }

    if (pred != outcome && provider < kTables - 1) {
      bool allocated = false;
      for (int t = provider + 1; t < kTables; ++t) {
        Entry& e = tables_[t][idx[t]];
        if (e.u == 0) {
          e.tag = static_cast<std::uint16_t>(tag[t]);
          e.ctr = outcome ? 0 : -1;
          allocated = true;
          break;
        }
      }
      if (!allocated)
        for (int t = provider + 1; t < kTables; ++t) {
          Entry& e = tables_[t][idx[t]];
          if (e.u > 0) --e.u;
        }
    }

    push_history(outcome);
    if (++trained_ % kResetPeriod == 0)
      for (auto& table : tables_)
        for (Entry& e : table) e.u = 0;
  }

 private:
  static constexpr int kTables = 4;
  static constexpr int kHistLens[kTables] = {5, 15, 44, 130};
  static constexpr int kIndexBits = 10;
  static constexpr std::uint32_t kTableEntries = 1u << kIndexBits;
  static constexpr int kTagBits = 9;
  static constexpr std::uint32_t kBimodalEntries = 1u << 13;
  static constexpr std::uint64_t kResetPeriod = 1ULL << 18;
  static constexpr std::size_t kHistBufLen = 512;

  struct Entry {
    std::int8_t ctr = 0;  // [-4, 3]
    std::uint16_t tag = 0;
    std::uint8_t u = 0;  // [0, 3]
  };

  struct FoldedHist {
    std::uint32_t comp = 0;
    int olen = 0, clen = 0, outpoint = 0;

    void init(int orig_len, int comp_len) {
      comp = 0;
      olen = orig_len;
      clen = comp_len;
      outpoint = orig_len % comp_len;
    }
    void update(const std::vector<std::uint8_t>& buf, std::size_t pos) {
      comp = (comp << 1) | buf[pos];
      comp ^= static_cast<std::uint32_t>(buf[(pos + olen) % buf.size()]) << outpoint;
      comp ^= comp >> clen;
      comp &= (1u << clen) - 1;
    }
  };

  static void sat3(std::int8_t& ctr, bool up) {
    if (up && ctr < 3) ++ctr;
    if (!up && ctr > -4) --ctr;
  }

  std::size_t bimodal_index(std::uint64_t pc) const {
    return static_cast<std::size_t>(pc >> 4) & (kBimodalEntries - 1);
  }

  void lookup(std::uint64_t pc, std::uint32_t* idx, std::uint32_t* tag, int& provider,
              int& alt) const {
    const std::uint32_t pch = static_cast<std::uint32_t>(pc >> 4);
    provider = alt = -1;
    for (int t = 0; t < kTables; ++t) {
      idx[t] = (pch ^ (pch >> (t + 3)) ^ fidx_[t].comp) & (kTableEntries - 1);
      tag[t] = (pch ^ ftag0_[t].comp ^ (ftag1_[t].comp << 1)) & ((1u << kTagBits) - 1);
    }
    for (int t = kTables - 1; t >= 0; --t) {
      if (tables_[t][idx[t]].tag == tag[t]) {
        if (provider < 0)
          provider = t;
        else if (alt < 0) {
          alt = t;
          break;
        }
      }
    }
  }

  void push_history(bool outcome) {
    pos_ = (pos_ + kHistBufLen - 1) % kHistBufLen;
    hist_buf_[pos_] = outcome ? 1 : 0;
    for (int t = 0; t < kTables; ++t) {
      fidx_[t].update(hist_buf_, pos_);
      ftag0_[t].update(hist_buf_, pos_);
      ftag1_[t].update(hist_buf_, pos_);
    }
  }

  std::vector<std::uint8_t> bimodal_;
  std::vector<Entry> tables_[kTables];
  std::vector<std::uint8_t> hist_buf_;
  std::size_t pos_ = 0;
  FoldedHist fidx_[kTables], ftag0_[kTables], ftag1_[kTables];
  std::uint64_t trained_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Piecewise linear

Plbp::Plbp(const PredictorConfig& cfg)
    : cfg_(cfg),
      w_(static_cast<std::size_t>(cfg.plbp_rows) * (cfg.plbp_hist + 1) * cfg.plbp_cols, 0),
      ga_(cfg.plbp_hist, 0),
      ghr_(cfg.plbp_hist, 0),
      prior_pcs_(cfg.plbp_last_n > 1 ? cfg.plbp_last_n - 1 : 0, 0),
      theta_(cfg.plbp_theta) {
  cfg_.validate();
}

std::uint32_t Plbp::index_for(std::uint64_t pc) const {
  using namespace hashes;
  switch (cfg_.plbp_scheme) {
    case PlbpIndexScheme::modulo:
      return static_cast<std::uint32_t>(pc % cfg_.plbp_rows);
    case PlbpIndexScheme::curr_pc_hash:
      return four_hybrid12(static_cast<std::uint32_t>(folded_xor(pc, 32)), cfg_.plbp_rows);
    case PlbpIndexScheme::last_n_pc_hash: {
      std::uint64_t mix = pc;
      for (unsigned k = 1; k < cfg_.plbp_last_n; ++k)
        mix ^= std::rotl(prior_pcs_[k - 1], static_cast<int>((7 * k) % 64));
      return four_hybrid12(static_cast<std::uint32_t>(folded_xor(mix, 32)), cfg_.plbp_rows);
    }
  }
  return 0;
}

std::int8_t& Plbp::weight(std::uint32_t idx, std::uint32_t col, unsigned plane) {
  return w_[(static_cast<std::size_t>(idx) * (cfg_.plbp_hist + 1) + plane) * cfg_.plbp_cols + col];
}

Plbp::Prediction Plbp::predict_at(std::uint32_t idx) const {
  const std::size_t base = static_cast<std::size_t>(idx) * (cfg_.plbp_hist + 1) * cfg_.plbp_cols;
  std::int64_t out = w_[base];  // bias weight W[idx][0][0]
  for (unsigned j = 0; j < cfg_.plbp_hist; ++j) {
    const std::int8_t wv = w_[base + (j + 1) * static_cast<std::size_t>(cfg_.plbp_cols) +
                              (ga_[j] & (cfg_.plbp_cols - 1))];
    out += ghr_[j] ? wv : -wv;
  }
  return {out >= 0, out};
}

void Plbp::train_at(std::uint32_t idx, std::uint64_t pc, bool outcome, const Prediction& pred) {
  const bool mispredicted = pred.taken != outcome;
  const bool weak = std::llabs(pred.output) < theta_;
  if (mispredicted || weak) {
    const int wmax = (1 << (cfg_.plbp_weight_bits - 1)) - 1;
    const int wmin = -(1 << (cfg_.plbp_weight_bits - 1));
    auto bump = [wmax, wmin](std::int8_t& w, bool up) {
      if (up && w < wmax) ++w;
      if (!up && w > wmin) --w;
    };
    bump(weight(idx, 0, 0), outcome);
    for (unsigned j = 0; j < cfg_.plbp_hist; ++j)
      bump(weight(idx, ga_[j] & (cfg_.plbp_cols - 1), j + 1), (ghr_[j] != 0) == outcome);
  }
  if (cfg_.plbp_adaptive_theta) {
    const int theta_max = 4 * static_cast<int>(cfg_.plbp_hist);
    if (mispredicted) {
      if (++adapt_ctr_ >= 63) {
        theta_ = std::min(theta_ + 1, theta_max);
        adapt_ctr_ = 0;
      }
    } else if (weak) {
      if (--adapt_ctr_ <= -64) {
        theta_ = std::max(theta_ - 1, 1);
        adapt_ctr_ = 0;
      }
    }
  }
  shift_history(pc, outcome);
}

void Plbp::shift_history(std::uint64_t pc, bool outcome) {
  for (unsigned j = cfg_.plbp_hist - 1; j > 0; --j) {
    ga_[j] = ga_[j - 1];
    ghr_[j] = ghr_[j - 1];
  }
  ga_[0] = static_cast<std::uint16_t>(pc & 0xFFFF);
  ghr_[0] = outcome ? 1 : 0;
  if (!prior_pcs_.empty()) {
    for (std::size_t k = prior_pcs_.size() - 1; k > 0; --k) prior_pcs_[k] = prior_pcs_[k - 1];
    prior_pcs_[0] = pc;
  }
}

bool Plbp::predict(std::uint64_t pc) const { return predict_at(index_for(pc)).taken; }

void Plbp::train(std::uint64_t pc, bool outcome) {
  const std::uint32_t idx = index_for(pc);
  train_at(idx, pc, outcome, predict_at(idx));
}

void Plbp::force_history(const std::vector<std::uint16_t>& ga,
                         const std::vector<std::uint8_t>& ghr) {
  for (unsigned j = 0; j < cfg_.plbp_hist; ++j) {
    ga_[j] = j < ga.size() ? ga[j] : 0;
    ghr_[j] = j < ghr.size() ? ghr[j] : 0;
  }
}

// ---------------------------------------------------------------------------

std::unique_ptr<Predictor> make_predictor(const PredictorConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case PredictorKind::perfect:
      throw UsageError("perfect predictor has no table state; the simulator handles it");
    case PredictorKind::one_bit:
      return std::make_unique<OneBit>(cfg);
    case PredictorKind::gshare:
      return std::make_unique<Gshare>(cfg);
    case PredictorKind::local:
      return std::make_unique<LocalHistory>(cfg);
    case PredictorKind::loop:
      return std::make_unique<LoopPredictor>(cfg);
    case PredictorKind::perceptron:
      return std::make_unique<PerceptronPredictor>(cfg);
    case PredictorKind::tage:
      return std::make_unique<Tage>();
    case PredictorKind::plbp:
      return std::make_unique<Plbp>(cfg);
  }
  throw UsageError("unknown predictor kind");
}

}  // namespace branchlab
