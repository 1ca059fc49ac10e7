#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace branchlab {

enum class PredictorKind {
  perfect,
  one_bit,
  gshare,
  local,
  loop,
  perceptron,
  tage,
  plbp,
};

enum class PlbpIndexScheme { modulo, curr_pc_hash, last_n_pc_hash };

// Textual configs look like "kind=plbp index_scheme=last_n_pc_hash n=4 N=256
// M=256 H=26 theta=adaptive": space-separated key=value pairs, case-sensitive
// keys, keys restricted per kind. Unknown or duplicate keys raise UsageError
// naming the key.
struct PredictorConfig {
  PredictorKind kind = PredictorKind::gshare;

  // one_bit
  std::uint32_t one_bit_entries = 1u << 14;
  // gshare
  std::uint32_t gshare_entries = 1u << 16;
  unsigned gshare_hist = 16;
  // local
  std::uint32_t local_hist_entries = 1u << 10;
  unsigned local_hist_bits = 10;
  std::uint32_t local_pattern_entries = 1u << 10;
  // loop
  std::uint32_t loop_sets = 128;
  unsigned loop_ways = 2;
  unsigned loop_tag_bits = 6;
  // perceptron
  std::uint32_t perc_rows = 1u << 12;
  unsigned perc_hist = 28;
  // plbp
  PlbpIndexScheme plbp_scheme = PlbpIndexScheme::modulo;
  unsigned plbp_last_n = 4;       // pcs mixed into the last_n_pc_hash index
  std::uint32_t plbp_rows = 256;  // N
  std::uint32_t plbp_cols = 256;  // M
  unsigned plbp_hist = 26;        // H
  unsigned plbp_weight_bits = 8;
  int plbp_theta = 78;  // floor(2.14*(H+1) + 20.58) unless overridden
  bool plbp_adaptive_theta = false;

  static PredictorConfig parse(std::string_view text);
  void validate() const;  // UsageError on bad geometry
  std::string canonical_string() const;
  std::string short_name() const;  // e.g. "plbp_curr_pc_hash"; used in file names
};

// Default theta for a piecewise-linear predictor with history length h.
int plbp_default_theta(unsigned h);

// Prediction must not depend on the outcome: predict is const and takes only
// the pc; train consumes the outcome afterwards. The perfect predictor is the
// identity on outcomes and is handled by the simulator, not by this
// interface (make_predictor rejects it).
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual bool predict(std::uint64_t pc) const = 0;
  virtual void train(std::uint64_t pc, bool outcome) = 0;

  bool predict_and_train(std::uint64_t pc, bool outcome) {
    bool p = predict(pc);
    train(pc, outcome);
    return p;
  }
};

std::unique_ptr<Predictor> make_predictor(const PredictorConfig& cfg);

// Fixed sweep order: perfect, one_bit, gshare, local, loop, perceptron,
// tage, then the three plbp index schemes.
std::vector<PredictorConfig> zoo_configs();

// Piecewise-linear branch predictor. Weights W[N][M][H+1] of
// plbp_weight_bits-bit saturating integers; the prediction for row idx is
//   output = W[idx][0][0] + sum_j (GHR[j] ? + : -) W[idx][GA[j] mod M][j+1]
// with GA holding the low 16 bits of the last H branch pcs (most recent
// first) and GHR their outcomes. Training (on a miss or when |output| <
// theta) nudges each addend toward the outcome; GA/GHR always shift.
// Declared here rather than hidden in the factory so unit tests can pin the
// arithmetic via the state accessors.
class Plbp final : public Predictor {
 public:
  explicit Plbp(const PredictorConfig& cfg);

  bool predict(std::uint64_t pc) const override;
  void train(std::uint64_t pc, bool outcome) override;

  struct Prediction {
    bool taken;
    std::int64_t output;
  };

  std::uint32_t index_for(std::uint64_t pc) const;
  Prediction predict_at(std::uint32_t idx) const;
  void train_at(std::uint32_t idx, std::uint64_t pc, bool outcome, const Prediction& pred);

  std::int8_t& weight(std::uint32_t idx, std::uint32_t col, unsigned plane);
  int theta() const { return theta_; }
  void force_history(const std::vector<std::uint16_t>& ga, const std::vector<std::uint8_t>& ghr);

 private:
  void shift_history(std::uint64_t pc, bool outcome);

  PredictorConfig cfg_;
  std::vector<std::int8_t> w_;         // [idx][plane][col] flattened
  std::vector<std::uint16_t> ga_;      // most recent first
  std::vector<std::uint8_t> ghr_;      // most recent first
  std::vector<std::uint64_t> prior_pcs_;  // pcs before the current one, most recent first
  int theta_;
  int adapt_ctr_ = 0;
};

}  // namespace branchlab
