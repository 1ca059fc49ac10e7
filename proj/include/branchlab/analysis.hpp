#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "branchlab/predictors.hpp"
#include "branchlab/trace.hpp"

namespace branchlab {

struct SiteStats {
  std::uint64_t occurrences = 0;
  std::uint64_t taken = 0;
  std::uint64_t mispredictions = 0;

  std::uint64_t not_taken() const { return occurrences - taken; }
  double miss_rate() const {
    return occurrences ? static_cast<double>(mispredictions) / static_cast<double>(occurrences)
                       : 0.0;
  }
  // Minority-direction share; 0.5 means perfectly balanced.
  double bias_minority() const {
    if (!occurrences) return 0.0;
    return static_cast<double>(std::min(taken, not_taken())) / static_cast<double>(occurrences);
  }
};

// A site is biased when its minority direction is strictly under the
// threshold (default 10%); a site sitting exactly on the boundary counts as
// unbiased.
bool is_biased(const SiteStats& s, double threshold = 0.10);

struct PredictorReport {
  std::string config;           // canonical predictor config echo
  std::string predictor;        // short name
  std::vector<BranchSite> sites;
  std::vector<SiteStats> per_site;  // aligned with `sites`
  std::uint64_t skipped = 0;        // warmup events excluded from the tallies
  std::uint64_t total_events = 0;
  std::uint64_t total_mispredictions = 0;

  double overall_miss_rate() const {
    return total_events ? static_cast<double>(total_mispredictions) /
                              static_cast<double>(total_events)
                        : 0.0;
  }
  // Mispredictions per thousand branch events. Traces contain branch events
  // only, so a per-instruction rate is not computable from them.
  double mpkb() const { return overall_miss_rate() * 1000.0; }

  const SiteStats* stats_for(std::string_view site_name) const;
};

// Replays the trace through the configured predictor. The first `skip`
// events warm the predictor without being tallied. Totals always equal the
// per-site sums.
PredictorReport simulate(const Trace& t, const PredictorConfig& cfg, std::uint64_t skip = 0);

struct CriticalEntry {
  std::uint32_t rank = 0;  // 1-based, by descending occurrences (ties: site id)
  std::uint16_t site_id = 0;
  std::string name;
  std::uint64_t occurrences = 0;
  double cumulative_coverage = 0.0;  // fraction of all events after including this site
  bool biased = false;
  double miss_rate = 0.0;
  bool critical = false;  // member of the shortest prefix reaching `coverage`
};

// Ranks sites by dynamic occurrence count; the critical set is the shortest
// descending-occurrence prefix whose events reach `coverage` of the total.
std::vector<CriticalEntry> critical_branches(const PredictorReport& report,
                                             double coverage = 0.98);

struct SiteDelta {
  std::uint16_t site_id = 0;
  std::string name;
  double baseline_miss_rate = 0.0;
  double variant_miss_rate = 0.0;
  double improvement_pct = 0.0;  // (base - variant) / base * 100; 0 when base is 0
};

struct DeltaReport {
  std::vector<SiteDelta> per_site;
  double baseline_overall = 0.0;
  double variant_overall = 0.0;
  double overall_improvement_pct = 0.0;
};

// Both reports must come from the same trace (same site table and
// occurrence counts); UsageError otherwise.
DeltaReport compare_reports(const PredictorReport& baseline, const PredictorReport& variant);

// CSV schemas (fixed 6-decimal formatting; final TOTAL row):
//   report: site,kernel,line_tag,occurrences,taken,not_taken,bias,
//           mispredictions,miss_rate,mpkb
//   delta:  report columns + baseline_miss_rate,variant_miss_rate,improvement_pct
//   critical: rank,site,kernel,line_tag,occurrences,cumulative_coverage,bias,
//             miss_rate,critical
// The per-site mpkb column is the site's contribution: site misses per 1000
// total events. Zero-occurrence sites print "n/a" for bias.
void write_report_csv(const PredictorReport& report, std::ostream& out);
void write_delta_csv(const PredictorReport& variant, const DeltaReport& delta, std::ostream& out);
void write_critical_csv(const std::vector<CriticalEntry>& entries, std::ostream& out);

// Reads back a report CSV (as written by write_report_csv) far enough to
// re-run the critical-branch analysis on it.
PredictorReport read_report_csv(std::istream& in);

}  // namespace branchlab
