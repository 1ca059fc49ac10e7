#include "branchlab/analysis.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "branchlab/errors.hpp"

namespace branchlab {

bool is_biased(const SiteStats& s, double threshold) {
  if (!s.occurrences) return false;
  return s.bias_minority() < threshold;
}

const SiteStats* PredictorReport::stats_for(std::string_view site_name) const {
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i].name == site_name) return &per_site[i];
  return nullptr;
}

PredictorReport simulate(const Trace& t, const PredictorConfig& cfg, std::uint64_t skip) {
  t.validate();
  cfg.validate();

  PredictorReport report;
  report.config = cfg.canonical_string();
  report.predictor = cfg.short_name();
  report.sites = t.sites;
  report.per_site.assign(t.sites.size(), {});

  // site_id -> dense index / pc
  std::unordered_map<std::uint16_t, std::uint32_t> site_index;
  site_index.reserve(t.sites.size());
  for (std::uint32_t i = 0; i < t.sites.size(); ++i) site_index.emplace(t.sites[i].site_id, i);

  const bool perfect = cfg.kind == PredictorKind::perfect;
  std::unique_ptr<Predictor> pred;
  if (!perfect) pred = make_predictor(cfg);

  std::uint64_t seen = 0;
  for (const BranchEvent& e : t.events) {
    const std::uint32_t i = site_index.at(e.site_id);
    const bool outcome = e.taken != 0;
    // The perfect predictor is the identity on outcomes.
    const bool predicted = perfect ? outcome : pred->predict_and_train(t.sites[i].pc, outcome);
    if (seen++ < skip) continue;
    SiteStats& s = report.per_site[i];
    ++s.occurrences;
    if (outcome) ++s.taken;
    if (predicted != outcome) ++s.mispredictions;
  }

  report.skipped = std::min<std::uint64_t>(skip, t.events.size());
  for (const SiteStats& s : report.per_site) {
    report.total_events += s.occurrences;
    report.total_mispredictions += s.mispredictions;
  }
  assert(report.total_events + report.skipped == t.events.size());
  return report;
}

std::vector<CriticalEntry> critical_branches(const PredictorReport& report, double coverage) {
  if (!(coverage >= 0.0 && coverage <= 1.0))
    throw UsageError("critical: coverage must be in [0, 1]");

  std::vector<std::uint32_t> order(report.sites.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&report](std::uint32_t a, std::uint32_t b) {
    if (report.per_site[a].occurrences != report.per_site[b].occurrences)
      return report.per_site[a].occurrences > report.per_site[b].occurrences;
    return report.sites[a].site_id < report.sites[b].site_id;
  });

  const double total = static_cast<double>(report.total_events);
  const double target = coverage * total;
  std::vector<CriticalEntry> entries;
  entries.reserve(order.size());
  std::uint64_t running = 0;
  for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
    const std::uint32_t i = order[rank];
    const SiteStats& s = report.per_site[i];
    CriticalEntry e;
    e.rank = rank + 1;
    e.site_id = report.sites[i].site_id;
    e.name = report.sites[i].name;
    e.occurrences = s.occurrences;
    // Critical while the running total before this site still falls short.
    e.critical = total > 0 && static_cast<double>(running) < target && s.occurrences > 0;
    running += s.occurrences;
    e.cumulative_coverage = total > 0 ? static_cast<double>(running) / total : 0.0;
    e.biased = is_biased(s);
    e.miss_rate = s.miss_rate();
    entries.push_back(std::move(e));
  }
  return entries;
}

DeltaReport compare_reports(const PredictorReport& baseline, const PredictorReport& variant) {
  if (baseline.sites.size() != variant.sites.size())
    throw UsageError("compare: reports cover different site tables");
  for (std::size_t i = 0; i < baseline.sites.size(); ++i) {
    if (baseline.sites[i].site_id != variant.sites[i].site_id ||
        baseline.sites[i].name != variant.sites[i].name ||
        baseline.per_site[i].occurrences != variant.per_site[i].occurrences)
      throw UsageError("compare: reports do not come from the same trace");
  }

  auto improvement = [](double base, double var) {
    return base != 0.0 ? (base - var) / base * 100.0 : 0.0;
  };

  DeltaReport d;
  d.per_site.reserve(baseline.sites.size());
  for (std::size_t i = 0; i < baseline.sites.size(); ++i) {
    SiteDelta sd;
    sd.site_id = baseline.sites[i].site_id;
    sd.name = baseline.sites[i].name;
    sd.baseline_miss_rate = baseline.per_site[i].miss_rate();
    sd.variant_miss_rate = variant.per_site[i].miss_rate();
    sd.improvement_pct = improvement(sd.baseline_miss_rate, sd.variant_miss_rate);
    d.per_site.push_back(std::move(sd));
  }
  d.baseline_overall = baseline.overall_miss_rate();
  d.variant_overall = variant.overall_miss_rate();
  d.overall_improvement_pct = improvement(d.baseline_overall, d.variant_overall);
  return d;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string bias_label(const SiteStats& s) {
  if (!s.occurrences) return "n/a";
  return is_biased(s) ? "biased" : "unbiased";
}

}  // namespace

void write_report_csv(const PredictorReport& report, std::ostream& out) {
  out << "site,kernel,line_tag,occurrences,taken,not_taken,bias,mispredictions,miss_rate,mpkb\n";
  const double total = static_cast<double>(report.total_events);
  for (std::size_t i = 0; i < report.sites.size(); ++i) {
    const BranchSite& site = report.sites[i];
    const SiteStats& s = report.per_site[i];
    const double site_mpkb =
        total > 0 ? static_cast<double>(s.mispredictions) / total * 1000.0 : 0.0;
    out << site.name << ',' << kernel_name(site.kernel) << ',' << site.line_tag << ','
        << s.occurrences << ',' << s.taken << ',' << s.not_taken() << ',' << bias_label(s) << ','
        << s.mispredictions << ',' << fmt6(s.miss_rate()) << ',' << fmt6(site_mpkb) << '\n';
  }
  std::uint64_t taken = 0;
  for (const SiteStats& s : report.per_site) taken += s.taken;
  out << "TOTAL,,," << report.total_events << ',' << taken << ','
      << (report.total_events - taken) << ",," << report.total_mispredictions << ','
      << fmt6(report.overall_miss_rate()) << ',' << fmt6(report.mpkb()) << '\n';
}

void write_delta_csv(const PredictorReport& variant, const DeltaReport& delta,
                     std::ostream& out) {
  if (variant.sites.size() != delta.per_site.size())
    throw UsageError("delta csv: mismatched report and delta");
  out << "site,kernel,line_tag,occurrences,taken,not_taken,bias,mispredictions,miss_rate,mpkb,"
         "baseline_miss_rate,variant_miss_rate,improvement_pct\n";
  const double total = static_cast<double>(variant.total_events);
  for (std::size_t i = 0; i < variant.sites.size(); ++i) {
    const BranchSite& site = variant.sites[i];
    const SiteStats& s = variant.per_site[i];
    const SiteDelta& sd = delta.per_site[i];
    const double site_mpkb =
        total > 0 ? static_cast<double>(s.mispredictions) / total * 1000.0 : 0.0;
    out << site.name << ',' << kernel_name(site.kernel) << ',' << site.line_tag << ','
        << s.occurrences << ',' << s.taken << ',' << s.not_taken() << ',' << bias_label(s) << ','
        << s.mispredictions << ',' << fmt6(s.miss_rate()) << ',' << fmt6(site_mpkb) << ','
        << fmt6(sd.baseline_miss_rate) << ',' << fmt6(sd.variant_miss_rate) << ','
        << fmt6(sd.improvement_pct) << '\n';
  }
  std::uint64_t taken = 0;
  for (const SiteStats& s : variant.per_site) taken += s.taken;
  out << "TOTAL,,," << variant.total_events << ',' << taken << ','
      << (variant.total_events - taken) << ",," << variant.total_mispredictions << ','
      << fmt6(variant.overall_miss_rate()) << ',' << fmt6(variant.mpkb()) << ','
      << fmt6(delta.baseline_overall) << ',' << fmt6(delta.variant_overall) << ','
      << fmt6(delta.overall_improvement_pct) << '\n';
}

void write_critical_csv(const std::vector<CriticalEntry>& entries, std::ostream& out) {
  out << "rank,site,kernel,line_tag,occurrences,cumulative_coverage,bias,miss_rate,critical\n";
  for (const CriticalEntry& e : entries) {
    // site names are kernel_lineTag; recover the parts for the columns
    auto us = e.name.rfind('_');
    std::string kernel = us == std::string::npos ? "" : e.name.substr(0, us);
    std::string line = us == std::string::npos ? "" : e.name.substr(us + 1);
    out << e.rank << ',' << e.name << ',' << kernel << ',' << line << ',' << e.occurrences << ','
        << fmt6(e.cumulative_coverage) << ','
        << (e.occurrences ? (e.biased ? "biased" : "unbiased") : "n/a") << ','
        << fmt6(e.miss_rate) << ',' << (e.critical ? "yes" : "no") << '\n';
  }
}

PredictorReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw FormatError("report csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "site,kernel,line_tag,occurrences,taken,not_taken,bias,mispredictions,miss_rate,mpkb")
    throw FormatError("report csv: unrecognized header");

  PredictorReport report;
  std::uint16_t next_id = 0;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      cols.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cols.size() != 10)
      throw FormatError("report csv: malformed line " + std::to_string(line_no));
    if (cols[0] == "TOTAL") continue;  // recomputed from per-site rows

    auto num = [&](const std::string& s) -> std::uint64_t {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("report csv: bad number '" + s + "' at line " + std::to_string(line_no));
      return v;
    };

    BranchSite site;
    site.site_id = next_id++;
    site.name = cols[0];
    auto k = kernel_from_name(cols[1]);
    if (!k) throw FormatError("report csv: unknown kernel '" + cols[1] + "'");
    site.kernel = *k;
    site.line_tag = static_cast<std::uint16_t>(num(cols[2]));
    site.pc = synthetic_pc(site.kernel, site.line_tag);

    SiteStats s;
    s.occurrences = num(cols[3]);
    s.taken = num(cols[4]);
    if (num(cols[5]) != s.occurrences - s.taken)
      throw FormatError("report csv: taken/not_taken/occurrences disagree at line " +
                        std::to_string(line_no));
    s.mispredictions = num(cols[7]);

    report.sites.push_back(std::move(site));
    report.per_site.push_back(s);
  }
  for (const SiteStats& s : report.per_site) {
    report.total_events += s.occurrences;
    report.total_mispredictions += s.mispredictions;
  }
  return report;
}

}  // namespace branchlab
