#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "branchlab/analysis.hpp"
#include "branchlab/errors.hpp"
#include "branchlab/graph.hpp"
#include "branchlab/kernels.hpp"
#include "branchlab/predictors.hpp"
#include "branchlab/trace.hpp"

namespace fs = std::filesystem;
using namespace branchlab;

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

unsigned max_threads() {
  if (const char* env = std::getenv("BRANCHLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (!end || *end != '\0' || v < 1)
      throw UsageError("BRANCHLAB_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

Graph load_graph(const std::string& path, bool undirected) {
  EdgeList el = read_edge_list_file(path, !undirected);
  return Graph::build(el);
}

Permutation make_permutation(const Graph& g, const std::string& mode) {
  if (mode == "degree_sort") return degree_sort(g);
  if (mode == "hub_sort") return hub_sort(g);
  if (mode == "hub_cluster") return hub_cluster(g);
  throw UsageError("unknown reorder mode '" + mode + "'");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + path);
  return out;
}

void maybe_stamp(std::ostream& out, bool stamp) {
  if (!stamp) return;
  // Timestamps are opt-in so artifacts stay byte-identical by default.
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  out << "# stamp," << secs << '\n';
}

// ---------------------------------------------------------------------------

struct GenOpts {
  std::string kind;
  std::int64_t n = 0, m = 0;
  int scale = 0;
  std::int64_t ef = 16;
  std::uint64_t seed = 1;
  std::string out;
};

void cmd_gen(const GenOpts& o) {
  EdgeList el;
  if (o.kind == "uniform")
    el = gen_uniform(o.n, o.m, o.seed);
  else if (o.kind == "kron")
    el = gen_kronecker(o.scale, o.ef, o.seed);
  else
    throw UsageError("gen: kind must be 'uniform' or 'kron'");
  write_edge_list_file(el, o.out);
  std::cout << "gen: wrote " << el.edges.size() << " edges to " << o.out << "\n";
}

struct RunOpts {
  std::string kernel;
  std::string graph;
  bool undirected = false;
  std::string reorder;
  std::string out;
  // bfs
  NodeId source = 0;
  int alpha = 15, beta = 18;
  // pr
  double damping = 0.85;
  int iters = 20;
  double tol = 1e-4;
  // cc
  int rounds = 2;
  // bc
  int num_sources = 16;
  std::uint64_t seed = 1;
  bool all_sources = false;
};

void cmd_run(const RunOpts& o) {
  auto kernel = kernel_from_name(o.kernel);
  if (!kernel) throw UsageError("run: unknown kernel '" + o.kernel + "'");

  bool undirected = o.undirected;
  if (*kernel == Kernel::tc && !undirected) {
    std::cout << "run: tc requires a symmetric graph; building undirected\n";
    undirected = true;
  }
  Graph g = load_graph(o.graph, undirected);
  if (!o.reorder.empty()) {
    g = apply_permutation(g, make_permutation(g, o.reorder));
    std::cout << "run: applied " << o.reorder << " reordering\n";
  }
  std::cout << "run: graph " << o.graph << " nodes=" << g.num_nodes()
            << " edges=" << g.num_edges() << (undirected ? " (undirected)" : " (directed)")
            << "\n";

  TraceBuilder sink;
  std::string result;
  switch (*kernel) {
    case Kernel::bfs: {
      auto parent = run_bfs(g, {o.source, o.alpha, o.beta}, sink);
      std::int64_t reached = 0;
      for (NodeId p : parent)
        if (p >= 0) ++reached;
      result = "bfs reached " + std::to_string(reached) + " nodes from source " +
               std::to_string(o.source);
      break;
    }
    case Kernel::pr: {
      auto scores = run_pagerank(g, {o.damping, o.iters, o.tol}, sink);
      double sum = 0;
      for (double s : scores) sum += s;
      result = "pagerank score sum: " + fmt6(sum);
      break;
    }
    case Kernel::cc: {
      auto comp = run_cc(g, {o.rounds}, sink);
      std::map<NodeId, std::int64_t> sizes;
      for (NodeId c : comp) ++sizes[c];
      result = "cc components: " + std::to_string(sizes.size());
      break;
    }
    case Kernel::bc: {
      auto bc = run_bc(g, {o.num_sources, o.seed, o.all_sources}, sink);
      NodeId argmax = 0;
      for (NodeId u = 1; u < g.num_nodes(); ++u)
        if (bc.raw[u] > bc.raw[argmax]) argmax = u;
      result = "bc max-score node: " + std::to_string(g.num_nodes() ? argmax : -1) + " (raw " +
               fmt6(g.num_nodes() ? bc.raw[argmax] : 0.0) + ")";
      break;
    }
    case Kernel::tc: {
      std::uint64_t triangles = run_tc(g, sink);
      result = "tc triangles: " + std::to_string(triangles);
      break;
    }
  }

  Trace t = sink.take();
  write_trace_file(t, o.out);

  std::vector<std::uint64_t> occ(t.sites.size(), 0);
  for (const BranchEvent& e : t.events) ++occ[e.site_id];
  for (std::size_t i = 0; i < t.sites.size(); ++i)
    std::cout << "site " << t.sites[i].name << ": " << occ[i] << " events\n";
  std::cout << result << "\n";
  std::cout << "run: wrote " << t.events.size() << " events to " << o.out << "\n";
}

struct SimOpts {
  std::string trace;
  std::vector<std::string> preds;
  std::string baseline;
  bool sweep = false;
  std::uint64_t skip = 0;
  std::string out_dir = ".";
  bool stamp = false;
};

std::vector<PredictorReport> run_simulations(const Trace& t,
                                             const std::vector<PredictorConfig>& configs,
                                             std::uint64_t skip) {
  std::vector<PredictorReport> reports(configs.size());
  const unsigned nthreads =
      std::min<unsigned>(max_threads(), static_cast<unsigned>(configs.size()));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) reports[i] = simulate(t, configs[i], skip);
    return reports;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < nthreads; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= configs.size()) return;
        try {
          reports[i] = simulate(t, configs[i], skip);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
  return reports;
}

void cmd_simulate(const SimOpts& o) {
  if (o.preds.empty() && !o.sweep)
    throw UsageError("simulate: provide at least one --pred or --sweep");
  Trace t = read_trace_file(o.trace);

  std::vector<PredictorConfig> configs;
  int baseline_index = -1;
  if (!o.baseline.empty()) {
    configs.push_back(PredictorConfig::parse(o.baseline));
    baseline_index = 0;
  }
  for (const std::string& p : o.preds) configs.push_back(PredictorConfig::parse(p));
  if (o.sweep)
    for (const PredictorConfig& c : zoo_configs()) configs.push_back(c);

  std::vector<PredictorReport> reports = run_simulations(t, configs, o.skip);

  fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + o.out_dir);
  const std::string stem = fs::path(o.trace).stem().string();

  // disambiguate repeated short names deterministically
  std::map<std::string, int> name_counts;
  std::vector<std::string> names;
  for (const PredictorReport& r : reports) {
    int k = ++name_counts[r.predictor];
    names.push_back(k == 1 ? r.predictor : r.predictor + "-" + std::to_string(k));
  }

  for (std::size_t i = 0; i < reports.size(); ++i) {
    auto out = open_output((dir / (stem + "." + names[i] + ".csv")).string());
    maybe_stamp(out, o.stamp);
    write_report_csv(reports[i], out);
  }

  if (baseline_index >= 0) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (static_cast<int>(i) == baseline_index) continue;
      DeltaReport d = compare_reports(reports[baseline_index], reports[i]);
      auto out = open_output(
          (dir / (stem + "." + names[i] + "_vs_" + names[baseline_index] + ".delta.csv"))
              .string());
      maybe_stamp(out, o.stamp);
      write_delta_csv(reports[i], d, out);
    }
  }

  if (o.sweep) {
    auto out = open_output((dir / (stem + ".sweep.csv")).string());
    maybe_stamp(out, o.stamp);
    out << "predictor,site,kernel,line_tag,occurrences,taken,not_taken,bias,mispredictions,"
           "miss_rate,mpkb\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      std::ostringstream body;
      write_report_csv(reports[i], body);
      std::istringstream lines(body.str());
      std::string line;
      std::getline(lines, line);  // drop the per-report header
      while (std::getline(lines, line)) out << names[i] << ',' << line << '\n';
    }
  }

  for (std::size_t i = 0; i < reports.size(); ++i) {
    const PredictorReport& r = reports[i];
    std::cout << names[i] << ": events=" << r.total_events
              << " misses=" << r.total_mispredictions
              << " miss_rate=" << fmt6(r.overall_miss_rate()) << " mpkb=" << fmt6(r.mpkb())
              << (r.skipped ? " (skipped " + std::to_string(r.skipped) + " warmup)" : "")
              << "\n";
  }
}

struct CriticalOpts {
  std::string trace;
  std::string report;
  std::string pred = "kind=gshare";
  double coverage = 0.98;
  std::string out;
  std::uint64_t skip = 0;
  bool stamp = false;
};

void cmd_critical(const CriticalOpts& o) {
  if (o.trace.empty() == o.report.empty())
    throw UsageError("critical: provide exactly one of --trace or --report");
  PredictorReport report;
  if (!o.trace.empty()) {
    Trace t = read_trace_file(o.trace);
    report = simulate(t, PredictorConfig::parse(o.pred), o.skip);
  } else {
    std::ifstream in(o.report);
    if (!in) throw IoError("cannot open report file: " + o.report);
    report = read_report_csv(in);
  }
  auto entries = critical_branches(report, o.coverage);
  if (o.out.empty()) {
    maybe_stamp(std::cout, o.stamp);
    write_critical_csv(entries, std::cout);
  } else {
    auto out = open_output(o.out);
    maybe_stamp(out, o.stamp);
    write_critical_csv(entries, out);
  }
}

struct ReorderOpts {
  std::string graph;
  bool undirected = false;
  std::string mode;
  std::string out;
};

void cmd_reorder(const ReorderOpts& o) {
  Graph g = load_graph(o.graph, o.undirected);
  Graph r = apply_permutation(g, make_permutation(g, o.mode));
  write_edge_list_file(to_edge_list(r), o.out);
  std::cout << "reorder: wrote " << o.mode << " relabeled graph to " << o.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branchlab: branch-prediction analysis for graph kernels"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* sgen = app.add_subcommand("gen", "generate a synthetic edge list");
  sgen->add_option("--kind", gen.kind, "uniform|kron")->required();
  sgen->add_option("--n", gen.n, "vertices (uniform)");
  sgen->add_option("--m", gen.m, "edges (uniform)");
  sgen->add_option("--scale", gen.scale, "log2 vertices (kron)");
  sgen->add_option("--ef", gen.ef, "edges per vertex (kron)")->capture_default_str();
  sgen->add_option("--seed", gen.seed, "rng seed")->capture_default_str();
  sgen->add_option("--out", gen.out, "output .el path")->required();
  sgen->callback([&gen] { cmd_gen(gen); });

  RunOpts run;
  auto* srun = app.add_subcommand("run", "run a kernel and record its branch trace");
  srun->add_option("--kernel", run.kernel, "bfs|pr|cc|bc|tc")->required();
  srun->add_option("--graph", run.graph, "input edge list")->required();
  srun->add_flag("--undirected", run.undirected, "symmetrize the graph");
  srun->add_option("--reorder", run.reorder, "degree_sort|hub_sort|hub_cluster");
  srun->add_option("--out", run.out, "output trace path")->required();
  srun->add_option("--source", run.source, "bfs source")->capture_default_str();
  srun->add_option("--alpha", run.alpha, "bfs direction switch numerator")->capture_default_str();
  srun->add_option("--beta", run.beta, "bfs direction switch denominator")->capture_default_str();
  srun->add_option("--damping", run.damping, "pagerank damping")->capture_default_str();
  srun->add_option("--iters", run.iters, "pagerank max sweeps")->capture_default_str();
  srun->add_option("--tol", run.tol, "pagerank stop tolerance")->capture_default_str();
  srun->add_option("--rounds", run.rounds, "cc neighbor rounds")->capture_default_str();
  srun->add_option("--num-sources", run.num_sources, "bc sampled sources")->capture_default_str();
  srun->add_option("--seed", run.seed, "bc source seed")->capture_default_str();
  srun->add_flag("--all-sources", run.all_sources, "bc over every vertex");
  srun->callback([&run] { cmd_run(run); });

  SimOpts sim;
  auto* ssim = app.add_subcommand("simulate", "replay a trace through predictors");
  ssim->add_option("--trace", sim.trace, "input .gbpt trace")->required();
  ssim->add_option("--pred", sim.preds, "predictor config text (repeatable)");
  ssim->add_option("--baseline", sim.baseline, "baseline config for delta reports");
  ssim->add_flag("--sweep", sim.sweep, "run the whole predictor zoo");
  ssim->add_option("--skip", sim.skip, "warmup events excluded from tallies")->capture_default_str();
  ssim->add_option("--out-dir", sim.out_dir, "directory for CSV reports")->capture_default_str();
  ssim->add_flag("--stamp", sim.stamp, "include a timestamp comment in CSVs");
  ssim->callback([&sim] { cmd_simulate(sim); });

  CriticalOpts crit;
  auto* scrit = app.add_subcommand("critical", "rank sites by dynamic occurrence");
  scrit->add_option("--trace", crit.trace, "input .gbpt trace");
  scrit->add_option("--report", crit.report, "existing report CSV");
  scrit->add_option("--pred", crit.pred, "predictor config for --trace mode")->capture_default_str();
  scrit->add_option("--coverage", crit.coverage, "coverage target")->capture_default_str();
  scrit->add_option("--skip", crit.skip, "warmup events excluded from tallies")->capture_default_str();
  scrit->add_option("--out", crit.out, "output CSV (stdout when omitted)");
  scrit->add_flag("--stamp", crit.stamp, "include a timestamp comment");
  scrit->callback([&crit] { cmd_critical(crit); });

  ReorderOpts reo;
  auto* sreo = app.add_subcommand("reorder", "relabel a graph and export it");
  sreo->add_option("--graph", reo.graph, "input edge list")->required();
  sreo->add_flag("--undirected", reo.undirected, "symmetrize the graph");
  sreo->add_option("--mode", reo.mode, "degree_sort|hub_sort|hub_cluster")->required();
  sreo->add_option("--out", reo.out, "output .el path")->required();
  sreo->callback([&reo] { cmd_reorder(reo); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
