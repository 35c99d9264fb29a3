// matcomp: command-line front end for the completion toolkit.
//
// Exit status: 0 success, 1 bad input or usage, 2 internal consistency
// failure, 3 oracle budget exceeded.

#include <matcomp/matcomp.hpp>

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace matcomp;

constexpr int exit_input = 1;
constexpr int exit_consistency = 2;
constexpr int exit_budget = 3;

MatrixText load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_matrix_text(in);
}

void save(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::size_t env_threads() {
  const char* s = std::getenv("MATCOMP_THREADS");
  if (!s || !*s) return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(s, &end, 10);
  if (*end) throw std::runtime_error("MATCOMP_THREADS must be a nonnegative integer");
  return v;
}

std::vector<std::size_t> parse_k_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = detail::parse_count(detail::trim_ws(item));
    if (!v) throw std::runtime_error("bad --k-grid value '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw std::runtime_error("--k-grid is empty");
  return out;
}

struct CompleteArgs {
  std::string in, out;
  bool no_subdiag = false;
  bool no_approx = false;
  std::size_t zero_budget = OracleBudget{}.max_unknowns;
};

int run_complete(const CompleteArgs& a) {
  return visit_matrix(load(a.in), [&](const auto& m) {
    using F = std::decay_t<decltype(m.field())>;
    CompletionOptions<F> opts;
    opts.enable_subdiag = !a.no_subdiag;
    opts.enable_approx_trim = !a.no_approx;
    opts.zero_budget.max_unknowns = a.zero_budget;
    const auto r = complete(m, opts);
    save(a.out, matrix_to_string(r.matrix));
    std::cout << "rank=" << r.rank << " deviation_bound=" << r.deviation_bound << '\n';
    return 0;
  });
}

int run_decompose(const std::string& in, bool json) {
  return visit_matrix(load(in), [&](const auto& m) {
    const auto rep = decomposition_report(m);
    if (json) {
      std::cout << to_json(rep).dump(2) << '\n';
    } else {
      write_report(std::cout, rep);
    }
    return 0;
  });
}

struct SimulateArgs {
  std::size_t n = 0;
  std::string k_grid;
  std::size_t k_steps = 0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string out, raw;
};

int run_simulate(const SimulateArgs& a) {
  const auto ks = a.k_grid.empty() ? geometric_k_grid(a.n, a.k_steps) : parse_k_list(a.k_grid);
  if (a.trials == 0) throw std::runtime_error("--trials must be positive");
  const auto records = simulate_cluster_counts(a.n, ks, a.trials, a.seed, env_threads());
  std::ostringstream summary;
  write_summary_csv(summary, summarize(records));
  save(a.out, summary.str());
  if (!a.raw.empty()) {
    std::ostringstream raw;
    write_raw_csv(raw, records);
    save(a.raw, raw.str());
  }
  return 0;
}

int run_oracle(const std::string& in, std::size_t max_unknowns, const std::string& out) {
  return visit_matrix(load(in), [&](const auto& m) {
    using F = std::decay_t<decltype(m.field())>;
    if constexpr (!F::finite) {
      throw field_error("oracle requires a finite field");
      return exit_input;
    } else {
      auto budget = OracleBudget::for_order(m.field().order());
      budget.max_unknowns = max_unknowns;
      const auto w = brute_min_rank(m, budget);
      std::cout << "mr=" << w.mr << '\n';
      if (!out.empty()) save(out, matrix_to_string(w.witness));
      return 0;
    }
  });
}

int run_trim(const std::string& in, const std::string& log) {
  return visit_matrix(load(in), [&](const auto& m) {
    const auto t = trim_to_fixpoint(m);
    std::cout << matrix_to_string(t.core);
    save(log, trim_log_json(t.log, m.field()).dump(2) + "\n");
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-rank completion of partially known matrices"};
  app.require_subcommand(1);

  CompleteArgs ca;
  auto* complete_cmd = app.add_subcommand("complete", "complete a matrix file to low rank");
  complete_cmd->add_option("--in", ca.in, "input matrix file")->required();
  complete_cmd->add_option("--out", ca.out, "output matrix file")->required();
  complete_cmd->add_flag("--no-subdiag", ca.no_subdiag, "disable conjoined-line splitting");
  complete_cmd->add_flag("--no-approx", ca.no_approx, "disable approximate trimming");
  complete_cmd->add_option("--zero-budget", ca.zero_budget,
                           "max unknowns for the exact zero test (default 16)");

  std::string dec_in;
  bool dec_json = false;
  auto* decompose_cmd = app.add_subcommand("decompose", "list junk lines and clusters");
  decompose_cmd->add_option("--in", dec_in, "input matrix file")->required();
  decompose_cmd->add_flag("--json", dec_json, "print JSON");

  SimulateArgs sa;
  auto* simulate_cmd = app.add_subcommand("simulate", "count clusters of random GF(2) matrices");
  simulate_cmd->add_option("--n", sa.n, "matrix side")->required();
  auto* grid = simulate_cmd->add_option("--k-grid", sa.k_grid, "comma-separated known-entry counts");
  auto* steps = simulate_cmd->add_option("--k-steps", sa.k_steps, "geometric grid with this many points");
  grid->excludes(steps);
  simulate_cmd->add_option("--trials", sa.trials, "trials per k")->required();
  simulate_cmd->add_option("--seed", sa.seed, "base seed");
  simulate_cmd->add_option("--out", sa.out, "summary CSV")->required();
  simulate_cmd->add_option("--raw", sa.raw, "per-trial CSV");

  std::string or_in, or_out;
  std::size_t or_max = OracleBudget{}.max_unknowns;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact minimum rank by enumeration");
  oracle_cmd->add_option("--in", or_in, "input matrix file")->required();
  oracle_cmd->add_option("--max-unknowns", or_max, "refuse inputs with more unknowns (default 16)");
  oracle_cmd->add_option("--out", or_out, "write a minimum-rank completion");

  std::string tr_in, tr_log;
  auto* trim_cmd = app.add_subcommand("trim", "trim dependent lines and print the core");
  trim_cmd->add_option("--in", tr_in, "input matrix file")->required();
  trim_cmd->add_option("--log", tr_log, "trim log JSON output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_input;
  }

  try {
    if (*complete_cmd) return run_complete(ca);
    if (*decompose_cmd) return run_decompose(dec_in, dec_json);
    if (*simulate_cmd) {
      if (sa.k_grid.empty() && sa.k_steps == 0) throw std::runtime_error("give --k-grid or --k-steps");
      return run_simulate(sa);
    }
    if (*oracle_cmd) return run_oracle(or_in, or_max, or_out);
    if (*trim_cmd) return run_trim(tr_in, tr_log);
  } catch (const parse_error& e) {
    std::cerr << "matcomp: " << e.what() << '\n';
    return exit_input;
  } catch (const budget_exceeded& e) {
    std::cerr << "matcomp: " << e.what() << '\n';
    return exit_budget;
  } catch (const consistency_error& e) {
    std::cerr << "matcomp: " << e.what() << '\n';
    return exit_consistency;
  } catch (const std::exception& e) {
    std::cerr << "matcomp: " << e.what() << '\n';
    return exit_input;
  }
  return exit_input;
}
