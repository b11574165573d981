#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "ftct/coefficients.hpp"
#include "ftct/errors.hpp"
#include "ftct/fault_model.hpp"
#include "ftct/index_lattice.hpp"

namespace ftct::cli {
namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

IndexSet read_index_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_index_set(in);
}

// Emits to the output file when given, else to `out`.
int emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return kExitOk;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ParseError("cannot write '" + path + "'");
  file << text;
  return kExitOk;
}

ExperimentConfig load_run_config(const RunOptions& opt) {
  if (opt.config.empty()) throw ParseError("--config is required");
  ExperimentConfig c = load_config(opt.config);
  if (opt.seed) c.sim.seed = *opt.seed;
  if (opt.runs) c.runs = *opt.runs;
  if (c.runs == 0) throw ParseError("runs must be >= 1");
  return c;
}

std::string header_text(const ExperimentConfig& c, bool compare,
                        bool solve_default) {
  std::string s;
  for (const auto& line : header_lines(c, compare, solve_default)) s += line + '\n';
  return s;
}

// Plan for I \ J, using the band recovery when I is a band that supports it.
CombinationPlan recovery_plan(const IndexSet& index_set, const IndexSet& lost) {
  if (!lost.empty()) {
    const std::size_t d = index_set.dim();
    const int n = index_set.max_level();
    const int layers = n - index_set.min_level() + 1;
    int tau = index_set[0].min_entry();
    for (const auto& i : index_set) tau = std::min(tau, i.min_entry());
    bool band = layers >= static_cast<int>(d) &&
                n >= static_cast<int>(d) * tau + layers - 1 &&
                index_set == generate_index_set(d, n, tau, layers);
    for (const auto& j : lost) band = band && j.level() >= n - 1;
    if (band) {
      try {
        return solve_gcp_two_layer(truncated_plan(d, n, tau, layers), lost);
      } catch (const std::invalid_argument&) {
        // Band too thin for the layered recovery; use the general solver.
      }
    }
  }
  return solve_gcp(set_difference(index_set, lost));
}

}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: size mismatch");
  LineFit fit;
  fit.points = x.size();
  if (x.empty()) {
    fit.degenerate = true;
    return fit;
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) {
    fit.degenerate = true;
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

CompareResult run_compare(const ExperimentConfig& config, std::size_t threads) {
  const auto cases = resolved_cases(config);
  if (cases.size() != 1) throw ParseError("compare takes a single n/tau case");
  if (config.lambdas.empty()) throw ParseError("compare needs lambdas");
  CompareResult result;
  for (Strategy st : config.strategies) {
    std::vector<double> fx, wy;
    for (double lambda : config.lambdas) {
      ExperimentConfig c = config;
      c.lambda = lambda;
      SimConfig sim = case_config(c, cases.front(), false);
      sim.strategy = st;
      const BatchStats stats = batch_runs(sim, config.runs, threads);
      for (std::size_t r = 0; r < stats.reports.size(); ++r) {
        const auto& rep = stats.reports[r];
        result.points.push_back({st, lambda, r, rep.faults, rep.wall_time});
        fx.push_back(static_cast<double>(rep.faults));
        wy.push_back(rep.wall_time);
      }
    }
    result.fits.emplace_back(st, fit_line(fx, wy));
  }
  return result;
}

int cmd_gcp(const GcpOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const IndexSet index_set = read_index_file(opt.index_file);
    if (index_set.empty()) throw InfeasibleError("index set is empty");
    IndexSet lost;
    if (!opt.failed_file.empty()) lost = read_index_file(opt.failed_file);
    for (const auto& j : lost) {
      if (!index_set.contains(j)) {
        throw ParseError("failed index " + j.to_string() + " is not in the index set");
      }
    }
    if (set_difference(index_set, lost).empty()) {
      throw InfeasibleError("no index survives");
    }
    std::ostringstream text;
    write_plan(text, recovery_plan(index_set, lost));
    return emit(text.str(), opt.out, out);
  });
}

int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const WeibullFaults model(opt.lambda, opt.kappa);
    const double c = opt.t_m ? std::ldexp(*opt.t_m, -opt.m) : opt.c;
    const double part =
        opt.t_m ? expected_recompute_ratio_from_time(model, opt.d, opt.m, opt.n, *opt.t_m)
                : expected_recompute_ratio(model, opt.d, opt.m, opt.n, c);
    const double full = expected_recompute_ratio_full(model, opt.d, opt.n, c);
    std::ostringstream s;
    s << "lambda = " << fmt("%.6g", opt.lambda) << '\n'
      << "kappa = " << fmt("%.6g", opt.kappa) << '\n'
      << "d = " << opt.d << '\n'
      << "n = " << opt.n << '\n'
      << "m = " << opt.m << '\n'
      << "c = " << fmt("%.6g", c) << '\n'
      << "mean_time_to_failure = " << fmt("%.6g", model.mean()) << '\n'
      << "epsilon_n = " << fmt("%.6g", epsilon_n(opt.d, opt.n, opt.seminorm)) << '\n'
      << "multiplier_one_layer = "
      << fmt("%.6g", expected_error_multiplier_one_layer(model, opt.t_n)) << '\n'
      << "multiplier_two_layer = "
      << fmt("%.6g", expected_error_multiplier_two_layer(model, opt.d, opt.t_n, opt.t_n1))
      << '\n'
      << "recompute_ratio = " << fmt("%.6g", part) << '\n'
      << "recompute_ratio_full = " << fmt("%.6g", full) << '\n'
      << "recompute_quotient = " << (part > 0.0 ? fmt("%.6g", full / part) : "undefined")
      << '\n';
    out << s.str();
    return kExitOk;
  });
}

int cmd_simulate(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = load_run_config(opt);
    std::string text = header_text(c, false, true);
    text += "l,tau,f_ave,eps_ave,eps_min,eps_max,w_ave,w_min,w_max\n";
    for (const auto& cs : resolved_cases(c)) {
      const BatchStats st = batch_runs(case_config(c, cs, true), c.runs, opt.threads);
      text += std::to_string(cs.n) + "," + std::to_string(cs.tau) + "," +
              fmt("%.4g", st.f_ave) + "," + fmt("%.3e", st.eps_ave) + "," +
              fmt("%.3e", st.eps_min) + "," + fmt("%.3e", st.eps_max) + "," +
              fmt("%.4g", st.w_ave) + "," + fmt("%.4g", st.w_min) + "," +
              fmt("%.4g", st.w_max) + "\n";
    }
    return emit(text, opt.out.empty() ? c.out : opt.out, out);
  });
}

int cmd_compare(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = load_run_config(opt);
    const CompareResult res = run_compare(c, opt.threads);
    std::string text = header_text(c, true, false);
    text += "strategy,lambda,run,f,w\n";
    for (const auto& p : res.points) {
      text += std::string(to_string(p.strategy)) + "," + fmt("%.6g", p.lambda) + "," +
              std::to_string(p.run) + "," + std::to_string(p.faults) + "," +
              fmt("%.4g", p.wall_time) + "\n";
    }
    for (const auto& [st, fit] : res.fits) {
      text += std::string("# fit,") + to_string(st) + ",slope=" + fmt("%.6g", fit.slope) +
              ",intercept=" + fmt("%.6g", fit.intercept) +
              ",n=" + std::to_string(fit.points) +
              ",degenerate=" + (fit.degenerate ? "1" : "0") + "\n";
    }
    return emit(text, opt.out.empty() ? c.out : opt.out, out);
  });
}

int cmd_solve(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig c = load_run_config(opt);
    c.lambda.reset();
    c.runs = 1;
    std::string text = header_text(c, false, true);
    text += "l,tau,eps,w\n";
    for (const auto& cs : resolved_cases(c)) {
      const RunReport rep = run(case_config(c, cs, true));
      text += std::to_string(cs.n) + "," + std::to_string(cs.tau) + "," +
              fmt("%.3e", rep.error) + "," + fmt("%.4g", rep.wall_time) + "\n";
    }
    return emit(text, opt.out.empty() ? c.out : opt.out, out);
  });
}

}  // namespace ftct::cli
