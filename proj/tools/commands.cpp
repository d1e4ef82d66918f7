#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <tuple>

namespace fermibath::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string where(const std::vector<std::string>& label) {
  return label.empty() ? std::string() : " [" + join(label, ", ") + "]";
}

void check(fb_status s, const std::string& op) {
  if (s == FB_OK) return;
  throw NumericalFailure(op + ": " + fb_status_string(s) + ": " + fb_last_error());
}

// Runs body(i) for i < n on up to jobs threads; rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

class ModelHandle {
public:
  ModelHandle(const fb_params& p, const fb_quadrature& q, const std::vector<std::string>& label) {
    const fb_status s = fb_model_create(&p, &q, &m_);
    if (s == FB_ERR_INVALID_ARGUMENT) throw ConfigError(std::string("model") + where(label) + ": " + fb_last_error());
    check(s, "model setup" + where(label));
  }
  ~ModelHandle() { fb_model_destroy(m_); }
  ModelHandle(const ModelHandle&) = delete;
  ModelHandle& operator=(const ModelHandle&) = delete;
  const fb_model* get() const { return m_; }

private:
  fb_model* m_ = nullptr;
};

class OracleHandle {
public:
  OracleHandle(const fb_params& p, std::size_t modes, double w_max) {
    const fb_status s = fb_oracle_create(&p, modes, w_max, &o_);
    if (s == FB_ERR_INVALID_ARGUMENT) throw ConfigError(std::string("oracle: ") + fb_last_error());
    check(s, "oracle setup");
  }
  ~OracleHandle() { fb_oracle_destroy(o_); }
  OracleHandle(const OracleHandle&) = delete;
  OracleHandle& operator=(const OracleHandle&) = delete;
  const fb_oracle* get() const { return o_; }

private:
  fb_oracle* o_ = nullptr;
};

// One diagonalization per (Omega, g0, gamma) across the runs of a command.
class OracleCache {
public:
  const OracleHandle& get(const fb_params& p, const OracleBlock& o) {
    const auto key = std::make_tuple(p.omega, p.g0, p.gamma);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, std::make_unique<OracleHandle>(p, o.modes, o.w_max)).first;
    return *it->second;
  }

private:
  std::map<std::tuple<double, double, double>, std::unique_ptr<OracleHandle>> cache_;
};

nlohmann::ordered_json params_json(const fb_params& p) {
  nlohmann::ordered_json j;
  j["Omega"] = p.omega;
  j["g0"] = p.g0;
  j["gamma"] = p.gamma;
  j["T"] = p.temperature;
  j["mu"] = p.mu;
  j["statistics"] = p.statistics == FB_FERMI ? "fermi" : "bose";
  j["n0"] = p.n0;
  return j;
}

Table base_table(const char* command, const RunConfig& c, const std::vector<std::string>& label) {
  Table t;
  t.meta["tool"] = "fermibath";
  t.meta["version"] = fb_version();
  t.meta["command"] = command;
  t.meta["units"] = "hbar = k_B = 1; energies in MeV, times in 1/MeV";
  if (!label.empty()) t.meta["run"] = join(label, ", ");
  t.config = serialize_config(c);
  return t;
}

void add_model_meta(Table& t, const fb_params& p, const ModelHandle& m) {
  t.meta["params"] = params_json(p);
  double omega = 0;
  check(fb_bare_frequency(&p, &omega), "bare frequency");
  t.meta["bare_frequency"] = omega;
  double z1[2], z2[2];
  check(fb_roots(m.get(), z1, z2), "characteristic roots");
  t.meta["z1"] = {z1[0], z1[1]};
  t.meta["z2"] = {z2[0], z2[1]};
}

std::vector<double> time_grid(const fb_params& p, const GridBlock& g, double t_end) {
  std::vector<double> times;
  if (g.points == 0) {
    std::size_t count = 0;
    check(fb_default_time_grid(&p, t_end, nullptr, 0, &count), "time grid");
    times.resize(count);
    check(fb_default_time_grid(&p, t_end, times.data(), count, &count), "time grid");
  } else {
    const std::size_t n = std::max<std::size_t>(g.points, 2);
    for (std::size_t i = 0; i < n; ++i) times.push_back(t_end * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return times;
}

std::vector<double> uniform_grid(double t_end, std::size_t points) {
  const std::size_t n = std::max<std::size_t>(points, 2);
  std::vector<double> times;
  for (std::size_t i = 0; i < n; ++i) times.push_back(t_end * static_cast<double>(i) / static_cast<double>(n - 1));
  return times;
}

fb_initial_correlation correlation(const OracleBlock& o) {
  return o.initial == "dressed" ? FB_INITIAL_DRESSED : FB_INITIAL_PRODUCT;
}

}  // namespace

std::vector<NamedTable> run_evolve(const RunConfig& c) {
  const fb_quadrature q = to_quadrature(c.quadrature);
  OracleCache oracles;
  std::vector<NamedTable> out;
  for (const auto& combo : expand_model(c.model)) {
    const fb_params& p = combo.params;
    const ModelHandle model(p, q, combo.varying);
    const auto times = time_grid(p, c.grid, c.grid.t_max);
    const std::size_t n = times.size();
    const std::string at = where(combo.varying);

    std::vector<double> exact(n), weak(n);
    check(fb_occupation_trajectory(model.get(), times.data(), n, 0, c.jobs, exact.data()), "occupation" + at);
    check(fb_occupation_trajectory(model.get(), times.data(), n, 1, c.jobs, weak.data()),
          "weak-coupling occupation" + at);

    NamedTable nt{combo.varying, base_table("evolve", c, combo.varying)};
    Table& t = nt.table;
    add_model_meta(t, p, model);
    if (p.g0 > 0) {
      double ninf = 0;
      check(fb_occupation_asymptotic(model.get(), &ninf), "asymptotic occupation" + at);
      t.meta["n_infinity"] = ninf;
    }

    std::vector<double> oracle;
    if (c.oracle.modes > 0) {
      const OracleHandle& o = oracles.get(p, c.oracle);
      double t_rec = 0;
      check(fb_oracle_recurrence_time(o.get(), &t_rec), "oracle");
      std::vector<double> valid;
      for (double x : times)
        if (x <= 0.5 * t_rec) valid.push_back(x);
      oracle.assign(n, kNaN);
      check(fb_oracle_propagate(o.get(), &p, correlation(c.oracle), valid.data(), valid.size(), oracle.data()),
            "oracle propagation" + at);
      t.meta["oracle_modes"] = c.oracle.modes;
      t.meta["oracle_initial"] = c.oracle.initial;
      t.meta["oracle_recurrence_time"] = t_rec;
      t.meta["oracle_note"] = "n_oracle is nan beyond half the recurrence time";
    }

    std::vector<fb_transport> transport(n);
    if (c.output.transport)
      parallel_for(n, c.jobs, [&](std::size_t i) {
        check(fb_transport_point(model.get(), times[i], &transport[i]), "transport coefficients" + at);
      });

    t.columns = {"time", "n_exact", "n_weak_coupling"};
    if (!oracle.empty()) t.columns.push_back("n_oracle");
    if (c.output.transport)
      for (const char* col : {"lambda", "D_plus", "D_minus", "transport_flag"}) t.columns.push_back(col);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row{times[i], exact[i], weak[i]};
      if (!oracle.empty()) row.push_back(oracle[i]);
      if (c.output.transport) {
        row.push_back(transport[i].friction);
        row.push_back(transport[i].diffusion_plus);
        row.push_back(transport[i].diffusion_minus);
        row.push_back(transport[i].asymptotic ? 1.0 : 0.0);
      }
      t.rows.push_back(std::move(row));
    }
    out.push_back(std::move(nt));
  }
  return out;
}

std::vector<NamedTable> run_scan(const RunConfig& c) {
  const fb_quadrature q = to_quadrature(c.quadrature);
  const auto values = scan_values(c.grid);
  const std::string& var = c.grid.scan;
  std::vector<NamedTable> out;
  for (const auto& combo : expand_model(c.model, var, true)) {
    NamedTable nt{combo.varying, base_table("scan", c, combo.varying)};
    Table& t = nt.table;
    nlohmann::ordered_json fixed = params_json(combo.params);
    fixed.erase(var);
    fixed.erase("statistics");
    t.meta["scan"] = var;
    t.meta["params"] = fixed;
    t.meta["D_minus_note"] = "lambda_inf times the asymptotic <F F+> moment";
    t.columns = {"value",       "n_inf_fermi",   "n_inf_bose",   "fermi_dirac",  "bose_einstein",
                 "lowT_fermi",  "lowT_bose",     "ratio_fb",     "tanh_ratio",   "lambda_inf",
                 "D_plus_fermi", "D_plus_bose",  "D_minus_fermi", "D_minus_bose"};
    t.rows.assign(values.size(), {});

    parallel_for(values.size(), c.jobs, [&](std::size_t i) {
      fb_params p = combo.params;
      if (var == "T")
        p.temperature = values[i];
      else if (var == "g0")
        p.g0 = values[i];
      else
        p.mu = values[i];
      const std::string at = " [" + var + "=" + format_number(values[i]) + "]";

      fb_equilibrium f{}, b{};
      p.statistics = FB_FERMI;
      {
        const ModelHandle m(p, q, {var + "=" + format_number(values[i])});
        check(fb_equilibrium_summary(m.get(), &f), "equilibrium (fermi)" + at);
      }
      bool bose_ok = false;
      fb_params pb = p;
      pb.statistics = FB_BOSE;
      pb.n0 = 0;
      if (pb.mu <= 0) {
        const ModelHandle m(pb, q, {var + "=" + format_number(values[i])});
        check(fb_equilibrium_summary(m.get(), &b), "equilibrium (bose)" + at);
        bose_ok = true;
      }
      double tanh_ratio = kNaN;
      if (p.temperature > 0) check(fb_statistics_ratio(p.temperature, p.omega, &tanh_ratio), "tanh ratio" + at);
      const double nb = bose_ok ? b.n_infinity : kNaN;
      t.rows[i] = {values[i],
                   f.n_infinity,
                   nb,
                   f.reference_thermal,
                   bose_ok ? b.reference_thermal : kNaN,
                   f.low_t_expansion,
                   bose_ok ? b.low_t_expansion : kNaN,
                   bose_ok && nb > 0 ? f.n_infinity / nb : kNaN,
                   tanh_ratio,
                   f.lambda_infinity,
                   f.d_plus_infinity,
                   bose_ok ? b.d_plus_infinity : kNaN,
                   f.d_minus_infinity,
                   bose_ok ? b.d_minus_infinity : kNaN};
    });
    out.push_back(std::move(nt));
  }
  return out;
}

std::vector<NamedTable> run_oracle_compare(const RunConfig& c) {
  RunConfig cfg = c;
  if (cfg.oracle.modes == 0) cfg.oracle.modes = 4000;
  const fb_quadrature q = to_quadrature(cfg.quadrature);
  OracleCache oracles;
  std::vector<NamedTable> out;
  for (const auto& combo : expand_model(cfg.model)) {
    const fb_params& p = combo.params;
    const std::string at = where(combo.varying);
    const ModelHandle model(p, q, combo.varying);
    const OracleHandle& o = oracles.get(p, cfg.oracle);
    double t_rec = 0;
    check(fb_oracle_recurrence_time(o.get(), &t_rec), "oracle");
    const double t_end = std::min(cfg.grid.t_max, 0.5 * t_rec);
    const auto times = uniform_grid(t_end, cfg.grid.points ? cfg.grid.points : 201);
    const std::size_t n = times.size();
    std::vector<double> exact(n), oracle(n);
    check(fb_occupation_trajectory(model.get(), times.data(), n, 0, cfg.jobs, exact.data()), "occupation" + at);
    check(fb_oracle_propagate(o.get(), &p, correlation(cfg.oracle), times.data(), n, oracle.data()),
          "oracle propagation" + at);

    NamedTable nt{combo.varying, base_table("oracle-compare", cfg, combo.varying)};
    Table& t = nt.table;
    add_model_meta(t, p, model);
    double worst = 0;
    t.columns = {"time", "n_exact", "n_oracle", "abs_diff"};
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::abs(exact[i] - oracle[i]);
      worst = std::max(worst, d);
      t.rows.push_back({times[i], exact[i], oracle[i], d});
    }
    t.meta["oracle_modes"] = cfg.oracle.modes;
    t.meta["oracle_initial"] = cfg.oracle.initial;
    t.meta["oracle_recurrence_time"] = t_rec;
    t.meta["max_abs_diff"] = worst;
    out.push_back(std::move(nt));
  }
  return out;
}

std::vector<NamedTable> run_kernel_dump(const RunConfig& c) {
  OracleCache oracles;
  std::vector<NamedTable> out;
  for (const auto& combo : expand_model(c.model)) {
    const fb_params& p = combo.params;
    const auto times = uniform_grid(c.grid.t_max, c.grid.points ? c.grid.points : 201);
    NamedTable nt{combo.varying, base_table("kernel-dump", c, combo.varying)};
    Table& t = nt.table;
    t.meta["params"] = params_json(p);
    t.columns = {"time", "kernel", "kernel_integral"};
    const OracleHandle* o = c.oracle.modes > 0 ? &oracles.get(p, c.oracle) : nullptr;
    if (o) {
      t.columns.push_back("kernel_discrete");
      double sum = 0;
      check(fb_oracle_coupling_sum(o->get(), &sum), "coupling sum");
      t.meta["coupling_sum"] = sum;
      t.meta["oracle_modes"] = c.oracle.modes;
    }
    for (double x : times) {
      double k = 0, ki = 0;
      const fb_status s = fb_memory_kernel(&p, x, &k, &ki);
      if (s == FB_ERR_INVALID_ARGUMENT) throw ConfigError(std::string("kernel-dump: ") + fb_last_error());
      check(s, "memory kernel");
      std::vector<double> row{x, k, ki};
      if (o) {
        double kd = 0;
        check(fb_oracle_kernel(o->get(), x, &kd), "discrete kernel");
        row.push_back(kd);
      }
      t.rows.push_back(std::move(row));
    }
    out.push_back(std::move(nt));
  }
  return out;
}

std::vector<NamedTable> run_command(const std::string& command, const RunConfig& c) {
  if (command == "evolve") return run_evolve(c);
  if (command == "scan") return run_scan(c);
  if (command == "oracle-compare") return run_oracle_compare(c);
  if (command == "kernel-dump") return run_kernel_dump(c);
  throw ConfigError("unknown command '" + command + "'");
}

std::vector<std::string> write_outputs(const std::string& command, const RunConfig& c,
                                       const std::vector<NamedTable>& tables) {
  namespace fs = std::filesystem;
  const bool json = c.output.format == "json";
  auto emit = [&](std::ostream& os, const Table& t) {
    if (json)
      write_json(os, t);
    else
      write_csv(os, t);
  };
  std::vector<std::string> written;
  if (tables.size() == 1) {
    if (c.output.path == "-") {
      emit(std::cout, tables[0].table);
      return written;
    }
    const fs::path target(c.output.path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    std::ofstream f(target, std::ios::binary);
    if (!f) throw ConfigError("output.path: cannot write '" + c.output.path + "'");
    emit(f, tables[0].table);
    written.push_back(target.string());
    return written;
  }
  if (c.output.path == "-")
    throw ConfigError("output.path: " + std::to_string(tables.size()) +
                      " runs need an output directory, not stdout");
  const fs::path dir(c.output.path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ConfigError("output.path: '" + c.output.path + "' is not a directory");
  for (const auto& nt : tables) {
    std::string stem = command;
    for (const auto& part : nt.label) {
      std::string s = part;
      std::replace(s.begin(), s.end(), '=', '-');
      stem += "_" + s;
    }
    const fs::path file = dir / (stem + (json ? ".json" : ".csv"));
    std::ofstream f(file, std::ios::binary);
    if (!f) throw ConfigError("output.path: cannot write '" + file.string() + "'");
    emit(f, nt.table);
    written.push_back(file.string());
  }
  return written;
}

}  // namespace fermibath::cli
