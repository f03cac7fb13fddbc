#include "pfd/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "pfd/config.hpp"
#include "pfd/presets.hpp"
#include "pfd/verify.hpp"

namespace pfd {
namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt17(const std::optional<double>& v) { return v ? fmt17(*v) : ""; }

}  // namespace

void write_trace_header(std::ostream& out) {
  out << "step,j_value,grad_norm,influence_residual,tv_to_target,wall_ms\r\n";
}

void write_trace_row(std::ostream& out, const TraceRecord& rec, bool timing) {
  out << rec.step << ',' << fmt17(rec.j_value) << ',' << opt17(rec.grad_norm) << ','
      << opt17(rec.influence_residual) << ',' << opt17(rec.tv_to_target) << ','
      << (timing ? fmt17(rec.wall_ms) : "") << "\r\n";
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            bool timing) {
  RunSpec spec;
  try {
    spec = parse_config_file(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  const std::string out = out_dir.value_or(spec.data.out_dir);
  if (out.empty()) {
    std::cerr << "config error: no output directory ([run] out_dir or --out)\n";
    return 1;
  }

  std::error_code ec;
  fs::create_directories(out, ec);
  std::ofstream trace(fs::path(out) / "trace.csv", std::ios::binary);
  if (!trace) {
    std::cerr << "config error: cannot write to " << out << "\n";
    return 1;
  }
  write_trace_header(trace);

  PfdResult result;
  try {
    result = run_config(spec.cfg, [&](const TraceRecord& rec) {
      write_trace_row(trace, rec, timing);
      trace.flush();
    });
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    trace.flush();
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }

  std::ofstream res(fs::path(out) / "result.txt", std::ios::binary);
  res << result.summary;
  return 0;
}

int cmd_run_many(const std::vector<std::string>& config_paths,
                 const std::optional<std::string>& out_root, int jobs, bool timing) {
  if (config_paths.empty()) {
    std::cerr << "usage error: no config files given\n";
    return 1;
  }
  if (config_paths.size() == 1) return cmd_run(config_paths[0], out_root, timing);

  std::vector<int> codes(config_paths.size(), 0);
  std::mutex index_mutex;
  std::size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard<std::mutex> lock(index_mutex);
        if (next >= config_paths.size()) return;
        k = next++;
      }
      std::optional<std::string> out;
      if (out_root)
        out = (fs::path(*out_root) / fs::path(config_paths[k]).stem()).string();
      codes[k] = cmd_run(config_paths[k], out, timing);
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(config_paths.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  int worst = 0;
  for (int c : codes) worst = std::max(worst, c);
  return worst;
}

int cmd_verify(const std::optional<std::string>& suite) {
  std::vector<CheckResult> results;
  try {
    results = suite ? run_verify_suite(*suite) : run_all_suites();
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }
  bool all_pass = true;
  for (const CheckResult& r : results) {
    all_pass = all_pass && r.pass;
    std::printf("[%s] %s: measured=%.3g (tolerance %.3g)%s%s\n",
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.measured, r.threshold,
                r.note.empty() ? "" : " ", r.note.c_str());
  }
  return all_pass ? 0 : 3;
}

int cmd_list_presets() {
  for (const std::string& name : preset_names()) std::printf("%s\n", name.c_str());
  return 0;
}

}  // namespace pfd
