#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pfd/engine.hpp"

namespace pfd {

// RFC-4180 rows, numeric fields at 17 significant digits, CRLF line endings.
// Header: step,j_value,grad_norm,influence_residual,tv_to_target,wall_ms.
// wall_ms is left empty unless `timing` is set, keeping traces byte-identical
// across reruns of the same config and seed.
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TraceRecord& rec, bool timing);

// Exit codes: 0 success, 1 invalid config/usage, 2 numerical failure (partial
// trace flushed), 3 verification failure.
int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            bool timing = false);

// Runs several configs concurrently (each fully isolated); returns the worst
// exit code. With an out_root, each run writes to out_root/<config-stem>/.
int cmd_run_many(const std::vector<std::string>& config_paths,
                 const std::optional<std::string>& out_root, int jobs,
                 bool timing = false);

// Runs one named verification suite (or all of them), printing one line per
// check with the measured residual.
int cmd_verify(const std::optional<std::string>& suite);

int cmd_list_presets();

}  // namespace pfd
