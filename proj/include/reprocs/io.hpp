#ifndef REPROCS_IO_HPP
#define REPROCS_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "reprocs/basis.hpp"
#include "reprocs/metrics.hpp"
#include "reprocs/synth.hpp"
#include "reprocs/tracker.hpp"

namespace reprocs::io {

// Formats a double with 17 significant digits ('.' decimal separator),
// enough for exact float64 round-trips.
std::string format_double(double v);

// RFC-4180 CSV (CRLF line endings, fields quoted only when needed).
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
Csv read_csv(const std::filesystem::path& path);

// Stream dump: columns t, m_1..m_n (one row per time instant).
void write_stream_csv(const std::filesystem::path& path, const Matrix& m);
// Reads a stream CSV back into an n x t_max matrix (columns are frames).
Matrix read_stream_csv(const std::filesystem::path& path);

// Simple binary container: magic "RPCA", u32 rows, u32 cols,
// little-endian float64, row-major.
void write_rpca(const std::filesystem::path& path, const Matrix& m);
Matrix read_rpca(const std::filesystem::path& path);

// Per-trial metrics: t, se, x_err, rel_x_err, support_exact, solver_iters.
void write_metrics_csv(const std::filesystem::path& path,
                       const analysis::MetricsLog& log);

// Tracker checkpoint (JSON; P_hat blocks as row-major float64 arrays,
// counters as integers).
void save_checkpoint(const std::filesystem::path& path,
                     const ReprocsParams& params, const TrackerState& state);
struct Checkpoint {
    ReprocsParams params;
    TrackerState state;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace reprocs::io

#endif  // REPROCS_IO_HPP
