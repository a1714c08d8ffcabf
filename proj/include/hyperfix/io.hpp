#ifndef HYPERFIX_IO_HPP
#define HYPERFIX_IO_HPP

#include <optional>
#include <string>

#include "hyperfix/diagnostics.hpp"
#include "hyperfix/iterate.hpp"
#include "hyperfix/psi.hpp"

namespace hyperfix {

/// Shortest round-trip decimal rendering; locale-independent, so equal
/// inputs always produce byte-identical files.
std::string format_double(double value);

/// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Trace CSV: header `iter,eps,residual,step,coord_0,...`; one row per
/// recorded iterate. The eps column is empty for non-regularized runs and
/// the step column is empty on the final row.
std::string trace_to_csv(const IterationTrace& trace);

/// Psi table CSV: header `t,psi`, rows t ascending from 0 to 1 on a uniform
/// grid. The loader enforces the psi-class invariants and reports the
/// offending row on failure.
std::string psi_table_to_csv(const PsiFunction& psi, std::size_t grid_size);
PsiFunction load_psi_table(const std::string& path);

/// Sample CSV: header `idx,coord_0,...` for plain samples (optionally
/// preceded by `# p <p>` when the ambient norm is not l_2), or a sidecar
/// first line `# dims <dx> <dy> psi <spec> [px <p>] [py <p>]` followed by
/// `idx,x_0,...,y_0,...` for direct sums. Psi specs: `lp:<p>`, `max`.
std::string sample_to_csv(const SequenceSample& s);
SequenceSample load_sample(const std::string& path, std::size_t tail_window);

/// Parses `lp:<p>` / `max` psi specs (used by sample sidecars and the CLI).
PsiFunction parse_psi_spec(const std::string& spec);

/// Parses "inf" or a number; used for ambient exponents.
double parse_p(const std::string& text);

}  // namespace hyperfix

#endif
