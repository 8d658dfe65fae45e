#pragma once

// Plain-text writers for dip curves, visibility sweeps and amplitude maps.
// Every file starts with `# key = value` lines recording the fully resolved
// setup, so a result can be reproduced from its own header.  Numbers are
// printed with "%.17g" (shortest exact round-trip), which makes outputs
// byte-identical across runs and thread counts.

#include <iosfwd>
#include <string>
#include <vector>

#include "spdc/amplitude.hpp"
#include "spdc/interference.hpp"

namespace spdc {

// "%.17g" rendering of v (exact double round trip).
std::string format_double(double v);

const char* to_string(RhoMethod method);

// `# key = value` block describing setup (lengths in mm, times in s,
// dispersion in s^2/mm, filter widths in rad/s; infinite width = "inf").
void write_setup_header(std::ostream& os, const SetupConfig& setup);

// Columns: l_mm,dtau_l_s,rho,Rn,rel_err,converged
void write_dip_csv(std::ostream& os, const DipCurve& curve);
void write_dip_csv(const std::string& path, const DipCurve& curve);

// Columns: tau_Di_s,l_opt_mm,rho_max,visibility,converged
void write_visibility_csv(std::ostream& os,
                          const std::vector<VisibilitySample>& rows,
                          const SetupConfig& setup);
void write_visibility_csv(const std::string& path,
                          const std::vector<VisibilitySample>& rows,
                          const SetupConfig& setup);

// Header, then `t_axis_s = ...` / `tau_axis_s = ...` lines, then one line
// per t sample holding "re,im" cells for each tau sample, space separated.
void write_amplitude_grid(std::ostream& os, const AmplitudeGrid& grid);
void write_amplitude_grid(const std::string& path, const AmplitudeGrid& grid);

}  // namespace spdc
