#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "innodyn/engine.hpp"
#include "innodyn/heaps.hpp"
#include "innodyn/kernel.hpp"
#include "innodyn/powerlaw.hpp"
#include "innodyn/productspace.hpp"

namespace innodyn {

// Shortest decimal string that round-trips the double exactly.
std::string fmt_double(double v);

// Trajectory exports. Product codes are written as "p<id>" so simulated
// events can feed the same product-space pipeline as ingested data.
void write_events_csv(const Trajectory& traj, std::ostream& os);
void write_snapshots_csv(const Trajectory& traj, std::ostream& os);

// "org_id,year,product_code" with a mandatory header. Parse failures name
// the 1-based line number.
std::vector<ps::PsEvent> read_events_csv(std::istream& is);

// One integer per line; a single optional non-numeric header line is
// skipped. Parse failures name the line number.
std::vector<double> read_values_csv(std::istream& is);

void write_kernel_bins_csv(const laws::KernelFit& fit, std::ostream& os);

// JSON documents. Field names follow the structs; "stderr" is spelled out
// in full in the files even though the C++ members avoid the stdio macro.
std::string params_to_json(const SimParams& p);
SimParams params_from_json(const std::string& text);
std::string heaps_fit_to_json(const laws::HeapsFit& fit);
std::string kernel_fit_to_json(const laws::KernelFit& fit);
std::string power_law_fit_to_json(const laws::PowerLawFit& fit);
std::string lr_comparison_to_json(const laws::LRComparison& cmp);
std::string network_stats_to_json(const ps::NetworkStats& st);
std::string prediction_eval_to_json(const ps::DiversificationEval& ev);

} // namespace innodyn
