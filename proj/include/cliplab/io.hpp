#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cliplab/diagnostics.hpp"
#include "cliplab/harness.hpp"
#include "cliplab/schedules.hpp"

namespace cliplab {

/// Shortest text that parses back to the same double ("nan", "inf", "-inf"
/// for non-finite values).
std::string format_double(double v);

/// RFC 4180 field quoting: fields with a comma, quote, CR or LF are wrapped in
/// quotes and embedded quotes are doubled.
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

/// "# schema=1" header, column row, one row per seed.
std::string seed_results_csv(const TrialSummary& summary);

/// Single-line JSON objects (no trailing newline).
std::string summary_json(const TrialSummary& summary);
std::string rate_fit_json(const RateFit& fit);
std::string compare_json(const CompareReport& report);
std::string conditions_json(const std::string& schedule, const ConditionReport& report);
std::string check_json(const CheckReport& report);

/// <out>/<id>/<algorithm>/<pXX>. The id must be a single plain path
/// component so nothing lands outside `out`.
std::filesystem::path result_dir(const std::filesystem::path& out, const std::string& id,
                                 Algorithm algorithm, double p);

/// Writes (or appends) text, creating parent directories. Refuses paths
/// that are not inside `root`.
void write_file(const std::filesystem::path& root, const std::filesystem::path& path,
                const std::string& text, bool append = false);

}  // namespace cliplab
