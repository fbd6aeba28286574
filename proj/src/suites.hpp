#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ev/field.hpp"
#include "ev/harness.hpp"

namespace ev::detail {

using TrialFn = std::function<TrialRecord(std::int64_t id)>;

/// Runs ids [0, count) on the worker pool (or only the replayed id) and
/// returns the records in id order. Exceptions become failed records.
std::vector<TrialRecord> run_trials(const SuiteConfig& config, const RunOptions& options, std::int64_t count,
                                    const TrialFn& fn);

/// Writes `field` as <dir>/<suite>-<id>-<name>.bin when field dumps are on.
void dump_field(const RunOptions& options, const std::string& suite, const std::string& id,
                const std::string& name, const SampledField& field);

/// Replay stub naming the suite, seed, parameters and trial id.
Json replay_stub(const SuiteConfig& config, std::int64_t id);

std::vector<TrialRecord> suite_dyadic(const SuiteConfig& c, const RunOptions& o);
std::vector<TrialRecord> suite_kernels(const SuiteConfig& c, const RunOptions& o);
std::vector<TrialRecord> suite_ftpair(const SuiteConfig& c, const RunOptions& o);
std::vector<TrialRecord> suite_telescoping(const SuiteConfig& c, const RunOptions& o);
std::vector<TrialRecord> suite_box(const SuiteConfig& c, const RunOptions& o);
std::vector<TrialRecord> suite_error_boundary(const SuiteConfig& c, const RunOptions& o);
std::vector<TrialRecord> suite_tree(const SuiteConfig& c, const RunOptions& o);
std::vector<TrialRecord> suite_parseval(const SuiteConfig& c, const RunOptions& o);
std::vector<TrialRecord> suite_restricted(const SuiteConfig& c, const RunOptions& o);

}  // namespace ev::detail
