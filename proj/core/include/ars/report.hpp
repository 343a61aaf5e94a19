#pragma once

#include <string>
#include <vector>

#include "ars/attacks.hpp"
#include "ars/scenario.hpp"

namespace ars {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Canonical JSON renderings; identical inputs give byte-identical text.
std::string scenario_report_to_json(const ScenarioReport& report);
std::string task_suite_report_to_json(const TaskSuiteReport& report);
std::string attack_report_to_json(const AttackReport& report);
std::string mask_search_result_to_json(const MaskSearchResult& result);

// Long-form plot data: one "epsilon,metric,value,seed" line per number.
std::string scenario_report_to_csv(const ScenarioReport& report);

// Merges previously written scenario-report JSON files into one CSV.
std::string merge_reports_to_csv(const std::vector<std::string>& report_json_texts);

}  // namespace ars
