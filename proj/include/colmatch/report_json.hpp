/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <string>

#include <json.hpp>

#include <colmatch/matcher.hpp>

namespace colmatch
{

/// Serializes with sorted keys (ordered_json keeps insertion order) and every float printed with
/// 17 significant digits, so equal documents always produce identical bytes.
std::string dump_stable(const nlohmann::json& doc, int indent = 2);
std::string dump_stable(const nlohmann::ordered_json& doc, int indent = 2);

nlohmann::json config_to_json(const MatchConfig& config);
/// Missing keys keep their defaults. The result is validated.
MatchConfig config_from_json(const nlohmann::json& doc, MatchConfig base = {});

nlohmann::json candidate_to_json(const CandidateScore& candidate, std::size_t rank, bool include_histogram);

/// Report document: config, pairs, candidates, classification, unscored, plus release labels and the
/// scored column lists in schema order.
nlohmann::json report_to_json(const MatchReport& report, bool include_histograms = false);
MatchReport report_from_json(const nlohmann::json& doc);

/// Plain-text rendering for terminals.
std::string render_report_text(const MatchReport& report);

}
