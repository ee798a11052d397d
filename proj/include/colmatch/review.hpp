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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <colmatch/matcher.hpp>

namespace colmatch::review
{

enum class Action
{
    accept,
    mark_removed,
    mark_new,
    undo
};

std::string_view to_string(Action action);
Action parse_action(std::string_view text);

struct Decision
{
    std::optional<std::string> base_column;
    std::optional<std::string> new_column;
    Action action = Action::accept;
    bool operator==(const Decision&) const = default;
};

/// Throws ValidationError when the fields present do not fit the action.
void check_shape(const Decision& decision);

nlohmann::json decision_to_json(const Decision& decision);
Decision decision_from_json(const nlohmann::json& doc);

/// Review state derived from the initial report and a decision log. Always a pure fold.
class SessionState
{
public:
    explicit SessionState(const MatchReport& report) : report_(&report) { }

    /// Validates against the current state and applies. Unknown columns raise ValidationError,
    /// decisions on already resolved columns (and undo on an empty history) raise ConflictError.
    void apply(const Decision& decision);

    static SessionState replay(const MatchReport& report, std::span<const Decision> log);

    [[nodiscard]] bool base_resolved(const std::string& base) const { return resolved_base_.contains(base); }
    [[nodiscard]] bool new_consumed(const std::string& name) const { return consumed_new_.contains(name); }
    [[nodiscard]] std::size_t decided() const { return resolved_base_.size() + consumed_new_.size(); }
    [[nodiscard]] std::size_t total() const;
    [[nodiscard]] const std::vector<Decision>& effective() const { return effective_; }

    /// Unresolved base columns (schema order) mapped to their remaining candidates, best first, at most k.
    [[nodiscard]] nlohmann::ordered_json suggestions(int k, bool include_histograms = false) const;

    /// Decided mapping in ground-truth CSV form; undecided columns are listed in '#' trailer lines.
    [[nodiscard]] std::string export_csv() const;

private:
    void rebuild();

    const MatchReport* report_;
    std::vector<Decision> effective_;
    std::map<std::string, Decision> resolved_base_;
    std::set<std::string> consumed_new_;
};

struct Session
{
    std::string id;
    std::string base_release;
    std::string new_release;
    std::string base_path;
    std::string new_path;
    MatchConfig config;
    MatchReport initial;
    std::vector<Decision> decisions;
    std::string created;
    std::string updated;
};

nlohmann::json session_to_json(const Session& session);
Session session_from_json(const nlohmann::json& doc);

struct SessionSummary
{
    std::string id;
    std::string base_release;
    std::string new_release;
    std::size_t decided = 0;
    std::size_t total = 0;
};

/// Review sessions persisted as one JSON document per session in a directory. Documents are written to a
/// temporary file and renamed into place. Mutations of one session are serialized; reads may run
/// concurrently.
class ReviewService
{
public:
    explicit ReviewService(std::filesystem::path store_dir);

    /// Loads both CSV files, ranks every pair once and persists the session. Load failures surface as
    /// IoError or ParseError.
    Session create_session(const std::string& base_path, const std::string& new_path, const MatchConfig& config);

    std::vector<SessionSummary> list_sessions();

    nlohmann::ordered_json get_suggestions(const std::string& id, std::optional<int> k = std::nullopt, bool histograms = false);

    /// Appends the decision and returns the updated suggestions.
    nlohmann::ordered_json record_decision(const std::string& id, const Decision& decision, std::optional<int> k = std::nullopt);

    std::string export_mapping(const std::string& id);

    Session get_session(const std::string& id);

    [[nodiscard]] const std::filesystem::path& store_dir() const { return dir_; }

private:
    struct Entry
    {
        std::shared_mutex mutex;
        Session session;
        std::unique_ptr<SessionState> state;
    };

    std::shared_ptr<Entry> entry(const std::string& id);
    void persist(const Session& session) const;

    std::filesystem::path dir_;
    std::mutex entries_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> entries_;
};

}
