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
#include <colmatch/review.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <colmatch/error.hpp>
#include <colmatch/evalbench.hpp>
#include <colmatch/report_json.hpp>

namespace colmatch::review
{
namespace
{

std::string now_utc()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::string new_session_id()
{
    std::random_device device;
    std::string id;
    static constexpr char hex[] = "0123456789abcdef";
    for (int i = 0; i < 4; ++i)
    {
        auto word = device();
        for (int j = 0; j < 8; ++j)
        {
            id.push_back(hex[word & 0xF]);
            word >>= 4;
        }
    }
    return id;
}

bool valid_id(std::string_view id)
{
    return id.size() == 32 && std::ranges::all_of(id, [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

bool contains(const std::vector<std::string>& names, const std::string& name)
{
    return std::ranges::find(names, name) != names.end();
}

}

std::string_view to_string(Action action)
{
    switch (action)
    {
        case Action::accept:
            return "accept";
        case Action::mark_removed:
            return "mark_removed";
        case Action::mark_new:
            return "mark_new";
        case Action::undo:
            return "undo";
    }
    return "accept";
}

Action parse_action(std::string_view text)
{
    if (text == "accept")
        return Action::accept;
    if (text == "mark_removed")
        return Action::mark_removed;
    if (text == "mark_new")
        return Action::mark_new;
    if (text == "undo")
        return Action::undo;
    throw ValidationError("unknown action '" + std::string(text) + "'");
}

void check_shape(const Decision& d)
{
    switch (d.action)
    {
        case Action::accept:
            if (!d.base_column || !d.new_column)
                throw ValidationError("accept needs base_column and new_column");
            return;
        case Action::mark_removed:
            if (!d.base_column || d.new_column)
                throw ValidationError("mark_removed takes base_column only");
            return;
        case Action::mark_new:
            if (d.base_column || !d.new_column)
                throw ValidationError("mark_new takes new_column only");
            return;
        case Action::undo:
            if (d.base_column || d.new_column)
                throw ValidationError("undo takes no columns");
            return;
    }
}

nlohmann::json decision_to_json(const Decision& d)
{
    nlohmann::json doc{{"action", to_string(d.action)}};
    if (d.base_column)
        doc["base_column"] = *d.base_column;
    if (d.new_column)
        doc["new_column"] = *d.new_column;
    return doc;
}

Decision decision_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object() || !doc.contains("action") || !doc.at("action").is_string())
        throw ValidationError("decision needs a string 'action'");
    Decision d;
    d.action = parse_action(doc.at("action").get<std::string>());
    const auto read = [&](const char* key) -> std::optional<std::string>
    {
        if (!doc.contains(key) || doc.at(key).is_null())
            return std::nullopt;
        if (!doc.at(key).is_string())
            throw ValidationError(std::string(key) + " must be a string");
        return doc.at(key).get<std::string>();
    };
    d.base_column = read("base_column");
    d.new_column = read("new_column");
    check_shape(d);
    return d;
}

void SessionState::apply(const Decision& d)
{
    check_shape(d);
    const auto& report = *report_;
    if (d.base_column && !contains(report.base_columns, *d.base_column))
        throw ValidationError("unknown base column '" + *d.base_column + "'");
    if (d.new_column && !contains(report.new_columns, *d.new_column))
        throw ValidationError("unknown new column '" + *d.new_column + "'");

    switch (d.action)
    {
        case Action::accept:
            if (base_resolved(*d.base_column))
                throw ConflictError("base column '" + *d.base_column + "' is already resolved");
            if (new_consumed(*d.new_column))
                throw ConflictError("new column '" + *d.new_column + "' is already taken");
            break;
        case Action::mark_removed:
            if (base_resolved(*d.base_column))
                throw ConflictError("base column '" + *d.base_column + "' is already resolved");
            break;
        case Action::mark_new:
            if (new_consumed(*d.new_column))
                throw ConflictError("new column '" + *d.new_column + "' is already taken");
            break;
        case Action::undo:
            if (effective_.empty())
                throw ConflictError("nothing to undo");
            effective_.pop_back();
            rebuild();
            return;
    }
    effective_.push_back(d);
    rebuild();
}

void SessionState::rebuild()
{
    resolved_base_.clear();
    consumed_new_.clear();
    for (const auto& d : effective_)
    {
        if (d.base_column)
            resolved_base_[*d.base_column] = d;
        if (d.action != Action::mark_removed && d.new_column)
            consumed_new_.insert(*d.new_column);
    }
}

SessionState SessionState::replay(const MatchReport& report, std::span<const Decision> log)
{
    SessionState state(report);
    for (const auto& d : log)
        state.apply(d);
    return state;
}

std::size_t SessionState::total() const
{
    return report_->base_columns.size() + report_->new_columns.size();
}

nlohmann::ordered_json SessionState::suggestions(int k, bool include_histograms) const
{
    if (k < 1)
        throw ValidationError("k must be at least 1");
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& base : report_->base_columns)
    {
        if (base_resolved(base))
            continue;
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        std::size_t rank = 0;
        const auto it = report_->candidates.find(base);
        if (it != report_->candidates.end())
        {
            for (const auto& c : it->second)
            {
                if (new_consumed(c.new_column))
                    continue;
                if (rank == static_cast<std::size_t>(k))
                    break;
                ++rank;
                nlohmann::ordered_json entry;
                entry["new_column"] = c.new_column;
                entry["p_value"] = c.p_value ? nlohmann::ordered_json(*c.p_value) : nlohmann::ordered_json(nullptr);
                entry["statistic"] = c.statistic ? nlohmann::ordered_json(*c.statistic) : nlohmann::ordered_json(nullptr);
                entry["rank"] = rank;
                if (include_histograms && c.histogram)
                {
                    entry["histogram"] = {
                        {"edges", c.histogram->edges}, {"base", c.histogram->base_weights}, {"new", c.histogram->new_weights}};
                }
                list.push_back(std::move(entry));
            }
        }
        out[base] = std::move(list);
    }
    return out;
}

std::string SessionState::export_csv() const
{
    GroundTruth truth;
    for (const auto& base : report_->base_columns)
    {
        const auto it = resolved_base_.find(base);
        if (it == resolved_base_.end())
            continue;
        const auto& d = it->second;
        if (d.action == Action::accept)
        {
            truth.entries.push_back(TruthEntry{
                base, d.new_column, *d.new_column == base ? ChangeKind::same : ChangeKind::renamed});
        }
        else
        {
            truth.entries.push_back(TruthEntry{base, std::nullopt, ChangeKind::removed});
        }
    }
    for (const auto& d : effective_)
        if (d.action == Action::mark_new)
            truth.entries.push_back(TruthEntry{std::nullopt, d.new_column, ChangeKind::added});
    // mark_new entries follow new-schema order.
    const auto first_added = std::ranges::find(truth.entries, ChangeKind::added, &TruthEntry::change);
    std::stable_sort(
        first_added,
        truth.entries.end(),
        [&](const TruthEntry& a, const TruthEntry& b)
        {
            const auto& order = report_->new_columns;
            return std::ranges::find(order, *a.new_column) < std::ranges::find(order, *b.new_column);
        });

    std::ostringstream out;
    write_ground_truth(truth, out);
    for (const auto& base : report_->base_columns)
        if (!base_resolved(base))
            out << "# undecided base_column: " << base << '\n';
    for (const auto& name : report_->new_columns)
        if (!new_consumed(name))
            out << "# undecided new_column: " << name << '\n';
    return out.str();
}

nlohmann::json session_to_json(const Session& s)
{
    nlohmann::json decisions = nlohmann::json::array();
    for (const auto& d : s.decisions)
        decisions.push_back(decision_to_json(d));
    return {
        {"id", s.id},
        {"base_release", s.base_release},
        {"new_release", s.new_release},
        {"base_path", s.base_path},
        {"new_path", s.new_path},
        {"config", config_to_json(s.config)},
        {"initial", report_to_json(s.initial, true)},
        {"decisions", std::move(decisions)},
        {"created", s.created},
        {"updated", s.updated},
    };
}

Session session_from_json(const nlohmann::json& doc)
{
    try
    {
        Session s;
        s.id = doc.at("id").get<std::string>();
        s.base_release = doc.at("base_release").get<std::string>();
        s.new_release = doc.at("new_release").get<std::string>();
        s.base_path = doc.at("base_path").get<std::string>();
        s.new_path = doc.at("new_path").get<std::string>();
        s.config = config_from_json(doc.at("config"));
        s.initial = report_from_json(doc.at("initial"));
        for (const auto& d : doc.at("decisions"))
            s.decisions.push_back(decision_from_json(d));
        s.created = doc.at("created").get<std::string>();
        s.updated = doc.at("updated").get<std::string>();
        return s;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError(std::string("malformed session document: ") + e.what());
    }
}

ReviewService::ReviewService(std::filesystem::path store_dir) : dir_(std::move(store_dir))
{
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
        throw IoError("cannot use session store '" + dir_.string() + "'");
}

void ReviewService::persist(const Session& session) const
{
    const auto target = dir_ / (session.id + ".json");
    auto temporary = target;
    temporary += ".tmp";
    {
        std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write '" + temporary.string() + "'");
        out << dump_stable(session_to_json(session), 1) << '\n';
        out.flush();
        if (!out)
            throw IoError("failed writing '" + temporary.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(temporary, target, ec);
    if (ec)
        throw IoError("cannot move session document into place: " + ec.message());
}

std::shared_ptr<ReviewService::Entry> ReviewService::entry(const std::string& id)
{
    if (!valid_id(id))
        throw NotFoundError("unknown session '" + id + "'");
    std::lock_guard lock(entries_mutex_);
    if (const auto it = entries_.find(id); it != entries_.end())
        return it->second;

    const auto path = dir_ / (id + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw NotFoundError("unknown session '" + id + "'");
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError("corrupt session document '" + path.string() + "': " + e.what());
    }
    auto e = std::make_shared<Entry>();
    e->session = session_from_json(doc);
    e->state = std::make_unique<SessionState>(SessionState::replay(e->session.initial, e->session.decisions));
    entries_.emplace(id, e);
    return e;
}

Session ReviewService::create_session(const std::string& base_path, const std::string& new_path, const MatchConfig& config)
{
    config.validate();
    const auto base = load_table(base_path);
    const auto next = load_table(new_path);

    auto e = std::make_shared<Entry>();
    auto& s = e->session;
    s.base_path = base_path;
    s.new_path = new_path;
    s.config = config;
    s.initial = match_tables(base, next, config);
    s.base_release = s.initial.base_release;
    s.new_release = s.initial.new_release;
    s.created = now_utc();
    s.updated = s.created;
    e->state = std::make_unique<SessionState>(s.initial);

    std::lock_guard lock(entries_mutex_);
    do
        s.id = new_session_id();
    while (entries_.contains(s.id) || std::filesystem::exists(dir_ / (s.id + ".json")));
    persist(s);
    entries_.emplace(s.id, e);
    return s;
}

std::vector<SessionSummary> ReviewService::list_sessions()
{
    std::vector<std::string> ids;
    for (const auto& file : std::filesystem::directory_iterator(dir_))
    {
        const auto& path = file.path();
        if (path.extension() == ".json" && valid_id(path.stem().string()))
            ids.push_back(path.stem().string());
    }
    std::vector<std::pair<std::string, SessionSummary>> rows;
    for (const auto& id : ids)
    {
        const auto e = entry(id);
        std::shared_lock lock(e->mutex);
        rows.emplace_back(
            e->session.created,
            SessionSummary{id, e->session.base_release, e->session.new_release, e->state->decided(), e->state->total()});
    }
    std::ranges::sort(rows, [](const auto& a, const auto& b) { return std::tie(a.first, a.second.id) < std::tie(b.first, b.second.id); });
    std::vector<SessionSummary> out;
    for (auto& [created, summary] : rows)
        out.push_back(std::move(summary));
    return out;
}

nlohmann::ordered_json ReviewService::get_suggestions(const std::string& id, std::optional<int> k, bool histograms)
{
    const auto e = entry(id);
    std::shared_lock lock(e->mutex);
    return e->state->suggestions(k.value_or(e->session.config.top_k), histograms);
}

nlohmann::ordered_json ReviewService::record_decision(const std::string& id, const Decision& decision, std::optional<int> k)
{
    const auto e = entry(id);
    std::unique_lock lock(e->mutex);
    auto next = std::make_unique<SessionState>(*e->state);
    next->apply(decision);

    auto& session = e->session;
    const auto previous_update = session.updated;
    session.decisions.push_back(decision);
    session.updated = now_utc();
    try
    {
        persist(session);
    }
    catch (...)
    {
        session.decisions.pop_back();
        session.updated = previous_update;
        throw;
    }
    e->state = std::move(next);
    return e->state->suggestions(k.value_or(e->session.config.top_k));
}

std::string ReviewService::export_mapping(const std::string& id)
{
    const auto e = entry(id);
    std::shared_lock lock(e->mutex);
    return e->state->export_csv();
}

Session ReviewService::get_session(const std::string& id)
{
    const auto e = entry(id);
    std::shared_lock lock(e->mutex);
    return e->session;
}

}
