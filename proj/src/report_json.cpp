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
#include <colmatch/report_json.hpp>

#include <cmath>
#include <sstream>

#include <colmatch/error.hpp>

namespace colmatch
{
namespace
{

template <typename Json>
void write_value(const Json& value, std::string& out, int indent, int depth)
{
    const auto newline = [&](int level)
    {
        if (indent <= 0)
            return;
        out.push_back('\n');
        out.append(static_cast<std::size_t>(indent * level), ' ');
    };

    switch (value.type())
    {
        case nlohmann::detail::value_t::object:
        {
            if (value.empty())
            {
                out += "{}";
                return;
            }
            out.push_back('{');
            bool first = true;
            for (auto it = value.begin(); it != value.end(); ++it)
            {
                if (!first)
                    out.push_back(',');
                first = false;
                newline(depth + 1);
                out += Json(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                write_value(it.value(), out, indent, depth + 1);
            }
            newline(depth);
            out.push_back('}');
            return;
        }
        case nlohmann::detail::value_t::array:
        {
            if (value.empty())
            {
                out += "[]";
                return;
            }
            out.push_back('[');
            bool first = true;
            for (const auto& element : value)
            {
                if (!first)
                    out.push_back(',');
                first = false;
                newline(depth + 1);
                write_value(element, out, indent, depth + 1);
            }
            newline(depth);
            out.push_back(']');
            return;
        }
        case nlohmann::detail::value_t::number_float:
        {
            const double v = value.template get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += value.dump();
            return;
    }
}

template <typename T>
nlohmann::json optional_number(const std::optional<T>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> read_optional_number(const nlohmann::json& doc, const char* key)
{
    if (!doc.contains(key) || doc.at(key).is_null())
        return std::nullopt;
    return doc.at(key).get<double>();
}

std::optional<std::string> read_optional_string(const nlohmann::json& doc, const char* key)
{
    if (!doc.contains(key) || doc.at(key).is_null())
        return std::nullopt;
    return doc.at(key).get<std::string>();
}

}

std::string dump_stable(const nlohmann::json& doc, int indent)
{
    std::string out;
    write_value(doc, out, indent, 0);
    return out;
}

std::string dump_stable(const nlohmann::ordered_json& doc, int indent)
{
    std::string out;
    write_value(doc, out, indent, 0);
    return out;
}

nlohmann::json config_to_json(const MatchConfig& config)
{
    return {
        {"test", to_string(config.test)},
        {"p_thresh", config.p_thresh},
        {"bins", config.bins},
        {"outlier_factor", config.outlier_factor},
        {"top_k", config.top_k},
        {"base_order", to_string(config.base_order)},
    };
}

MatchConfig config_from_json(const nlohmann::json& doc, MatchConfig base)
{
    if (!doc.is_object())
        throw ValidationError("config must be a JSON object");
    try
    {
        for (const auto& [key, value] : doc.items())
        {
            if (key == "test")
                base.test = parse_test_kind(value.get<std::string>());
            else if (key == "p_thresh")
                base.p_thresh = value.get<double>();
            else if (key == "bins")
                base.bins = value.get<int>();
            else if (key == "outlier_factor")
                base.outlier_factor = value.get<double>();
            else if (key == "top_k")
                base.top_k = value.get<int>();
            else if (key == "base_order")
                base.base_order = parse_base_order(value.get<std::string>());
            else
                throw ValidationError("unknown config key '" + key + "'");
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError(std::string("bad config value: ") + e.what());
    }
    base.validate();
    return base;
}

nlohmann::json candidate_to_json(const CandidateScore& candidate, std::size_t rank, bool include_histogram)
{
    nlohmann::json doc{
        {"new", candidate.new_column},
        {"p_value", optional_number(candidate.p_value)},
        {"statistic", optional_number(candidate.statistic)},
        {"rank", rank},
    };
    if (include_histogram && candidate.histogram)
    {
        doc["histogram"] = {
            {"edges", candidate.histogram->edges},
            {"base", candidate.histogram->base_weights},
            {"new", candidate.histogram->new_weights},
        };
    }
    return doc;
}

nlohmann::json report_to_json(const MatchReport& report, bool include_histograms)
{
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : report.pairs)
    {
        nlohmann::json entry{
            {"base", p.base_column ? nlohmann::json(*p.base_column) : nlohmann::json(nullptr)},
            {"new", p.new_column ? nlohmann::json(*p.new_column) : nlohmann::json(nullptr)},
            {"p_value", optional_number(p.p_value)},
            {"statistic", optional_number(p.statistic)},
        };
        if (p.below_threshold)
            entry["below_threshold"] = true;
        pairs.push_back(std::move(entry));
    }

    nlohmann::json candidates = nlohmann::json::object();
    for (const auto& [base, ranked] : report.candidates)
    {
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t i = 0; i < ranked.size(); ++i)
            list.push_back(candidate_to_json(ranked[i], i + 1, include_histograms));
        candidates[base] = std::move(list);
    }

    const auto counts = classify_changes(report);
    nlohmann::json base_labels = nlohmann::json::object();
    nlohmann::json new_labels = nlohmann::json::object();
    for (const auto& [name, label] : report.base_labels)
        base_labels[name] = to_string(label);
    for (const auto& [name, label] : report.new_labels)
        new_labels[name] = to_string(label);

    return {
        {"config", config_to_json(report.config)},
        {"releases", {{"base", report.base_release}, {"new", report.new_release}}},
        {"columns", {{"base", report.base_columns}, {"new", report.new_columns}}},
        {"pairs", std::move(pairs)},
        {"candidates", std::move(candidates)},
        {"classification",
         {{"changed", counts.changed},
          {"added", counts.added},
          {"removed", counts.removed},
          {"base", std::move(base_labels)},
          {"new", std::move(new_labels)}}},
        {"unscored", {{"base", report.unscored_base}, {"new", report.unscored_new}}},
    };
}

MatchReport report_from_json(const nlohmann::json& doc)
{
    try
    {
        MatchReport report;
        report.config = config_from_json(doc.at("config"));
        report.base_release = doc.at("releases").at("base").get<std::string>();
        report.new_release = doc.at("releases").at("new").get<std::string>();
        report.base_columns = doc.at("columns").at("base").get<std::vector<std::string>>();
        report.new_columns = doc.at("columns").at("new").get<std::vector<std::string>>();
        for (const auto& p : doc.at("pairs"))
        {
            MatchPair pair;
            pair.base_column = read_optional_string(p, "base");
            pair.new_column = read_optional_string(p, "new");
            pair.p_value = read_optional_number(p, "p_value");
            pair.statistic = read_optional_number(p, "statistic");
            pair.below_threshold = p.value("below_threshold", false);
            report.pairs.push_back(std::move(pair));
        }
        for (const auto& [base, list] : doc.at("candidates").items())
        {
            auto& ranked = report.candidates[base];
            for (const auto& c : list)
            {
                CandidateScore score;
                score.base_column = base;
                score.new_column = c.at("new").get<std::string>();
                score.test = report.config.test;
                score.p_value = read_optional_number(c, "p_value");
                score.statistic = read_optional_number(c, "statistic");
                score.comparable = score.p_value.has_value();
                if (c.contains("histogram"))
                {
                    const auto& h = c.at("histogram");
                    score.histogram = PairHistogram{
                        h.at("edges").get<std::vector<double>>(),
                        h.at("base").get<std::vector<double>>(),
                        h.at("new").get<std::vector<double>>()};
                }
                ranked.push_back(std::move(score));
            }
        }
        for (const auto& [name, label] : doc.at("classification").at("base").items())
            report.base_labels[name] = parse_column_label(label.get<std::string>());
        for (const auto& [name, label] : doc.at("classification").at("new").items())
            report.new_labels[name] = parse_column_label(label.get<std::string>());
        report.unscored_base = doc.at("unscored").at("base").get<std::vector<std::string>>();
        report.unscored_new = doc.at("unscored").at("new").get<std::vector<std::string>>();
        check_injective(report);
        return report;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
}

std::string render_report_text(const MatchReport& report)
{
    std::ostringstream out;
    const auto counts = classify_changes(report);
    out << "Releases: " << (report.base_release.empty() ? "?" : report.base_release) << " -> "
        << (report.new_release.empty() ? "?" : report.new_release) << '\n';
    out << "Test: " << to_string(report.config.test) << "  p_thresh: " << report.config.p_thresh
        << "  bins: " << report.config.bins << '\n';
    out << "Changes: " << format_changes(counts) << "\n\n";

    out << "Pairs:\n";
    for (const auto& p : report.pairs)
    {
        out << "  " << p.base_column.value_or("NULL") << " -> " << p.new_column.value_or("NULL");
        if (p.p_value)
            out << "  (p=" << format_double(*p.p_value) << ", stat=" << format_double(*p.statistic) << ')';
        else if (p.base_column)
            out << "  [no_data, below threshold]";
        else
            out << "  [new]";
        out << '\n';
    }

    out << "\nTop-" << report.config.top_k << " candidates:\n";
    for (const auto& base : report.base_columns)
    {
        out << "  " << base << ':';
        const auto& ranked = report.candidates.at(base);
        const auto shown = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(report.config.top_k));
        for (std::size_t i = 0; i < shown; ++i)
        {
            const auto& c = ranked[i];
            out << "  " << (i + 1) << ". " << c.new_column;
            if (c.p_value)
                out << " (p=" << format_double(*c.p_value) << ')';
            else
                out << " (incomparable)";
        }
        out << '\n';
    }
    if (!report.unscored_base.empty() || !report.unscored_new.empty())
    {
        out << "\nUnscored (non-numeric):";
        for (const auto& n : report.unscored_base)
            out << " base:" << n;
        for (const auto& n : report.unscored_new)
            out << " new:" << n;
        out << '\n';
    }
    return out.str();
}

}
