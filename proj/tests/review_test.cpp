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
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <colmatch/error.hpp>
#include <colmatch/evalbench.hpp>
#include <colmatch/review.hpp>

#include "support.hpp"

namespace colmatch::review
{
namespace
{

Decision accept(const std::string& base, const std::string& next) { return {base, next, Action::accept}; }
Decision removed(const std::string& base) { return {base, std::nullopt, Action::mark_removed}; }
Decision added(const std::string& next) { return {std::nullopt, next, Action::mark_new}; }
Decision undo() { return {std::nullopt, std::nullopt, Action::undo}; }

class ReviewTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir_ = colmatch::testing::scratch_dir("review");
        colmatch::testing::write_review_pair(dir_);
        config_.top_k = 2;
        report_ = match_tables(load_table(dir_ / "2018.csv"), load_table(dir_ / "2019.csv"), config_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::filesystem::path dir_;
    MatchConfig config_;
    MatchReport report_;
};

TEST_F(ReviewTest, FreshSuggestionsAreTheMatcherTopK)
{
    const SessionState state(report_);
    const auto s = state.suggestions(2);
    ASSERT_EQ(s.size(), 3u);
    std::vector<std::string> keys;
    for (const auto& [key, value] : s.items())
        keys.push_back(key);
    EXPECT_EQ(keys, (std::vector<std::string>{"num_salas", "idade", "nota"}));
    for (const auto& base : report_.base_columns)
    {
        const auto& ranked = report_.candidates.at(base);
        ASSERT_EQ(s[base].size(), 2u);
        for (std::size_t i = 0; i < 2; ++i)
        {
            EXPECT_EQ(s[base][i]["new_column"], ranked[i].new_column);
            EXPECT_EQ(s[base][i]["rank"], i + 1);
            EXPECT_DOUBLE_EQ(s[base][i]["p_value"].get<double>(), *ranked[i].p_value);
        }
    }
    EXPECT_EQ(s["num_salas"][0]["new_column"], "qt_salas");
    EXPECT_FALSE(s["idade"][0].contains("histogram"));
    EXPECT_TRUE(state.suggestions(1, true)["idade"][0].contains("histogram"));
}

TEST_F(ReviewTest, AcceptingConsumesTheNewColumnEverywhere)
{
    SessionState state(report_);
    state.apply(accept("num_salas", "qt_salas"));
    const auto s = state.suggestions(4);
    EXPECT_FALSE(s.contains("num_salas"));
    for (const auto& [base, list] : s.items())
    {
        ASSERT_EQ(list.size(), 3u) << base;
        for (std::size_t i = 0; i < list.size(); ++i)
        {
            EXPECT_NE(list[i]["new_column"], "qt_salas");
            EXPECT_EQ(list[i]["rank"], i + 1);
        }
    }
    EXPECT_EQ(state.decided(), 2u);
    EXPECT_EQ(state.total(), 7u);
}

TEST_F(ReviewTest, LargeKReturnsWholePool)
{
    const SessionState state(report_);
    EXPECT_EQ(state.suggestions(50)["nota"].size(), 4u);
    EXPECT_THROW(state.suggestions(0), ValidationError);
}

TEST_F(ReviewTest, UndoRestoresPreviousState)
{
    const SessionState fresh(report_);
    SessionState state(report_);
    state.apply(accept("num_salas", "qt_salas"));
    state.apply(undo());
    EXPECT_EQ(state.suggestions(3), fresh.suggestions(3));
    EXPECT_EQ(state.export_csv(), fresh.export_csv());
    EXPECT_TRUE(state.effective().empty());

    state.apply(removed("nota"));
    state.apply(added("qtde_tablet"));
    state.apply(undo());
    EXPECT_TRUE(state.base_resolved("nota"));
    EXPECT_FALSE(state.new_consumed("qtde_tablet"));
}

TEST_F(ReviewTest, MarkRemovedDropsTheBaseOnly)
{
    SessionState state(report_);
    state.apply(removed("nota"));
    const auto s = state.suggestions(4);
    EXPECT_FALSE(s.contains("nota"));
    EXPECT_EQ(s["idade"].size(), 4u);
    EXPECT_FALSE(state.new_consumed("nota"));
}

TEST_F(ReviewTest, InvalidDecisions)
{
    SessionState state(report_);
    EXPECT_THROW(state.apply(accept("ghost", "qt_salas")), ValidationError);
    EXPECT_THROW(state.apply(accept("num_salas", "ghost")), ValidationError);
    EXPECT_THROW(state.apply(Decision{"num_salas", std::nullopt, Action::accept}), ValidationError);
    EXPECT_THROW(state.apply(Decision{"num_salas", "qt_salas", Action::undo}), ValidationError);
    EXPECT_THROW(state.apply(undo()), ConflictError);
    state.apply(accept("num_salas", "qt_salas"));
    EXPECT_THROW(state.apply(accept("idade", "qt_salas")), ConflictError);
    EXPECT_THROW(state.apply(removed("num_salas")), ConflictError);
    EXPECT_THROW(state.apply(added("qt_salas")), ConflictError);
    EXPECT_EQ(state.effective().size(), 1u);
}

TEST_F(ReviewTest, ReplayEqualsIncrementalApplication)
{
    const std::vector<Decision> log{accept("idade", "idade"), removed("nota"), undo(), accept("nota", "nota"), added("qtde_tablet")};
    SessionState state(report_);
    for (const auto& d : log)
        state.apply(d);
    const auto replayed = SessionState::replay(report_, log);
    EXPECT_EQ(replayed.effective(), state.effective());
    EXPECT_EQ(replayed.export_csv(), state.export_csv());
}

TEST_F(ReviewTest, ExportFormats)
{
    SessionState state(report_);
    const auto empty = state.export_csv();
    EXPECT_EQ(
        empty,
        "base_column,new_column,change\n"
        "# undecided base_column: num_salas\n# undecided base_column: idade\n# undecided base_column: nota\n"
        "# undecided new_column: qt_salas\n# undecided new_column: idade\n# undecided new_column: nota\n"
        "# undecided new_column: qtde_tablet\n");

    state.apply(accept("num_salas", "qt_salas"));
    EXPECT_NE(state.export_csv().find("num_salas,qt_salas,renamed\n"), std::string::npos);

    state.apply(accept("nota", "nota"));
    state.apply(removed("idade"));
    state.apply(added("idade"));
    state.apply(added("qtde_tablet"));
    const auto csv = state.export_csv();
    EXPECT_EQ(csv.find('#'), std::string::npos) << csv;
    const auto gt = parse_ground_truth(csv);
    EXPECT_EQ(gt.counts(), (ChangeCounts{1, 2, 1}));
    EXPECT_EQ(gt.entries.front(), (TruthEntry{"num_salas", "qt_salas", ChangeKind::renamed}));
    EXPECT_EQ(*gt.for_base("nota"), (TruthEntry{"nota", "nota", ChangeKind::same}));
}

TEST(DecisionJson, RoundTripAndShape)
{
    for (const auto& d : {accept("a", "b"), removed("a"), added("b"), undo()})
        EXPECT_EQ(decision_from_json(decision_to_json(d)), d);
    EXPECT_THROW(decision_from_json(nlohmann::json{{"action", "merge"}}), ValidationError);
    EXPECT_THROW(decision_from_json(nlohmann::json{{"base_column", "a"}}), ValidationError);
    EXPECT_THROW(decision_from_json(nlohmann::json{{"action", "mark_removed"}, {"base_column", 3}}), ValidationError);
    EXPECT_EQ(parse_action("mark_new"), Action::mark_new);
    EXPECT_EQ(to_string(Action::mark_removed), "mark_removed");
}

TEST_F(ReviewTest, ServiceSessionsPersistAndReload)
{
    const auto store = dir_ / "store";
    std::string id;
    {
        ReviewService service(store);
        const auto a = service.create_session((dir_ / "2018.csv").string(), (dir_ / "2019.csv").string(), config_);
        const auto b = service.create_session((dir_ / "2018.csv").string(), (dir_ / "2019.csv").string(), config_);
        EXPECT_NE(a.id, b.id);
        EXPECT_EQ(a.id.size(), 32u);
        EXPECT_EQ(a.initial, report_);
        EXPECT_EQ(a.base_release, "2018");
        id = a.id;
        EXPECT_EQ(service.get_suggestions(id), SessionState(report_).suggestions(2));
        const auto after = service.record_decision(id, accept("num_salas", "qt_salas"));
        EXPECT_FALSE(after.contains("num_salas"));
        EXPECT_THROW(service.record_decision(id, accept("idade", "qt_salas")), ConflictError);
        EXPECT_EQ(service.get_session(id).decisions.size(), 1u);
        EXPECT_TRUE(std::filesystem::exists(store / (id + ".json")));
        EXPECT_FALSE(std::filesystem::exists(store / (id + ".json.tmp")));
    }
    ReviewService reloaded(store);
    const auto list = reloaded.list_sessions();
    ASSERT_EQ(list.size(), 2u);
    const auto session = reloaded.get_session(id);
    EXPECT_EQ(session.decisions, std::vector<Decision>{accept("num_salas", "qt_salas")});
    EXPECT_NE(reloaded.export_mapping(id).find("num_salas,qt_salas,renamed"), std::string::npos);
    for (const auto& row : list)
        if (row.id == id)
            EXPECT_EQ(row.decided, 2u);
    EXPECT_EQ(list[0].total, 7u);
}

TEST_F(ReviewTest, ServiceErrors)
{
    ReviewService service(dir_ / "store");
    EXPECT_THROW(service.get_suggestions("0123456789abcdef0123456789abcdef"), NotFoundError);
    EXPECT_THROW(service.export_mapping("../etc"), NotFoundError);
    EXPECT_THROW(service.create_session((dir_ / "missing.csv").string(), (dir_ / "2019.csv").string(), config_), IoError);
    {
        std::ofstream out(dir_ / "bad.csv");
        out << "a,b\n1,2\n3\n";
    }
    try
    {
        service.create_session((dir_ / "bad.csv").string(), (dir_ / "2019.csv").string(), config_);
        FAIL();
    }
    catch (const ParseError& e)
    {
        EXPECT_EQ(e.row(), 2u);
    }
    EXPECT_TRUE(service.list_sessions().empty());
}

}
}
