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
#include <colmatch/cli.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <colmatch/error.hpp>
#include <colmatch/evalbench.hpp>
#include <colmatch/ingest.hpp>
#include <colmatch/report_json.hpp>
#include <colmatch/review_http.hpp>

namespace colmatch
{
namespace
{

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw IoError("cannot write '" + path + "'");
    file << text;
    if (!file)
        throw IoError("failed writing '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw IoError("cannot open '" + path + "'");
    try
    {
        return nlohmann::json::parse(file);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::vector<TestKind> parse_test_list(const std::string& text)
{
    std::vector<TestKind> tests;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        tests.push_back(parse_test_kind(item));
    if (tests.empty())
        throw ValidationError("--tests needs at least one test");
    return tests;
}

struct Options
{
    std::string base, next, out, test = "ks";
    double p_thresh = 0.9;
    int bins = 10;
    int top_k = 3;
    std::string data_dir, gt_dir, mode = "yearly", tests = "ks,ad,welch,f", format = "text";
    std::string spec;
    std::uint64_t seed = 0;
    std::string in;
    int port = 8080;
    std::string host = "127.0.0.1";
    std::string store, ui_dir;
};

MatchConfig match_config(const Options& o)
{
    MatchConfig config;
    config.test = parse_test_kind(o.test);
    config.p_thresh = o.p_thresh;
    config.bins = o.bins;
    config.top_k = o.top_k;
    config.validate();
    return config;
}

int cmd_match(const Options& o, std::ostream& out)
{
    const auto config = match_config(o);
    const auto base = load_table(o.base);
    const auto next = load_table(o.next);
    const auto report = match_tables(base, next, config);
    const auto text = dump_stable(report_to_json(report), 2) + "\n";
    if (o.out.empty())
        out << text;
    else
        write_text_file(o.out, text);
    return exit_ok;
}

int cmd_eval(const Options& o, std::ostream& out)
{
    EvalConfig config;
    config.match = match_config(o);
    config.tests = parse_test_list(o.tests);
    const auto lineage = load_lineage(o.data_dir, o.gt_dir);
    const auto rows = o.mode == "accumulated" ? run_accumulated(lineage.releases, lineage.truths, config)
                                              : run_year_by_year(lineage.releases, lineage.truths, config);
    if (o.format == "json")
    {
        out << dump_stable(eval_to_json(rows, config), 2) << '\n';
        return exit_ok;
    }
    out << "Top-1 accuracy (" << o.mode << ")\n" << render_eval_table(rows, config, false) << '\n';
    out << "Top-" << config.match.top_k << " accuracy (" << o.mode << ")\n" << render_eval_table(rows, config, true);
    return exit_ok;
}

int cmd_gen(const Options& o, std::ostream& out, bool seed_given)
{
    auto spec = synthetic_spec_from_json(read_json_file(o.spec));
    if (seed_given)
        spec.seed = o.seed;
    const auto data = generate_synthetic(spec);
    write_synthetic(data, o.out);
    out << "wrote " << data.releases.size() << " releases and " << data.truths.size() << " ground-truth files to "
        << o.out << '\n';
    return exit_ok;
}

int cmd_report(const Options& o, std::ostream& out)
{
    const auto report = report_from_json(read_json_file(o.in));
    if (o.format == "json")
        out << dump_stable(report_to_json(report), 2) << '\n';
    else
        out << render_report_text(report);
    return exit_ok;
}

int cmd_serve(const Options& o, std::ostream& out)
{
    std::string store = o.store;
    if (store.empty())
    {
        if (const char* env = std::getenv(store_env_var))
            store = env;
    }
    if (store.empty())
        throw ValidationError(std::string("--store is required (or set ") + store_env_var + ")");
    review::ReviewService service(store);
    std::optional<std::filesystem::path> ui;
    if (!o.ui_dir.empty())
        ui = o.ui_dir;
    review::ReviewServer server(service, ui);
    const int port = server.bind(o.host, o.port);
    if (port < 0)
        throw IoError("cannot bind " + o.host + ":" + std::to_string(o.port));
    out << "serving on http://" << o.host << ':' << port << " (store " << store << ")" << std::endl;
    return server.listen_after_bind() ? exit_ok : exit_io;
}

}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Column matching across dataset releases via goodness-of-fit tests", "colmatch"};
    app.require_subcommand(1, 1);

    const auto add_match_flags = [&](CLI::App* sub)
    {
        sub->add_option("--test", o.test, "Test used for ranking")->check(CLI::IsMember({"ks", "ad", "welch", "f"}))->capture_default_str();
        sub->add_option("--p-thresh", o.p_thresh, "Minimum p-value for a match")->capture_default_str();
        sub->add_option("--bins", o.bins, "Histogram bins")->capture_default_str();
        sub->add_option("--top-k", o.top_k, "Candidates kept per base column")->capture_default_str();
    };

    auto* match = app.add_subcommand("match", "Match the columns of two releases");
    match->add_option("--base", o.base, "Base release CSV")->required();
    match->add_option("--new", o.next, "New release CSV")->required();
    add_match_flags(match);
    match->add_option("--out", o.out, "Write the JSON report here instead of stdout");

    auto* eval = app.add_subcommand("eval", "Evaluate Top-1/Top-k accuracy over a release lineage");
    eval->add_option("--data-dir", o.data_dir, "Directory of release CSVs")->required();
    eval->add_option("--gt-dir", o.gt_dir, "Directory of ground-truth CSVs")->required();
    eval->add_option("--mode", o.mode, "Matching mode")->check(CLI::IsMember({"yearly", "accumulated"}))->capture_default_str();
    eval->add_option("--tests", o.tests, "Comma-separated tests")->capture_default_str();
    eval->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    add_match_flags(eval);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic release lineage");
    gen->add_option("--spec", o.spec, "Generator spec (JSON)")->required();
    auto* seed_opt = gen->add_option("--seed", o.seed, "RNG seed (overrides the spec)");
    gen->add_option("--out", o.out, "Output directory")->required();

    auto* serve = app.add_subcommand("serve", "Run the review service");
    serve->add_option("--port", o.port, "TCP port (0 picks a free one)")->capture_default_str();
    serve->add_option("--host", o.host, "Bind address")->capture_default_str();
    serve->add_option("--store", o.store, std::string("Session directory (default $") + store_env_var + ")");
    serve->add_option("--ui-dir", o.ui_dir, "Static UI bundle to serve at /");

    auto* report = app.add_subcommand("report", "Render a saved match report");
    report->add_option("--in", o.in, "Report JSON")->required();
    report->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp& e)
    {
        // Top-level help lists every subcommand together with its flags.
        if (app.get_subcommands().empty())
        {
            out << app.help("", CLI::AppFormatMode::All);
            return exit_ok;
        }
        app.exit(e, out, err);
        return exit_ok;
    }
    catch (const CLI::Success& e)
    {
        app.exit(e, out, err);
        return exit_ok;
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e, out, err);
        return exit_validation;
    }

    try
    {
        if (*match)
            return cmd_match(o, out);
        if (*eval)
            return cmd_eval(o, out);
        if (*gen)
            return cmd_gen(o, out, seed_opt->count() > 0);
        if (*report)
            return cmd_report(o, out);
        if (*serve)
            return cmd_serve(o, out);
    }
    catch (const IoError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_io;
    }
    catch (const ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    return exit_validation;
}

}
