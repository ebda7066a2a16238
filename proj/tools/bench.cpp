#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hsmdp/bench.hpp"

namespace bench = hsmdp::bench;

namespace {

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Speed and reliability benchmarks"};
    app.require_subcommand(1);

    auto* grid = app.add_subcommand("grid", "runtime and timeouts over goals x tasks x hours x durations");
    int repeats = 3;
    double budget = 28.0;
    std::uint64_t seed = 1;
    std::string out = "-";
    std::vector<int> hours = {8, 12, 16}, goals, tasks, durations = {1, 2};
    grid->add_option("-r,--repeats", repeats)->check(CLI::NonNegativeNumber);
    grid->add_option("--budget", budget, "seconds per solve")->check(CLI::PositiveNumber);
    grid->add_option("--seed", seed);
    grid->add_option("--hours", hours);
    grid->add_option("--goals", goals, "default 1..10");
    grid->add_option("--tasks", tasks, "tasks per goal, default 10,25,50..250");
    grid->add_option("-b,--durations", durations);
    grid->add_option("-o,--out", out);

    auto* compare = app.add_subcommand("compare", "hierarchical solver against backward induction and value iteration");
    bench::CompareOptions co;
    std::vector<int> counts = {2, 4, 6, 8, 10, 12, 14, 16};
    double cbudget = 28.0;
    compare->add_option("-n,--tasks", counts);
    compare->add_option("-r,--repeats", co.repeats)->check(CLI::NonNegativeNumber);
    compare->add_option("--budget", cbudget)->check(CLI::PositiveNumber);
    compare->add_option("--max-bi", co.max_bi_tasks)->check(CLI::Range(0, 20));
    compare->add_option("--max-vi", co.max_vi_tasks)->check(CLI::Range(0, 20));
    compare->add_option("--seed", co.seed);
    compare->add_option("-o,--out", out);

    auto* plot = app.add_subcommand("plot", "render a grid or compare CSV as SVG");
    std::string csv, kind = "compare";
    plot->add_option("csv", csv)->required()->check(CLI::ExistingFile);
    plot->add_option("-k,--kind", kind)->check(CLI::IsMember({"grid", "compare"}));
    plot->add_option("-o,--out", out);

    CLI11_PARSE(app, argc, argv);

    try {
        std::ofstream file;
        if (*grid) {
            if (goals.empty())
                for (int g = 1; g <= 10; ++g) goals.push_back(g);
            if (tasks.empty()) tasks = {10, 25, 50, 75, 100, 125, 150, 175, 200, 225, 250};
            std::vector<bench::GridPoint> points;
            for (int b : durations)
                for (int h : hours)
                    for (int g : goals)
                        for (int n : tasks) points.push_back({h, g, n, b});
            const auto rows = bench::run_grid(points, repeats, std::chrono::duration<double>(budget), seed);
            bench::write_grid_csv(open_out(out, file), rows);
            for (const auto& s : bench::summarize(rows))
                std::cerr << s.point.daily_hours << "h b=" << s.point.n_durations << ' ' << s.point.goals << 'x'
                          << s.point.tasks_per_goal << ": reliability " << s.reliability << ", median "
                          << s.median_runtime_s << " s\n";
        } else if (*compare) {
            co.budget = std::chrono::duration<double>(cbudget);
            bench::write_compare_csv(open_out(out, file), bench::compare_solvers(counts, co));
        } else {
            std::ifstream in(csv);
            std::ostream& o = open_out(out, file);
            if (kind == "grid")
                o << bench::grid_svg(bench::read_grid_csv(in));
            else
                o << bench::compare_svg(bench::read_compare_csv(in));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
