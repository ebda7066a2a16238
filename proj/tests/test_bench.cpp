#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hsmdp/bench.hpp"
#include "hsmdp/config.hpp"

using namespace hsmdp;
using namespace hsmdp::bench;

namespace {

bool same_list(const ToDoList& a, const ToDoList& b) {
    if (a.goals.size() != b.goals.size()) return false;
    for (std::size_t g = 0; g < a.goals.size(); ++g) {
        const Goal &x = a.goals[g], &y = b.goals[g];
        if (x.value != y.value || x.deadline_minutes != y.deadline_minutes || x.tasks.size() != y.tasks.size())
            return false;
        for (std::size_t i = 0; i < x.tasks.size(); ++i)
            if (x.tasks[i].est_minutes != y.tasks[i].est_minutes ||
                x.tasks[i].deadline_minutes != y.tasks[i].deadline_minutes || x.tasks[i].id != y.tasks[i].id)
                return false;
    }
    return true;
}

} // namespace

TEST_CASE("generator is deterministic and centred on fifteen minutes") {
    const GridPoint p{8, 5, 150, 1};
    CHECK(same_list(generate_instance(p, 1), generate_instance(p, 1)));
    CHECK_FALSE(same_list(generate_instance(p, 1), generate_instance(p, 2)));

    const ToDoList big = generate_instance({8, 10, 1000, 1}, 3);
    double sum = 0.0;
    int n = 0;
    for (const auto& g : big.goals)
        for (const auto& t : g.tasks) {
            sum += t.est_minutes;
            ++n;
            CHECK(t.est_minutes >= 5);
            CHECK(t.est_minutes <= 25);
        }
    CHECK(n == 10000);
    CHECK(std::abs(sum / n - 15.0) <= 0.5);

    // generated lists pass the default validation ranges
    Config c;
    for (const auto& g : generate_instance(p, 4).goals) {
        CHECK(c.value_range.contains(g.value));
        CHECK(c.avg_value_range.contains(g.value / g.total_estimate()));
        REQUIRE(g.deadline_minutes);
        CHECK(*g.deadline_minutes % (8 * 60) == 0);
    }
}

TEST_CASE("daily slots") {
    CHECK(daily_task_slots(8) == 32);
    CHECK(daily_task_slots(12) == 48);
    CHECK(daily_task_slots(16) == 64);
}

TEST_CASE("grid rows and reliability") {
    std::ostringstream empty;
    write_grid_csv(empty, run_grid({{8, 2, 10, 1}}, 0, std::chrono::seconds(1)));
    CHECK(empty.str() == "daily_hours,goals,tasks_per_goal,n_durations,repeat,seed,runtime_s,timed_out\n");

    const auto rows = run_grid({{8, 5, 150, 1}, {8, 6, 10, 2}}, 2, std::chrono::seconds(28));
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.runtime_s >= 0.0);
        CHECK_FALSE(r.timed_out);
        CHECK(r.runtime_s < 28.0);
    }

    const auto tiny = run_grid({{8, 3, 250, 2}}, 2, std::chrono::milliseconds(50));
    for (const auto& r : tiny) {
        CHECK(r.timed_out);
        CHECK(r.runtime_s >= 0.05);
    }

    std::vector<GridRow> mixed = rows;
    mixed.insert(mixed.end(), tiny.begin(), tiny.end());
    const auto summary = summarize(mixed);
    REQUIRE(summary.size() == 3);
    for (const auto& s : summary) {
        CHECK(s.reliability >= 0.0);
        CHECK(s.reliability <= 1.0);
        CHECK(s.reliability == 1.0 - static_cast<double>(s.timeouts) / s.runs);
    }
    CHECK(summary[2].reliability == 0.0);

    std::stringstream csv;
    write_grid_csv(csv, mixed);
    const auto back = read_grid_csv(csv);
    REQUIRE(back.size() == mixed.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].point == mixed[i].point);
        CHECK(back[i].seed == mixed[i].seed);
        CHECK(back[i].timed_out == mixed[i].timed_out);
        CHECK(back[i].runtime_s == doctest::Approx(mixed[i].runtime_s).epsilon(1e-6));
    }
    CHECK(grid_svg(back).find("<svg") == 0);
    CHECK(default_grid().size() == 2 * 3 * 10 * 11);
}

TEST_CASE("solvers agree on small instances") {
    CompareOptions o;
    o.repeats = 3;
    const auto rows = compare_solvers({4, 8, 12}, o);
    REQUIRE(rows.size() == 3 * 3 * 3);
    for (std::size_t i = 0; i < rows.size(); i += 3) {
        CHECK(rows[i].solver == "HIER");
        CHECK(rows[i + 1].solver == "BI");
        CHECK(rows[i + 2].solver == "VI");
        CHECK(std::abs(rows[i].value - rows[i + 1].value) < 1e-6);
        CHECK(std::abs(rows[i + 2].value - rows[i + 1].value) < 1e-6);
    }

    std::stringstream csv;
    write_compare_csv(csv, rows);
    const auto back = read_compare_csv(csv);
    REQUIRE(back.size() == rows.size());
    CHECK(back[4].value == rows[4].value);
    CHECK(back[4].solver == rows[4].solver);
    const std::string svg = compare_svg(back);
    CHECK(svg.find("HIER") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);

    o.max_vi_tasks = 4;
    o.repeats = 1;
    CHECK(compare_solvers({8}, o).size() == 2);
}

TEST_CASE("median") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(std::isnan(median({})));
}
