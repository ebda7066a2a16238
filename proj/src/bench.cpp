#include "hsmdp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "hsmdp/budget.hpp"
#include "hsmdp/errors.hpp"
#include "hsmdp/flat.hpp"
#include "hsmdp/gamify.hpp"
#include "hsmdp/hsolver.hpp"

namespace hsmdp::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

// Per-row seeds stay stable when the grid is reordered or extended.
std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
    for (auto p : parts) {
        h ^= p + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xbf58476d1ce4e5b9ull;
    }
    return h;
}

void fill_goals(ToDoList& list, std::mt19937_64& rng, int daily_hours) {
    std::uniform_real_distribution<double> per_minute(1.0, 5.0);
    int total = 0;
    for (const auto& g : list.goals) total += g.total_estimate();
    const Minutes day = static_cast<Minutes>(daily_hours) * 60;
    const Minutes work_days = std::max<Minutes>(1, (total * 139 / 100 + day - 1) / day);
    std::uniform_int_distribution<Minutes> deadline_day(1, 2 * work_days);
    std::uniform_real_distribution<double> frac(0.5, 1.0);
    std::bernoulli_distribution own_deadline(0.25);
    for (auto& g : list.goals) {
        g.value = std::clamp(std::round(g.total_estimate() * per_minute(rng)), 1.0, 1e5);
        g.deadline_minutes = deadline_day(rng) * day;
        for (auto& t : g.tasks)
            if (own_deadline(rng))
                t.deadline_minutes = static_cast<Minutes>(std::llround(frac(rng) * *g.deadline_minutes));
    }
}

Task make_task(const std::string& id, int est) {
    Task t;
    t.id = id;
    t.title = id;
    t.est_minutes = est;
    return t;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

} // namespace

int daily_task_slots(int daily_hours) { return daily_hours * 60 / kMeanTaskMinutes; }

ToDoList generate_instance(const GridPoint& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> est(5, 25);
    ToDoList list;
    for (int g = 0; g < p.goals; ++g) {
        Goal goal;
        goal.id = "G" + std::to_string(g);
        goal.title = goal.id;
        for (int t = 0; t < p.tasks_per_goal; ++t)
            goal.tasks.push_back(make_task(goal.id + "T" + std::to_string(t), est(rng)));
        list.goals.push_back(std::move(goal));
    }
    fill_goals(list, rng, p.daily_hours);
    return list;
}

ToDoList generate_flat_instance(int tasks, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> est(5, 25);
    ToDoList list;
    const int goals = std::max(1, (tasks + 7) / 8);
    list.goals.resize(static_cast<std::size_t>(goals));
    for (int g = 0; g < goals; ++g) list.goals[g].id = list.goals[g].title = "G" + std::to_string(g);
    for (int t = 0; t < tasks; ++t) {
        Goal& goal = list.goals[static_cast<std::size_t>(t % goals)];
        goal.tasks.push_back(make_task(goal.id + "T" + std::to_string(goal.tasks.size()), est(rng)));
    }
    fill_goals(list, rng, 8);
    return list;
}

std::vector<GridPoint> default_grid() {
    std::vector<GridPoint> grid;
    const int tasks[] = {10, 25, 50, 75, 100, 125, 150, 175, 200, 225, 250};
    for (int b : {1, 2})
        for (int hours : {8, 12, 16})
            for (int goals = 1; goals <= 10; ++goals)
                for (int n : tasks) grid.push_back({hours, goals, n, b});
    return grid;
}

std::vector<GridRow> run_grid(const std::vector<GridPoint>& grid, int repeats,
                              std::chrono::duration<double> budget, std::uint64_t seed) {
    if (!(budget.count() > 0.0)) throw ConfigError("benchmark budget must be positive");
    std::vector<GridRow> rows;
    for (const GridPoint& p : grid) {
        for (int r = 0; r < repeats; ++r) {
            GridRow row;
            row.point = p;
            row.repeat = r;
            row.seed = mix_seed(seed, {static_cast<std::uint64_t>(p.daily_hours),
                                       static_cast<std::uint64_t>(p.goals),
                                       static_cast<std::uint64_t>(p.tasks_per_goal),
                                       static_cast<std::uint64_t>(p.n_durations),
                                       static_cast<std::uint64_t>(r)});
            const ToDoList list = generate_instance(p, row.seed);
            Config cfg;
            cfg.n_durations = p.n_durations;
            const auto start = Clock::now();
            SolveBudget limit(budget);
            try {
                SolverOptions so;
                so.budget = &limit;
                so.record_task_states = false;
                const Incentives inc = incentivize(list, 0, cfg, so);
                schedule_today(inc, list, static_cast<Minutes>(p.daily_hours) * 60, cfg);
                limit.check();
            } catch (const TimeoutError&) {
                row.timed_out = true;
            }
            row.runtime_s = seconds_since(start);
            if (row.timed_out) row.runtime_s = std::max(row.runtime_s, budget.count());
            rows.push_back(row);
        }
    }
    return rows;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<PointSummary> summarize(const std::vector<GridRow>& rows) {
    std::vector<PointSummary> out;
    std::vector<std::vector<double>> times;
    for (const auto& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const PointSummary& s) { return s.point == row.point; });
        if (it == out.end()) {
            out.push_back({row.point});
            times.emplace_back();
            it = out.end() - 1;
        }
        ++it->runs;
        it->timeouts += row.timed_out;
        times[static_cast<std::size_t>(it - out.begin())].push_back(row.runtime_s);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].reliability = 1.0 - static_cast<double>(out[i].timeouts) / out[i].runs;
        out[i].median_runtime_s = median(times[i]);
    }
    return out;
}

void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows) {
    out << "daily_hours,goals,tasks_per_goal,n_durations,repeat,seed,runtime_s,timed_out\n";
    out.precision(9);
    for (const auto& r : rows)
        out << r.point.daily_hours << ',' << r.point.goals << ',' << r.point.tasks_per_goal << ','
            << r.point.n_durations << ',' << r.repeat << ',' << r.seed << ',' << r.runtime_s << ','
            << (r.timed_out ? 1 : 0) << '\n';
}

std::vector<GridRow> read_grid_csv(std::istream& in) {
    std::vector<GridRow> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 8) throw DomainError("grid CSV row has " + std::to_string(c.size()) + " columns");
        GridRow r;
        r.point = {std::stoi(c[0]), std::stoi(c[1]), std::stoi(c[2]), std::stoi(c[3])};
        r.repeat = std::stoi(c[4]);
        r.seed = std::stoull(c[5]);
        r.runtime_s = std::stod(c[6]);
        r.timed_out = c[7] == "1";
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Solver comparison

Config compare_config() {
    Config c;
    c.gamma = 0.99;
    c.penalty_rate = 0.0;
    c.n_durations = 1;
    return c;
}

std::vector<CompareRow> compare_solvers(const std::vector<int>& task_counts, const CompareOptions& o) {
    const Config cfg = compare_config();
    std::vector<CompareRow> rows;
    for (int n : task_counts) {
        for (int r = 0; r < o.repeats; ++r) {
            const ToDoList list = generate_flat_instance(n, mix_seed(o.seed, {static_cast<std::uint64_t>(n),
                                                                              static_cast<std::uint64_t>(r)}));
            auto measure = [&](const char* name, auto&& solve) {
                CompareRow row{name, n, r};
                SolveBudget limit(o.budget);
                const auto start = Clock::now();
                try {
                    row.value = solve(limit);
                    limit.check();
                } catch (const TimeoutError&) {
                    row.timed_out = true;
                    row.value = std::numeric_limits<double>::quiet_NaN();
                }
                row.runtime_s = seconds_since(start);
                rows.push_back(row);
            };
            measure("HIER", [&](SolveBudget& b) {
                SolverOptions so;
                so.budget = &b;
                so.record_task_states = false;
                return solve_todo_list(list, 0, cfg, so).value;
            });
            if (n <= o.max_bi_tasks)
                measure("BI", [&](SolveBudget& b) {
                    return backward_induction(build_flat(list, cfg, 0, static_cast<std::size_t>(n)), &b).start_value();
                });
            if (n <= o.max_vi_tasks)
                measure("VI", [&](SolveBudget& b) {
                    return value_iteration(build_flat(list, cfg, 0, static_cast<std::size_t>(n)), o.vi_eps, 100000, &b)
                        .start_value();
                });
        }
    }
    return rows;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
    out << "solver,tasks,repeat,runtime_s,value,timed_out\n";
    out.precision(17);
    for (const auto& r : rows) {
        out << r.solver << ',' << r.tasks << ',' << r.repeat << ',' << r.runtime_s << ',';
        if (!std::isnan(r.value)) out << r.value;
        out << ',' << (r.timed_out ? 1 : 0) << '\n';
    }
}

std::vector<CompareRow> read_compare_csv(std::istream& in) {
    std::vector<CompareRow> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c = split(line);
        if (c.size() == 5 && line.back() == ',') c.emplace_back();
        if (c.size() != 6) throw DomainError("compare CSV row has " + std::to_string(c.size()) + " columns");
        CompareRow r;
        r.solver = c[0];
        r.tasks = std::stoi(c[1]);
        r.repeat = std::stoi(c[2]);
        r.runtime_s = std::stod(c[3]);
        r.value = c[4].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(c[4]);
        r.timed_out = c[5] == "1";
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Plots

namespace {

std::string fmt(double v, int precision = 3) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

const char* solver_color(const std::string& s) {
    if (s == "HIER") return "#1b7837";
    if (s == "BI") return "#c51b7d";
    if (s == "VI") return "#2166ac";
    return "#555555";
}

} // namespace

std::string compare_svg(const std::vector<CompareRow>& rows) {
    std::map<std::string, std::map<int, std::vector<double>>> series;
    for (const auto& r : rows) series[r.solver][r.tasks].push_back(std::max(r.runtime_s, 1e-7));
    int n_lo = std::numeric_limits<int>::max(), n_hi = std::numeric_limits<int>::min();
    double t_lo = 1e300, t_hi = 0.0;
    std::map<std::string, std::vector<std::pair<int, double>>> points;
    for (auto& [solver, by_n] : series)
        for (auto& [n, ts] : by_n) {
            const double m = median(ts);
            points[solver].emplace_back(n, m);
            n_lo = std::min(n_lo, n);
            n_hi = std::max(n_hi, n);
            t_lo = std::min(t_lo, m);
            t_hi = std::max(t_hi, m);
        }

    const double W = 640, H = 420, L = 70, R = 110, T = 30, B = 50;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (points.empty()) {
        s << "<text x=\"20\" y=\"30\">no data</text>\n</svg>\n";
        return s.str();
    }
    const double y0 = std::floor(std::log10(t_lo)), y1 = std::max(y0 + 1, std::ceil(std::log10(t_hi)));
    if (n_hi == n_lo) ++n_hi;
    auto px = [&](double n) { return L + (n - n_lo) / (n_hi - n_lo) * (W - L - R); };
    auto py = [&](double t) { return H - B - (std::log10(t) - y0) / (y1 - y0) * (H - T - B); };

    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    for (double e = y0; e <= y1; e += 1) {
        const double y = py(std::pow(10.0, e));
        s << "<line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << W - R << "\" y2=\"" << y
          << "\" stroke=\"#ddd\"/><text x=\"" << L - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e"
          << e << "</text>\n";
    }
    const int step = std::max(1, (n_hi - n_lo) / 10);
    for (int n = n_lo; n <= n_hi; n += step)
        s << "<text x=\"" << px(n) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << n << "</text>\n";
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">tasks</text>\n"
      << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
      << ")\" text-anchor=\"middle\">median runtime (s)</text>\n";

    int legend = 0;
    for (const auto& [solver, pts] : points) {
        const char* color = solver_color(solver);
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [n, t] : pts) s << px(n) << ',' << py(t) << ' ';
        s << "\"/>\n";
        for (const auto& [n, t] : pts)
            s << "<circle cx=\"" << px(n) << "\" cy=\"" << py(t) << "\" r=\"3\" fill=\"" << color << "\"><title>"
              << solver << " n=" << n << ": " << fmt(t) << " s</title></circle>\n";
        const double ly = T + 10 + 20 * legend++;
        s << "<rect x=\"" << W - R + 15 << "\" y=\"" << ly - 8 << "\" width=\"12\" height=\"12\" fill=\"" << color
          << "\"/><text x=\"" << W - R + 32 << "\" y=\"" << ly + 2 << "\">" << solver << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string grid_svg(const std::vector<GridRow>& rows) {
    const auto summary = summarize(rows);
    std::map<std::pair<int, int>, std::vector<const PointSummary*>> panels;   // (hours, b)
    std::vector<int> goal_axis, task_axis;
    for (const auto& p : summary) {
        panels[{p.point.daily_hours, p.point.n_durations}].push_back(&p);
        goal_axis.push_back(p.point.goals);
        task_axis.push_back(p.point.tasks_per_goal);
    }
    for (auto* axis : {&goal_axis, &task_axis}) {
        std::sort(axis->begin(), axis->end());
        axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
    }
    const double cell = 22, pw = 60 + cell * goal_axis.size(), ph = 60 + cell * task_axis.size();
    const int cols = 3;
    const int prow = static_cast<int>((panels.size() + cols - 1) / cols);
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * pw + 20 << "\" height=\""
      << std::max(1, prow) * ph + 40 << "\" font-family=\"sans-serif\" font-size=\"10\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"10\" y=\"18\" font-size=\"13\">reliability (share of runs within budget)</text>\n";
    int k = 0;
    for (const auto& [key, pts] : panels) {
        const double ox = 10 + (k % cols) * pw, oy = 30 + (k / cols) * ph;
        ++k;
        s << "<text x=\"" << ox + 50 << "\" y=\"" << oy + 12 << "\" font-size=\"11\">" << key.first << " h, b="
          << key.second << "</text>\n";
        for (const auto* p : pts) {
            const auto gx = std::find(goal_axis.begin(), goal_axis.end(), p->point.goals) - goal_axis.begin();
            const auto ty = std::find(task_axis.begin(), task_axis.end(), p->point.tasks_per_goal) - task_axis.begin();
            const int red = static_cast<int>(std::lround(220 * (1 - p->reliability)));
            const int green = static_cast<int>(std::lround(60 + 150 * p->reliability));
            s << "<rect x=\"" << ox + 50 + gx * cell << "\" y=\"" << oy + 20 + ty * cell << "\" width=\"" << cell - 1
              << "\" height=\"" << cell - 1 << "\" fill=\"rgb(" << red << ',' << green << ",60)\"><title>"
              << p->point.goals << " goals x " << p->point.tasks_per_goal << " tasks: " << fmt(p->reliability)
              << ", median " << fmt(p->median_runtime_s) << " s</title></rect>\n";
        }
        for (std::size_t i = 0; i < task_axis.size(); ++i)
            s << "<text x=\"" << ox + 46 << "\" y=\"" << oy + 20 + i * cell + cell * 0.65 << "\" text-anchor=\"end\">"
              << task_axis[i] << "</text>\n";
        for (std::size_t i = 0; i < goal_axis.size(); ++i)
            s << "<text x=\"" << ox + 50 + i * cell + cell / 2 << "\" y=\"" << oy + 32 + task_axis.size() * cell
              << "\" text-anchor=\"middle\">" << goal_axis[i] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace hsmdp::bench
