#include "hsmdp/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

#include "hsmdp/errors.hpp"

namespace hsmdp {

using namespace std::chrono;

namespace {

constexpr int kMinutesPerDay = 24 * 60;

const std::array<std::string, 7> kWeekdays = {"sunday",   "monday", "tuesday", "wednesday",
                                              "thursday", "friday", "saturday"};

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool digit(char c) { return c >= '0' && c <= '9'; }

bool starts_with_ci(std::string_view s, std::size_t i, std::string_view p) {
    if (s.size() - i < p.size()) return false;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (std::tolower(static_cast<unsigned char>(s[i + k])) != std::tolower(static_cast<unsigned char>(p[k])))
            return false;
    return true;
}

std::size_t word_end(std::string_view s, std::size_t i) {
    while (i < s.size() && !space(s[i])) ++i;
    return i;
}

// Strict date at s[i..i+10).
std::optional<year_month_day> parse_date_at(std::string_view s, std::size_t i) {
    if (s.size() - i < 10) return std::nullopt;
    for (std::size_t k : {0, 1, 2, 3, 5, 6, 8, 9})
        if (!digit(s[i + k])) return std::nullopt;
    if (s[i + 4] != '-' || s[i + 7] != '-') return std::nullopt;
    auto num = [&](std::size_t a, std::size_t len) {
        int v = 0;
        for (std::size_t k = 0; k < len; ++k) v = v * 10 + (s[i + a + k] - '0');
        return v;
    };
    const year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))},
                             day{static_cast<unsigned>(num(8, 2))}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

// "HH:mm" at s[i..i+5).
std::optional<int> parse_time_at(std::string_view s, std::size_t i) {
    if (s.size() - i < 5) return std::nullopt;
    if (!digit(s[i]) || !digit(s[i + 1]) || s[i + 2] != ':' || !digit(s[i + 3]) || !digit(s[i + 4]))
        return std::nullopt;
    const int h = (s[i] - '0') * 10 + (s[i + 1] - '0');
    const int m = (s[i + 3] - '0') * 10 + (s[i + 4] - '0');
    if (h > 23 || m > 59) return std::nullopt;
    return h * 60 + m;
}

std::optional<double> parse_real(std::string_view s) {
    if (s.empty()) return std::nullopt;
    for (char c : s)
        if (!digit(c) && c != '.') return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string format_real(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc{} ? p : buf);
}

bool known_tag(const std::string& t) {
    if (t == "daily" || t == "future" || t == "today" || t == "weekdays" || t == "weekends") return true;
    for (const auto& d : kWeekdays)
        if (t == d || t == d + "s") return true;
    return parse_date_at(t, 0).has_value() && t.size() == 10;
}

} // namespace

// ---------------------------------------------------------------------------
// Dates

std::int64_t LocalDateTime::epoch_minutes() const {
    return static_cast<std::int64_t>(day.time_since_epoch().count()) * kMinutesPerDay + minute;
}

LocalDateTime LocalDateTime::from_epoch_minutes(std::int64_t m) {
    std::int64_t d = m / kMinutesPerDay, r = m % kMinutesPerDay;
    if (r < 0) {
        r += kMinutesPerDay;
        --d;
    }
    return {sys_days{days{d}}, static_cast<int>(r)};
}

std::string LocalDateTime::to_string() const {
    const year_month_day ymd{day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), minute / 60,
                  minute % 60);
    return buf;
}

std::optional<LocalDateTime> parse_datetime(std::string_view s, int default_minute) {
    auto date = parse_date_at(s, 0);
    if (!date) return std::nullopt;
    LocalDateTime out{sys_days{*date}, default_minute};
    if (s.size() == 10) return out;
    if (s[10] != ' ' && s[10] != 'T') return std::nullopt;
    auto t = parse_time_at(s, 11);
    if (!t) return std::nullopt;
    out.minute = *t;
    std::string_view rest = s.substr(16);
    if (rest.size() == 3 && rest[0] == ':' && digit(rest[1]) && digit(rest[2])) rest = {};
    if (!rest.empty() && rest != "Z") return std::nullopt;
    return out;
}

LocalDateTime local_now(int timezone_offset_minutes) {
    const auto now = floor<minutes>(system_clock::now()).time_since_epoch().count();
    return LocalDateTime::from_epoch_minutes(now + timezone_offset_minutes);
}

// ---------------------------------------------------------------------------
// Titles

bool ParsedAttributes::same_attributes(const ParsedAttributes& o) const {
    return goal_code == o.goal_code && value == o.value && deadline == o.deadline &&
           est_minutes == o.est_minutes && tags == o.tags && hours_today == o.hours_today &&
           hours_typical == o.hours_typical && name == o.name;
}

ParsedAttributes parse_title(std::string_view s) {
    ParsedAttributes a;
    std::vector<std::string_view> words;
    auto fail = [&](std::size_t pos, const char* field, std::string msg) {
        a.errors.push_back({pos, field, std::move(msg)});
    };

    std::size_t i = 0;
    while (i < s.size()) {
        if (space(s[i])) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        const std::size_t end = word_end(s, i);

        if (starts_with_ci(s, i, "#HOURS_TODAY") || starts_with_ci(s, i, "#HOURS_TYPICAL")) {
            const bool today = starts_with_ci(s, i, "#HOURS_TODAY");
            std::size_t j = i + (today ? 12 : 14);
            while (j < s.size() && space(s[j])) ++j;
            const char* field = today ? "hours_today" : "hours_typical";
            if (!starts_with_ci(s, j, "==")) {
                fail(start, field, "expected '==<hours>'");
                i = word_end(s, i);
                continue;
            }
            const std::size_t vend = word_end(s, j + 2);
            auto v = parse_real(s.substr(j + 2, vend - j - 2));
            if (!v || *v <= 0.0 || *v > 24.0)
                fail(j, field, "hours must be a number in (0, 24]");
            else
                (today ? a.hours_today : a.hours_typical) = *v;
            i = vend;
            continue;
        }

        if (starts_with_ci(s, i, "#CG")) {
            std::size_t j = i + 3;
            while (j < s.size() && digit(s[j])) ++j;
            if (j > i + 3) {
                if (j < s.size() && s[j] == '_') {
                    int code = 0;
                    auto [p, ec] = std::from_chars(s.data() + i + 3, s.data() + j, code);
                    if (ec != std::errc{} || p != s.data() + j)
                        fail(start, "goal_code", "goal number out of range");
                    else if (a.goal_code)
                        fail(start, "goal_code", "duplicate goal code");
                    else
                        a.goal_code = code;
                    i = j + 1;   // the goal name follows the underscore directly
                    continue;
                }
                fail(start, "goal_code", "goal code must be followed by '_'");
                i = end;
                continue;
            }
        }

        if (starts_with_ci(s, i, "==")) {
            auto text = s.substr(i + 2, end - i - 2);
            long long v = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            const bool digits_only = !text.empty() && std::all_of(text.begin(), text.end(), digit);
            if (!digits_only || ec != std::errc{} || p != text.data() + text.size())
                fail(start, "value", "value must be a nonnegative integer");
            else if (a.value)
                fail(start, "value", "duplicate value");
            else
                a.value = v;
            i = end;
            continue;
        }

        if (starts_with_ci(s, i, "DUE:")) {
            auto date = parse_date_at(s, i + 4);
            if (!date || (i + 14 < s.size() && !space(s[i + 14]))) {
                fail(start, "deadline", "deadline must be DUE:YYYY-MM-DD [HH:mm]");
                i = end;
                continue;
            }
            LocalDateTime dl{sys_days{*date}, 23 * 60 + 59};
            std::size_t j = i + 14;
            if (j < s.size() && s[j] == ' ' && j + 1 < s.size() && digit(s[j + 1])) {
                const std::size_t tend = word_end(s, j + 1);
                auto t = tend == j + 6 ? parse_time_at(s, j + 1) : std::nullopt;
                if (t) {
                    dl.minute = *t;
                    j = tend;
                } else if (tend > j + 1 && s[std::min(j + 3, s.size() - 1)] == ':') {
                    fail(j + 1, "deadline", "time must be HH:mm");
                    j = tend;
                }
            }
            if (a.deadline)
                fail(start, "deadline", "duplicate deadline");
            else
                a.deadline = dl;
            i = j;
            continue;
        }

        if (starts_with_ci(s, i, "~~")) {
            std::size_t j = i + 2;
            while (j < s.size() && space(s[j])) ++j;
            std::size_t k = j;
            while (k < s.size() && (digit(s[k]) || s[k] == '.')) ++k;
            auto v = parse_real(s.substr(j, k - j));
            std::size_t u = k;
            while (u < s.size() && space(s[u])) ++u;
            const std::size_t uend = word_end(s, u);
            const std::string unit = lower(s.substr(u, uend - u));
            if (!v || (unit != "h" && unit != "min")) {
                fail(start, "estimate", "estimate must be ~~<number> h or ~~<integer> min");
                i = std::max(end, k);
                continue;
            }
            double minutes_v = unit == "h" ? *v * 60.0 : *v;
            if (unit == "min" && std::floor(*v) != *v) {
                fail(j, "estimate", "minutes must be an integer");
            } else if (minutes_v < 0.5 || minutes_v > 1e8) {
                fail(j, "estimate", "estimate must be positive");
            } else if (a.est_minutes) {
                fail(start, "estimate", "duplicate estimate");
            } else {
                a.est_minutes = static_cast<int>(std::llround(minutes_v));
            }
            i = uend;
            continue;
        }

        if (s[i] == '#') {
            const std::string tag = lower(s.substr(i + 1, end - i - 1));
            if (known_tag(tag)) {
                a.tags.insert(tag);
                i = end;
                continue;
            }
        }

        words.push_back(s.substr(start, end - start));
        i = end;
    }

    for (std::size_t w = 0; w < words.size(); ++w) {
        if (w) a.name += ' ';
        a.name += words[w];
    }
    return a;
}

std::string render_title(const ParsedAttributes& a) {
    std::string out;
    auto add = [&out](const std::string& part) {
        if (part.empty()) return;
        if (!out.empty() && out.back() != '_') out += ' ';
        out += part;
    };
    if (a.goal_code) out = "#CG" + std::to_string(*a.goal_code) + "_";
    add(a.name);
    if (a.goal_code && a.name.empty()) out += ' ';
    if (a.value) add("==" + std::to_string(*a.value));
    if (a.deadline) add("DUE:" + a.deadline->to_string());
    if (a.est_minutes) add("~~" + std::to_string(*a.est_minutes) + " min");
    for (const auto& t : a.tags) add("#" + t);
    if (a.hours_today) add("#HOURS_TODAY ==" + format_real(*a.hours_today));
    if (a.hours_typical) add("#HOURS_TYPICAL ==" + format_real(*a.hours_typical));
    return out;
}

// ---------------------------------------------------------------------------
// Working time

Minutes deadline_to_working_minutes(const LocalDateTime& deadline, const LocalDateTime& now,
                                    Minutes today_minutes, Minutes typical_minutes) {
    if (deadline < now)
        throw DomainError("deadline " + deadline.to_string() + " is before " + now.to_string());
    if (deadline.day == now.day) return std::min<Minutes>(today_minutes, deadline.minute - now.minute);
    Minutes total = std::min<Minutes>(today_minutes, kMinutesPerDay - now.minute);
    const auto full_days = (deadline.day - now.day).count() - 1;
    total += static_cast<Minutes>(full_days) * typical_minutes;
    total += std::min<Minutes>(typical_minutes, deadline.minute);
    return total;
}

// ---------------------------------------------------------------------------
// Request body

namespace {

std::string errors_text(const std::vector<std::string>& fields) {
    std::string s = "request body does not match the schema:";
    for (const auto& f : fields) s += " " + f + ";";
    return s;
}

std::string report_text(const ValidationReport& r) {
    std::string s = "to-do list needs changes:";
    for (const auto& i : r.issues) s += " [" + i.item_id + "] " + i.field + ": " + i.message + ";";
    return s;
}

std::optional<std::string> scalar_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_real(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return std::nullopt;
}

std::optional<double> number_or_numeric_string(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_real(v.get<std::string>());
    return std::nullopt;
}

constexpr int kMaxDepth = 64;

void parse_item(const nlohmann::json& j, const std::string& path, int depth, RawItem& out,
                std::vector<std::string>& errs) {
    if (!j.is_object()) {
        errs.push_back(path + ": expected an object");
        return;
    }
    if (depth > kMaxDepth) {
        errs.push_back(path + ": nesting deeper than " + std::to_string(kMaxDepth));
        return;
    }
    if (auto it = j.find("id"); it != j.end() && scalar_text(*it) && !it->is_boolean())
        out.id = *scalar_text(*it);
    else
        errs.push_back(path + ".id: required string");
    if (auto it = j.find("nm"); it != j.end() && it->is_string())
        out.nm = it->get<std::string>();
    else
        errs.push_back(path + ".nm: required string");
    if (auto it = j.find("lm"); it != j.end() && !it->is_null()) {
        if (auto t = scalar_text(*it))
            out.lm = *t;
        else
            errs.push_back(path + ".lm: expected a timestamp");
    }
    if (auto it = j.find("cp"); it != j.end() && !it->is_null()) {
        if (it->is_boolean()) {
            if (it->get<bool>()) out.cp = "true";
        } else if (auto t = scalar_text(*it)) {
            out.cp = *t;
        } else {
            errs.push_back(path + ".cp: expected a timestamp");
        }
    }
    if (auto it = j.find("ch"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            errs.push_back(path + ".ch: expected an array");
            return;
        }
        out.ch.resize(it->size());
        for (std::size_t k = 0; k < it->size(); ++k)
            parse_item((*it)[k], path + ".ch[" + std::to_string(k) + "]", depth + 1, out.ch[k], errs);
    }
}

} // namespace

SchemaError::SchemaError(std::vector<std::string> fields)
    : std::invalid_argument(errors_text(fields)), fields_(std::move(fields)) {}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error(report_text(report)), report_(std::move(report)) {}

TodoRequest parse_request(const nlohmann::json& body) {
    TodoRequest req;
    std::vector<std::string> errs;
    if (!body.is_object()) throw SchemaError({"body: expected a JSON object"});

    if (auto it = body.find("projects"); it != body.end() && it->is_array()) {
        req.projects.resize(it->size());
        for (std::size_t k = 0; k < it->size(); ++k)
            parse_item((*it)[k], "projects[" + std::to_string(k) + "]", 0, req.projects[k], errs);
    } else {
        errs.push_back("projects: required array");
    }

    if (auto it = body.find("currentIntentionsList"); it != body.end() && !it->is_null()) {
        if (!it->is_array()) {
            errs.push_back("currentIntentionsList: expected an array");
        } else {
            for (std::size_t k = 0; k < it->size(); ++k) {
                const auto& e = (*it)[k];
                const std::string path = "currentIntentionsList[" + std::to_string(k) + "]";
                if (!e.is_object()) {
                    errs.push_back(path + ": expected an object");
                    continue;
                }
                Intention in;
                if (auto f = e.find("_id"); f != e.end() && scalar_text(*f))
                    in.id = *scalar_text(*f);
                else
                    errs.push_back(path + "._id: required string");
                if (auto f = e.find("_c"); f != e.end() && scalar_text(*f)) in.goal_code = *scalar_text(*f);
                for (auto [key, dst] : {std::pair{"d", &in.done}, std::pair{"nvm", &in.never_mind}}) {
                    if (auto f = e.find(key); f != e.end() && !f->is_null()) {
                        if (f->is_boolean())
                            *dst = f->get<bool>();
                        else
                            errs.push_back(path + "." + key + ": expected a boolean");
                    }
                }
                if (auto f = e.find("t"); f != e.end() && f->is_string()) in.title = f->get<std::string>();
                if (auto f = e.find("vd"); f != e.end() && !f->is_null()) {
                    if (auto v = number_or_numeric_string(*f))
                        in.value = *v;
                    else
                        errs.push_back(path + ".vd: expected a number");
                }
                req.intentions.push_back(std::move(in));
            }
        }
    }

    if (auto it = body.find("timezoneOffsetMinutes"); it != body.end() && !it->is_null()) {
        auto v = number_or_numeric_string(*it);
        if (!v && it->is_string()) {
            // negative offsets arrive as "-120"
            const auto s = it->get<std::string>();
            if (!s.empty() && s[0] == '-')
                if (auto p = parse_real(s.substr(1))) v = -*p;
        }
        if (v && std::floor(*v) == *v && std::abs(*v) <= 24 * 60)
            req.timezone_offset_minutes = static_cast<int>(*v);
        else
            errs.push_back("timezoneOffsetMinutes: expected an integer number of minutes");
    }
    for (auto [key, dst] : {std::pair{"today_hours", &req.today_hours},
                            std::pair{"typical_hours", &req.typical_hours}}) {
        if (auto it = body.find(key); it != body.end() && !it->is_null()) {
            if (auto v = number_or_numeric_string(*it))
                *dst = *v;
            else
                errs.push_back(std::string(key) + ": expected a number of hours");
        }
    }
    if (auto it = body.find("userkey"); it != body.end() && !it->is_null()) {
        if (auto t = scalar_text(*it))
            req.userkey = *t;
        else
            errs.push_back("userkey: expected a string");
    }
    if (auto it = body.find("updated"); it != body.end() && !it->is_null()) {
        if (auto t = scalar_text(*it)) req.updated = *t;
    }
    if (!errs.empty()) throw SchemaError(std::move(errs));
    return req;
}

// ---------------------------------------------------------------------------
// Flattening

std::optional<FlattenMode> flatten_mode_from_string(std::string_view s) {
    const std::string m = lower(s);
    if (m == "leaves_only" || m == "leaves") return FlattenMode::LeavesOnly;
    if (m == "structured") return FlattenMode::Structured;
    return std::nullopt;
}

ToDoList flatten_tree(const std::vector<RawItem>& projects, const FlattenOptions& options,
                      ValidationReport& report) {
    ToDoList list;
    auto title_issues = [&](const RawItem& item, const ParsedAttributes& a) {
        for (const auto& e : a.errors)
            report.issues.push_back(
                {item.id, e.field, e.message + " (at position " + std::to_string(e.position) + ")"});
    };
    auto working = [&](const RawItem& item, const LocalDateTime& dl) -> std::optional<Minutes> {
        try {
            return deadline_to_working_minutes(dl, options.now, options.today_minutes,
                                               options.typical_minutes);
        } catch (const DomainError&) {
            report.issues.push_back({item.id, "deadline", "deadline " + dl.to_string() + " has passed"});
            return std::nullopt;
        }
    };

    for (const RawItem& root : projects) {
        const ParsedAttributes ga = parse_title(root.nm);
        if (!ga.goal_code) continue;
        title_issues(root, ga);
        Goal goal;
        goal.id = root.id;
        goal.title = ga.name;
        goal.completed = root.cp.has_value();
        if (ga.value)
            goal.value = static_cast<double>(*ga.value);
        else
            report.issues.push_back({root.id, "value", "goal has no value (==<value>)"});
        if (ga.deadline && !goal.completed) goal.deadline_minutes = working(root, *ga.deadline);

        std::function<void(const RawItem&, std::optional<LocalDateTime>, bool)> walk =
            [&](const RawItem& node, std::optional<LocalDateTime> inherited, bool done_above) {
                for (const RawItem& child : node.ch) {
                    const ParsedAttributes a = parse_title(child.nm);
                    title_issues(child, a);
                    const auto deadline = a.deadline ? a.deadline : inherited;
                    const bool done = done_above || child.cp.has_value();
                    const bool leaf = child.ch.empty();
                    if (leaf || (options.mode == FlattenMode::Structured && a.est_minutes)) {
                        Task t;
                        t.id = child.id;
                        t.title = a.name;
                        t.goal_id = goal.id;
                        t.completed = done || goal.completed;
                        t.tags = a.tags;
                        t.last_modified = child.lm;
                        if (a.est_minutes)
                            t.est_minutes = *a.est_minutes;
                        else if (!t.completed)
                            report.issues.push_back({child.id, "estimate", "task has no time estimate (~~)"});
                        if (deadline && !t.completed) t.deadline_minutes = working(child, *deadline);
                        goal.tasks.push_back(std::move(t));
                    }
                    if (!leaf) walk(child, deadline, done);
                }
            };
        walk(root, std::nullopt, goal.completed);
        if (goal.tasks.empty())
            report.issues.push_back({root.id, "tasks", "goal has no tasks"});
        list.goals.push_back(std::move(goal));
    }
    return list;
}

void apply_scheduling(ToDoList& list, const std::vector<Intention>& intentions,
                      const LocalDateTime& now) {
    const unsigned wd = now.weekday().c_encoding();
    const std::string today_name = kWeekdays[wd];
    const bool workday = wd >= 1 && wd <= 5;
    const std::string today_date = now.to_string().substr(0, 10);

    for (auto& goal : list.goals) {
        for (auto& task : goal.tasks) {
            const auto& tags = task.tags;
            bool day_specific = false, day_match = false;
            for (const auto& tag : tags) {
                bool is_day = tag == "weekdays" || tag == "weekends" || tag.size() == 10;
                for (const auto& d : kWeekdays) is_day = is_day || tag == d || tag == d + "s";
                if (!is_day) continue;
                day_specific = true;
                day_match = day_match || tag == today_name || tag == today_name + "s" ||
                            tag == today_date || (tag == "weekdays" && workday) ||
                            (tag == "weekends" && !workday);
            }
            task.forced_today = tags.count("today") || tags.count("daily") || day_match;
            task.eligible_today = !tags.count("future") && (!day_specific || day_match);
            if (task.forced_today) task.eligible_today = true;

            for (const auto& in : intentions) {
                if (in.id != task.id) continue;
                if (in.done || in.never_mind) {
                    task.forced_today = false;
                    task.eligible_today = false;
                } else {
                    task.forced_today = true;
                    task.eligible_today = true;
                }
            }
            if (task.completed) task.forced_today = false;
        }
    }
}

ValidationReport validate(const ToDoList& list, const Config& cfg) {
    ValidationReport r;
    for (const auto& goal : list.goals) {
        if (goal.completed) continue;
        if (!cfg.value_range.contains(goal.value))
            r.issues.push_back({goal.id, "value",
                                "goal value " + format_real(goal.value) + " outside [" +
                                    format_real(cfg.value_range.lo) + ", " +
                                    format_real(cfg.value_range.hi) + "]"});
        const int total = goal.total_estimate();
        if (goal.tasks.empty()) {
            r.issues.push_back({goal.id, "tasks", "goal has no tasks"});
        } else if (total > 0) {
            const double avg = goal.value / total;
            if (!cfg.avg_value_range.contains(avg))
                r.issues.push_back({goal.id, "value",
                                    "value per estimated minute " + format_real(avg) + " outside [" +
                                        format_real(cfg.avg_value_range.lo) + ", " +
                                        format_real(cfg.avg_value_range.hi) + "]"});
        }
    }
    return r;
}

ParsedRequest build_todo_list(const TodoRequest& request, const Config& cfg, FlattenMode mode,
                              std::optional<LocalDateTime> now_local) {
    ParsedRequest out;
    out.now = now_local ? *now_local : local_now(request.timezone_offset_minutes);
    ValidationReport report;

    // Body fields win over #HOURS_* items in the tree.
    std::optional<double> today = request.today_hours, typical = request.typical_hours;
    for (const auto& root : request.projects) {
        const ParsedAttributes a = parse_title(root.nm);
        if (!today && a.hours_today) today = a.hours_today;
        if (!typical && a.hours_typical) typical = a.hours_typical;
    }
    if (!today && !typical) throw SchemaError({"today_hours: required (or #HOURS_TODAY)"});
    if (!today) today = typical;
    if (!typical) typical = today;
    for (auto [name, v] : {std::pair{"today_hours", *today}, std::pair{"typical_hours", *typical}})
        if (!(v > 0.0 && v <= 24.0))
            report.issues.push_back({"", name, "working hours must lie in (0, 24]"});
    out.today_minutes = static_cast<Minutes>(std::llround(*today * 60.0));
    out.typical_minutes = static_cast<Minutes>(std::llround(*typical * 60.0));

    FlattenOptions fo;
    fo.mode = mode;
    fo.now = out.now;
    fo.today_minutes = out.today_minutes;
    fo.typical_minutes = out.typical_minutes;
    out.list = flatten_tree(request.projects, fo, report);
    if (out.list.goals.empty()) report.issues.push_back({"", "projects", "no goals (#CG<N>_) found"});

    for (auto& issue : validate(out.list, cfg).issues) {
        const bool duplicate = std::any_of(report.issues.begin(), report.issues.end(), [&](const Issue& i) {
            return i.item_id == issue.item_id && i.field == issue.field && i.message == issue.message;
        });
        if (!duplicate) report.issues.push_back(std::move(issue));
    }
    if (!report.ok()) throw ValidationError(std::move(report));
    apply_scheduling(out.list, request.intentions, out.now);
    return out;
}

} // namespace hsmdp
