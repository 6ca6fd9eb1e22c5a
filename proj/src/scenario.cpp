#include "pbsyn/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pbsyn {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_int64(const std::string& text, std::int64_t& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (std::size_t j = i; j < t.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(t[j]))) return false;
    try {
        out = std::stoll(t);
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

struct Section {
    std::vector<std::string> header;
    std::vector<std::pair<int, std::vector<std::string>>> rows;  // line number + cells
    int header_line = 0;
};

}  // namespace

std::optional<std::uint32_t> Scenario::index_of(const std::string& project_id) const {
    for (std::uint32_t i = 0; i < projects.size(); ++i)
        if (projects[i].id == project_id) return i;
    return std::nullopt;
}

Scenario parse_pabulib(const std::string& text) {
    std::map<std::string, Section> sections;
    std::string current;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t == "META" || t == "PROJECTS" || t == "VOTES") {
            if (sections.count(t)) throw ParseError(line_no, "duplicate section " + t);
            current = t;
            sections[t].header_line = line_no;
            continue;
        }
        if (current.empty()) throw ParseError(line_no, "content before any section header");
        Section& sec = sections[current];
        if (sec.header.empty()) {
            sec.header = split(line, ';');
        } else {
            sec.rows.emplace_back(line_no, split(line, ';'));
        }
    }

    for (const char* name : {"META", "PROJECTS", "VOTES"})
        if (!sections.count(name))
            throw ParseError(line_no, std::string("missing ") + name + " section");

    Scenario s;

    // META: key;value rows
    {
        const Section& meta = sections["META"];
        for (const auto& [ln, cells] : meta.rows) {
            if (cells.size() < 2) throw ParseError(ln, "META row needs key;value");
            s.meta[trim(cells[0])] = trim(cells[1]);
        }
        const auto it = s.meta.find("budget");
        if (it == s.meta.end())
            throw ParseError(meta.header_line, "META is missing the budget key");
        if (!parse_int64(it->second, s.budget))
            throw ParseError(meta.header_line, "non-integer budget '" + it->second + "'");
    }

    // PROJECTS
    {
        const Section& sec = sections["PROJECTS"];
        const auto& header = sec.header;
        auto col = [&](const std::string& name) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < header.size(); ++i)
                if (trim(header[i]) == name) return i;
            return std::nullopt;
        };
        const auto id_col = col("project_id");
        const auto cost_col = col("cost");
        if (!id_col || !cost_col)
            throw ParseError(sec.header_line, "PROJECTS header needs project_id and cost");
        const auto name_col = col("name");

        std::unordered_set<std::string> seen;
        for (const auto& [ln, cells] : sec.rows) {
            if (cells.size() < header.size())
                throw ParseError(ln, "PROJECTS row has fewer cells than the header");
            if (s.projects.size() >= 64)
                throw ParseError(ln, "more than 64 projects are not supported");
            Project p;
            p.id = trim(cells[*id_col]);
            if (p.id.empty()) throw ParseError(ln, "empty project_id");
            if (!seen.insert(p.id).second)
                throw ParseError(ln, "duplicate project_id '" + p.id + "'");
            if (!parse_int64(cells[*cost_col], p.cost))
                throw ParseError(ln, "non-integer cost '" + cells[*cost_col] + "'");
            if (name_col) p.label = trim(cells[*name_col]);
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (i == *id_col || i == *cost_col || (name_col && i == *name_col)) continue;
                const std::string value = trim(cells[i]);
                if (!value.empty()) p.extra[trim(header[i])] = value;
            }
            s.projects.push_back(std::move(p));
        }
    }

    std::unordered_map<std::string, std::uint32_t> index;
    for (std::uint32_t i = 0; i < s.projects.size(); ++i) index[s.projects[i].id] = i;

    // VOTES
    {
        const Section& sec = sections["VOTES"];
        const auto& header = sec.header;
        auto col = [&](const std::string& name) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < header.size(); ++i)
                if (trim(header[i]) == name) return i;
            return std::nullopt;
        };
        const auto voter_col = col("voter_id");
        const auto vote_col = col("vote");
        if (!voter_col || !vote_col)
            throw ParseError(sec.header_line, "VOTES header needs voter_id and vote");

        for (const auto& [ln, cells] : sec.rows) {
            if (cells.size() < header.size())
                throw ParseError(ln, "VOTES row has fewer cells than the header");
            Ballot b;
            b.voter_id = trim(cells[*voter_col]);
            if (b.voter_id.empty()) throw ParseError(ln, "empty voter_id");
            const std::string vote = trim(cells[*vote_col]);
            if (!vote.empty()) {
                for (const std::string& raw_id : split(vote, ',')) {
                    const std::string pid = trim(raw_id);
                    const auto it = index.find(pid);
                    if (it == index.end())
                        throw ParseError(ln, "vote references unknown project id '" + pid + "'");
                    if (mask_contains(b.mask, it->second)) {
                        s.warnings.push_back("line " + std::to_string(ln) + ": duplicate approval '" +
                                             pid + "' in ballot of " + b.voter_id + " (deduplicated)");
                        continue;
                    }
                    b.mask |= mask_bit(it->second);
                    b.approvals.push_back(it->second);
                }
            }
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (i == *voter_col || i == *vote_col) continue;
                const std::string value = trim(cells[i]);
                if (!value.empty()) b.extra[trim(header[i])] = value;
            }
            s.ballots.push_back(std::move(b));
        }
    }

    return s;
}

std::string serialize_pabulib(const Scenario& scenario) {
    std::ostringstream out;

    out << "META\nkey;value\n";
    bool budget_written = false;
    std::int64_t stored_budget = 0;
    for (const auto& [key, value] : scenario.meta) {
        std::string v = value;
        if (key == "budget") {
            budget_written = true;
            if (!parse_int64(value, stored_budget) || stored_budget != scenario.budget)
                v = std::to_string(scenario.budget);
        }
        out << key << ";" << v << "\n";
    }
    if (!budget_written) out << "budget;" << scenario.budget << "\n";

    // Union of extra columns across rows, required columns pinned first.
    const bool any_label =
        std::any_of(scenario.projects.begin(), scenario.projects.end(),
                    [](const Project& p) { return !p.label.empty(); });
    std::set<std::string> project_cols;
    for (const Project& p : scenario.projects)
        for (const auto& [k, _] : p.extra) project_cols.insert(k);

    out << "PROJECTS\nproject_id;cost";
    if (any_label) out << ";name";
    for (const auto& c : project_cols) out << ";" << c;
    out << "\n";
    for (const Project& p : scenario.projects) {
        out << p.id << ";" << p.cost;
        if (any_label) out << ";" << p.label;
        for (const auto& c : project_cols) {
            const auto it = p.extra.find(c);
            out << ";" << (it == p.extra.end() ? "" : it->second);
        }
        out << "\n";
    }

    std::set<std::string> vote_cols;
    for (const Ballot& b : scenario.ballots)
        for (const auto& [k, _] : b.extra) vote_cols.insert(k);

    out << "VOTES\nvoter_id;vote";
    for (const auto& c : vote_cols) out << ";" << c;
    out << "\n";
    for (const Ballot& b : scenario.ballots) {
        out << b.voter_id << ";";
        for (std::size_t i = 0; i < b.approvals.size(); ++i) {
            if (i) out << ",";
            out << scenario.projects[b.approvals[i]].id;
        }
        for (const auto& c : vote_cols) {
            const auto it = b.extra.find(c);
            out << ";" << (it == b.extra.end() ? "" : it->second);
        }
        out << "\n";
    }

    return out.str();
}

Scenario validate(const Scenario& raw, ValidationPolicy policy, ValidationReport* report) {
    ValidationReport local;
    local.policy = policy;
    local.warnings = raw.warnings;

    // keeps 64-term cost sums far from int64 range
    constexpr std::int64_t kMaxMoney = 1'000'000'000'000'000;

    if (raw.budget < 1) throw ValidationError("budget must be at least 1");
    if (raw.budget > kMaxMoney) throw ValidationError("budget exceeds the supported range");
    if (raw.projects.empty()) throw ValidationError("scenario has no projects");
    if (raw.projects.size() > 64)
        throw ValidationError("more than 64 projects are not supported");
    for (const Project& p : raw.projects) {
        if (p.cost < 1) throw ValidationError("project '" + p.id + "' has cost < 1");
        if (p.cost > kMaxMoney)
            throw ValidationError("project '" + p.id + "' exceeds the supported cost range");
    }

    Scenario s = raw;
    s.warnings.clear();

    for (const Project& p : s.projects)
        if (p.cost > s.budget) local.unaffordable_projects.push_back(p.id);

    std::vector<Ballot> kept;
    kept.reserve(s.ballots.size());
    for (Ballot& b : s.ballots) {
        std::int64_t total = 0;
        for (std::uint32_t idx : b.approvals) total += s.projects[idx].cost;
        if (total <= s.budget) {
            kept.push_back(std::move(b));
            continue;
        }
        switch (policy) {
            case ValidationPolicy::Strict:
                throw ValidationError("ballot of '" + b.voter_id + "' costs " +
                                      std::to_string(total) + " > budget " +
                                      std::to_string(s.budget));
            case ValidationPolicy::Drop:
                ++local.dropped_ballots;
                break;
            case ValidationPolicy::Truncate: {
                Ballot t = b;
                t.approvals.clear();
                t.mask = 0;
                std::int64_t spent = 0;
                for (std::uint32_t idx : b.approvals) {
                    if (spent + s.projects[idx].cost > s.budget) break;
                    spent += s.projects[idx].cost;
                    t.approvals.push_back(idx);
                    t.mask |= mask_bit(idx);
                }
                ++local.truncated_ballots;
                kept.push_back(std::move(t));
                break;
            }
        }
    }
    s.ballots = std::move(kept);

    if (s.ballots.empty()) throw ValidationError("no ballots left after validation");

    if (report) *report = std::move(local);
    return s;
}

std::int64_t subset_cost(const Scenario& scenario, ProjectMask subset) {
    std::int64_t total = 0;
    for_each_member(subset, [&](std::uint32_t i) {
        if (i >= scenario.projects.size())
            throw std::out_of_range("subset references project index " + std::to_string(i));
        total += scenario.projects[i].cost;
    });
    return total;
}

ProjectMask resolve_subset(const Scenario& scenario, std::span<const std::string> ids) {
    ProjectMask mask = 0;
    for (const std::string& id : ids) {
        const auto idx = scenario.index_of(id);
        if (!idx) throw std::out_of_range("unknown project id '" + id + "'");
        mask |= mask_bit(*idx);
    }
    return mask;
}

std::vector<std::string> subset_ids(const Scenario& scenario, ProjectMask subset) {
    std::vector<std::string> ids;
    for_each_member(subset, [&](std::uint32_t i) { ids.push_back(scenario.projects[i].id); });
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::array<Rational, 10> cost_decile_vector(const Scenario& scenario) {
    std::array<Rational, 10> vec{};
    if (scenario.projects.empty()) return vec;
    const Rational share(1, static_cast<std::int64_t>(scenario.projects.size()));
    for (const Project& p : scenario.projects) {
        // bin = ceil(10*cost/l), clamped to [1,10]
        std::int64_t bin = (10 * p.cost + scenario.budget - 1) / scenario.budget;
        bin = std::clamp<std::int64_t>(bin, 1, 10);
        vec[static_cast<std::size_t>(bin - 1)] += share;
    }
    return vec;
}

BudgetUtilization budget_utilization(const Scenario& scenario) {
    std::vector<Rational> fractions;
    fractions.reserve(scenario.ballots.size());
    Rational sum = 0;
    for (const Ballot& b : scenario.ballots) {
        const Rational f(subset_cost(scenario, b.mask), scenario.budget);
        fractions.push_back(f);
        sum += f;
    }
    BudgetUtilization u;
    u.mean = fractions.empty() ? Rational(0)
                               : sum / static_cast<std::int64_t>(fractions.size());
    if (fractions.empty()) {
        u.median = 0;
        return u;
    }
    std::sort(fractions.begin(), fractions.end());
    const std::size_t n = fractions.size();
    u.median = (n % 2 == 1) ? fractions[n / 2]
                            : (fractions[n / 2 - 1] + fractions[n / 2]) / 2;
    return u;
}

std::uint64_t scenario_fingerprint(const Scenario& scenario) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(scenario.projects.size());
    mix(static_cast<std::uint64_t>(scenario.budget));
    for (const Project& p : scenario.projects) mix(static_cast<std::uint64_t>(p.cost));
    mix(scenario.ballots.size());
    for (const Ballot& b : scenario.ballots) mix(b.mask);
    return h;
}

}  // namespace pbsyn
