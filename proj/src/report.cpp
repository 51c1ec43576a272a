#include "morphline/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "morphline/errors.hpp"

namespace morphline {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string alpha_text(int tenths) { return fmt("%.1f", tenths / 10.0); }

template <class Numerator>
CurveTable build_table(std::span<const Manifest> manifests, Numerator numerator) {
    std::map<std::pair<int, int>, CurveCell> found;
    std::set<int> generations;
    std::set<int> alphas;
    for (const Manifest& m : manifests) {
        for (const GenerationState& s : m.generations) {
            const std::pair<int, int> key{s.generation_index, s.alpha_tenths};
            if (found.count(key)) {
                throw InvalidConfig("manifests contain generation " + std::to_string(key.first) + " at alpha " +
                                    alpha_text(key.second) + " more than once");
            }
            CurveCell c;
            c.generation = s.generation_index;
            c.alpha_tenths = s.alpha_tenths;
            c.numerator = numerator(m, s);
            c.denominator = s.attempted_count;
            c.fraction = c.denominator > 0 ? static_cast<double>(c.numerator) / c.denominator : 0.0;
            found.emplace(key, c);
            generations.insert(key.first);
            alphas.insert(key.second);
        }
    }
    CurveTable t;
    t.generations.assign(generations.begin(), generations.end());
    t.alphas.assign(alphas.begin(), alphas.end());
    for (int g : t.generations) {
        std::vector<CurveCell> row;
        for (int a : t.alphas) {
            auto it = found.find({g, a});
            if (it == found.end()) {
                throw InvalidConfig("manifests do not cover a rectangular grid: generation " + std::to_string(g) +
                                    " at alpha " + alpha_text(a) + " is missing");
            }
            row.push_back(it->second);
        }
        t.cells.push_back(std::move(row));
    }
    return t;
}

double sorted_mean(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

RegionSummary region(std::span<const AsymmetryReport> before, std::span<const AsymmetryReport> after,
                     double AsymmetryReport::*field) {
    std::vector<double> b, a;
    for (const auto& r : before) b.push_back(r.*field);
    for (const auto& r : after) a.push_back(r.*field);
    RegionSummary s;
    s.before = sorted_mean(std::move(b));
    s.after = sorted_mean(std::move(a));
    s.delta = s.after - s.before;
    return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidConfig("asymmetry table line " + std::to_string(line) + ": '" + s + "' is not a number");
    }
}

constexpr const char* kAsymmetryHeader = "id,generation,alpha,eyes_pct,cheeks_pct,mouth_pct,mean_pct";

}  // namespace

const CurveCell& CurveTable::at(int generation, int alpha_tenths) const {
    const auto gi = std::find(generations.begin(), generations.end(), generation);
    const auto ai = std::find(alphas.begin(), alphas.end(), alpha_tenths);
    if (gi == generations.end() || ai == alphas.end()) {
        throw InvalidConfig("no cell for generation " + std::to_string(generation) + " at alpha " +
                            alpha_text(alpha_tenths));
    }
    return cells[gi - generations.begin()][ai - alphas.begin()];
}

CurveTable rejection_curves(std::span<const Manifest> manifests) {
    return build_table(manifests, [](const Manifest&, const GenerationState& s) { return s.rejected_forgery; });
}

CurveTable recognition_curves(std::span<const Manifest> manifests) {
    return build_table(manifests, [](const Manifest& m, const GenerationState& s) {
        int n = 0;
        for (const AttemptRecord& a : m.attempts) {
            if (a.generation == s.generation_index && a.is_unknown.has_value() && !*a.is_unknown) ++n;
        }
        return n;
    });
}

std::string curve_csv(const CurveTable& table, const std::string& numerator_name) {
    std::string out = "generation,alpha_tenths,alpha," + numerator_name + ",attempted,fraction\n";
    for (const auto& row : table.cells) {
        for (const CurveCell& c : row) {
            out += std::to_string(c.generation) + ',' + std::to_string(c.alpha_tenths) + ',' +
                   alpha_text(c.alpha_tenths) + ',' + std::to_string(c.numerator) + ',' +
                   std::to_string(c.denominator) + ',' + fmt("%.6f", c.fraction) + '\n';
        }
    }
    return out;
}

std::string gnuplot_matrix(const CurveTable& table) {
    std::string out = std::to_string(table.alphas.size());
    for (int a : table.alphas) out += ' ' + alpha_text(a);
    out += '\n';
    for (std::size_t i = 0; i < table.generations.size(); ++i) {
        out += std::to_string(table.generations[i]);
        for (const CurveCell& c : table.cells[i]) out += ' ' + fmt("%.6f", c.fraction);
        out += '\n';
    }
    return out;
}

AsymmetrySummary asymmetry_summary(std::span<const AsymmetryReport> before, std::span<const AsymmetryReport> after) {
    if (before.empty() || after.empty()) throw InvalidConfig("asymmetry summary needs non-empty before and after sets");
    AsymmetrySummary s;
    s.eyes = region(before, after, &AsymmetryReport::eyes);
    s.cheeks = region(before, after, &AsymmetryReport::cheeks);
    s.mouth = region(before, after, &AsymmetryReport::mouth);
    s.mean = region(before, after, &AsymmetryReport::mean);
    s.before_count = before.size();
    s.after_count = after.size();
    return s;
}

std::string asymmetry_summary_csv(const AsymmetrySummary& s) {
    std::string out = "region,before_pct,after_pct,delta_pct\n";
    auto row = [&](const char* name, const RegionSummary& r) {
        out += std::string(name) + ',' + fmt("%.4f", r.before) + ',' + fmt("%.4f", r.after) + ',' +
               fmt("%.4f", r.delta) + '\n';
    };
    row("eyes", s.eyes);
    row("cheeks", s.cheeks);
    row("mouth", s.mouth);
    row("mean", s.mean);
    return out;
}

std::string render_asymmetry_table(const AsymmetrySummary& s) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-8s %10s %10s %10s\n", "REGION", "Before", "After", "Delta");
    out += line;
    auto row = [&](const char* name, const RegionSummary& r) {
        std::snprintf(line, sizeof line, "%-8s %9.1f%% %9.1f%% %+9.1f\n", name, r.before, r.after, r.delta);
        out += line;
    };
    row("EYES", s.eyes);
    row("CHEEKS", s.cheeks);
    row("MOUTH", s.mouth);
    std::snprintf(line, sizeof line, "(%zu images before, %zu after)\n", s.before_count, s.after_count);
    out += line;
    return out;
}

std::string asymmetry_rows_csv(std::span<const AsymmetryRow> rows) {
    std::string out = std::string(kAsymmetryHeader) + '\n';
    for (const AsymmetryRow& r : rows) {
        out += r.id + ',' + std::to_string(r.generation) + ',' + (r.alpha_tenths ? alpha_text(*r.alpha_tenths) : "") +
               ',' + fmt("%.4f", r.report.eyes) + ',' + fmt("%.4f", r.report.cheeks) + ',' +
               fmt("%.4f", r.report.mouth) + ',' + fmt("%.4f", r.report.mean) + '\n';
    }
    return out;
}

std::vector<AsymmetryRow> parse_asymmetry_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split(line, ',') != split(kAsymmetryHeader, ',')) {
        throw InvalidConfig(std::string("asymmetry table must start with the header ") + kAsymmetryHeader);
    }
    std::vector<AsymmetryRow> rows;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line == "\r") continue;
        const auto f = split(line, ',');
        if (f.size() != 7) throw InvalidConfig("asymmetry table line " + std::to_string(number) + " needs 7 fields");
        AsymmetryRow r;
        r.id = f[0];
        r.generation = static_cast<int>(parse_double(f[1], number));
        if (!f[2].empty()) r.alpha_tenths = static_cast<int>(std::lround(parse_double(f[2], number) * 10.0));
        r.report.eyes = parse_double(f[3], number);
        r.report.cheeks = parse_double(f[4], number);
        r.report.mouth = parse_double(f[5], number);
        r.report.mean = parse_double(f[6], number);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace morphline
