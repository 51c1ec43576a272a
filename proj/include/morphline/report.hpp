#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphline/asymmetry.hpp"
#include "morphline/dataset_io.hpp"

namespace morphline {

struct CurveCell {
    int generation = 0;
    int alpha_tenths = 0;
    int numerator = 0;
    /// Candidates attempted in the cell.
    int denominator = 0;
    /// numerator / denominator, or 0 for a cell without attempts.
    double fraction = 0.0;
};

/// Generation x alpha grid, both axes ascending.
struct CurveTable {
    std::vector<int> generations;
    std::vector<int> alphas;
    /// cells[i][j] belongs to generations[i] and alphas[j].
    std::vector<std::vector<CurveCell>> cells;

    /// Throws InvalidConfig for a cell outside the grid.
    const CurveCell& at(int generation, int alpha_tenths) const;
};

/// Per cell: rejected_forgery / attempted. Manifests are typically one per alpha run and must
/// cover every (generation, alpha) pair exactly once; otherwise InvalidConfig.
CurveTable rejection_curves(std::span<const Manifest> manifests);

/// Per cell: attempted candidates the matcher identified (is_unknown false) / attempted.
CurveTable recognition_curves(std::span<const Manifest> manifests);

/// Long format: generation,alpha_tenths,alpha,<numerator_name>,attempted,fraction
std::string curve_csv(const CurveTable& table, const std::string& numerator_name);

/// Whitespace matrix for gnuplot `matrix nonuniform`: first row holds the alphas, first
/// column the generations.
std::string gnuplot_matrix(const CurveTable& table);

struct RegionSummary {
    double before = 0.0;
    double after = 0.0;
    /// after - before
    double delta = 0.0;
};

struct AsymmetrySummary {
    RegionSummary eyes;
    RegionSummary cheeks;
    RegionSummary mouth;
    RegionSummary mean;
    std::size_t before_count = 0;
    std::size_t after_count = 0;
};

/// Cohort means per region; independent of input order. Throws InvalidConfig when either
/// cohort is empty.
AsymmetrySummary asymmetry_summary(std::span<const AsymmetryReport> before, std::span<const AsymmetryReport> after);

/// region,before_pct,after_pct,delta_pct
std::string asymmetry_summary_csv(const AsymmetrySummary& s);

/// Plain-text table with EYES / CHEEKS / MOUTH rows and Before / After columns.
std::string render_asymmetry_table(const AsymmetrySummary& s);

/// One row of the batch asymmetry CSV.
struct AsymmetryRow {
    std::string id;
    int generation = 0;
    std::optional<int> alpha_tenths;
    AsymmetryReport report;
};

/// Header `id,generation,alpha,eyes_pct,cheeks_pct,mouth_pct,mean_pct`, one row per entry.
std::string asymmetry_rows_csv(std::span<const AsymmetryRow> rows);
/// Throws InvalidConfig on a malformed table.
std::vector<AsymmetryRow> parse_asymmetry_csv(const std::string& text);

}  // namespace morphline
