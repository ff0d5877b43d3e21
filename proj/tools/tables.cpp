#include "tables.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gilbert/gilbert.hpp"

namespace gilbert::tables {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Cell {
  std::string id;
  double reference = 0.0;
  double reference_se = 0.0;  // 0 when the table prints no error bar
  double estimate = 0.0;
  double se = -1.0;           // < 0 leaves the column blank
  std::string note;
};

double zscore(const Cell& c) {
  if (c.reference_se <= 0.0 || c.se < 0.0) return kNan;
  return (c.estimate - c.reference) /
         std::sqrt(c.se * c.se + c.reference_se * c.reference_se);
}

double improvement(const EstimateResult& r) {
  if (r.estimate <= 0.0 || r.estimate >= 1.0 || r.sample_variance <= 0.0)
    return kNan;
  return r.estimate * (1.0 - r.estimate) / r.sample_variance;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_table(const std::filesystem::path& path,
                 const std::vector<Cell>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("reproduce_tables: cannot open " + path.string());
  out << "cell_id,reference,estimate,se,z\n";
  for (const Cell& c : cells) {
    out << c.id << ',' << fmt(c.reference) << ',' << fmt(c.estimate) << ','
        << (c.se < 0.0 ? "" : fmt(c.se)) << ',' << fmt(zscore(c)) << '\n';
  }
}

}  // namespace

void reproduce_tables(double scale, const std::string& out_dir, int workers) {
  if (!(scale > 0.0) || scale > 1.0)
    throw std::invalid_argument("reproduce_tables: scale must lie in (0, 1]");
  const long long n_big = std::llround(scale * 1e6);
  const long long n_small = std::llround(scale * 1e5);
  if (n_small < 1000)
    throw std::invalid_argument(
        "reproduce_tables: scale leaves a table below 1000 replicates "
        "(minimum scale is 0.01)");

  const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::filesystem::create_directories(dir);

  const double lambda = 2.0;
  const double ws[3] = {5.0, 7.5, 10.0};

  // Table 1: crude MC, 1D, k = 0 and k <= 1 columns.
  const double t1_p0[3] = {4.056e-3, 2.410e-4, 1.100e-5};
  const double t1_p0_se[3] = {6.36e-5, 1.55e-5, 3.32e-6};
  const double t1_p1[3] = {1.676e-2, 1.354e-4, 8.500e-5};
  const double t1_p1_se[3] = {1.28e-4, 3.68e-5, 9.23e-6};
  std::vector<Cell> t1;
  for (int i = 0; i < 3; ++i) {
    EstimateResult r = crude_mc_few_edges(lambda, ws[i], 0, n_big, 101 + i, workers);
    t1.push_back({"t1_p0_w" + fmt(ws[i]), t1_p0[i], t1_p0_se[i], r.estimate,
                  r.std_error, ""});
  }
  for (int i = 0; i < 3; ++i) {
    EstimateResult r = crude_mc_few_edges(lambda, ws[i], 1, n_big, 104 + i, workers);
    Cell c{"t1_ple1_w" + fmt(ws[i]), t1_p1[i], t1_p1_se[i], r.estimate,
           r.std_error, ""};
    if (i == 1)
      c.note = "reference violates p_le1 >= p_0 against its own k = 0 column";
    t1.push_back(c);
  }
  write_table(dir / "table1.csv", t1);

  // Table 2: conditional MC, same grid, plus variance-improvement factors.
  const double t2_p0[3] = {4.148e-3, 2.244e-4, 1.296e-5};
  const double t2_p0_se[3] = {1.41e-5, 1.06e-6, 1.06e-7};
  const double t2_p0_impr[3] = {20.30, 216.3, 984.9};
  const double t2_p1[3] = {1.670e-2, 1.304e-4, 9.637e-5};
  const double t2_p1_se[3] = {7.63e-4, 1.87e-5, 4.56e-6};
  const double t2_p1_impr[3] = {2.8, 3.9, 4.1};
  std::vector<Cell> t2;
  for (int i = 0; i < 3; ++i) {
    EstimateResult r = cond_mc_no_edges(lambda, ws[i], n_big, 201 + i, workers);
    Cell c{"t2_p0_w" + fmt(ws[i]), t2_p0[i], t2_p0_se[i], r.estimate,
           r.std_error, ""};
    if (i == 1)
      c.note = "reference sits several of its own SEs from the exact series value";
    t2.push_back(c);
    t2.push_back({"t2_impr_p0_w" + fmt(ws[i]), t2_p0_impr[i], 0.0,
                  improvement(r), -1.0, ""});
  }
  for (int i = 0; i < 3; ++i) {
    EstimateResult r = cond_mc_at_most_one_edge(lambda, ws[i], n_big, 204 + i, workers);
    Cell c{"t2_ple1_w" + fmt(ws[i]), t2_p1[i], t2_p1_se[i], r.estimate,
           r.std_error, ""};
    if (i == 1)
      c.note = "reference violates p_le1 >= p_0 against its own k = 0 column";
    t2.push_back(c);
    t2.push_back({"t2_impr_ple1_w" + fmt(ws[i]), t2_p1_impr[i], 0.0,
                  improvement(r), -1.0, ""});
  }
  write_table(dir / "table2.csv", t2);

  // Table 3: empirical quantiles on a 20x20 window, no error bars published.
  const double alphas[3] = {1e-2, 1e-3, 1e-4};
  const double t3_qlow[3] = {2012, 1892, 1800};
  const double t3_qhigh[3] = {2841, 2999, 3130};
  const double t3_rlow[3] = {-0.164, -0.214, -0.252};
  const double t3_rhigh[3] = {0.180, 0.246, 0.300};
  QuantileTable qt = edge_count_quantiles(
      lambda, Window::box({20.0, 20.0}), {alphas[0], alphas[1], alphas[2]},
      n_big, 301, workers);
  std::vector<Cell> t3;
  for (int i = 0; i < 3; ++i) {
    const QuantileRow& row = qt.rows[i];
    const std::string suffix = "_a" + fmt(alphas[i]);
    t3.push_back({"t3_qlow" + suffix, t3_qlow[i], 0.0, row.q_low, -1.0, ""});
    t3.push_back({"t3_qhigh" + suffix, t3_qhigh[i], 0.0, row.q_high, -1.0, ""});
    t3.push_back({"t3_rel_low" + suffix, t3_rlow[i], 0.0, row.rel_low, -1.0, ""});
    t3.push_back({"t3_rel_high" + suffix, t3_rhigh[i], 0.0, row.rel_high, -1.0, ""});
  }
  write_table(dir / "table3.csv", t3);

  // Tables 4 and 5: square windows of side 20/25/30, lambda = 2, a = 0.2.
  // Sides 20 and 30 use the exact set-covariance means. The reference rows
  // for side 25 were produced with the mean rounded to 3795, which moves both
  // integer thresholds (0.8 * 3795 = 3036, 1.2 * 3795 = 4554) one bin up from
  // the exact mean's; the rounded value is used there so the comparison
  // targets the same tail event.
  const double sides[3] = {20.0, 25.0, 30.0};
  const double mus[3] = {2407.6074562051679, 3795.0, 5495.8667764616278};
  const double a = 0.2;

  const double t4_lo[3] = {2.023e-3, 1.542e-4, 6.912e-6};
  const double t4_lo_se[3] = {6.98e-6, 7.05e-7, 4.19e-8};
  const double t4_lo_impr[3] = {414.8, 3106.4, 39415.8};
  const double t4_hi[3] = {5.118e-3, 6.764e-4, 6.242e-5};
  const double t4_hi_se[3] = {1.63e-5, 2.77e-6, 3.24e-7};
  const double t4_hi_impr[3] = {193.7, 878.6, 5911.1};
  std::vector<Cell> t4;
  for (int i = 0; i < 3; ++i) {
    Window win = Window::box({sides[i], sides[i]});
    EstimateResult lo = cond_mc_lower_tail(lambda, win, a, mus[i], n_small, 401 + i, workers);
    EstimateResult hi = cond_mc_upper_tail(lambda, win, a, mus[i], n_small, 404 + i, workers);
    t4.push_back({"t4_lower_s" + fmt(sides[i]), t4_lo[i], t4_lo_se[i],
                  lo.estimate, lo.std_error, ""});
    t4.push_back({"t4_impr_lower_s" + fmt(sides[i]), t4_lo_impr[i], 0.0,
                  improvement(lo), -1.0, ""});
    t4.push_back({"t4_upper_s" + fmt(sides[i]), t4_hi[i], t4_hi_se[i],
                  hi.estimate, hi.std_error, ""});
    t4.push_back({"t4_impr_upper_s" + fmt(sides[i]), t4_hi_impr[i], 0.0,
                  improvement(hi), -1.0, ""});
  }
  write_table(dir / "table4.csv", t4);

  const double t5_lo[3] = {2.025e-3, 1.544e-4, 6.935e-6};
  const double t5_lo_se[3] = {6.22e-6, 6.16e-7, 3.63e-8};
  const double t5_lo_impr[3] = {523.3, 4071.0, 52665.8};
  const double t5_hi[3] = {5.125e-3, 6.744e-4, 6.240e-5};
  const double t5_hi_se[3] = {1.57e-5, 2.66e-6, 3.09e-7};
  const double t5_hi_impr[3] = {207.9, 951.8, 6537.22};
  // Birth grids per window: 20, 26, and 31 bins per side (the gain erodes on
  // longer streams unless the grid is slightly finer).
  const double t5_bins[3] = {1.0, 25.0 / 26.0, 30.0 / 31.0};
  std::vector<Cell> t5;
  for (int i = 0; i < 3; ++i) {
    Window win = Window::box({sides[i], sides[i]});
    EstimateResult lo = is_lower_tail(lambda, win, a, mus[i], 1.018, n_small, 501 + i, workers);
    EstimateResult hi = is_upper_tail(lambda, win, a, mus[i], 1.01, t5_bins[i], n_small, 504 + i, workers);
    t5.push_back({"t5_lower_s" + fmt(sides[i]), t5_lo[i], t5_lo_se[i],
                  lo.estimate, lo.std_error, ""});
    t5.push_back({"t5_impr_lower_s" + fmt(sides[i]), t5_lo_impr[i], 0.0,
                  improvement(lo), -1.0, ""});
    t5.push_back({"t5_upper_s" + fmt(sides[i]), t5_hi[i], t5_hi_se[i],
                  hi.estimate, hi.std_error, ""});
    t5.push_back({"t5_impr_upper_s" + fmt(sides[i]), t5_hi_impr[i], 0.0,
                  improvement(hi), -1.0, ""});
  }
  write_table(dir / "table5.csv", t5);

  std::vector<std::string> flagged;
  auto scan = [&](const std::vector<Cell>& cells) {
    for (const Cell& c : cells) {
      const double z = zscore(c);
      if (std::isnan(z) || std::fabs(z) <= 4.0) continue;
      std::string line = c.id + ": reference " + fmt(c.reference) +
                         ", estimate " + fmt(c.estimate) + ", z = " + fmt(z);
      if (!c.note.empty()) line += "  [known: " + c.note + "]";
      flagged.push_back(line);
    }
  };
  scan(t1);
  scan(t2);
  scan(t3);
  scan(t4);
  scan(t5);

  std::ofstream summary(dir / "summary.txt");
  std::printf("wrote table1..table5.csv to %s (scale %g, N = %lld / %lld)\n",
              dir.string().c_str(), scale, n_big, n_small);
  if (flagged.empty()) {
    std::printf("all comparable cells within 4 combined SE\n");
    summary << "all comparable cells within 4 combined SE\n";
  } else {
    std::printf("cells outside 4 combined SE:\n");
    summary << "cells outside 4 combined SE:\n";
    for (const std::string& line : flagged) {
      std::printf("  %s\n", line.c_str());
      summary << "  " << line << '\n';
    }
  }
}

}  // namespace gilbert::tables
