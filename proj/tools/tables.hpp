#pragma once

#include <string>

namespace gilbert::tables {

// Reruns every cell of the five published result tables at N = scale * N_ref
// and writes table1.csv .. table5.csv plus summary.txt into out_dir. Each
// row carries (cell_id, reference, estimate, se, z); the z column uses the
// combined standard error of both runs. Throws std::invalid_argument when
// scale leaves any table with fewer than 1000 replicates.
void reproduce_tables(double scale, const std::string& out_dir, int workers);

}  // namespace gilbert::tables
