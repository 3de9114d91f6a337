#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "bykov/attractors.hpp"
#include "bykov/parallel.hpp"

namespace bykov {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::Regular: return "Regular";
    case CellClass::StrangeCandidate: return "StrangeCandidate";
    case CellClass::Escaped: return "Escaped";
  }
  return "?";
}

int resolve_workers(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("BYKOV_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      // Ignore malformed values.
    }
  }
  return n;
}

ScanResult strange_attractor_scan(const MapFamily& family, const ScanGrid& grid,
                                  const ScanBudget& budget, std::uint64_t seed, int workers) {
  ScanResult res;
  if (grid.x.n <= 0 || grid.a.n <= 0) return res;
  if (budget.orbits < 1) throw std::invalid_argument("strange_attractor_scan: orbits >= 1 required");
  const std::size_t cells = static_cast<std::size_t>(grid.x.n) * grid.a.n;
  res.cells.resize(cells);

  parallel_for(cells, workers, [&](std::size_t idx) {
    const int row = static_cast<int>(idx / grid.x.n);
    const int col = static_cast<int>(idx % grid.x.n);
    CellResult cell;
    cell.row = row;
    cell.col = col;
    cell.x = grid.x.at(col);
    cell.a = grid.a.at(row);
    const ReturnMap map = grid.axis == SweepAxis::A ? family.at_A(cell.x, cell.a)
                                                    : family.at_K(cell.x, cell.a);
    cell.regime = classify(map).classification;
    const AnnulusBand band = annulus_band(map);

    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(idx)));
    int escapes = 0;
    bool any = false;
    for (int o = 0; o < budget.orbits; ++o) {
      const double x0 = kTwoPi * unit(rng);
      const double y0 = band.y_lo + (band.y_hi - band.y_lo) * unit(rng);
      const LyapunovEstimate est =
          lyapunov_spectrum(map, CylinderPoint(x0, y0), budget.iterations, budget.transient);
      if (est.escaped) {
        ++escapes;
        continue;
      }
      if (!any || est.lambda_max > cell.lambda_max) {
        cell.lambda_max = est.lambda_max;
        cell.lambda_sum = est.lambda_sum;
      }
      any = true;
    }
    cell.escape_fraction = static_cast<double>(escapes) / budget.orbits;
    cell.escaped = !any;
    if (!any) {
      cell.cls = CellClass::Escaped;
      cell.lambda_max = cell.lambda_sum = std::numeric_limits<double>::quiet_NaN();
    } else if (cell.lambda_max > 2e-3 && cell.lambda_sum < 0.0) {
      cell.cls = CellClass::StrangeCandidate;
    }
    res.cells[idx] = cell;
  });

  const auto strange = std::count_if(res.cells.begin(), res.cells.end(), [](const CellResult& c) {
    return c.cls == CellClass::StrangeCandidate;
  });
  res.strange_fraction = static_cast<double>(strange) / static_cast<double>(cells);
  return res;
}

}  // namespace bykov
