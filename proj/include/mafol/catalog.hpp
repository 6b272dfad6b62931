#ifndef MAFOL_CATALOG_HPP
#define MAFOL_CATALOG_HPP

#include <array>
#include <string>
#include <vector>

#include "mafol/curvature.hpp"
#include "mafol/rng.hpp"

namespace mafol::catalog {

using fol::Complex;
using fol::Point;

/// Per-variable sampling intervals: re_lo, re_hi, im_lo, im_hi. A collapsed
/// interval pins that coordinate.
struct Box {
  std::vector<std::array<double, 4>> ranges;
};

Point sample_box(const Box& box, Rng& rng);

enum class LeafType { Parabolic, Hyperbolic, Mixed };

/// Built-in example with its expected classification. Reference values are
/// expressions over the sample point, checked pointwise across the box, not
/// baked-in constants.
struct CatalogEntry {
  std::string name;
  bool is_frame = false;
  std::string potential;                // expression text
  std::vector<std::string> frame_rows;  // frame entries
  int n = 0;
  int p = 0;
  std::vector<std::string> guards;
  Box box;
  bool holomorphic = false;  // expected verdict for potentials
  bool integrable = false;   // expected verdict for frames
  LeafType leaf_type = LeafType::Parabolic;  // metadata tying entries to the theorems
  double twist_bound = 0.0;                  // holomorphic entries: max |C| allowed
  std::string twist_ref;                     // expected twist component (p = 1 exact, else magnitude)
  std::string s_ref;                         // expected S^{j jbar}
};

const std::vector<CatalogEntry>& entries();
const CatalogEntry& get(const std::string& name);  // throws UnknownEntry

dsl::PotentialSpec potential_of(const CatalogEntry& e);
dsl::FrameSpec frame_of(const CatalogEntry& e);

/// Draw guarded samples from the entry box, deterministically in the seed.
std::vector<Point> draw_samples(const CatalogEntry& e, uint64_t seed, int count, int* rejected = nullptr);

struct ExpectationReport {
  std::string name;
  int samples = 0;
  int rejected = 0;
  int failures = 0;
  double max_residual = 0.0;
  bool pass = false;
  std::vector<std::string> notes;
};

/// Sample the box, run the full pipeline, compare against the entry's
/// expected values and bounds. Failures are report contents, not errors.
ExpectationReport run_expectations(const CatalogEntry& e, uint64_t seed, int samples);

}  // namespace mafol::catalog

#endif
