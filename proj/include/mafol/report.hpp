#ifndef MAFOL_REPORT_HPP
#define MAFOL_REPORT_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "mafol/catalog.hpp"
#include "mafol/curvature.hpp"

namespace mafol::report {

using nlohmann::json;
using fol::Point;

inline constexpr const char* kSchemaVersion = "mafol-report/1";

/// A spec file loaded from disk or resolved from "catalog:<name>".
struct LoadedSpec {
  bool is_frame = false;
  int n = 0;
  int p = 0;
  dsl::PotentialSpec potential;
  dsl::FrameSpec frame;
  std::optional<catalog::Box> box;
  std::string hash;  // fnv1a of the canonical source text
};

json spec_to_json(const catalog::CatalogEntry& entry);
LoadedSpec spec_from_json(const json& doc);
LoadedSpec load_spec(const std::string& path_or_catalog);

std::string fnv1a_hex(const std::string& text);

struct Options {
  int order = 5;
  double tol_rank = 1e-8;
  double tol_identity = 1e-8;
  int samples = 50;
  uint64_t seed = 7;
  int codim_override = 0;  // 0 = keep the spec's p
};

/// Full per-point pipeline outcome; everything the analyze report carries.
struct PointAnalysis {
  std::string status = "ok";  // ok | rank-mismatch | error
  std::string error_kind;
  std::string error_detail;
  std::optional<fol::LeviData> levi;
  std::optional<fol::MaVerdict> verdict;
  std::optional<fol::AdaptedChart> chart;
  std::optional<fol::FrameData> frame;
  std::optional<fol::TwistTensor> twist;
  std::optional<curv::CurvatureReport> curvature;
  std::optional<curv::FourthReport> fourth;
  std::optional<curv::FifthReport> fifth;
  std::vector<curv::GapReport> gaps;
};

PointAnalysis analyze_potential_at(const dsl::PotentialSpec& spec, const Point& q,
                                   const Options& opt);

json analysis_to_json(const PointAnalysis& a, const LoadedSpec& spec, const Point& q,
                      const Options& opt);

/// Command cores; the CLI maps these onto argv. Reports go to `out`,
/// diagnostics to `err`. Returns the process exit code.
int cmd_analyze(const std::string& spec_ref, const Point& q, const Options& opt, std::ostream& out,
                std::ostream& err);
int cmd_scan(const std::string& spec_ref, const Options& opt, const std::string& out_path,
             std::ostream& out, std::ostream& err);
int cmd_frame(const std::string& spec_ref, const Point& q, const Options& opt, std::ostream& out,
              std::ostream& err);
int cmd_selftest(uint64_t seed, std::ostream& out, std::ostream& err);

}  // namespace mafol::report

#endif
