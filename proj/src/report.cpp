#include "mafol/report.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mafol/acceptance.hpp"

namespace mafol::report {

namespace {

json complex_to_json(const fol::Complex& c) { return json::array({c.real(), c.imag()}); }

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json point_to_json(const Point& q) {
  json out = json::array();
  for (const auto& c : q) out.push_back(complex_to_json(c));
  return out;
}

json box_to_json(const catalog::Box& box) {
  json out = json::object();
  for (size_t k = 0; k < box.ranges.size(); ++k) {
    const auto& r = box.ranges[k];
    out["z" + std::to_string(k + 1)] = {{"re", {r[0], r[1]}}, {"im", {r[2], r[3]}}};
  }
  return out;
}

catalog::Box box_from_json(const json& doc, int n) {
  catalog::Box box;
  box.ranges.resize(n, {0, 0, 0, 0});
  for (int k = 0; k < n; ++k) {
    const json& v = doc.at("z" + std::to_string(k + 1));
    box.ranges[k] = {v.at("re").at(0).get<double>(), v.at("re").at(1).get<double>(),
                     v.at("im").at(0).get<double>(), v.at("im").at(1).get<double>()};
  }
  return box;
}

json tolerances_json(const Options& opt) {
  return {{"rank", opt.tol_rank},
          {"identity", opt.tol_identity},
          {"gap_threshold", 1e-8},
          {"cond_limit", 1e8},
          {"div_eps", 1e-12}};
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

json spec_to_json(const catalog::CatalogEntry& entry) {
  json doc;
  doc["n"] = entry.n;
  if (entry.is_frame) {
    doc["frame"] = entry.frame_rows;
  } else {
    doc["p"] = entry.p;
    doc["potential"] = entry.potential;
  }
  doc["guards"] = entry.guards;
  doc["box"] = box_to_json(entry.box);
  return doc;
}

LoadedSpec spec_from_json(const json& doc) {
  LoadedSpec spec;
  spec.n = doc.at("n").get<int>();
  std::vector<dsl::AstPtr> guards;
  if (doc.contains("guards"))
    for (const auto& g : doc.at("guards")) guards.push_back(dsl::parse_expr(g.get<std::string>(), spec.n));

  if (doc.contains("frame")) {
    spec.is_frame = true;
    std::vector<std::string> rows;
    for (const auto& r : doc.at("frame")) rows.push_back(r.get<std::string>());
    spec.frame = dsl::parse_frame(rows, spec.n);
    spec.p = spec.frame.p();
  } else {
    spec.p = doc.at("p").get<int>();
    spec.potential = dsl::parse_potential(doc.at("potential").get<std::string>(), spec.n, spec.p);
    spec.potential.guards = guards;
  }
  if (doc.contains("box")) spec.box = box_from_json(doc.at("box"), spec.n);
  spec.hash = fnv1a_hex(doc.dump());
  return spec;
}

LoadedSpec load_spec(const std::string& ref) {
  json doc;
  if (ref.rfind("catalog:", 0) == 0) {
    doc = spec_to_json(catalog::get(ref.substr(8)));
  } else {
    std::ifstream in(ref);
    if (!in) fail(ErrorKind::BadInput, "cannot open spec file " + ref);
    in >> doc;
  }
  return spec_from_json(doc);
}

PointAnalysis analyze_potential_at(const dsl::PotentialSpec& spec, const Point& q,
                                   const Options& opt) {
  PointAnalysis a;
  fol::Tolerances tol;
  tol.rank_rel = opt.tol_rank;
  tol.identity_rel = opt.tol_identity;
  try {
    jet::WJet u = dsl::eval_jet(spec, q, opt.order);
    a.levi = fol::levi_matrix(u, tol.rank_rel);
    a.verdict = fol::ma_verify(*a.levi, spec.p, tol.rank_rel);
    if (!(a.verdict->degenerate && a.verdict->nondegenerate)) {
      a.status = "rank-mismatch";
      return a;
    }
    a.chart = fol::adapt_chart(spec, q, opt.order, tol);
    a.frame = fol::build_frame(*a.chart, tol);
    a.twist = fol::twist_potential(*a.chart);
    if (opt.order >= 4) {
      a.curvature = curv::ricci_matrix(*a.chart);
      curv::twist_ricci_identity(*a.chart, *a.twist, *a.curvature);
      a.fourth = curv::fourth_identity(*a.chart);
    }
    if (opt.order >= 5) {
      a.fifth = curv::fifth_identity(*a.chart);
      for (int j = 0; j < a.chart->nleaf(); ++j)
        a.gaps.push_back(curv::curvature_gap(*a.chart, j));
    }
  } catch (const Error& e) {
    a.status = "error";
    a.error_kind = to_string(e.kind());
    a.error_detail = e.what();
  }
  return a;
}

json analysis_to_json(const PointAnalysis& a, const LoadedSpec& spec, const Point& q,
                      const Options& opt) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["input"] = {{"spec_hash", spec.hash}, {"point", point_to_json(q)}, {"n", spec.n},
                  {"p", spec.p},           {"order", opt.order}};
  doc["tolerances"] = tolerances_json(opt);
  doc["status"] = a.status;
  if (a.status == "error") doc["error"] = {{"kind", a.error_kind}, {"detail", a.error_detail}};
  if (a.levi) {
    json eig = json::array();
    for (int i = 0; i < a.levi->eigenvalues.size(); ++i) eig.push_back(a.levi->eigenvalues[i]);
    doc["levi"] = {{"entries", matrix_to_json(a.levi->H_full)},
                   {"eigenvalues", eig},
                   {"rank", a.levi->rank},
                   {"herm_defect", a.levi->herm_defect}};
    if (a.verdict)
      doc["levi"]["verdict"] = {{"degenerate", a.verdict->degenerate},
                                {"nondegenerate", a.verdict->nondegenerate}};
  }
  if (a.chart)
    doc["chart"] = {{"unitary", matrix_to_json(a.chart->U)},
                    {"block_defect", a.chart->block_defect}};
  if (a.frame) {
    doc["frame"] = {{"Lambda", matrix_to_json(a.frame->Lambda)},
                    {"H", matrix_to_json(a.frame->H)},
                    {"B", matrix_to_json(a.frame->B)},
                    {"cond_H", a.frame->cond},
                    {"annihilation_residual", a.frame->annihilation_residual}};
  }
  if (a.twist) {
    json comps = json::array();
    for (const auto& c : a.twist->comps) comps.push_back(complex_to_json(c));
    doc["twist"] = {{"components", comps}, {"norm_sq", a.twist->norm_sq},
                    {"max_abs", a.twist->max_abs}};
  }
  if (a.curvature) {
    doc["curvature"] = {{"S_matrix", matrix_to_json(a.curvature->S_matrix)},
                        {"S_closed", matrix_to_json(a.curvature->S_closed)},
                        {"herm_defect", a.curvature->herm_defect},
                        {"psd_margin", a.curvature->psd_margin},
                        {"psd_margin_closed", a.curvature->psd_margin_closed},
                        {"route_agreement", a.curvature->route_agreement},
                        {"identity_residual", a.curvature->identity_residual}};
  }
  json idents = json::object();
  if (a.fourth)
    idents["fourth"] = {{"max_identity_rel", a.fourth->max_identity_rel},
                        {"max_vanishing_rel", a.fourth->max_vanishing_rel},
                        {"cases", a.fourth->cases}};
  if (a.fifth) idents["fifth"] = {{"max_rel", a.fifth->max_rel}, {"cases", a.fifth->cases}};
  if (!idents.empty()) doc["identities"] = idents;
  if (!a.gaps.empty()) {
    json gaps = json::array();
    for (const auto& g : a.gaps) {
      json gj = {{"j", g.j}, {"skipped", g.skipped}};
      if (!g.skipped) {
        gj["S_value"] = g.S_value;
        gj["logS_laplacian"] = g.logS_laplacian;
        gj["gap"] = g.gap;
        gj["equality_residual"] = g.equality_residual;
        gj["sj_residual"] = g.sj_residual;
        gj["sjj_residual"] = g.sjj_residual;
      }
      gaps.push_back(gj);
    }
    doc["gaps"] = gaps;
  }
  return doc;
}

namespace {

int exit_code_for(const PointAnalysis& a) {
  if (a.status == "ok") return 0;
  if (a.status == "rank-mismatch") return 2;
  return a.error_kind == to_string(ErrorKind::RankMismatch) ? 2 : 3;
}

}  // namespace

int cmd_analyze(const std::string& spec_ref, const Point& q, const Options& opt, std::ostream& out,
                std::ostream& err) {
  LoadedSpec spec;
  try {
    spec = load_spec(spec_ref);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 3;
  }
  if (spec.is_frame) {
    err << "analyze expects a potential spec; use the frame command\n";
    return 3;
  }
  if (opt.codim_override > 0) {
    if (opt.codim_override >= spec.n) {
      err << "BadCodimension: --codim " << opt.codim_override << " with n = " << spec.n << "\n";
      return 3;
    }
    spec.p = opt.codim_override;
    spec.potential.p = opt.codim_override;
  }
  PointAnalysis a = analyze_potential_at(spec.potential, q, opt);
  out << analysis_to_json(a, spec, q, opt).dump(2) << "\n";
  if (a.status != "ok") err << "status: " << a.status << " " << a.error_detail << "\n";
  return exit_code_for(a);
}

int cmd_scan(const std::string& spec_ref, const Options& opt, const std::string& out_path,
             std::ostream& out, std::ostream& err) {
  LoadedSpec spec;
  try {
    spec = load_spec(spec_ref);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 3;
  }
  if (spec.is_frame) {
    err << "scan expects a potential spec\n";
    return 3;
  }
  if (!spec.box) {
    err << "scan needs a sampling box in the spec\n";
    return 3;
  }

  Rng rng(opt.seed);
  json digests = json::array();
  int rejected = 0;
  int accepted = 0;
  bool all_ok = true;
  double max_twist = 0.0, max_identity = 0.0, max_fourth = 0.0, max_fifth = 0.0;
  double min_gap = 0.0;
  bool any_gap = false;
  std::map<std::string, int> statuses;

  int budget = opt.samples * 20 + 100;
  while (accepted < opt.samples && budget-- > 0) {
    Point q = catalog::sample_box(*spec.box, rng);
    if (!dsl::guards_ok(spec.potential, q)) {
      ++rejected;
      continue;
    }
    ++accepted;
    PointAnalysis a = analyze_potential_at(spec.potential, q, opt);
    statuses[a.status]++;
    json digest = {{"index", accepted - 1}, {"point", point_to_json(q)}, {"status", a.status}};
    if (a.twist) {
      digest["max_twist"] = a.twist->max_abs;
      max_twist = std::max(max_twist, a.twist->max_abs);
    }
    if (a.curvature) {
      digest["identity_residual"] = a.curvature->identity_residual;
      max_identity = std::max(max_identity, a.curvature->identity_residual);
    }
    if (a.fourth) max_fourth = std::max(max_fourth, a.fourth->max_identity_rel);
    if (a.fifth) max_fifth = std::max(max_fifth, a.fifth->max_rel);
    for (const auto& g : a.gaps)
      if (!g.skipped) {
        min_gap = any_gap ? std::min(min_gap, g.gap) : g.gap;
        any_gap = true;
      }
    if (a.status != "ok") all_ok = false;
    digests.push_back(digest);
  }

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["spec_hash"] = spec.hash;
  doc["seed"] = opt.seed;
  doc["order"] = opt.order;
  doc["tolerances"] = tolerances_json(opt);
  doc["samples"] = accepted;
  doc["rejected"] = rejected;
  doc["statuses"] = statuses;
  doc["points"] = digests;
  doc["aggregates"] = {{"max_twist", max_twist},
                       {"max_identity_residual", max_identity},
                       {"max_fourth_residual", max_fourth},
                       {"max_fifth_residual", max_fifth}};
  if (any_gap) doc["aggregates"]["min_gap"] = min_gap;

  std::string text = doc.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      err << "cannot write " << out_path << "\n";
      return 3;
    }
    f << text;
  } else {
    out << text;
  }
  return all_ok ? 0 : 3;
}

int cmd_frame(const std::string& spec_ref, const Point& q, const Options& opt, std::ostream& out,
              std::ostream& err) {
  LoadedSpec spec;
  try {
    spec = load_spec(spec_ref);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 3;
  }
  if (!spec.is_frame) {
    err << "frame expects a frame spec\n";
    return 3;
  }
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["input"] = {{"spec_hash", spec.hash}, {"point", point_to_json(q)}, {"n", spec.n},
                  {"p", spec.p}};
  try {
    double resid = fol::frobenius_residual(spec.frame, q);
    fol::Tolerances tol;
    bool integrable = resid <= tol.integrability;
    doc["frobenius_residual"] = resid;
    doc["integrable"] = integrable;
    fol::FramePointData data = fol::twist_frame(spec.frame, q);
    json comps = json::array();
    for (const auto& c : data.twist.comps) comps.push_back(complex_to_json(c));
    doc["twist"] = {{"components", comps}, {"max_abs", data.twist.max_abs}};
    doc["normal_basis"] = matrix_to_json(data.normal);
    doc["status"] = integrable ? "ok" : "non-integrable";
    out << doc.dump(2) << "\n";
    if (!integrable) {
      err << "frame is not integrable at the point (residual " << resid << ")\n";
      return 4;
    }
    return 0;
  } catch (const Error& e) {
    doc["status"] = "error";
    doc["error"] = {{"kind", to_string(e.kind())}, {"detail", e.what()}};
    out << doc.dump(2) << "\n";
    err << e.what() << "\n";
    return 3;
  }
}

int cmd_selftest(uint64_t seed, std::ostream& out, std::ostream& err) {
  acceptance::SelftestOutcome outcome = acceptance::selftest(seed);
  out << outcome.table;
  if (!outcome.all_pass) {
    err << "self-test failed\n";
    return 5;
  }
  return 0;
}

}  // namespace mafol::report
