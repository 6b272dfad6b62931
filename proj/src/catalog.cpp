#include "mafol/catalog.hpp"

#include <cmath>

namespace mafol::catalog {

Point sample_box(const Box& box, Rng& rng) {
  Point q;
  q.reserve(box.ranges.size());
  for (const auto& r : box.ranges) {
    double re = r[0] == r[1] ? r[0] : rng.uniform(r[0], r[1]);
    double im = r[2] == r[3] ? r[2] : rng.uniform(r[2], r[3]);
    q.emplace_back(re, im);
  }
  return q;
}

namespace {

constexpr std::array<double, 4> kUnit = {-1.0, 1.0, -1.0, 1.0};
// Half-plane entries sample the Im z2 = 0 slice: with Im z2 pinned the
// eigen-adapted chart keeps the z1 leaf coordinate, so the closed-form
// references -i/(2 Im z1) and 1/(4 Im^2 z1) hold exactly. Off the slice the
// unitary adaptation rescales components by powers of 1 + (Im z2 / Im z1)^2.
constexpr std::array<double, 4> kHalfZ1 = {-1.0, 1.0, 0.5, 2.0};
constexpr std::array<double, 4> kHalfZ2 = {-1.0, 1.0, 0.0, 0.0};

std::vector<CatalogEntry> build_entries() {
  std::vector<CatalogEntry> out;

  CatalogEntry linear;
  linear.name = "linear";
  linear.potential = "abs2(z2)";
  linear.n = 2;
  linear.p = 1;
  linear.box.ranges = {kUnit, kUnit};
  linear.holomorphic = true;
  linear.leaf_type = LeafType::Parabolic;
  linear.twist_bound = 1e-9;
  out.push_back(linear);

  CatalogEntry graph;
  graph.name = "graph";
  graph.potential = "abs2(z2 - z1^2)";
  graph.n = 2;
  graph.p = 1;
  graph.box.ranges = {kUnit, kUnit};
  graph.holomorphic = true;
  graph.leaf_type = LeafType::Parabolic;
  graph.twist_bound = 1e-9;
  out.push_back(graph);

  CatalogEntry graph3;
  graph3.name = "graph3";
  graph3.potential = "abs2(z3 - z1*z2)";
  graph3.n = 3;
  graph3.p = 1;
  graph3.box.ranges = {kUnit, kUnit, kUnit};
  graph3.holomorphic = true;
  graph3.leaf_type = LeafType::Parabolic;
  graph3.twist_bound = 1e-9;
  out.push_back(graph3);

  CatalogEntry product;
  product.name = "product";
  product.potential = "abs2(z2) + abs2(z3)";
  product.n = 3;
  product.p = 2;
  product.box.ranges = {kUnit, kUnit, kUnit};
  product.holomorphic = true;
  product.leaf_type = LeafType::Parabolic;
  product.twist_bound = 1e-9;
  out.push_back(product);

  CatalogEntry half;
  half.name = "halfplane";
  half.potential = "im(z2)^2 / im(z1)";
  half.n = 2;
  half.p = 1;
  half.guards = {"im(z1)"};
  half.box.ranges = {kHalfZ1, kHalfZ2};
  half.holomorphic = false;
  half.leaf_type = LeafType::Hyperbolic;
  half.twist_ref = "-i/(2*im(z1))";
  half.s_ref = "1/(4*im(z1)^2)";
  out.push_back(half);

  CatalogEntry half3;
  half3.name = "halfplane3";
  half3.potential = "im(z2)^2 / im(z1) + abs2(z3)";
  half3.n = 3;
  half3.p = 2;
  half3.guards = {"im(z1)"};
  half3.box.ranges = {kHalfZ1, kHalfZ2, kUnit};
  half3.holomorphic = false;
  half3.leaf_type = LeafType::Hyperbolic;
  half3.twist_ref = "-i/(2*im(z1))";  // largest component, up to normal ordering
  half3.s_ref = "1/(4*im(z1)^2)";
  out.push_back(half3);

  CatalogEntry slope;
  slope.name = "slope-frame";
  slope.is_frame = true;
  slope.frame_rows = {"1, (z2-conj(z2))/(z1-conj(z1))"};
  slope.n = 2;
  slope.p = 1;
  slope.guards = {"im(z1)"};
  slope.box.ranges = {kHalfZ1, kHalfZ2};
  slope.integrable = true;
  slope.leaf_type = LeafType::Hyperbolic;
  slope.twist_ref = "-i/(2*im(z1))";
  out.push_back(slope);

  CatalogEntry noninv;
  noninv.name = "noninvolutive-frame";
  noninv.is_frame = true;
  noninv.frame_rows = {"1, conj(z1)"};
  noninv.n = 2;
  noninv.p = 1;
  noninv.box.ranges = {kUnit, kUnit};
  noninv.integrable = false;
  out.push_back(noninv);

  return out;
}

}  // namespace

const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> all = build_entries();
  return all;
}

const CatalogEntry& get(const std::string& name) {
  for (const CatalogEntry& e : entries())
    if (e.name == name) return e;
  fail(ErrorKind::UnknownEntry, name);
}

dsl::PotentialSpec potential_of(const CatalogEntry& e) {
  if (e.is_frame) fail(ErrorKind::BadInput, e.name + " is a frame entry");
  dsl::PotentialSpec spec = dsl::parse_potential(e.potential, e.n, e.p);
  for (const std::string& g : e.guards) spec.guards.push_back(dsl::parse_expr(g, e.n));
  return spec;
}

dsl::FrameSpec frame_of(const CatalogEntry& e) {
  if (!e.is_frame) fail(ErrorKind::BadInput, e.name + " is a potential entry");
  return dsl::parse_frame(e.frame_rows, e.n);
}

std::vector<Point> draw_samples(const CatalogEntry& e, uint64_t seed, int count, int* rejected) {
  Rng rng(seed);
  std::vector<Point> pts;
  int rej = 0;
  dsl::PotentialSpec guard_spec;  // guards evaluated through a potential shell
  guard_spec.n = e.n;
  guard_spec.p = e.p;
  for (const std::string& g : e.guards) guard_spec.guards.push_back(dsl::parse_expr(g, e.n));
  int budget = count * 20 + 100;
  while (static_cast<int>(pts.size()) < count && budget-- > 0) {
    Point q = sample_box(e.box, rng);
    if (dsl::guards_ok(guard_spec, q)) pts.push_back(std::move(q));
    else ++rej;
  }
  if (rejected) *rejected = rej;
  if (static_cast<int>(pts.size()) < count)
    fail(ErrorKind::BadInput, "guards reject nearly the whole box of " + e.name);
  return pts;
}

namespace {

void track(ExpectationReport& rep, bool ok, double residual, const std::string& note) {
  rep.max_residual = std::max(rep.max_residual, residual);
  if (!ok) {
    ++rep.failures;
    if (rep.notes.size() < 8) rep.notes.push_back(note);
  }
}

void expect_potential(const CatalogEntry& e, const Point& q, int order, ExpectationReport& rep) {
  dsl::PotentialSpec spec = potential_of(e);
  fol::Tolerances tol;

  jet::WJet u = dsl::eval_jet(spec, q, order);
  double reality = u.reality_defect();
  track(rep, reality <= 1e-12, reality, "reality symmetry");

  fol::LeviData levi = fol::levi_matrix(u, tol.rank_rel);
  fol::MaVerdict verdict = fol::ma_verify(levi, e.p, tol.rank_rel);
  if (!(verdict.degenerate && verdict.nondegenerate)) {
    track(rep, false, 0.0, "rank " + std::to_string(verdict.rank));
    return;
  }

  fol::AdaptedChart chart = fol::adapt_chart(spec, q, order, tol);
  fol::TwistTensor twist = fol::twist_potential(chart);
  curv::CurvatureReport ricci = curv::ricci_matrix(chart);
  double ident = curv::twist_ricci_identity(chart, twist, ricci);
  track(rep, ident <= 1e-8, ident, "twist-Ricci identity");
  track(rep, ricci.route_agreement <= 1e-8, ricci.route_agreement, "S routes disagree");

  std::vector<Complex> cq(q.begin(), q.end());
  if (e.holomorphic) {
    track(rep, twist.max_abs <= e.twist_bound, twist.max_abs, "twist above bound");
    double smax = 0.0;
    for (int j = 0; j < chart.nleaf(); ++j)
      smax = std::max({smax, std::abs(ricci.S_matrix(j, j)), std::abs(ricci.S_closed(j, j))});
    track(rep, smax <= e.twist_bound, smax, "S above bound");
  } else {
    Complex tref = dsl::eval_point(*dsl::parse_expr(e.twist_ref, e.n), cq);
    double sref = dsl::eval_point(*dsl::parse_expr(e.s_ref, e.n), cq).real();
    if (e.p == 1) {
      double dt = std::abs(twist.at(0, 0, 0) - tref) / std::abs(tref);
      track(rep, dt <= 1e-8, dt, "twist vs reference");
    } else {
      double dt = std::abs(twist.max_abs - std::abs(tref)) / std::abs(tref);
      track(rep, dt <= 1e-8, dt, "twist magnitude vs reference");
    }
    double ds = std::abs(ricci.S_matrix(0, 0).real() - sref) / sref;
    track(rep, ds <= 1e-8, ds, "S vs reference");
    // curvature gap on the non-holomorphic entries
    curv::GapReport gap = curv::curvature_gap(chart, 0, tol.gap_threshold);
    if (!gap.skipped) {
      if (e.p == 1) {
        double dg = gap.equality_residual / std::max(gap.S_value, 1e-300);
        track(rep, dg <= 1e-6, dg, "curvature equality");
      } else {
        track(rep, gap.gap >= -1e-8, -std::min(gap.gap, 0.0), "curvature inequality");
      }
    }
  }
}

void expect_frame(const CatalogEntry& e, const Point& q, ExpectationReport& rep) {
  dsl::FrameSpec frame = frame_of(e);
  double res = fol::frobenius_residual(frame, q);
  if (e.integrable) {
    track(rep, res <= 1e-10, res, "Frobenius residual");
    if (!e.twist_ref.empty()) {
      std::vector<Complex> cq(q.begin(), q.end());
      Complex tref = dsl::eval_point(*dsl::parse_expr(e.twist_ref, e.n), cq);
      fol::FramePointData data = fol::twist_frame(frame, q);
      double dt = std::abs(data.twist.at(0, 0, 0) - tref) / std::abs(tref);
      track(rep, dt <= 1e-8, dt, "frame twist vs reference");
    }
  } else {
    track(rep, res >= 0.5, res, "expected non-integrable");
  }
}

}  // namespace

ExpectationReport run_expectations(const CatalogEntry& e, uint64_t seed, int samples) {
  ExpectationReport rep;
  rep.name = e.name;
  std::vector<Point> pts = draw_samples(e, seed, samples, &rep.rejected);
  rep.samples = static_cast<int>(pts.size());

  int point_failures = 0;
  for (const Point& q : pts) {
    int before = rep.failures;
    try {
      if (e.is_frame) expect_frame(e, q, rep);
      else expect_potential(e, q, 5, rep);
    } catch (const Error& err) {
      track(rep, false, 0.0, err.what());
    }
    if (rep.failures != before) ++point_failures;
  }
  rep.pass = samples == 0 || point_failures <= samples / 20;  // 95% of samples must verify
  return rep;
}

}  // namespace mafol::catalog
