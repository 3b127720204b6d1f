// Command-line entry point: certify, chambers, region, constants, stability, embed,
// fine-moduli, dim. Exit codes: 0 success, 2 schema error, 3 invariant violation.

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gitpol/certifier.hpp"
#include "gitpol/embedding.hpp"
#include "gitpol/errors.hpp"
#include "gitpol/finemoduli.hpp"
#include "gitpol/stability.hpp"

using namespace gitpol;

namespace {

struct Common {
  std::string spec, pol, morphism, out, format = "json";
  uint64_t seed = 1;
  size_t budget = 4000;
  int jobs = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--budget", c.budget, "Search budget");
  app->add_option("--jobs", c.jobs, "Worker threads (default: GITPOL_JOBS or all cores)");
  app->add_option("--out", c.out, "Output file (default: stdout)");
  app->add_option("--format", c.format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg", "text"}));
}

void apply_jobs(int jobs) {
  if (jobs <= 0) {
    if (const char* env = std::getenv("GITPOL_JOBS")) {
      try {
        jobs = std::stoi(env);
      } catch (const std::exception&) {
        throw SchemaError(std::string("GITPOL_JOBS is not an integer: ") + env);
      }
    }
  }
  if (jobs > 0) omp_set_num_threads(jobs);
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw SchemaError("cannot write " + out);
  f << text;
}

void emit(const Json& j, const std::string& out) { emit_text(j.dump(2) + "\n", out); }

ProblemSpec load_spec(const std::string& path) {
  if (path.empty()) throw SchemaError("--spec is required");
  ProblemSpec s = spec_from_json(read_json_file(path));
  s.validate();
  return s;
}

Polarization load_pol(const std::string& path) {
  if (path.empty()) throw SchemaError("--pol is required");
  return polarization_from_json(read_json_file(path));
}

MorphismElement load_morphism(SystemPtr sys, const std::string& path) {
  if (path.empty()) throw SchemaError("--morphism is required");
  return morphism_from_json(sys, read_json_file(path));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

double approx(const Rational& x) { return x.get_d(); }

Json halfspace_json(const HalfSpace& h) {
  return Json{{"coeffs", to_json(h.coeffs)}, {"constant", to_json(h.constant)}, {"strict", h.strict},
              {"label", h.label}};
}

Json wall_json(const Wall& w) {
  Json src = Json::array();
  for (const auto& d : w.sources) src.push_back(dimension_vector_to_json(d));
  Json j{{"normal", to_json(w.normal)}, {"constant", to_json(w.constant)}, {"sources", src}};
  if (w.normal.size() == 1) j["value"] = to_json(-w.constant / w.normal[0]);
  return j;
}

Json polygon_json(const std::vector<Vec>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

// ---- region plots ----

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return 60 + (x - x0) / (x1 - x0) * 480; }
  double py(double y) const { return 520 - (y - y0) / (y1 - y0) * 480; }
};

std::string svg_2d(const AdmissibleRegion& reg, const std::vector<Wall>& walls) {
  const Box box = reg.chart.bounding_box();
  Frame f{approx(box.lo[0]), approx(box.hi[0]), approx(box.lo[1]), approx(box.hi[1])};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"580\" font-family=\"sans-serif\" "
       "font-size=\"14\">\n";
  s << "<rect x=\"60\" y=\"40\" width=\"480\" height=\"480\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& piece : reg.region.pieces) {
    if (!piece.nonempty()) continue;
    s << "<polygon fill=\"#7fb3d5\" fill-opacity=\"0.6\" stroke=\"#1f618d\" points=\"";
    for (const auto& v : piece.closure) s << f.px(approx(v[0])) << "," << f.py(approx(v[1])) << " ";
    s << "\"/>\n";
  }
  // Walls clipped to the frame.
  const std::vector<Vec> frame = {box.lo, {box.hi[0], box.lo[1]}, box.hi, {box.lo[0], box.hi[1]}};
  for (const auto& w : walls) {
    std::vector<Vec> hits;
    for (size_t e = 0; e < 4; ++e) {
      const Vec& a = frame[e];
      const Vec& b = frame[(e + 1) % 4];
      const Rational va = w.normal[0] * a[0] + w.normal[1] * a[1] + w.constant;
      const Rational vb = w.normal[0] * b[0] + w.normal[1] * b[1] + w.constant;
      if (sgn(va) == 0) hits.push_back(a);
      if (sgn(va) * sgn(vb) < 0) {
        const Rational t = va / (va - vb);
        hits.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
      }
    }
    if (hits.size() < 2) continue;
    s << "<line x1=\"" << f.px(approx(hits[0][0])) << "\" y1=\"" << f.py(approx(hits[0][1])) << "\" x2=\""
      << f.px(approx(hits[1][0])) << "\" y2=\"" << f.py(approx(hits[1][1])) << "\" stroke=\"#c0392b\"/>\n";
  }
  const auto& names = reg.chart.names();
  s << "<text x=\"300\" y=\"560\" text-anchor=\"middle\">" << names[0] << "</text>\n";
  s << "<text x=\"20\" y=\"280\" transform=\"rotate(-90 20 280)\" text-anchor=\"middle\">" << names[1]
    << "</text>\n";
  s << "<text x=\"60\" y=\"538\" text-anchor=\"middle\">" << f.x0 << "</text>\n";
  s << "<text x=\"540\" y=\"538\" text-anchor=\"middle\">" << f.x1 << "</text>\n";
  s << "<text x=\"52\" y=\"524\" text-anchor=\"end\">" << f.y0 << "</text>\n";
  s << "<text x=\"52\" y=\"44\" text-anchor=\"end\">" << f.y1 << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string svg_1d(const AdmissibleRegion& reg, const std::vector<Wall>& walls) {
  const Box box = reg.chart.bounding_box();
  Frame f{approx(box.lo[0]), approx(box.hi[0]), 0, 1};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"140\" font-family=\"sans-serif\" "
       "font-size=\"14\">\n";
  s << "<line x1=\"60\" y1=\"70\" x2=\"540\" y2=\"70\" stroke=\"black\"/>\n";
  for (const auto& piece : reg.region.pieces) {
    if (!piece.nonempty()) continue;
    const double a = f.px(approx(piece.closure.front()[0])), b = f.px(approx(piece.closure.back()[0]));
    s << "<rect x=\"" << a << "\" y=\"60\" width=\"" << (b - a)
      << "\" height=\"20\" fill=\"#7fb3d5\" fill-opacity=\"0.6\"/>\n";
  }
  for (const auto& w : walls) {
    const double x = f.px(approx(-w.constant / w.normal[0]));
    s << "<line x1=\"" << x << "\" y1=\"50\" x2=\"" << x << "\" y2=\"90\" stroke=\"#c0392b\"/>\n";
  }
  s << "<text x=\"300\" y=\"125\" text-anchor=\"middle\">" << reg.chart.names()[0] << "</text>\n";
  s << "<text x=\"60\" y=\"108\" text-anchor=\"middle\">" << f.x0 << "</text>\n";
  s << "<text x=\"540\" y=\"108\" text-anchor=\"middle\">" << f.x1 << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

// One row per half-space of each piece, then one row per closure vertex.
std::string region_csv(const AdmissibleRegion& reg) {
  std::ostringstream s;
  s << "piece,kind,index,values\n";
  for (size_t p = 0; p < reg.inequalities.size(); ++p)
    for (size_t k = 0; k < reg.inequalities[p].size(); ++k) {
      const HalfSpace& h = reg.inequalities[p][k];
      s << p << ",halfspace," << k << ",";
      for (const auto& c : h.coeffs) s << to_string(c) << " ";
      s << to_string(h.constant) << (h.strict ? " >0" : " >=0") << "\n";
    }
  for (size_t p = 0; p < reg.region.pieces.size(); ++p)
    for (size_t k = 0; k < reg.region.pieces[p].closure.size(); ++k) {
      s << p << ",vertex," << k << ",";
      for (const auto& c : reg.region.pieces[p].closure[k]) s << to_string(c) << " ";
      s << "\n";
    }
  return s.str();
}

// ---- subcommands ----

int run_certify(const Common& c, const std::string& verify_path, size_t trials) {
  CertifyOptions opt{c.seed, trials};
  if (!verify_path.empty()) {
    const CertificateCheck chk = verify_certificate(read_json_file(verify_path), opt);
    emit(Json{{"schema", "1"}, {"consistent", chk.consistent}, {"reproducible", chk.reproducible},
              {"message", chk.message}},
         c.out);
    return chk.consistent && chk.reproducible ? 0 : 3;
  }
  emit(certificate_to_json(certify(load_spec(c.spec), load_pol(c.pol), opt)), c.out);
  return 0;
}

int run_chambers(const Common& c, const std::vector<std::string>& params, const std::vector<std::string>& windows) {
  const ProblemSpec spec = load_spec(c.spec);
  const Chart chart = params.empty() ? Chart::standard(spec.left_mults, spec.right_mults)
                                     : Chart(params, spec.left_mults, spec.right_mults);
  Box box = chart.bounding_box();
  if (!windows.empty()) {
    if (static_cast<int>(windows.size()) != chart.dim())
      throw SchemaError("need one --window per chart parameter");
    for (size_t d = 0; d < windows.size(); ++d) {
      const auto ends = split_list(windows[d]);
      if (ends.size() != 2) throw SchemaError("--window expects lo,hi");
      box.lo[d] = parse_rational(ends[0]);
      box.hi[d] = parse_rational(ends[1]);
      if (box.lo[d] >= box.hi[d]) throw SchemaError("--window needs lo < hi");
    }
  }
  ChamberSet cs = chambers(chart, box);
  if (chart.dim() == 1)
    std::sort(cs.walls.begin(), cs.walls.end(), [](const Wall& a, const Wall& b) {
      return -a.constant / a.normal[0] < -b.constant / b.normal[0];
    });
  Json walls = Json::array(), cells = Json::array();
  for (const auto& w : cs.walls) walls.push_back(wall_json(w));
  for (const auto& cell : cs.cells) cells.push_back(polygon_json(cell));
  emit(Json{{"schema", "1"},
            {"params", chart.names()},
            {"window", {{"lo", to_json(box.lo)}, {"hi", to_json(box.hi)}}},
            {"walls", walls},
            {"chambers", cells}},
       c.out);
  return 0;
}

int run_region(const Common& c, const std::string& params, size_t trials, const std::string& svg,
               const std::string& csv) {
  const ProblemSpec spec = load_spec(c.spec);
  const auto names = split_list(params);
  const AdmissibleRegion reg =
      admissible_region(spec, names.empty() ? Chart::standard(spec.left_mults, spec.right_mults).names() : names,
                        CertifyOptions{c.seed, trials});
  const std::vector<Wall> walls = singular_polarizations(reg.chart);
  auto plot = [&] { return reg.chart.dim() == 1 ? svg_1d(reg, walls) : svg_2d(reg, walls); };
  if (!svg.empty()) emit_text(plot(), svg);
  if (!csv.empty()) emit_text(region_csv(reg), csv);
  if (c.format == "svg") {
    emit_text(plot(), c.out);
    return 0;
  }
  if (c.format == "csv") {
    emit_text(region_csv(reg), c.out);
    return 0;
  }
  Json pieces = Json::array();
  for (size_t p = 0; p < reg.region.pieces.size(); ++p) {
    Json hs = Json::array();
    const auto& ineq = p < reg.inequalities.size() ? reg.inequalities[p] : reg.region.pieces[p].constraints;
    for (const auto& h : ineq) hs.push_back(halfspace_json(h));
    pieces.push_back(Json{{"halfspaces", hs},
                          {"vertices", polygon_json(reg.region.pieces[p].closure)},
                          {"nonempty", reg.region.pieces[p].nonempty()}});
  }
  Json wj = Json::array();
  for (const auto& w : walls) wj.push_back(wall_json(w));
  emit(Json{{"schema", "1"},
            {"params", reg.chart.names()},
            {"nonempty", reg.region.nonempty()},
            {"projectivity_available", reg.projectivity_available},
            {"dropped_inexact", reg.dropped_inexact},
            {"pieces", pieces},
            {"walls", wj}},
       c.out);
  return 0;
}

Json constant_json(const std::string& name, const ConstantValue& v) {
  return Json{{"name", name}, {"value", to_json(v.value)}, {"source", to_string(v.source)}, {"exact", v.exact()}};
}

int run_constants(const Common& c, size_t trials) {
  Json out{{"schema", "1"}};
  if (!c.spec.empty()) {
    SystemPtr sys = build_line_bundle_system(load_spec(c.spec));
    Json list = Json::array();
    if (sys->r >= 2)
      for (int l = 0; l < sys->s; ++l) {
        const ConstantQuery q = c_query(sys, l);
        list.push_back(constant_json(describe(q), resolve(q, c.seed, trials)));
      }
    if (sys->s >= 2)
      for (int i = 0; i < sys->r; ++i) {
        const ConstantQuery q = d_query(sys, i);
        list.push_back(constant_json(describe(q), resolve(q, c.seed, trials)));
      }
    if (sys->r == 3 && sys->s == 1) {
      list.push_back(constant_json(describe(c3_query(sys)), resolve(c3_query(sys), c.seed, trials)));
      list.push_back(constant_json(describe(c3_prime_query(sys)), resolve(c3_prime_query(sys), c.seed, trials)));
    }
    out["constants"] = list;
  } else {
    Json closed = Json::array();
    for (int n = 1; n <= 5; ++n)
      for (int m = 1; m <= 6; ++m)
        closed.push_back(Json{{"n", n}, {"m", m}, {"value", to_json(c_closed_form_21(n, m))},
                              {"source", to_string(ConstantSource::ClosedForm21)}});
    Json triple = Json::array();
    for (int n = 1; n <= 5; ++n)
      for (int d = 2; d <= 5; ++d)
        triple.push_back(Json{{"n", n}, {"d", d}, {"value", to_json(c_closed_form_triple(n, d))},
                              {"source", to_string(ConstantSource::ClosedFormTriple)}});
    out["closed_form_21"] = closed;
    out["closed_form_triple"] = triple;
  }
  emit(out, c.out);
  return 0;
}

int run_stability(const Common& c, size_t g_trials, bool decide) {
  SystemPtr sys = build_line_bundle_system(load_spec(c.spec));
  const MorphismElement w = load_morphism(sys, c.morphism);
  const Polarization pol = load_pol(c.pol);
  StabilityVerdict v;
  if (decide) {
    if (!is_normalized(pol, sys->m, sys->n)) throw SchemaError("polarization is not normalized");
    if (pol.mu.empty() || pol.mu[0] == make_rational(1, 2))
      throw SchemaError("the exact decider needs mu_1 != 1/2");
    v = decide_two_by_one_plane(w, pol.mu[0] > make_rational(1, 2) ? Mu1Side::AboveHalf : Mu1Side::BelowHalf);
  } else if (g_trials > 0) {
    v = g_stability_sample(w, pol, g_trials, c.seed, c.budget);
  } else {
    v = destabilizer_search(w, pol, SearchOptions{c.budget, c.seed, true});
  }
  Json j = stability_verdict_to_json(w, v);
  j["witness_verified"] = v.witness ? verify_witness(w, pol, v) : false;
  emit(j, c.out);
  return 0;
}

int run_embed(const Common& c, const std::string& check, size_t trials) {
  SystemPtr sys = build_line_bundle_system(load_spec(c.spec));
  const BigSetting big = build_big(sys);
  Json out{{"schema", "1"}, {"check", check}, {"p", big.p}, {"q", big.q}};
  if (check == "injectivity") {
    const size_t r = gamma_rank(*sys);
    out["gamma_rank"] = r;
    out["dim_w"] = sys->dim_w();
    out["injective"] = r == sys->dim_w();
    emit(out, c.out);
    return 0;
  }
  if (check == "equivariance") {
    size_t failures = 0;
    for (size_t t = 0; t < trials; ++t) {
      const GroupElement g = random_group(sys, c.seed + 2 * t, 3);
      const MorphismElement w = c.morphism.empty() ? random_morphism(sys, c.seed + 2 * t + 1, 3)
                                                   : load_morphism(sys, c.morphism);
      if (!(zeta(big, act(g, w)) == act_big(big, theta(big, g), zeta(big, w)))) ++failures;
    }
    out["trials"] = trials;
    out["failures"] = failures;
    out["equivariant"] = failures == 0;
    emit(out, c.out);
    return 0;
  }
  const MorphismElement w = load_morphism(sys, c.morphism);
  const BigElement bw = zeta(big, w);
  if (check == "zmember") {
    out["report"] = z_report_to_json(z_membership(big, bw));
    emit(out, c.out);
    return 0;
  }
  // search
  const AssociatedPolarization assoc = associated(load_pol(c.pol), *sys);
  out["verdict"] = big_verdict_to_json(big_destabilizer_search(big, bw, assoc, c.budget, c.seed));
  emit(out, c.out);
  return 0;
}

int run_fine_moduli(const Common& c, int n, int k) {
  if (n < 0 || k < 0) throw SchemaError("fine-moduli needs --n and --k");
  emit(fm_params_to_json(fm_params(n, k)), c.out);
  return 0;
}

int run_fine_build(const Common& c, const std::string& datum_path) {
  if (datum_path.empty()) throw SchemaError("--datum is required");
  const PKDatum d = datum_from_json(read_json_file(datum_path));
  const MorphismElement phi = build_phi_from_PK(d);
  Json j = morphism_to_json(phi);
  j["schema"] = "1";
  j["spec"] = to_json(*phi.sys->origin);
  j["class"] = to_string(classify(phi));
  j["f_prime_rank"] = f_prime_rank(phi);
  j["gcd_constant"] = injectivity_codim2_check(d);
  j["in_window"] = fm_params(d.n, static_cast<int>(d.K.size())).valid;
  emit(j, c.out);
  return 0;
}

int run_dim(const Common& c) {
  const ProblemSpec spec = load_spec(c.spec);
  const long d = expected_dimension(spec);
  if (c.format == "text")
    emit_text(std::to_string(d) + "\n", c.out);
  else
    emit(Json{{"schema", "1"}, {"expected_dimension", d}}, c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact GIT-quotient toolkit for morphisms of sums of line bundles"};
  app.require_subcommand(1);
  Common c;

  auto* certify_cmd = app.add_subcommand("certify", "Certify the quotient type at a polarization");
  add_common(certify_cmd, c);
  certify_cmd->add_option("--spec", c.spec);
  certify_cmd->add_option("--pol", c.pol);
  std::string verify_path;
  size_t trials = 200;
  certify_cmd->add_option("--verify", verify_path, "Re-verify a certificate JSON");
  certify_cmd->add_option("--trials", trials, "Sampling trials for inexact constants");

  auto* chambers_cmd = app.add_subcommand("chambers", "Walls and open chambers in a window");
  add_common(chambers_cmd, c);
  chambers_cmd->add_option("--spec", c.spec)->required();
  std::vector<std::string> params, windows;
  chambers_cmd->add_option("--param", params, "Chart parameter (repeatable)");
  chambers_cmd->add_option("--window", windows, "lo,hi per parameter (repeatable)");

  auto* region_cmd = app.add_subcommand("region", "Admissible region as half-planes and polygons");
  add_common(region_cmd, c);
  region_cmd->add_option("--spec", c.spec)->required();
  std::string region_params, svg, csv;
  region_cmd->add_option("--params", region_params, "Comma-separated chart parameters");
  region_cmd->add_option("--svg", svg, "Write an SVG plot");
  region_cmd->add_option("--csv", csv, "Write a CSV table");
  region_cmd->add_option("--trials", trials);

  auto* constants_cmd = app.add_subcommand("constants", "Codimension constants with their sources");
  add_common(constants_cmd, c);
  constants_cmd->add_option("--spec", c.spec, "Resolve the constants of this problem");
  constants_cmd->add_option("--trials", trials);

  auto* stability_cmd = app.add_subcommand("stability", "Destabilizer search or exact decision");
  add_common(stability_cmd, c);
  stability_cmd->add_option("--spec", c.spec)->required();
  stability_cmd->add_option("--pol", c.pol)->required();
  stability_cmd->add_option("--morphism", c.morphism)->required();
  size_t g_trials = 0;
  bool decide = false;
  stability_cmd->add_option("--g-trials", g_trials, "Sample this many unipotent translates");
  stability_cmd->add_flag("--decide", decide, "Use the exact decider for 2 O(-2) -> O(-1) + O on the plane");

  auto* embed_cmd = app.add_subcommand("embed", "Checks on the reductive enlargement");
  add_common(embed_cmd, c);
  embed_cmd->add_option("--spec", c.spec)->required();
  embed_cmd->add_option("--morphism", c.morphism);
  embed_cmd->add_option("--pol", c.pol);
  std::string check = "zmember";
  size_t embed_trials = 100;
  embed_cmd->add_option("--check", check)->check(CLI::IsMember({"equivariance", "injectivity", "zmember", "search"}));
  embed_cmd->add_option("--trials", embed_trials);

  auto* fm_cmd = app.add_subcommand("fine-moduli", "Parameters of O(-2)^2 -> O(-1) + O^k");
  add_common(fm_cmd, c);
  int fm_n = -1, fm_k = -1;
  fm_cmd->add_option("--n", fm_n);
  fm_cmd->add_option("--k", fm_k);
  auto* build_cmd = fm_cmd->add_subcommand("build", "Morphism from a plane and a space of cubics");
  add_common(build_cmd, c);
  std::string datum_path;
  build_cmd->add_option("--datum", datum_path)->required();

  auto* dim_cmd = app.add_subcommand("dim", "Expected dimension of the quotient");
  add_common(dim_cmd, c);
  dim_cmd->add_option("--spec", c.spec)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_jobs(c.jobs);
    if (certify_cmd->parsed()) return run_certify(c, verify_path, trials);
    if (chambers_cmd->parsed()) return run_chambers(c, params, windows);
    if (region_cmd->parsed()) return run_region(c, region_params, trials, svg, csv);
    if (constants_cmd->parsed()) return run_constants(c, trials);
    if (stability_cmd->parsed()) return run_stability(c, g_trials, decide);
    if (embed_cmd->parsed()) {
      if ((check == "zmember" || check == "search") && c.morphism.empty())
        throw SchemaError("--check " + check + " needs --morphism");
      if (check == "search" && c.pol.empty()) throw SchemaError("--check search needs --pol");
      return run_embed(c, check, embed_trials);
    }
    if (build_cmd->parsed()) return run_fine_build(c, datum_path);
    if (fm_cmd->parsed()) return run_fine_moduli(c, fm_n, fm_k);
    if (dim_cmd->parsed()) return run_dim(c);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
