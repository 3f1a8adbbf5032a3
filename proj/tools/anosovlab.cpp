// anosovlab command line tool. Exit codes: 0 ok, 1 domain error (error JSON
// on stderr), 2 usage error.

#include "anosovlab/experiments.hpp"
#include "anosovlab/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>

using namespace anosovlab;
using io::json;

namespace {

struct Common {
  std::string out;
  std::uint64_t seed = 1;
  double tol = -1.0;  // < 0: each command's documented default
  std::string format;
  bool timing = false;
};

/// Config echo: every option of the subcommand that was given or defaulted.
json echo(const CLI::App* sub) {
  json cfg = json::object();
  std::string path = sub->get_name();
  for (auto* p = sub->get_parent(); p && p->get_parent(); p = p->get_parent()) path = p->get_name() + " " + path;
  cfg["command"] = path;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "-h") continue;
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    if (opt->get_expected_min() == 0) {
      cfg[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1) cfg[name] = res.front();
      else cfg[name] = res;
    } else if (!opt->get_default_str().empty()) {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

/// Wall-clock fields make outputs differ run to run; dropped unless --timing.
void strip_timing(json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end();) {
      if (it.key().size() >= 7 && it.key().rfind("seconds") == it.key().size() - 7) {
        it = j.erase(it);
      } else {
        strip_timing(it.value());
        ++it;
      }
    }
  } else if (j.is_array()) {
    for (auto& x : j) strip_timing(x);
  }
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) std::cout << text;
  else io::atomic_write(c.out, text);
}

void emit_json(const Common& c, const CLI::App* sub, json payload) {
  if (!c.timing) strip_timing(payload);
  json doc = io::envelope(echo(sub));
  for (auto& [k, v] : payload.items()) doc[k] = v;
  emit(c, doc.dump(2) + "\n");
}

double tol_or(const Common& c, double fallback) { return c.tol < 0 ? fallback : c.tol; }

MatR real_matrix(const std::string& path) {
  const auto m = io::parse_matrix(io::read_json_file(path));
  if (m.complex) throw Error(ErrorCode::ParseError, "this command needs a real matrix");
  return m.real;
}

flagdyn::ProjPoint<double> point_in(const hilbert::ConvexDomain& dom, const std::string& text) {
  VecR v = io::parse_csv_vec(text);
  if (v.size() == dom.dim() - 1) {  // affine coordinates in the chart x0 = 1
    VecR h(dom.dim());
    h << 1.0, v;
    v = h;
  }
  if (v.size() != dom.dim()) throw Error(ErrorCode::DimMismatch, "point has the wrong number of coordinates");
  return flagdyn::ProjPoint<double>(v);
}

cuspgraph::Vertex parse_vertex(const std::string& text, cuspgraph::BaseGroup base) {
  const VecR v = io::parse_csv_vec(text);
  auto as_int = [](double x) {
    if (x != std::floor(x)) throw Error(ErrorCode::ParseError, "vertex coordinates must be integers");
    return static_cast<std::int64_t>(x);
  };
  if (base == cuspgraph::BaseGroup::Z) {
    if (v.size() != 2) throw Error(ErrorCode::ParseError, "Z vertex is \"m,level\"");
    return {{as_int(v(0)), 0}, static_cast<int>(as_int(v(1)))};
  }
  if (v.size() != 3) throw Error(ErrorCode::ParseError, "Z2 vertex is \"m,n,level\"");
  return {{as_int(v(0)), as_int(v(1))}, static_cast<int>(as_int(v(2)))};
}

cuspgraph::BaseGroup parse_base(const std::string& s) {
  if (s == "z") return cuspgraph::BaseGroup::Z;
  if (s == "z2") return cuspgraph::BaseGroup::Z2;
  throw Error(ErrorCode::ParseError, "base must be z or z2");
}

pingpong::PingPongSystem load_system(const std::string& src, double eps) {
  if (src == "default") return pingpong::default_system(512, eps);
  const json j = io::read_json_file(src);
  try {
    pingpong::PingPongSystem sys;
    sys.gamma = io::parse_matrix(j.at("gamma")).real;
    sys.d = static_cast<int>(sys.gamma.rows());
    for (const auto& u : j.at("u_gens")) sys.u_gens.push_back(io::parse_matrix(u).real);
    if (j.contains("u_inv"))
      for (const auto& u : j.at("u_inv")) sys.u_inv.push_back(io::parse_matrix(u).real);
    if (j.contains("u_powers")) sys.u_powers = j.at("u_powers").get<std::vector<int>>();
    if (sys.d != 3) throw Error(ErrorCode::UnsupportedDimension, "the certifier works on F(R^3)");
    pingpong::complete_inverses(sys);
    sys.epsilon = eps;
    const auto fixed = pingpong::fixed_flag_data(sys.gamma, sys.u_gens, sys.u_inv);
    sys.f_gamma_plus = fixed.plus;
    sys.f_gamma_minus = fixed.minus;
    sys.f_u = fixed.u;
    return sys;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("system: ") + e.what());
  }
}

pappus::MarkedBox<pappus::Int> load_box(const std::string& src) {
  if (src == "std") return pappus::standard_box<pappus::Int>();
  const json j = io::read_json_file(src);
  try {
    std::array<pappus::Hom<pappus::Int>, 6> p;
    const char* names[] = {"p", "q", "r", "s", "t", "b"};
    for (int i = 0; i < 6; ++i) {
      const auto v = j.at(names[i]).get<std::vector<long long>>();
      if (v.size() != 3) throw Error(ErrorCode::ParseError, "points are integer triples");
      p[static_cast<std::size_t>(i)] = {pappus::Int(v[0]), pappus::Int(v[1]), pappus::Int(v[2])};
    }
    return pappus::box_from_points<pappus::Int>(p[0], p[1], p[2], p[3], p[4], p[5]);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("box: ") + e.what());
  }
}

json box_json(const pappus::MarkedBox<pappus::Int>& b) {
  auto trip = [](const pappus::Hom<pappus::Int>& h) {
    return json::array({h[0].str(), h[1].str(), h[2].str()});
  };
  json pts = json::array(), lines = json::array();
  for (const auto& h : b.pts) pts.push_back(trip(h));
  for (const auto& h : b.lines) lines.push_back(trip(h));
  return {{"points", pts}, {"lines", lines}};
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output file (default: stdout)");
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--tol", c.tol, "tolerance override");
  sub->add_option("--format", c.format, "csv or json where both exist");
  sub->add_flag("--timing", c.timing, "keep wall-clock fields in the output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anosovlab: Cartan/Jordan diagnostics, Hilbert geometry, horoballs, ping-pong, Pappus boxes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("anosovlab ") + kVersion);
  Common c;
  std::function<void()> action;

  // svd-diag
  std::string matrix_path;
  double gap_tol = 1e-6;
  auto* svd = app.add_subcommand("svd-diag", "singular values, gaps, eigenvalue moduli, proximality");
  svd->add_option("--matrix", matrix_path, "matrix JSON")->required();
  svd->add_option("--gap-tol", gap_tol)->capture_default_str();
  add_common(svd, c);
  svd->callback([&] {
    action = [&] {
      const auto in = io::parse_matrix(io::read_json_file(matrix_path));
      auto run = [&](const auto& g) {
        const auto sd = matgeo::singular_values(g, gap_tol);
        const auto lam = matgeo::eigenvalue_moduli(g);
        json prox = json::array();
        for (int k = 1; k < sd.dim(); ++k)
          if (matgeo::is_proximal(g, k, gap_tol).proximal) prox.push_back(k);
        json out;
        out["mu"] = sd.mu;
        out["gap_indices"] = sd.gap_indices;
        out["eigenvalue_moduli"] = lam;
        out["proximal_k"] = prox;
        out["weakly_unipotent"] = matgeo::is_weakly_unipotent(g, tol_or(c, 1e-9));
        return out;
      };
      emit_json(c, svd, in.complex ? run(in.cplx) : run(in.real));
    };
  });

  // flags-sdp
  int sdp_k = 1, sdp_steps = 20;
  auto* sdp = app.add_subcommand("flags-sdp", "strong dynamics test on the sequence g^n, n = 1..steps");
  sdp->add_option("--matrix", matrix_path, "matrix JSON (real, P_k-proximal)")->required();
  sdp->add_option("--k", sdp_k)->capture_default_str();
  sdp->add_option("--steps", sdp_steps)->capture_default_str();
  add_common(sdp, c);
  sdp->callback([&] {
    action = [&] {
      const MatR g = real_matrix(matrix_path);
      const auto fixed = flagdyn::proximal_fixed_data(g, sdp_k);
      const flagdyn::FlagPoint<double> x(fixed.attracting, fixed.repelling, false);
      std::vector<MatR> seq;
      for (int n = 1; n <= sdp_steps; ++n) seq.push_back(matgeo::power(g, n));
      flagdyn::SdpTolerances tol;
      tol.seed = c.seed;
      if (c.tol >= 0) tol.distance_threshold = c.tol;
      const auto rep = flagdyn::sdp_test(seq, sdp_k, x, x, tol);
      if (c.format == "csv") {
        io::CsvTable t({"n", "has_gap", "gap", "dist_attractor", "dist_repeller", "dist_samples"});
        for (const auto& r : rep.rows)
          t.add({std::to_string(r.index + 1), r.has_gap ? "1" : "0", io::fmt(r.gap), io::fmt(r.dist_attractor),
                 io::fmt(r.dist_repeller), io::fmt(r.dist_samples)});
        emit(c, t.str(echo(sdp)));
        return;
      }
      json rows = json::array();
      for (const auto& r : rep.rows)
        rows.push_back({{"n", r.index + 1},
                        {"has_gap", r.has_gap},
                        {"gap", r.gap},
                        {"dist_attractor", r.dist_attractor},
                        {"dist_repeller", r.dist_repeller},
                        {"dist_samples", r.dist_samples}});
      emit_json(c, sdp,
                {{"k", rep.k},
                 {"clause_gap", rep.clause_gap},
                 {"clause_cartan", rep.clause_cartan},
                 {"clause_transverse", rep.clause_transverse},
                 {"clauses_agree", rep.clauses_agree},
                 {"samples_used", rep.samples_used},
                 {"rows", rows}});
    };
  });

  // hilbert dist
  auto* hil = app.add_subcommand("hilbert", "Hilbert geometry");
  hil->require_subcommand(1);
  std::string domain_path, p_text, q_text;
  auto* hdist = hil->add_subcommand("dist", "Hilbert distance between two interior points");
  hdist->add_option("--domain", domain_path, "domain JSON")->required();
  hdist->add_option("--p", p_text, "homogeneous or affine (chart x0 = 1) coordinates")->required();
  hdist->add_option("--q", q_text)->required();
  add_common(hdist, c);
  hdist->callback([&] {
    action = [&] {
      const auto dom = io::parse_domain(io::read_json_file(domain_path));
      const double d = hilbert::hilbert_distance(dom, point_in(dom, p_text), point_in(dom, q_text));
      emit(c, io::fixed(d, 12) + "\n");
    };
  });

  // horoball dist / table
  auto* hor = app.add_subcommand("horoball", "combinatorial horoballs over Z and Z^2");
  hor->require_subcommand(1);
  std::string base_text = "z2", from_text, to_text;
  int depth = -1;
  std::int64_t radius = -1;
  bool use_bfs = false;
  auto* hd = hor->add_subcommand("dist", "distance between two vertices");
  hd->add_option("--base", base_text, "z or z2")->capture_default_str();
  hd->add_option("--depth", depth, "levels kept (default: enough for the pair)");
  hd->add_option("--radius", radius, "base ball radius (default: just large enough)");
  hd->add_option("--from", from_text, "\"m,level\" over z, \"m,n,level\" over z2")->required();
  hd->add_option("--to", to_text)->required();
  hd->add_flag("--bfs", use_bfs, "also run the BFS oracle");
  add_common(hd, c);
  hd->callback([&] {
    action = [&] {
      const auto base = parse_base(base_text);
      const auto u = parse_vertex(from_text, base), v = parse_vertex(to_text, base);
      std::int64_t r = radius;
      if (r < 0) {
        const cuspgraph::BaseGroupBall probe{base, 0};
        r = std::max({probe.word_length(u.g), probe.word_length(v.g), std::int64_t{1}});
      }
      int dep = depth;
      if (dep < 0) {
        // top level of any geodesic is about log2 of the base gap, plus slack
        const std::int64_t w = cuspgraph::BaseGroupBall{base, 0}.word_length(cuspgraph::difference(u.g, v.g));
        dep = std::max(u.level, v.level) + 3;
        while (dep < 62 && cuspgraph::HoroballGraph::reach(dep - 2) < w) ++dep;
      }
      const cuspgraph::HoroballGraph h({base, r}, dep);
      h.require(u);
      h.require(v);
      json out;
      out["distance"] = cuspgraph::horoball_distance_fast(h, u, v);
      if (use_bfs) {
        const double rows = base == cuspgraph::BaseGroup::Z ? 1.0 : 2.0 * static_cast<double>(r) + 1.0;
        if (rows * (2.0 * static_cast<double>(r) + 2.0) * dep > 4e7)
          throw Error(ErrorCode::DegenerateInput, "truncation too large for the BFS oracle (lower --radius/--depth)");
        const auto b = cuspgraph::bfs_distance(h, u, v);
        out["bfs_distance"] = b.distance;
        out["may_be_overestimate"] = b.may_be_overestimate;
        const auto s = cuspgraph::geodesic_shape(h, u, v, b.distance);
        out["shape"] = {{"up", s.m_up}, {"horizontal", s.horizontal}, {"down", s.m_down}, {"top_level", s.top_level}};
      }
      emit_json(c, hd, out);
    };
  });
  int kmax = 12, nmax = 8, delta = 1;
  auto* ht = hor->add_subcommand("table", "CSV of (k, n, lower_bound, distance) for u(0,2^k) over Z^2");
  ht->add_option("--kmax", kmax)->capture_default_str();
  ht->add_option("--nmax", nmax)->capture_default_str();
  ht->add_option("--delta", delta)->capture_default_str();
  add_common(ht, c);
  ht->callback([&] {
    action = [&] {
      if (kmax < 1 || kmax > 30) throw Error(ErrorCode::DegenerateInput, "kmax must lie in [1, 30]");
      const cuspgraph::HoroballGraph h({cuspgraph::BaseGroup::Z2, std::int64_t{1} << kmax}, kmax + 3);
      io::CsvTable t({"k", "n", "lower_bound", "distance"});
      for (int k = 1; k <= kmax; ++k)
        for (int n = std::max(1, delta); n <= std::min(k, nmax); ++n)
          t.add({std::to_string(k), std::to_string(n), std::to_string(2 * k - 2 * n - 2),
                 std::to_string(cuspgraph::horoball_distance_fast(h, {{0, 0}, n}, {{0, std::int64_t{1} << k}, n}))});
      emit(c, t.str(echo(ht)));
    };
  });

  // experiment ...
  auto* exp = app.add_subcommand("experiment", "acceptance experiments, one invocation each");
  exp->require_subcommand(1);
  auto* hdx = exp->add_subcommand("heisenberg-distortion", "cusp distance vs symmetric space displacement (CSV)");
  hdx->add_option("--kmax", kmax)->capture_default_str();
  hdx->add_option("--nmax", nmax)->capture_default_str();
  hdx->add_option("--delta", delta)->capture_default_str();
  add_common(hdx, c);
  hdx->callback([&] {
    action = [&] {
      const auto rows = reps::heisenberg_distortion_table(kmax, nmax, delta);
      if (c.format == "json") {
        emit_json(c, hdx, experiments::heisenberg_distortion(rows, nmax).summary);
        return;
      }
      emit(c, experiments::distortion_csv(rows).str(echo(hdx)));
    };
  });
  int samples = 1000, pairs = 10000, d_max = 8;
  std::int64_t bound = 100, n_final = 1000000;
  std::map<std::string, std::function<experiments::Outcome()>> simple = {
      {"heisenberg-law", [&] { return experiments::heisenberg_law(bound); }},
      {"weak-unipotence", [&] { return experiments::weak_unipotence(bound, tol_or(c, 1e-9)); }},
      {"tau-law", [&] { return experiments::tau_eigenvalue_law(samples, d_max, c.seed, tol_or(c, 1e-7)); }},
      {"klein-ball", [&] { return experiments::klein_ball(samples, c.seed, tol_or(c, 1e-10)); }},
      {"hausdorff", [&] { return experiments::segment_hausdorff(samples, 48, c.seed); }},
      {"ss-collapse", [&] { return experiments::ss_collapse(n_final, tol_or(c, 1e-5)); }},
      {"pappus-relations", [&] { return experiments::pappus_relations(samples, 6, c.seed); }},
      {"norm-contraction", [&] { return experiments::norm_contraction(d_max, c.seed); }},
      {"bps-sweep", [&] { return experiments::bps_sweep(pairs, 4, c.seed); }},
      {"pingpong", [&] { return experiments::pingpong_default(0.05, 4096, 64, 1000, 12, 20, c.seed); }},
  };
  for (auto& [name, fn] : simple) {
    auto* s = exp->add_subcommand(name, "see README");
    if (name == "heisenberg-law" || name == "weak-unipotence") s->add_option("--bound", bound)->capture_default_str();
    if (name == "tau-law" || name == "klein-ball" || name == "hausdorff" || name == "pappus-relations")
      s->add_option("--samples", samples)->capture_default_str();
    if (name == "tau-law" || name == "norm-contraction") s->add_option("--dmax", d_max)->capture_default_str();
    if (name == "ss-collapse") s->add_option("--n", n_final)->capture_default_str();
    if (name == "bps-sweep") s->add_option("--pairs", pairs)->capture_default_str();
    add_common(s, c);
    s->callback([&, s, f = fn] {
      action = [&, s, f] {
        const auto o = f();
        json out = o.summary;
        out["pass"] = o.pass;
        emit_json(c, s, out);
      };
    });
  }
  auto* hsw = exp->add_subcommand("horoball-sweep", "lower bound, closed form = BFS, geodesic templates");
  int max_level = 4;
  std::int64_t sweep_radius = 1024;
  hsw->add_option("--kmax", kmax)->capture_default_str();
  hsw->add_option("--radius", sweep_radius)->capture_default_str();
  hsw->add_option("--levels", max_level)->capture_default_str();
  hsw->add_option("--delta", delta)->capture_default_str();
  add_common(hsw, c);
  hsw->callback([&] {
    action = [&] {
      const auto s = experiments::horoball_sweep(kmax, sweep_radius, max_level, delta);
      emit_json(c, hsw,
                {{"lower_bound", s.lower_bound.summary},
                 {"oracle", s.oracle.summary},
                 {"templates", s.templates.summary},
                 {"pass", s.lower_bound.pass && s.oracle.pass && s.templates.pass}});
    };
  });

  // pingpong certify
  auto* pp = app.add_subcommand("pingpong", "ping-pong certificates on F(R^3)");
  pp->require_subcommand(1);
  std::string system_src = "default";
  double eps = 0.05;
  int net = 4096, n_max = 64;
  auto* ppc = pp->add_subcommand("certify", "sampled contraction certificate (numerical evidence)");
  ppc->add_option("--system", system_src, "system JSON or \"default\"")->capture_default_str();
  ppc->add_option("--eps", eps)->capture_default_str();
  ppc->add_option("--net", net)->capture_default_str();
  ppc->add_option("--nmax", n_max)->capture_default_str();
  add_common(ppc, c);
  ppc->callback([&] {
    action = [&] {
      auto sys = load_system(system_src, eps);
      const auto cert = pingpong::certify_system(sys, net, n_max, c.seed);
      emit_json(c, ppc, experiments::certificate_json(cert));
    };
  });

  // pappus render / orbit
  auto* pap = app.add_subcommand("pappus", "marked boxes");
  pap->require_subcommand(1);
  std::string box_src = "std";
  int pap_depth = 6, maxlen = 8;
  auto* pr = pap->add_subcommand("render", "SVG of the nested boxes");
  pr->add_option("--box", box_src, "box JSON {p,q,r,s,t,b} or \"std\"")->capture_default_str();
  pr->add_option("--depth", pap_depth)->capture_default_str();
  add_common(pr, c);
  pr->callback([&] {
    action = [&] {
      const auto nodes = pappus::render_tree(pappus::to_double(load_box(box_src)), pap_depth);
      std::string cfg = echo(pr).dump();
      // "--" may not appear inside an XML comment
      for (std::size_t pos; (pos = cfg.find("--")) != std::string::npos;) cfg.replace(pos, 2, "- -");
      emit(c, pappus::render_svg(nodes, std::string("anosovlab ") + kVersion + " config " + cfg));
    };
  });
  auto* po = pap->add_subcommand("orbit", "normal-form orbit of a box");
  po->add_option("--box", box_src)->capture_default_str();
  po->add_option("--maxlen", maxlen)->capture_default_str();
  add_common(po, c);
  po->callback([&] {
    action = [&] {
      const auto orb = pappus::orbit(load_box(box_src), maxlen);
      json words = json::array(), counts = json::array();
      for (const auto& [w, b] : orb) words.push_back({{"word", w}, {"box", box_json(b)}});
      for (int l = 0; l <= maxlen; ++l) counts.push_back(pappus::normal_form_count(l));
      emit_json(c, po, {{"count", orb.size()}, {"count_by_length", counts}, {"orbit", words}});
    };
  });

  // reps ...
  auto* rp = app.add_subcommand("reps", "representations");
  rp->require_subcommand(1);
  std::string x_text = "1,1,1,1";
  auto* rss = rp->add_subcommand("ss-limit", "rho(b^n) x against [x2:0:x4:0]");
  rss->add_option("--x", x_text)->capture_default_str();
  rss->add_option("--n", n_final)->capture_default_str();
  add_common(rss, c);
  rss->callback([&] {
    action = [&] {
      const auto rep = reps::ss_collapse_limit_check(flagdyn::ProjPoint<double>(io::parse_csv_vec(x_text)), n_final);
      json s = json::array();
      for (const auto& [n, dd] : rep.samples) s.push_back({n, dd});
      emit_json(c, rss,
                {{"limit_distance", rep.limit_distance},
                 {"rate_exponent", rep.rate_exponent},
                 {"rate_ok", rep.rate_ok},
                 {"fitted_c", rep.fitted_c},
                 {"samples", s}});
    };
  });
  int tau_d = 5;
  double lambda1 = 2.0;
  auto* rte = rp->add_subcommand("tau-eig", "eigenvalue moduli of tau_d(diag(lambda1, 1/lambda1))");
  rte->add_option("--d", tau_d)->capture_default_str();
  rte->add_option("--lambda1", lambda1)->capture_default_str();
  add_common(rte, c);
  rte->callback([&] {
    action = [&] {
      if (!(lambda1 > 0)) throw Error(ErrorCode::DegenerateInput, "lambda1 must be positive");
      const auto lam = matgeo::eigenvalue_moduli(reps::sl2_symmetric_power(reps::Sl2Element::diag(lambda1), tau_d));
      std::string line;
      char buf[64];
      for (std::size_t i = 0; i < lam.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", lam[i]);
        line += (i ? "," : "") + std::string(buf);
      }
      emit(c, line + "\n");
    };
  });
  std::string t_text = "0,0.5,1,2,4,8";
  int nc_d = 4;
  bool conj = false;
  auto* rnc = rp->add_subcommand("norm-contraction", "norm ratios along the diagonal flow for tau_d");
  rnc->add_option("--d", nc_d)->capture_default_str();
  rnc->add_option("--t", t_text)->capture_default_str();
  rnc->add_flag("--conj", conj, "conjugate the flow by a seeded random hyperbolic element");
  add_common(rnc, c);
  rnc->callback([&] {
    action = [&] {
      const VecR tv = io::parse_csv_vec(t_text);
      std::vector<double> ts(tv.data(), tv.data() + tv.size());
      reps::Sl2Element g;
      if (conj) {
        std::mt19937_64 rng(c.seed);
        g = experiments::detail::random_hyperbolic(rng);
      }
      const auto rep = reps::equivariant_norm_contraction(nc_d, ts, g);
      io::CsvTable t({"k", "t", "ratio", "bound", "ok"});
      for (const auto& r : rep.rows)
        t.add({std::to_string(r.k), io::fmt(r.t), io::fmt(r.ratio), io::fmt(r.bound), r.ok ? "1" : "0"});
      emit(c, t.str(echo(rnc)));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  try {
    if (action) action();
  } catch (const Error& e) {
    std::cerr << io::error_json(e).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
