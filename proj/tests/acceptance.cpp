// Acceptance runner: one PASS/FAIL line per criterion, details as JSON on
// the following line. Exit status is the number of failures (capped).

#include "anosovlab/experiments.hpp"

#include <cstdio>
#include <functional>
#include <iostream>

using namespace anosovlab;
using experiments::Outcome;

namespace {

int failures = 0;

void report(int id, const char* title, const Outcome& o) {
  std::printf("[%s] %2d %s\n", o.pass ? "PASS" : "FAIL", id, title);
  std::printf("     %s\n", o.summary.dump().c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    Outcome o;
    o.summary = {{"exception", e.what()}};
    return o;
  }
}

}  // namespace

int main() {
  report(1, "Heisenberg group law, |m|,|n| <= 100, exact, < 1 s", guarded([] { return experiments::heisenberg_law(100); }));
  report(2, "weak unipotence of u(m,n) and rho(b)", guarded([] { return experiments::weak_unipotence(100); }));
  report(3, "tau_d eigenvalue law, 100 hyperbolic g, d <= 8", guarded([] { return experiments::tau_eigenvalue_law(100, 8); }));
  report(4, "Klein ball distance = artanh|x|", guarded([] { return experiments::klein_ball(1000); }));
  report(5, "segment Hausdorff estimate, disk and square", guarded([] { return experiments::segment_hausdorff(1000); }));

  experiments::HoroballSweep sweep;
  bool sweep_ok = true;
  try {
    sweep = experiments::horoball_sweep(12, 1024, 4);
  } catch (const std::exception& e) {
    sweep_ok = false;
    sweep.lower_bound.summary = sweep.templates.summary = {{"exception", e.what()}};
  }
  Outcome c6;
  c6.pass = sweep_ok && sweep.lower_bound.pass && sweep.oracle.pass;
  c6.summary = {{"lower_bound", sweep.lower_bound.summary}, {"oracle", sweep.oracle.summary}};
  report(6, "horoball lower bound and closed form = BFS", c6);
  report(7, "three-piece geodesic templates on the oracle sweep", sweep.templates);

  report(8, "Heisenberg distortion table", guarded([] {
           const auto rows = reps::heisenberg_distortion_table(12, 12);
           return experiments::heisenberg_distortion(rows, 12);
         }));
  report(9, "ping-pong certificate, eps 0.05, net 4096", guarded([] { return experiments::pingpong_default(); }));
  report(10, "semisimplification collapse at n = 1e6", guarded([] { return experiments::ss_collapse(1000000); }));
  report(11, "Pappus relations a^3 = d^2 = 1", guarded([] { return experiments::pappus_relations(100, 6); }));
  report(12, "rank-one norm contraction, d <= 6", guarded([] { return experiments::norm_contraction(6); }));
  report(13, "BPS inequality sweep, 1e4 pairs in SL(4,R)", guarded([] { return experiments::bps_sweep(10000); }));

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
