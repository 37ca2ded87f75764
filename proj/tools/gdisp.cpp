// gdisp: JSON front end for Witt vectors, displays, RZ/ADLV enumeration and
// square-zero deformations. Exit codes: 0 success, 2 precondition violation,
// 3 resource cap.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "gdisp/deform.hpp"
#include "gdisp/json_io.hpp"
#include "gdisp/parallel.hpp"
#include "gdisp/rz.hpp"
#include "selftest.hpp"

using namespace gdisp;
using json_io::json;

namespace {

struct Options {
  uint64_t seed = 1;
  int threads = 1;
  std::string input;
  std::string output;
  long double bound = 1e6;
  int guard = 1;

  int64_t p = 2;
  int f = 1;
  int n = 1;
  int h = 0;
  int d = -1;
  std::vector<int> weights;
  int precision = 8;

  std::string witt_op;
  bool adjoint = false;
  int m = 1;
  int window = 1;
  int table = 0;
  std::string b;
  bool oracle = false;
  int trunc = 2;
};

json read_input(const Options& o) {
  std::stringstream ss;
  if (o.input.empty() || o.input == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(o.input);
    require(in.good(), ErrorKind::MalformedInput, "cannot open " + o.input);
    ss << in.rdbuf();
  }
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    fail(ErrorKind::MalformedInput, std::string("bad JSON input: ") + e.what());
  }
}

void write_output(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output);
  require(out.good(), ErrorKind::MalformedInput, "cannot write " + o.output);
  out << text;
}

void emit(const Options& o, json j) {
  j["schema"] = json_io::kSchema;
  write_output(o, j.dump() + "\n");
}

GroupSpec group_from_flags(const Options& o) {
  if (!o.weights.empty()) return GroupSpec::gl(o.weights);
  require(o.h >= 1 && o.d >= 0 && o.d < o.h + 1, ErrorKind::MalformedInput, "give --weights or --h and --d");
  return GroupSpec::gl_dh(o.d, o.h);
}

RingPtr ring_or_flags(const json& j, const Options& o) {
  return j.contains("ring") ? json_io::ring_from_json(j["ring"]) : Ring::fq(o.p, o.f);
}

int run_witt(const Options& o) {
  json in = read_input(o);
  RingPtr R = ring_or_flags(in, o);
  const int n = in.value("n", o.n);
  WittVec x = json_io::witt_coeffs_from_json(in.at("x"), R, n);
  auto y = [&] { return json_io::witt_coeffs_from_json(in.at("y"), R, n); };
  const std::string& op = o.witt_op;
  json out;
  if (op == "add") {
    out["result"] = json_io::witt_to_json(x + y());
  } else if (op == "sub") {
    out["result"] = json_io::witt_to_json(x - y());
  } else if (op == "mul") {
    out["result"] = json_io::witt_to_json(x * y());
  } else if (op == "neg") {
    out["result"] = json_io::witt_to_json(-x);
  } else if (op == "inv") {
    out["result"] = json_io::witt_to_json(x.inv());
  } else if (op == "frobenius") {
    out["result"] = json_io::witt_to_json(R->has_char_p() ? x.frobenius_char_p() : x.frobenius());
  } else if (op == "verschiebung") {
    out["result"] = json_io::witt_to_json(x.verschiebung());
  } else if (op == "ghost") {
    json g = json::array();
    for (int k = 0; k < n; ++k) g.push_back(json_io::elem_to_json(x.ghost(k)));
    out["ghost"] = g;
  } else {
    fail(ErrorKind::MalformedInput, "unknown witt operation " + op);
  }
  if (out.contains("result")) out["text"] = out["result"]["coeffs"].dump();
  emit(o, out);
  return 0;
}

int run_phi(const Options& o) {
  json in = read_input(o);
  Display D = json_io::display_from_json(in);
  MatW H = json_io::matw_from_json(in.at("H"), D.ring(), D.length());
  emit(o, json_io::display_to_json(phi_conjugate(D, H)));
  return 0;
}

int run_classify(const Options& o) {
  auto F = Ring::fq(o.p, o.f);
  GroupSpec spec = group_from_flags(o);
  json out;
  out["phi_orbits"] = phi_orbit_count(F, spec, o.n, o.bound);
  out["sigma_orbits"] = sigma_orbit_count(F, spec, o.n, o.bound);
  emit(o, out);
  return 0;
}

/// A display, or a matrix b = p^{-shift} m over GR(p^precision, f).
ShiftedMat b_from_input(const json& in, const Options& o, std::optional<GroupSpec>& spec) {
  if (in.contains("U")) {
    Display D = json_io::display_from_json(in);
    spec = D.spec;
    return display_b(D);
  }
  if (in.contains("group")) spec = json_io::group_from_json(in["group"]);
  return json_io::shifted_from_json(in, Ring::galois(o.p, o.precision, o.f));
}

int run_slopes(const Options& o) {
  json in = read_input(o);
  std::optional<GroupSpec> spec;
  ShiftedMat b = b_from_input(in, o, spec);
  if (!o.adjoint) {
    emit(o, json_io::slopes_to_json(newton_slopes(b, o.guard)));
    return 0;
  }
  GroupSpec s = spec ? *spec : group_from_flags(o);
  emit(o, json_io::slopes_to_json(adjoint_slopes(b, s, o.guard)));
  return 0;
}

int run_cartan(const Options& o) {
  json in = read_input(o);
  std::optional<GroupSpec> spec;
  ShiftedMat b = b_from_input(in, o, spec);
  GroupSpec s = spec ? *spec : group_from_flags(o);
  emit(o, json{{"member", cartan_membership(b, s, o.guard)}});
  return 0;
}

BasePoint base_from_flags(const Options& o) {
  auto F = Ring::fq(o.p, o.f);
  GroupSpec spec = group_from_flags(o);
  if (o.b.empty()) return BasePoint{spec, witt_identity(F, spec.h, 1)};
  json j;
  try {
    j = json::parse(o.b);
  } catch (const json::exception& e) {
    fail(ErrorKind::MalformedInput, std::string("bad --b JSON: ") + e.what());
  }
  const json& u = j.is_object() ? j.at("U") : j;
  const int n = j.is_object() ? j.value("n", 1) : 1;
  MatW U = json_io::matw_from_json(u, F, n);
  require(U.rows() == spec.h, ErrorKind::MalformedInput, "b does not match the group");
  return BasePoint{spec, U};
}

int run_adlv(const Options& o) {
  BasePoint base = base_from_flags(o);
  const int guard = o.guard;
  if (o.table > 0) {
    std::string text = "m count\n";
    for (int m = 1; m <= o.table; ++m)
      text += std::to_string(m) + " " +
              std::to_string(adlv_enumerate(base, m, o.window, o.bound, guard).cosets.size()) + "\n";
    write_output(o, text);
    return 0;
  }
  AdlvResult r = adlv_enumerate(base, o.m, o.window, o.bound, guard);
  json cosets = json::array();
  for (const auto& c : r.cosets)
    cosets.push_back({{"G", json_io::matr_to_json(c.G)}, {"a", c.a}, {"shift", c.shift}});
  json out;
  out["count"] = r.cosets.size();
  out["cosets"] = cosets;
  out["candidates"] = r.candidates;
  out["precision"] = r.precision;
  emit(o, out);
  return 0;
}

int run_qisog(const Options& o) {
  json in = read_input(o);
  Display D1 = json_io::display_from_json(in.at("D1")), D2 = json_io::display_from_json(in.at("D2"));
  auto g = quasi_isogeny_search(D1, D2, o.bound);
  json out;
  out["found"] = g.has_value();
  if (g) out["g"] = json_io::shifted_to_json(*g);
  emit(o, out);
  return 0;
}

SquareZeroData square_zero_from_json(const json& in, const Options& o) {
  RingPtr A = in.contains("ring") ? json_io::ring_from_json(in["ring"]) : Ring::dual_numbers(Ring::fq(o.p, o.f));
  return SquareZeroData(A, in.value("ideal", std::vector<int>{0}));
}

int run_deform_solve(const Options& o) {
  json in = read_input(o);
  GroupSpec spec = json_io::group_from_json(in.at("group"));
  SquareZeroData data = square_zero_from_json(in, o);
  const int n = in.value("n", o.n);
  MatW U = json_io::matw_from_json(in.at("U"), data.A(), n);
  MatW Up = json_io::matw_from_json(in.at("Uprime"), data.A(), n);
  GmzcfResult r = gmzcf_solve(U, Up, data, spec);
  emit(o, json{{"h", json_io::matw_to_json(r.h)}, {"iterations", r.iterations}});
  return 0;
}

int run_deform_lifts(const Options& o) {
  json in = read_input(o);
  GroupSpec spec = json_io::group_from_json(in.at("group"));
  SquareZeroData data = square_zero_from_json(in, o);
  const int n = in.value("n", o.n);
  MatW U0 = json_io::matw_from_json(in.at("U0"), data.Abar(), n);
  auto lifts = enumerate_lifts(U0, data, spec);
  json arr = json::array();
  for (const auto& L : lifts) {
    json t = json::array();
    for (const auto& a : L.tangent) t.push_back(json_io::elem_to_json(a));
    arr.push_back({{"U", json_io::matw_to_json(L.D.U)}, {"tangent", t}});
  }
  json out;
  out["ring"] = json_io::ring_to_json(data.A());
  out["count"] = lifts.size();
  out["lifts"] = arr;
  if (o.oracle) out["oracle_count"] = LiftOracle(data.lift(U0), data, spec, o.seed, o.bound).class_count();
  emit(o, out);
  return 0;
}

int run_deform_universal(const Options& o) {
  json in = read_input(o);
  GroupSpec spec = json_io::group_from_json(in.at("group"));
  RingPtr k = ring_or_flags(in, o);
  const int n = in.value("n", o.n);
  MatW U0 = json_io::matw_from_json(in.at("U0"), k, n);
  auto uni = universal_deformation(U0, o.trunc, spec);
  json pos = json::array();
  for (auto [i, j] : uni.positions) pos.push_back({i, j});
  emit(o, json{{"ring", json_io::ring_to_json(uni.T)}, {"n", n}, {"positions", pos},
               {"U", json_io::matw_to_json(uni.D.U)}});
  return 0;
}

int run_selftest(const Options& o) {
  std::mt19937_64 rng(o.seed);
  json props = json::array();
  bool all = true;
  for (const auto& prop : selftest::properties()) {
    bool ok = false;
    std::string err;
    try {
      ok = prop.check(rng);
    } catch (const Error& e) {
      err = std::string(kind_name(e.kind())) + ": " + e.what();
    }
    all = all && ok;
    json entry{{"name", prop.name}, {"pass", ok}};
    if (!err.empty()) entry["error"] = err;
    props.push_back(entry);
  }
  emit(o, json{{"seed", o.seed}, {"properties", props}, {"pass", all}});
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Witt vectors, (G,mu)-displays, RZ enumeration and deformations"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--seed", o.seed, "Seed for randomized checks");
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--input,-i", o.input, "JSON input file (default stdin)");
  app.add_option("--out,-o", o.output, "Output file (default stdout)");
  app.add_option("--bound", o.bound, "Search-space cap");
  app.add_option("--guard", o.guard, "Guard digits")->check(CLI::NonNegativeNumber);

  auto add_ring_flags = [&](CLI::App* s) {
    s->add_option("--p", o.p, "Prime");
    s->add_option("--f", o.f, "Residue degree")->check(CLI::PositiveNumber);
    s->add_option("--n", o.n, "Witt length")->check(CLI::PositiveNumber);
  };
  auto add_group_flags = [&](CLI::App* s) {
    s->add_option("--h", o.h, "Rank");
    s->add_option("--d", o.d, "Number of weight-0 entries");
    s->add_option("--weights", o.weights, "Weight vector, e.g. 0,1")->delimiter(',');
  };

  auto* witt = app.add_subcommand("witt", "Witt vector arithmetic");
  witt->add_option("op", o.witt_op, "add|sub|mul|neg|inv|frobenius|verschiebung|ghost")->required();
  add_ring_flags(witt);

  auto* phi = app.add_subcommand("phi", "Phi-conjugate a display by H");
  auto* classify = app.add_subcommand("classify", "Phi-orbit and sigma-orbit counts");
  add_ring_flags(classify);
  add_group_flags(classify);

  auto* slopes = app.add_subcommand("slopes", "Newton slopes of b or of a display");
  add_ring_flags(slopes);
  add_group_flags(slopes);
  slopes->add_option("--precision", o.precision, "Galois-ring precision for b")->check(CLI::PositiveNumber);
  slopes->add_flag("--adjoint", o.adjoint, "Adjoint slopes");

  auto* cartan = app.add_subcommand("cartan", "Cartan double-coset membership");
  add_ring_flags(cartan);
  add_group_flags(cartan);
  cartan->add_option("--precision", o.precision, "Galois-ring precision for b")->check(CLI::PositiveNumber);

  auto* adlv = app.add_subcommand("adlv", "Affine Deligne-Lusztig lattice count");
  add_ring_flags(adlv);
  add_group_flags(adlv);
  adlv->add_option("--b", o.b, "Base point u as JSON (b = u mu(p))");
  adlv->add_option("--m", o.m, "Extension degree")->check(CLI::PositiveNumber);
  adlv->add_option("--window", o.window, "Window N")->check(CLI::NonNegativeNumber);
  adlv->add_option("--precision", o.guard, "Guard digits for the working precision")->check(CLI::NonNegativeNumber);
  adlv->add_option("--table", o.table, "Plain-text count table over m = 1..M");

  auto* qisog = app.add_subcommand("qisog", "Search for a quasi-isogeny between two displays");

  auto* deform = app.add_subcommand("deform", "Square-zero deformations");
  deform->require_subcommand(1);
  auto* dsolve = deform->add_subcommand("solve", "Fixed-point solver for U' = h^-1 U Psi(h)");
  auto* dlifts = deform->add_subcommand("lifts", "Lift classes of U0 along A -> A/a");
  dlifts->add_flag("--oracle", o.oracle, "Also count classes by brute force");
  auto* duni = deform->add_subcommand("universal", "Universal deformation over k[t]/(t)^N");
  duni->add_option("--trunc", o.trunc, "Truncation N")->check(CLI::PositiveNumber);
  for (auto* s : {dsolve, dlifts, duni}) add_ring_flags(s);

  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  default_threads() = o.threads;

  try {
    if (witt->parsed()) return run_witt(o);
    if (phi->parsed()) return run_phi(o);
    if (classify->parsed()) return run_classify(o);
    if (slopes->parsed()) return run_slopes(o);
    if (cartan->parsed()) return run_cartan(o);
    if (adlv->parsed()) return run_adlv(o);
    if (qisog->parsed()) return run_qisog(o);
    if (dsolve->parsed()) return run_deform_solve(o);
    if (dlifts->parsed()) return run_deform_lifts(o);
    if (duni->parsed()) return run_deform_universal(o);
    if (selftest->parsed()) return run_selftest(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_resource_error(e.kind()) ? 3 : 2;
  } catch (const json::exception& e) {
    std::cerr << "error: MalformedInput: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
