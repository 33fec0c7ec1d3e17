// Command-line front end: reads automaton JSON files, runs the analyses and
// writes JSON reports (stdout or --out) and CSV tables (--csv).
//
// Exit codes: 0 success, 1 a fixture check failed (examples), 2 invalid
// input or usage, 3 precision exhausted.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "measure_lab/measure_lab.hpp"

namespace ml = measure_lab;
using ml::Json;

namespace {

struct Common {
  double tol = 1e-8;
  int height = 3;
  std::size_t depth = 12;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string csv;
  std::string out;
  std::string minpoly;
};

struct Loaded {
  ml::AutomatonDocument doc;
  ml::PisotNumber beta;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ml::Error(ml::ErrorKind::SchemaError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ml::Error(ml::ErrorKind::SchemaError, "cannot write '" + path + "'");
  out << text;
}

// The base comes from --minpoly when given, otherwise from the document.
Loaded load(const std::string& path, const Common& c) {
  auto doc = ml::parse_automaton_document(read_file(path));
  std::vector<ml::BigInt> mp;
  if (!c.minpoly.empty())
    mp = ml::parse_integer_list(c.minpoly);
  else if (doc.minpoly)
    mp = *doc.minpoly;
  else
    throw ml::Error(ml::ErrorKind::SchemaError, "no base: the document has no \"beta\" and --minpoly is not given");
  auto beta = ml::make_pisot(mp);
  return {std::move(doc), std::move(beta)};
}

void emit(const Json& j, const Common& c) {
  std::string text = j.dump(2) + "\n";
  if (c.out.empty())
    std::cout << text;
  else
    write_file(c.out, text);
}

ml::Word parse_word(const std::string& text) {
  ml::Word w;
  for (const auto& v : ml::parse_integer_list(text)) {
    if (!v.fits_slong_p()) throw ml::Error(ml::ErrorKind::SchemaError, "label out of range: " + v.get_str());
    w.push_back(v.get_si());
  }
  return w;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ml::Error(ml::ErrorKind::SchemaError, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_lists(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items)
    for (double v : parse_doubles(s)) out.push_back(v);
  return out;
}

ml::BetaInt parse_z(const std::string& text, const ml::PisotNumber& p) {
  auto coords = ml::parse_integer_list(text);
  if (coords.empty()) throw ml::Error(ml::ErrorKind::SchemaError, "empty --z");
  // a short vector is padded with zeros: "--z 1" is the integer 1
  if (static_cast<int>(coords.size()) > p.degree())
    throw ml::Error(ml::ErrorKind::SchemaError, "--z has more coordinates than the degree of beta");
  coords.resize(p.degree(), 0);
  return ml::BetaInt(std::move(coords));
}

void write_csv(const Common& c, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(c.csv, std::ios::binary);
  if (!out) throw ml::Error(ml::ErrorKind::SchemaError, "cannot write '" + c.csv + "'");
  body(out);
}

// ---------------------------------------------------------------------------

int run_validate(const std::string& path, const Common& c) {
  auto doc = ml::parse_automaton_document(read_file(path));
  const auto& a = doc.automaton;
  Json j;
  j["file"] = path;
  j["states"] = a.num_states();
  j["edges"] = a.edges().size();
  j["alphabet"] = a.alphabet();
  auto prim = ml::primitivity_check(a);
  j["strongly_connected"] = prim.strongly_connected;
  j["period"] = prim.period;
  j["primitive"] = prim.primitive;
  Json counts = Json::array();
  for (std::size_t n = 1; n <= 8; ++n) counts.push_back(ml::count_words(a, n, false).get_str());
  j["word_counts"] = counts;
  if (auto amb = ml::ambiguous_word_counts(a)) j["ambiguous_words"] = *amb;
  if (!c.minpoly.empty() || doc.minpoly) {
    auto p = ml::make_pisot(c.minpoly.empty() ? *doc.minpoly : ml::parse_integer_list(c.minpoly));
    j["beta"] = Json{{"minpoly", p.minpoly_string()}, {"value", p.beta_double()}, {"degree", p.degree()}};
  }
  if (prim.primitive) j["lambda"] = ml::perron(a).lambda;
  j["valid"] = true;
  emit(j, c);
  return 0;
}

int run_zero_automaton(const std::string& minpoly, const std::string& alphabet, const std::string& trim,
                       std::size_t verify, const Common& c) {
  auto p = ml::make_pisot(ml::parse_integer_list(minpoly));
  auto za = ml::build_zero_automaton(p, parse_word(alphabet), ml::parse_trim(trim));
  auto doc = za.document;
  if (verify > 0) doc.annotations["verification"] = ml::to_json(ml::verify_zero_language(za.automaton(), p, verify, c.jobs));
  emit(ml::to_json(doc), c);
  return 0;
}

int run_classify(const std::string& path, const Common& c) {
  auto [doc, p] = load(path, c);
  auto v = ml::classify(doc.automaton, p, ml::ClassifyOptions{c.height, c.tol, c.jobs});
  emit(ml::to_json(v, doc.automaton), c);
  return 0;
}

int run_atoms(const std::string& path, const Common& c) {
  auto [doc, p] = load(path, c);
  const auto& a = doc.automaton;
  auto pd = ml::perron(a);
  auto fi = ml::finite_image_test(a, p);
  Json j;
  j["finite"] = fi.finite;
  if (fi.finite) {
    auto at = ml::atoms(a, p, pd, fi);
    j["count"] = at.size();
    j["mass_sum"] = ml::masses_sum(at);
    j["atoms"] = ml::atoms_json(at, a);
  } else {
    j["witness"] = ml::edge_json(a, *fi.witness);
  }
  j["lambda"] = pd.lambda;
  emit(j, c);
  return 0;
}

int run_cylinder(const std::string& path, const std::vector<std::string>& words, bool initial, const Common& c) {
  auto [doc, p] = load(path, c);
  const auto& a = doc.automaton;
  auto pd = ml::perron(a, std::min(c.tol, 1e-12));
  Json j = ml::to_json(pd, a);
  Json rows = Json::array();
  for (const auto& w : words) {
    auto word = parse_word(w);
    Json row{{"word", ml::word_json(word)}, {"measure", ml::cylinder_measure(pd, a, word)}};
    if (initial) row["measure_initial"] = ml::cylinder_measure_initial(pd, a, word);
    rows.push_back(row);
  }
  j["words"] = rows;
  emit(j, c);
  return 0;
}

int run_fourier(const std::string& path, const std::vector<std::string>& ts, bool initial, const Common& c) {
  auto [doc, p] = load(path, c);
  const auto& a = doc.automaton;
  auto pd = ml::perron(a);
  std::vector<ml::FourierRow> rows;
  Json arr = Json::array();
  for (double t : parse_double_lists(ts)) {
    auto f = initial ? ml::nu_hat_initial(a, p, pd, t, c.tol) : ml::nu_hat(a, p, pd, t, c.tol);
    rows.push_back({ml::csv_number(t), f});
    Json row = ml::to_json(f);
    row["t"] = t;
    arr.push_back(row);
  }
  if (!c.csv.empty()) write_csv(c, [&](std::ostream& o) { ml::write_fourier_csv(o, rows); });
  emit(Json{{"transform", initial ? "nu_hat_initial" : "nu_hat"}, {"tol", c.tol}, {"values", arr}}, c);
  return 0;
}

int run_limit(const std::string& path, const std::vector<std::string>& zs, const Common& c) {
  auto [doc, p] = load(path, c);
  const auto& a = doc.automaton;
  auto pd = ml::perron(a);
  std::vector<ml::FourierRow> rows;
  Json arr = Json::array();
  for (const auto& s : zs) {
    auto z = parse_z(s, p);
    auto f = ml::psi_hat(a, p, pd, z, c.tol);
    rows.push_back({ml::coords_string(z), f});
    Json row = ml::to_json(f);
    row["z"] = ml::coords_json(z);
    arr.push_back(row);
  }
  if (!c.csv.empty()) write_csv(c, [&](std::ostream& o) { ml::write_fourier_csv(o, rows); });
  emit(Json{{"transform", "psi_hat"}, {"tol", c.tol}, {"values", arr}}, c);
  return 0;
}

int run_scan(const std::string& path, const Common& c) {
  auto [doc, p] = load(path, c);
  const auto& a = doc.automaton;
  auto pd = ml::perron(a);
  auto scan = ml::rajchman_scan(a, p, pd, c.height, c.tol, c.jobs);
  if (!c.csv.empty()) {
    std::vector<ml::FourierRow> rows;
    for (const auto& e : scan.table) rows.push_back({ml::coords_string(e.z), e.psi});
    write_csv(c, [&](std::ostream& o) { ml::write_fourier_csv(o, rows); });
  }
  emit(ml::to_json(scan), c);
  return 0;
}

int run_cdf(const std::string& path, const std::vector<std::string>& points, const Common& c) {
  auto [doc, p] = load(path, c);
  const auto& a = doc.automaton;
  auto pd = ml::perron(a);
  auto bounds = ml::value_bounds(a, p);
  Json arr = Json::array();
  for (double x : parse_double_lists(points)) arr.push_back(ml::to_json(ml::cdf_bounds(a, p, pd, c.depth, x, bounds)));
  emit(Json{{"depth", c.depth}, {"value_bounds", ml::to_json(bounds, a)}, {"cdf", arr}}, c);
  return 0;
}

int run_cloud(const std::string& path, bool initial, std::size_t cap, const Common& c) {
  auto [doc, p] = load(path, c);
  const auto& a = doc.automaton;
  auto pd = ml::perron(a);
  auto cloud = initial ? ml::depth_cloud_initial(a, p, pd, c.depth, cap, c.jobs)
                       : ml::depth_cloud(a, p, pd, c.depth, cap, c.jobs);
  auto m = ml::cloud_moments(cloud);
  Json j{{"depth", c.depth},
         {"entries", cloud.entries.size()},
         {"total_mass", m.total_mass},
         {"mean", m.mean},
         {"variance", m.variance},
         {"value_bounds", ml::to_json(cloud.bounds, a)}};
  if (!c.csv.empty()) {
    write_csv(c, [&](std::ostream& o) { ml::write_cloud_csv(o, cloud); });
  } else {
    Json rows = Json::array();
    for (const auto& e : ml::sorted_by_value(cloud.entries))
      rows.push_back({{"word", ml::word_json(e.word)}, {"value", e.value}, {"mass", e.mass}, {"lo", e.lo}, {"hi", e.hi}});
    j["cloud"] = rows;
  }
  emit(j, c);
  return 0;
}

int run_examples(const std::string& dir, std::size_t samples, const Common& c) {
  std::filesystem::create_directories(dir);
  for (const auto& f : ml::fixtures::kAll)
    write_file((std::filesystem::path(dir) / f.file_name).string(), std::string(f.json));
  ml::CheckOptions o;
  o.tol = c.tol;
  o.height = c.height;
  o.depth = c.depth;
  o.seed = c.seed;
  o.jobs = c.jobs;
  o.samples = samples;
  auto reports = ml::run_fixture_checks(o);
  Json arr = Json::array();
  bool ok = true;
  for (const auto& r : reports) {
    arr.push_back(ml::to_json(r));
    ok = ok && r.passed();
  }
  emit(Json{{"directory", dir}, {"fixtures", arr}, {"all_checks_passed", ok}}, c);
  return ok ? 0 : 1;
}

void add_common(CLI::App* cmd, Common& c, bool analysis = true) {
  cmd->add_option("--out", c.out, "Write the JSON report to this file instead of stdout");
  cmd->add_option("--jobs", c.jobs, "Worker threads (results do not depend on it)")->capture_default_str();
  if (!analysis) return;
  cmd->add_option("--minpoly", c.minpoly, "Override the document's base: minimal polynomial, constant term first");
  cmd->add_option("--tol", c.tol, "Absolute error target")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pushforwards of Parry measures under beta-expansion value maps"};
  app.require_subcommand(1);
  Common c;
  std::string file, minpoly, alphabet = "-1,0,1", trim = "both", dir = "measure_lab_fixtures";
  std::vector<std::string> words, ts, zs, points;
  bool initial = false;
  std::size_t verify = 0, cap = ml::kDefaultCloudCap, samples = 100000;

  auto* validate = app.add_subcommand("validate", "Check an automaton file and print its structure");
  validate->add_option("file", file, "Automaton JSON")->required();
  add_common(validate, c, false);
  validate->add_option("--minpoly", c.minpoly, "Minimal polynomial of the base to validate as well");

  auto* zero = app.add_subcommand("zero-automaton", "Build the automaton of zero expansions");
  zero->add_option("--minpoly", minpoly, "Minimal polynomial, constant term first (e.g. -1,-1,1)")->required();
  zero->add_option("--alphabet", alphabet, "Digits, comma separated")->capture_default_str();
  zero->add_option("--trim", trim, "none, accessible or both")->capture_default_str();
  zero->add_option("--verify", verify, "Exhaustively verify the language up to this word length");
  add_common(zero, c, false);

  auto* classify = app.add_subcommand("classify", "Atomic / continuous verdict with evidence");
  classify->add_option("file", file, "Automaton JSON")->required();
  classify->add_option("--height", c.height, "Scan height H")->capture_default_str();
  add_common(classify, c);

  auto* atoms = app.add_subcommand("atoms", "Exact atom values and masses");
  atoms->add_option("file", file, "Automaton JSON")->required();
  add_common(atoms, c);

  auto* cylinder = app.add_subcommand("cylinder", "Perron data and cylinder measures");
  cylinder->add_option("file", file, "Automaton JSON")->required();
  cylinder->add_option("--word", words, "Word as comma-separated labels (repeatable)");
  cylinder->add_flag("--initial", initial, "Also report the measure from the initial states");
  add_common(cylinder, c);

  auto* fourier = app.add_subcommand("fourier", "Fourier transform of the pushforward at real t");
  fourier->add_option("file", file, "Automaton JSON")->required();
  fourier->add_option("--t", ts, "Frequencies, comma separated (repeatable)")->required();
  fourier->add_flag("--initial", initial, "Transform of the measure from the initial states");
  fourier->add_option("--csv", c.csv, "Also write t_or_z,re,im,abs,bound rows");
  add_common(fourier, c);

  auto* limit = app.add_subcommand("limit", "Limit coefficients psi_hat(z), z in Z[beta]");
  limit->add_option("file", file, "Automaton JSON")->required();
  limit->add_option("--z", zs, "Power-basis coordinates, comma separated (repeatable)")->required();
  limit->add_option("--csv", c.csv, "Also write t_or_z,re,im,abs,bound rows");
  add_common(limit, c);

  auto* scan = app.add_subcommand("scan", "Limit coefficients over the lattice box of height H");
  scan->add_option("file", file, "Automaton JSON")->required();
  scan->add_option("--height", c.height, "Scan height H")->capture_default_str();
  scan->add_option("--csv", c.csv, "Also write t_or_z,re,im,abs,bound rows");
  add_common(scan, c);

  auto* cdf = app.add_subcommand("cdf", "Certified CDF brackets");
  cdf->add_option("file", file, "Automaton JSON")->required();
  cdf->add_option("--depth", c.depth, "Word depth")->capture_default_str();
  cdf->add_option("--points", points, "Points x, comma separated (repeatable)")->required();
  add_common(cdf, c);

  auto* cloud = app.add_subcommand("cloud", "Depth-n point cloud");
  cloud->add_option("file", file, "Automaton JSON")->required();
  cloud->add_option("--depth", c.depth, "Word depth")->capture_default_str();
  cloud->add_flag("--initial", initial, "Cloud of the measure from the initial states");
  cloud->add_option("--cap", cap, "Maximum number of entries")->capture_default_str();
  cloud->add_option("--csv", c.csv, "Write word,value,mass,lo,hi rows instead of embedding them");
  add_common(cloud, c);

  auto* examples = app.add_subcommand("examples", "Write the bundled fixtures and run their checks");
  examples->add_option("--dir", dir, "Directory for the fixture files")->capture_default_str();
  examples->add_option("--height", c.height, "Scan height H")->capture_default_str();
  examples->add_option("--depth", c.depth, "Word depth for CDF brackets")->capture_default_str();
  examples->add_option("--seed", c.seed, "Monte-Carlo seed")->capture_default_str();
  examples->add_option("--samples", samples, "Monte-Carlo sample count")->capture_default_str();
  examples->add_option("--tol", c.tol, "Absolute error target")->capture_default_str();
  add_common(examples, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return run_validate(file, c);
    if (*zero) return run_zero_automaton(minpoly, alphabet, trim, verify, c);
    if (*classify) return run_classify(file, c);
    if (*atoms) return run_atoms(file, c);
    if (*cylinder) return run_cylinder(file, words, initial, c);
    if (*fourier) return run_fourier(file, ts, initial, c);
    if (*limit) return run_limit(file, zs, c);
    if (*scan) return run_scan(file, c);
    if (*cdf) return run_cdf(file, points, c);
    if (*cloud) return run_cloud(file, initial, cap, c);
    if (*examples) return run_examples(dir, samples, c);
    throw ml::Error(ml::ErrorKind::UnknownCommand, "no subcommand");
  } catch (const ml::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ml::ErrorKind::PrecisionExhausted ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
