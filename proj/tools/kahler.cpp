// kahler: command-line front end for the Kähler-tensor library.
//
//   kahler classify   --input job.json [--format json|csv|text] [--tol X]
//   kahler decompose  --input job.json
//   kahler dims       [--input job.json] --format csv
//   kahler invariants --input job.json
//   kahler realize    --input job.json [--h X] [--seed N]
//   kahler verify     [--input job.json] [--seed N]
//
// Exit codes: 0 success, 1 schema or usage error, 2 precondition failure,
// 3 property-suite failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <locale>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kahler/geometry.hpp"
#include "kahler/hspace.hpp"
#include "kahler/invariants.hpp"
#include "kahler/io.hpp"
#include "kahler/realize.hpp"
#include "kahler/verify.hpp"

namespace {

using kahler::io::json;
using kahler::io::SchemaError;

enum ExitCode { kOk = 0, kUsage = 1, kPrecondition = 2, kSuiteFailure = 3 };

struct Flags {
  std::string input;
  std::string output;
  std::string format = "json";
  std::optional<double> tol;
  std::optional<double> h;
  std::optional<std::uint64_t> seed;
};

struct Job {
  json doc;
  json options;
  double tol = kahler::kDefaultTol;
  double h = kahler::kDefaultStep;
  std::uint64_t seed = 0;
};

Job read_job(const Flags& f) {
  std::string text;
  if (f.input.empty() || f.input == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(f.input);
    if (!in) throw SchemaError("cannot open input file '" + f.input + "'");
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  Job job;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    job.doc = json::object();
  } else {
    try {
      job.doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
  }
  if (!job.doc.is_object()) throw SchemaError("job document must be a JSON object");
  job.options = job.doc.value("options", json::object());
  if (!job.options.is_object()) throw SchemaError("options must be an object");
  job.tol = f.tol.value_or(job.options.value("tol", kahler::kDefaultTol));
  job.h = f.h.value_or(job.options.value("h", kahler::kDefaultStep));
  job.seed = f.seed.value_or(job.options.value("seed", std::uint64_t{0}));
  if (!(job.tol > 0.0)) throw SchemaError("tol must be positive");
  if (!(job.h > 0.0)) throw SchemaError("h must be positive");
  return job;
}

kahler::HermitianSpace job_space(const Job& job) {
  return kahler::io::space_from_json(kahler::io::detail::require(job.doc, "space", "job"));
}

// The tensor to analyse: given explicitly, or computed by finite differences
// from a chart at options.point (default: the origin).
struct Subject {
  kahler::HermitianSpace space;
  kahler::Tensor3 tensor;
  std::string source;
};

Subject job_subject(const Job& job) {
  const kahler::HermitianSpace s = job_space(job);
  if (job.doc.contains("tensor"))
    return {s, kahler::io::tensor_from_json(job.doc.at("tensor"), s.dim()), "tensor"};
  if (job.doc.contains("chart")) {
    const kahler::Chart c = kahler::io::chart_from_json(job.doc.at("chart"), s);
    kahler::Vector p = kahler::Vector::Zero(c.dim());
    if (job.options.contains("point")) p = kahler::io::covector_from_json(job.options.at("point"), c.dim());
    return {c.space, kahler::nabla_omega(c, p, job.h), "chart:" + c.family};
  }
  throw SchemaError("job needs a 'tensor' or a 'chart'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw SchemaError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void emit_json(Output& out, const json& j) { out.stream() << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------

int cmd_classify(const Flags& f, bool with_components) {
  const Job job = read_job(f);
  const Subject subj = job_subject(job);
  const kahler::DecompositionReport rep = kahler::decompose(subj.tensor, subj.space, job.tol);
  Output out(f.output);
  auto& os = out.stream();
  if (f.format == "json") {
    json j = kahler::io::report_to_json(rep, subj.space, with_components);
    j["source"] = subj.source;
    emit_json(out, j);
  } else if (f.format == "csv") {
    if (with_components) {
      os << "component,i,j,k,value\n";
      for (int c = 0; c < 4; ++c) {
        const auto& t = rep.components[static_cast<std::size_t>(c)];
        const int m = t.dim();
        for (int i = 0; i < m; ++i)
          for (int jj = 0; jj < m; ++jj)
            for (int k = 0; k < m; ++k)
              if (t(i, jj, k) != 0.0)
                os << "W" << c + 1 << "," << i + 1 << "," << jj + 1 << "," << k + 1 << "," << fmt(t(i, jj, k))
                   << "\n";
      }
    } else {
      os << "label,subset,norm_W1,norm_W2,norm_W3,norm_W4,norm_tau1,residual_membership,residual_reconstruction,"
            "tol\n";
      os << '"' << rep.label.display() << "\"," << '"' << rep.label.subset_string() << '"';
      for (double n : rep.norms) os << "," << fmt(n);
      os << "," << fmt(rep.tau1.norm()) << "," << fmt(rep.residual_membership) << ","
         << fmt(rep.residual_reconstruction) << "," << fmt(rep.tol) << "\n";
    }
  } else {
    os << "space:          " << subj.space.describe() << "\n";
    os << "label:          " << rep.label.display() << "\n";
    os << "components:     " << rep.label.subset_string() << "\n";
    for (int i = 0; i < 4; ++i) os << "|W" << i + 1 << "|:           " << fmt(rep.norms[static_cast<std::size_t>(i)]) << "\n";
    os << "|tau1|:         " << fmt(rep.tau1.norm()) << "\n";
    os << "membership:     " << fmt(rep.residual_membership) << "\n";
    os << "reconstruction: " << fmt(rep.residual_reconstruction) << "\n";
    os << "tolerance:      " << fmt(rep.tol) << "\n";
  }
  return kOk;
}

std::vector<kahler::HermitianSpace> job_spaces(const Job& job) {
  std::vector<kahler::HermitianSpace> spaces;
  if (job.doc.contains("spaces")) {
    for (const auto& s : job.doc.at("spaces")) spaces.push_back(kahler::io::space_from_json(s));
  } else if (job.doc.contains("space")) {
    spaces.push_back(job_space(job));
  } else {
    spaces = kahler::verify::default_grid();
  }
  return spaces;
}

int cmd_dims(const Flags& f) {
  const Job job = read_job(f);
  Output out(f.output);
  auto& os = out.stream();
  json rows = json::array();
  if (f.format == "csv") os << "m,p,q,kind,dimH,dimW1,dimW2,dimW3,dimW4,dimU3,sum_check\n";
  for (const auto& s : job_spaces(job)) {
    const kahler::ModuleDimensions d = kahler::module_dimensions(s);
    if (f.format == "csv") {
      os << s.dim() << "," << s.p() << "," << s.q() << "," << kahler::to_string(s.kind()) << "," << d.hspace << ","
         << d.w1 << "," << d.w2 << "," << d.w3 << "," << d.w4 << "," << d.u3 << "," << d.sum() << "\n";
    } else if (f.format == "text") {
      os << std::left << std::setw(40) << s.describe() << " H=" << d.hspace << " W1=" << d.w1 << " W2=" << d.w2
         << " W3=" << d.w3 << " W4=" << d.w4 << " U3=" << d.u3 << " sum=" << d.sum() << "\n";
    } else {
      rows.push_back({{"space", kahler::io::space_to_json(s)},
                      {"dimH", d.hspace},
                      {"dimW1", d.w1},
                      {"dimW2", d.w2},
                      {"dimW3", d.w3},
                      {"dimW4", d.w4},
                      {"dimU3", d.u3},
                      {"sum_check", d.sum()}});
    }
  }
  if (f.format == "json") emit_json(out, rows);
  return kOk;
}

int cmd_invariants(const Flags& f) {
  const Job job = read_job(f);
  const Subject subj = job_subject(job);
  const kahler::InvariantVector v = kahler::invariants(subj.tensor, subj.space, job.tol);
  json j{{"space", kahler::io::space_to_json(subj.space)}, {"psi", v.psi}};
  if (job.options.contains("strings")) {
    json extra = json::object();
    for (const auto& s : job.options.at("strings")) {
      const std::string spec = s.get<std::string>();
      extra[spec] = kahler::string_invariant(spec, subj.tensor, subj.space);
    }
    j["strings"] = extra;
  }
  if (job.options.contains("independence_samples"))
    j["independence_rank"] =
        kahler::invariant_independence_rank(subj.space, job.options.at("independence_samples").get<int>(), job.seed);
  Output out(f.output);
  auto& os = out.stream();
  if (f.format == "json") {
    emit_json(out, j);
  } else if (f.format == "csv") {
    os << "psi1,psi2,psi3,psi4\n" << fmt(v.psi[0]) << "," << fmt(v.psi[1]) << "," << fmt(v.psi[2]) << ","
       << fmt(v.psi[3]) << "\n";
  } else {
    for (int i = 0; i < 4; ++i) os << "psi" << i + 1 << " = " << fmt(v.psi[static_cast<std::size_t>(i)]) << "\n";
    if (j.contains("independence_rank")) os << "independence rank = " << j["independence_rank"] << "\n";
  }
  return kOk;
}

int cmd_realize(const Flags& f) {
  const Job job = read_job(f);
  const kahler::HermitianSpace s = job_space(job);
  const std::string mode_name = job.options.value("mode", std::string("vary_j"));
  kahler::RealizeMode mode;
  if (mode_name == "vary_j") {
    mode = kahler::RealizeMode::VaryJ;
  } else if (mode_name == "vary_metric") {
    mode = kahler::RealizeMode::VaryMetric;
  } else {
    throw SchemaError("options.mode must be \"vary_j\" or \"vary_metric\"");
  }
  kahler::Tensor3 target(s.dim());
  if (job.doc.contains("tensor")) {
    target = kahler::io::tensor_from_json(job.doc.at("tensor"), s.dim());
  } else if (job.options.value("random_target", false)) {
    std::mt19937_64 rng(job.seed);
    target = kahler::random_hspace_element(s, rng);
    if (mode == kahler::RealizeMode::VaryMetric) target = kahler::detail::pi3_raw(target, s);
  } else {
    throw SchemaError("realize needs a 'tensor' or options.random_target = true");
  }
  const double radius = job.options.value("bump_radius", 1.0);
  const kahler::PointwiseRealization r = kahler::realize_pointwise(target, s, mode, job.h, radius);

  json j{{"space", kahler::io::space_to_json(s)},
         {"mode", kahler::to_string(mode)},
         {"error", r.error},
         {"threshold", r.threshold},
         {"h", job.h},
         {"solver_residual", r.solution.residual},
         {"solver_rank", r.solution.rank},
         {"chart", {{"family", r.chart.family}, {"params", {{"theta", kahler::io::endo_to_json(r.solution.theta)},
                                                            {"bump_radius", radius}}}}},
         {"target_label", kahler::io::label_to_json(r.solution.target_component_check.label)},
         {"achieved", kahler::io::tensor_to_json(r.achieved)}};
  if (r.selection)
    j["xi_tilde_variant"] = {{"selected", kahler::to_string(r.selection->variant)},
                             {"error_sign_corrected", r.selection->error_sign_corrected},
                             {"error_as_printed", r.selection->error_as_printed}};
  Output out(f.output);
  auto& os = out.stream();
  if (f.format == "json") {
    emit_json(out, j);
  } else if (f.format == "csv") {
    os << "mode,error,threshold,solver_residual,solver_rank,variant\n"
       << kahler::to_string(mode) << "," << fmt(r.error) << "," << fmt(r.threshold) << ","
       << fmt(r.solution.residual) << "," << r.solution.rank << ","
       << (r.selection ? kahler::to_string(r.selection->variant) : "") << "\n";
  } else {
    os << "space:     " << s.describe() << "\nmode:      " << kahler::to_string(mode) << "\nerror:     " << fmt(r.error)
       << "\nthreshold: " << fmt(r.threshold) << "\nresidual:  " << fmt(r.solution.residual) << "\n";
    if (r.selection) os << "variant:   " << kahler::to_string(r.selection->variant) << "\n";
  }
  return kOk;
}

int cmd_verify(const Flags& f) {
  const Job job = read_job(f);
  kahler::verify::Options o;
  o.seed = job.seed;
  o.h = job.h;
  o.n_samples = job.options.value("n_samples", o.n_samples);
  o.geometry = job.options.value("geometry", o.geometry);
  o.end_to_end = job.options.value("end_to_end", o.end_to_end);
  if (o.n_samples < 1) throw SchemaError("options.n_samples must be positive");
  const kahler::verify::SuiteResult res = kahler::verify::run(job_spaces(job), o);

  Output out(f.output);
  auto& os = out.stream();
  if (f.format == "json") {
    json rows = json::array();
    for (const auto& r : res.results) {
      json row{{"suite", r.suite},         {"property", r.property}, {"space", r.space},
               {"threshold", r.threshold}, {"pass", r.pass}};
      row["measured"] = std::isfinite(r.measured) ? json(r.measured) : json(nullptr);
      if (!r.note.empty()) row["note"] = r.note;
      rows.push_back(row);
    }
    emit_json(out, {{"results", rows}, {"failures", res.failures()}, {"total", res.results.size()}});
  } else if (f.format == "csv") {
    os << "suite,property,space,measured,threshold,pass\n";
    for (const auto& r : res.results)
      os << r.suite << ",\"" << r.property << "\",\"" << r.space << "\"," << fmt(r.measured) << ","
         << fmt(r.threshold) << "," << (r.pass ? "pass" : "fail") << "\n";
  } else {
    for (const auto& r : res.results)
      os << (r.pass ? "PASS " : "FAIL ") << r.space << " | " << r.suite << " | " << r.property << " | measured "
         << fmt(r.measured) << " (threshold " << fmt(r.threshold) << ")" << (r.note.empty() ? "" : " " + r.note)
         << "\n";
    os << res.failures() << " of " << res.results.size() << " properties failed\n";
  }
  return res.all_passed() ? kOk : kSuiteFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algebra and finite-difference geometry of covariant-derivative Kähler tensors"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--input", flags.input, "job file (JSON); stdin when omitted");
  app.add_option("--output", flags.output, "output file; stdout when omitted");
  app.add_option("--format", flags.format, "output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--tol", flags.tol, "relative tolerance for membership and presence tests");
  app.add_option("--h", flags.h, "finite-difference step");
  app.add_option("--seed", flags.seed, "random seed");
  app.fallthrough();

  auto* classify = app.add_subcommand("classify", "decompose a tensor and report its class");
  auto* decompose = app.add_subcommand("decompose", "decompose a tensor and emit its components");
  auto* dims = app.add_subcommand("dims", "dimension table of the modules");
  auto* invariants = app.add_subcommand("invariants", "quadratic invariants psi1..psi4");
  auto* realize = app.add_subcommand("realize", "build a chart realizing a tensor at the origin");
  auto* verify = app.add_subcommand("verify", "run the property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (classify->parsed()) return cmd_classify(flags, false);
    if (decompose->parsed()) return cmd_classify(flags, true);
    if (dims->parsed()) return cmd_dims(flags);
    if (invariants->parsed()) return cmd_invariants(flags);
    if (realize->parsed()) return cmd_realize(flags);
    if (verify->parsed()) return cmd_verify(flags);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kUsage;
  } catch (const kahler::Error& e) {
    std::cerr << "precondition failed: " << e.what() << " (residual " << fmt(e.residual()) << ")\n";
    return kPrecondition;
  }
  return kUsage;
}
