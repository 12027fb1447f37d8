// eqlevi: splitting, equivariant Levi reductions and Levi-quotient actions
// for vector bundles on P^1.  Reports are canonical JSON on stdout.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <iterator>

#include "eqlevi/cli/commands.hpp"

using namespace eqlevi;
using cli::json;

namespace {

std::string slurp(const std::string& path) {
  if (path.empty() || path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  return cli::read_file(path);
}

json read_json(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw InvalidInput("malformed JSON in " + (path.empty() ? std::string("stdin") : path) + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant Levi reductions of vector bundles on P^1"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  int conductor_max = 24, coeff_bound = 5;
  unsigned jobs = 0;
  std::string out_path;
  CLI::Option* o_seed = app.add_option("--seed", seed, "seed for the randomized searches")->capture_default_str();
  CLI::Option* o_cond =
      app.add_option("--conductor-max", conductor_max, "largest cyclotomic conductor searched")->capture_default_str();
  CLI::Option* o_coeff =
      app.add_option("--coeff-bound", coeff_bound, "coefficient bound for random algebra elements")->capture_default_str();
  app.add_option("-o,--output", out_path, "write the report to a file instead of stdout");

  std::string inst_path, rep_a, rep_b, report_path, corpus_dir;
  auto* split = app.add_subcommand("split", "Birkhoff-Grothendieck splitting with witness");
  split->add_option("instance", inst_path, "instance JSON (default stdin)");
  auto* aut = app.add_subcommand("aut", "endomorphism algebra, Levi quotient, fixed subalgebra");
  aut->add_option("instance", inst_path, "instance JSON (default stdin)");
  auto* reduce = app.add_subcommand("reduce", "canonical equivariant reduction with certificates");
  reduce->add_option("instance", inst_path, "instance JSON (default stdin)");
  auto* compare = app.add_subcommand("compare", "intertwiner between two reductions");
  compare->add_option("instance", inst_path, "instance JSON")->required();
  compare->add_option("first", rep_a, "first reduce report")->required();
  compare->add_option("second", rep_b, "second reduce report")->required();
  auto* quotient = app.add_subcommand("quotient", "action on the Levi quotient");
  quotient->add_option("instance", inst_path, "instance JSON (default stdin)");
  auto* verify = app.add_subcommand("verify", "replay the certificates of a report");
  verify->add_option("report", report_path, "report JSON (default stdin)");
  auto* corpus = app.add_subcommand("corpus", "batch runs");
  corpus->require_subcommand(1);
  corpus->fallthrough();
  auto* run = corpus->add_subcommand("run", "run every instance of a directory");
  run->add_option("dir", corpus_dir, "corpus directory")->required();
  run->add_option("-j,--jobs", jobs, "worker threads (default: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::BadInput;
  }

  cli::Overrides ov;
  if (o_seed->count()) ov.seed = seed;
  if (o_cond->count()) ov.conductor_max = conductor_max;
  if (o_coeff->count()) ov.coeff_bound = coeff_bound;

  const auto load = [&] {
    io::Instance x = io::instance_from(read_json(inst_path));
    ov.apply(x);
    if (x.options.conductor_max < 1 || x.options.coeff_bound < 1) throw InvalidInput("bounds must be positive");
    return x;
  };

  try {
    cli::Result r;
    if (*split) r = cli::cmd_split(load());
    else if (*aut) r = cli::cmd_aut(load());
    else if (*reduce) r = cli::cmd_reduce(load());
    else if (*compare) r = cli::cmd_compare(load(), read_json(rep_a), read_json(rep_b));
    else if (*quotient) r = cli::cmd_quotient(load());
    else if (*verify) r = cli::cmd_verify(read_json(report_path));
    else r = cli::cmd_corpus_run(corpus_dir, jobs, ov);

    const std::string text = r.report.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path);
      if (!(f << text)) throw InvalidInput("cannot write " + out_path);
    }
    return r.exit;
  } catch (const std::exception& e) {
    const int rc = cli::exit_code_for(e);
    std::cerr << "eqlevi: " << (rc == cli::BadInput ? "invalid input: " : "internal error: ") << e.what() << "\n";
    return rc;
  }
}
