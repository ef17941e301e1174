#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "polexp/cli.hpp"

int main(int argc, char** argv) {
  polexp::JobConfig c;
  CLI::App app{"Growth of automorphisms of free products of free abelian groups"};
  app.require_subcommand(1);
  std::string format = "text";
  const std::map<std::string, polexp::OutputFormat> formats = {
      {"text", polexp::OutputFormat::Text}, {"csv", polexp::OutputFormat::Csv}, {"json", polexp::OutputFormat::Json}};

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--n", c.n_max, "iterations n_max")->capture_default_str();
    sub->add_option("--budget", c.budget, "syllable budget per word")->capture_default_str();
    sub->add_option("--format", format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
    sub->add_option("--tol-lambda", c.tol_lambda, "relative lambda tolerance")->capture_default_str();
    sub->add_flag("--oracle", c.oracle, "compare against the iteration oracle");
  };
  auto* element = app.add_subcommand("element", "|phi^n(g)| and its growth type");
  auto* klass = app.add_subcommand("class", "||phi^n(g)|| and its growth type");
  auto* palangre = app.add_subcommand("palangre", "|L_n(phi^k,g) R_n(phi^k,h)| with the torus cross-check");
  auto* abelian = app.add_subcommand("abelian", "exact growth type of A^n v");
  auto* ct = app.add_subcommand("ct", "growth table of a CT declaration");
  auto* spectrum = app.add_subcommand("spectrum", "enumerated spectrum and combination bound");
  auto* sum = app.add_subcommand("sum", "growth of sum (n-k)^d l1^k l2^(n-k)");
  for (auto* sub : {element, klass, palangre, abelian, ct, spectrum, sum}) common(sub);
  for (auto* sub : {element, klass, palangre, spectrum}) {
    sub->add_option("--aut", c.aut_path, "automorphism file")->check(CLI::ExistingFile);
  }
  for (auto* sub : {element, klass, palangre}) sub->add_option("--word", c.word, "element g");
  palangre->add_option("--hword", c.h, "element h");
  palangre->add_option("--k", c.k, "power of phi")->capture_default_str();
  abelian->add_option("--matrix", c.matrix, "matrix, e.g. [[1,1],[0,1]]");
  abelian->add_option("--vector", c.vector, "vector, e.g. [0,1]");
  for (auto* sub : {ct, spectrum}) sub->add_option("--ct", c.ct_path, "CT declaration file")->check(CLI::ExistingFile);
  spectrum->add_option("--max-length", c.max_length, "longest class representative")->capture_default_str();
  spectrum->add_option("--threads", c.threads, "worker threads, 0 for all cores");
  sum->add_option("--d", c.d, "degree d")->required();
  sum->add_option("--l1", c.l1, "lambda1")->required();
  sum->add_option("--l2", c.l2, "lambda2")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : polexp::kExitValidation;
  }
  c.command = app.get_subcommands().front()->get_name();
  c.format = formats.at(format);
  return polexp::run(c, std::cout, std::cerr);
}
