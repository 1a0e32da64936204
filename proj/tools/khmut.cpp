#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "khmut/mutation.hpp"
#include "khmut/parallel.hpp"

using namespace khmut;

namespace {

enum ExitCode { ok = 0, input_error = 2, hypothesis_error = 3, verification_error = 4 };

void print_table(const HomologyTable& h, const std::string& format) {
  if (format == "json") std::cout << table_json(h) << '\n';
  else std::cout << format_table(h);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text << '\n';
}

int default_jobs_from_env() {
  if (const char* env = std::getenv("KHMUT_JOBS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw InputError("KHMUT_JOBS must be a positive integer");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"F_2 Khovanov and Lee homology with mutation certificates"};
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 0;
  app.add_option("--jobs,-j", jobs, "worker threads (default: KHMUT_JOBS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string file, format = "table";
  int t = 0;
  bool simplify = false;

  auto* kh = app.add_subcommand("kh", "homology through the cobordism bracket");
  kh->add_option("file", file, "closed diagram (.pd or .json)")->required();
  kh->add_option("--t", t, "0 for Khovanov, 1 for Lee")->check(CLI::IsMember({0, 1}));
  kh->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
  kh->add_flag("--simplify", simplify, "Gaussian elimination before taking homology");

  auto* oracle = app.add_subcommand("oracle", "homology through the state-sum oracle");
  oracle->add_option("file", file, "closed diagram (.pd or .json)")->required();
  oracle->add_option("--t", t)->check(CLI::IsMember({0, 1}));
  oracle->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));

  auto* jones = app.add_subcommand("jones", "unnormalized Jones polynomial");
  jones->add_option("file", file)->required();

  auto* bracket = app.add_subcommand("bracket", "dump the formal bracket as JSON");
  bracket->add_option("file", file)->required();
  bool deloop_flag = false;
  bracket->add_flag("--deloop", deloop_flag, "deloop (and straighten four-ended tangles)");

  std::string inner_path, outer_path, certificate_path;
  bool skip_self = false;
  auto* verify = app.add_subcommand("verify-mutation", "certify a crossed z-mutation");
  verify->add_option("--inner", inner_path, "four-ended disk tangle")->required();
  verify->add_option("--outer", outer_path, "crossed outer tangle")->required();
  verify->add_option("--certificate", certificate_path, "certificate JSON output");
  verify->add_flag("--skip-self-crossings", skip_self, "omit cancelling factors of phi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return input_error;
  }

  try {
    if (jobs == 0) jobs = default_jobs_from_env();
    if (jobs > 0) set_default_jobs(jobs);

    if (*kh) {
      print_table(khovanov_homology(load_diagram(file), t, simplify, jobs), format);
    } else if (*oracle) {
      print_table(oracle_state_sum(load_diagram(file), t), format);
    } else if (*jones) {
      std::cout << format_polynomial(jones_polynomial(load_diagram(file))) << '\n';
    } else if (*bracket) {
      Complex c = khovanov_bracket(load_diagram(file), {{}, {}, jobs}).complex;
      if (deloop_flag) {
        bool four_ended_disk = !c.objects.parts.empty() && !c.objects.parts[0].empty() &&
                               c.objects.parts[0][0].flat->region() == RegionKind::disk &&
                               c.objects.parts[0][0].flat->num_points() == kNumPoints;
        c = four_ended_disk ? enhanced_deloop(c) : deloop(c).complex;
      }
      std::cout << dump_complex(c) << '\n';
    } else if (*verify) {
      try {
        MutationCertificate cert =
            verify_mutation(load_diagram(inner_path), load_diagram(outer_path), {skip_self, jobs});
        if (!certificate_path.empty()) write_file(certificate_path, cert.to_json());
        for (const auto& s : cert.stages)
          std::cout << s.name << ' ' << (s.passed ? "pass" : "FAIL") << '\n';
        std::cout << "objects " << cert.objects << '\n';
        if (!cert.valid()) {
          std::cerr << "mutation certificate failed at " << cert.failed_stage() << '\n';
          return verification_error;
        }
      } catch (const std::exception& e) {
        if (!certificate_path.empty())
          write_file(certificate_path,
                     nlohmann::json{{"valid", false}, {"error", e.what()}}.dump(1));
        throw;
      }
    }
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << '\n';
    return hypothesis_error;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return verification_error;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return verification_error;
  }
  return ok;
}
