#include <exception>
#include <iostream>

#include "clthres/harness/report.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Chow-Liu forest learning with mutual-information thresholding"};
  app.set_version_flag("--version", clthres::harness::version());
  app.require_subcommand(1);
  clthres::cli::add_learn(app);
  clthres::cli::add_generate(app);
  clthres::cli::add_exponents(app);
  clthres::cli::add_mc_error(app);
  clthres::cli::add_kl_decay(app);
  clthres::cli::add_loglik(app);
  clthres::cli::add_cv_beta(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
