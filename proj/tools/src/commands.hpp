#pragma once

#include <CLI11.hpp>

namespace clthres::cli {

void add_learn(CLI::App& app);
void add_generate(CLI::App& app);
void add_exponents(CLI::App& app);
void add_mc_error(CLI::App& app);
void add_kl_decay(CLI::App& app);
void add_loglik(CLI::App& app);
void add_cv_beta(CLI::App& app);

}  // namespace clthres::cli
