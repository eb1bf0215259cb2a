#include "mmfem/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
  CLI::App app{"Multimesh finite element studies"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool dump_rules = false, dump_matrix = false, dump_multimesh = false;

  for (const char* name : {"convergence", "thin", "condscale", "electro"})
  {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "study configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_flag("--dump-rules", dump_rules, "write cut-cell and interface rules as x,y,w CSV");
    sub->add_flag("--dump-matrix", dump_matrix, "write assembled matrices as row col value");
    sub->add_flag("--dump-multimesh", dump_multimesh, "write multimesh diagnostics JSON");
  }

  CLI11_PARSE(app, argc, argv);

  try
  {
    const std::string study = app.get_subcommands().front()->get_name();
    std::ifstream in(config_path);
    const nlohmann::json j = nlohmann::json::parse(in);
    mmfem::StudyConfig cfg = mmfem::config_from_json(j, mmfem::study_kind_from_string(study));
    cfg.kind = mmfem::study_kind_from_string(study);
    cfg.out_dir = out_dir;
    cfg.dump_rules = dump_rules;
    cfg.dump_matrix = dump_matrix;
    cfg.dump_multimesh = dump_multimesh;
    mmfem::run_study(cfg);
  }
  catch (const std::exception& e)
  {
    std::cerr << "mmfem: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
