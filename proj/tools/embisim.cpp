// embisim: build and maintain k-bisimulation partitions of graphs on disk.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "embisim/cli/commands.hpp"
#include "embisim/core/types.hpp"

using namespace embisim;
using namespace embisim::cli;

int main(int argc, char** argv) {
  CLI::App app{"External-memory k-bisimulation: ingest, build, update, validate, stats, generate"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string scope = "global", backend = "external";
  bool no_early_stop = false, no_heuristic = false;
  app.add_option("--table-buffer", cfg.budget.table_buffer_bytes, "Sort/scan buffer size (e.g. 128MiB)")
      ->transform(CLI::AsSizeValue(false))
      ->envname("EMBISIM_TABLE_BUFFER");
  app.add_option("--store-buffer", cfg.budget.store_buffer_bytes, "Signature store buffer size")
      ->transform(CLI::AsSizeValue(false))
      ->envname("EMBISIM_STORE_BUFFER");
  app.add_option("--page-size", cfg.budget.page_size, "Page size in bytes")->envname("EMBISIM_PAGE_SIZE");
  app.add_option("--scope", scope, "Id numbering: global or per_iteration")
      ->check(CLI::IsMember({"global", "global_counter", "per_iteration", "per_iteration_counter"}))
      ->envname("EMBISIM_SCOPE");
  app.add_option("--backend", backend, "Signature store backend: external or memory")
      ->check(CLI::IsMember({"external", "external_sorted", "memory", "in_memory"}))
      ->envname("EMBISIM_BACKEND");
  app.add_flag("--no-early-stop", no_early_stop, "Run all k iterations")->envname("EMBISIM_NO_EARLY_STOP");
  app.add_flag("--no-heuristic", no_heuristic, "Never switch maintenance to a rebuild")
      ->envname("EMBISIM_NO_HEURISTIC");
  app.add_option("--theta", cfg.theta, "Queued-node fraction above which maintenance rebuilds")
      ->check(CLI::Range(0.0, 1.0))
      ->envname("EMBISIM_THETA");
  app.add_option("--scratch", cfg.scratch, "Directory for temporary files")->envname("EMBISIM_SCRATCH");
  app.add_option("--stats-out", cfg.stats_out, "Write the stats CSV here instead of stdout")
      ->envname("EMBISIM_STATS_OUT");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load text node/edge files into a graph directory");
  std::string nodes_file, edges_file, dir;
  bool force = false;
  ingest->add_option("--nodes", nodes_file, "nId<TAB>nLabel lines")->required()->check(CLI::ExistingFile);
  ingest->add_option("--edges", edges_file, "sId<TAB>eLabel<TAB>tId lines")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", dir, "Graph directory to create")->required();
  ingest->add_flag("--force", force, "Replace an existing graph directory");

  // build
  auto* build = app.add_subcommand("build", "Compute partitions for levels 0..k");
  std::uint32_t k = 0;
  bool overwrite = false;
  build->add_option("dir", dir, "Graph directory")->required();
  build->add_option("-k", k, "Bisimulation depth")->required();
  build->add_flag("--overwrite", overwrite, "Replace an existing build");

  // update
  auto* update = app.add_subcommand("update", "Apply a graph change and maintain the partitions");
  update->require_subcommand(1);
  std::string input;
  std::uint32_t new_k = 0;
  struct Kind {
    const char* name;
    UpdateKind kind;
    const char* help;
  };
  const Kind kinds[] = {{"add-nodes", UpdateKind::add_nodes, "Add isolated nodes (nodes file)"},
                        {"add-edges", UpdateKind::add_edges, "Add edges (edges file)"},
                        {"del-edges", UpdateKind::del_edges, "Delete edges (edges file)"},
                        {"del-nodes", UpdateKind::del_nodes, "Delete nodes with their edges (one id per line)"}};
  std::optional<UpdateKind> kind;
  for (const auto& kd : kinds) {
    auto* sub = update->add_subcommand(kd.name, kd.help);
    sub->add_option("dir", dir, "Graph directory")->required();
    sub->add_option("file", input, "Input file")->required()->check(CLI::ExistingFile);
    sub->callback([&kind, kd] { kind = kd.kind; });
  }
  auto* set_k = update->add_subcommand("set-k", "Change the bisimulation depth");
  set_k->add_option("dir", dir, "Graph directory")->required();
  set_k->add_option("k", new_k, "New depth")->required();
  set_k->callback([&kind] { kind = UpdateKind::set_k; });

  // validate
  auto* validate = app.add_subcommand("validate", "Check stored partitions against in-memory oracles");
  std::optional<std::uint32_t> validate_k;
  validate->add_option("dir", dir, "Graph directory")->required();
  validate->add_option("-k", validate_k, "Highest level to check (default: stored k)");

  // stats
  auto* stats = app.add_subcommand("stats", "Summarize a built graph directory");
  stats->add_option("dir", dir, "Graph directory")->required();

  // generate
  auto* generate = app.add_subcommand("generate", "Write a synthetic graph as text files");
  GenerateSpec spec;
  std::string prefix;
  generate->add_option("kind", spec.kind, "dbest, dworst or random")
      ->required()
      ->check(CLI::IsMember({"dbest", "dworst", "random"}));
  generate->add_option("--out", prefix, "Output prefix; writes <prefix>.nodes, .edges, .insert")->required();
  generate->add_option("--arity", spec.arity, "dbest: tree arity");
  generate->add_option("--height", spec.height, "dbest: levels of nodes");
  generate->add_option("-n", spec.n, "dworst: complete graph size; random: node count");
  generate->add_option("-m", spec.m, "random: edge count");
  generate->add_option("--node-labels", spec.node_labels, "random: node label count");
  generate->add_option("--edge-labels", spec.edge_labels, "random: edge label count");
  generate->add_option("--seed", spec.seed, "random: SplitMix64 seed");
  generate->add_option("--max-elements", spec.max_elements, "Refuse graphs with more nodes plus edges");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    cfg.scope = sigstore::parse_scope(scope);
    cfg.backend = sigstore::parse_backend(backend);
    cfg.early_stop = !no_early_stop;
    cfg.heuristic = !no_heuristic;
    cfg.budget.validate();
    if (*ingest) {
      const auto s = cmd_ingest(nodes_file, edges_file, dir, force, cfg, std::cerr);
      std::cout << "nodes: " << s.nodes << "\nedges: " << s.edges << "\nlabels: " << s.labels
                << "\nduplicate_edges_removed: " << s.duplicates_removed << "\n";
      return kExitOk;
    }
    if (*build) return cmd_build(dir, k, overwrite, cfg, std::cout, std::cerr);
    if (*update) return cmd_update(dir, *kind, input, new_k, cfg, std::cout, std::cerr);
    if (*validate) return cmd_validate(dir, validate_k, cfg, std::cout);
    if (*stats) return cmd_stats(dir, cfg, std::cout);
    if (*generate) return cmd_generate(spec, prefix, std::cout);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed metadata: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitIo;
  }
  return kExitInput;
}
